use std::fmt::Write;

use crate::sweep::{Algorithm, SweepReport};

const CLASSICAL: &str = "#1f77b4";
const VQE: &str = "#2ca02c";
const QAOA: &str = "#ff7f0e";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    pub chart_width: f64,
    pub chart_height: f64,
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            chart_width: 960.0,
            chart_height: 260.0,
            margin: 48.0,
        }
    }
}

fn color(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Vqe => VQE,
        Algorithm::Qaoa => QAOA,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps values onto a vertical pixel range that always includes zero.
struct Scale {
    lo: f64,
    hi: f64,
    top: f64,
    bottom: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, top: f64, bottom: f64) -> Self {
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite())
            .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi - lo < 1e-300 {
            lo -= 1.0;
            hi += 1.0;
        }
        Self { lo, hi, top, bottom }
    }

    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.lo) / (self.hi - self.lo) * (self.bottom - self.top)
    }
}

struct Bar<'a> {
    class: &'a str,
    fill: &'a str,
    value: f64,
    title: String,
}

fn bar_chart(
    out: &mut String,
    y0: f64,
    title: &str,
    class: &str,
    groups: &[(String, Vec<Bar<'_>>)],
    opts: &SvgOptions,
) {
    let top = y0 + opts.margin * 0.6;
    let bottom = y0 + opts.chart_height - opts.margin * 0.6;
    let left = opts.margin;
    let right = opts.chart_width - opts.margin * 0.4;
    let scale = Scale::new(
        groups.iter().flat_map(|(_, bars)| bars.iter().map(|b| b.value)),
        top,
        bottom,
    );
    let zero = scale.y(0.0);

    let _ = writeln!(out, r#"<g class="{class}">"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" font-weight="bold">{}</text>"#,
        left,
        y0 + 18.0,
        escape(title)
    );
    for v in [scale.lo, 0.0, scale.hi] {
        let y = scale.y(v);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            left - 4.0,
            y + 3.0,
            format_tick(v)
        );
    }
    let _ = writeln!(
        out,
        r##"<line x1="{left:.2}" y1="{zero:.2}" x2="{right:.2}" y2="{zero:.2}" stroke="#444" stroke-width="1"/>"##
    );

    let slot = (right - left) / groups.len().max(1) as f64;
    for (g, (name, bars)) in groups.iter().enumerate() {
        let gx = left + g as f64 * slot;
        let inner = slot * 0.8;
        let w = inner / bars.len().max(1) as f64;
        for (k, b) in bars.iter().enumerate() {
            let x = gx + slot * 0.1 + k as f64 * w;
            let y = scale.y(b.value);
            let (ry, h) = if y < zero { (y, zero - y) } else { (zero, y - zero) };
            let _ = writeln!(
                out,
                r#"<rect class="bar {}" x="{x:.2}" y="{ry:.2}" width="{w:.2}" height="{h:.2}" fill="{}"><title>{}</title></rect>"#,
                b.class,
                b.fill,
                escape(&b.title)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            gx + slot / 2.0,
            bottom + 16.0,
            escape(name)
        );
    }
    let _ = writeln!(out, "</g>");
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// One grouped energy chart per risk (classical bar, then a VQE and a QAOA
/// bar per configuration) followed by a match-rate chart, stacked in one
/// document.
pub fn render_svg(report: &SweepReport, opts: &SvgOptions) -> String {
    let risks = report.risks();
    let labels = report.labels();
    let algorithms = report.algorithms();
    let charts = risks.len() + 1;
    let height = opts.chart_height * charts as f64 + 30.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" viewBox="0 0 {:.0} {height:.0}" font-family="sans-serif">"#,
        opts.chart_width, opts.chart_width
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    legend(&mut out, opts);

    for (c, &risk) in risks.iter().enumerate() {
        let mut groups = Vec::new();
        if let Some(exact) = report.exact_at(risk) {
            groups.push((
                "exact".to_string(),
                vec![Bar {
                    class: "classical",
                    fill: CLASSICAL,
                    value: exact.energy,
                    title: format!("exact {} {:e}", exact.bits, exact.energy),
                }],
            ));
        }
        for label in &labels {
            let bars = algorithms
                .iter()
                .filter_map(|&a| report.record(risk, a, label))
                .map(|r| Bar {
                    class: r.algorithm.name(),
                    fill: color(r.algorithm),
                    value: r.energy,
                    title: format!("{} {} {} {:e}", r.algorithm, r.label, r.bits, r.energy),
                })
                .collect::<Vec<_>>();
            groups.push((label.clone(), bars));
        }
        let y0 = 30.0 + c as f64 * opts.chart_height;
        bar_chart(
            &mut out,
            y0,
            &format!("ground state energy, risk = {risk}"),
            "chart energy",
            &groups,
            opts,
        );
    }

    let groups: Vec<(String, Vec<Bar<'_>>)> = risks
        .iter()
        .map(|&risk| {
            let bars = report
                .match_rates
                .iter()
                .filter(|m| (m.risk - risk).abs() < 1e-9)
                .map(|m| Bar {
                    class: m.algorithm.name(),
                    fill: color(m.algorithm),
                    value: m.percent,
                    title: format!("{} {:.1}% ({}/{})", m.algorithm, m.percent, m.matched, m.total),
                })
                .collect();
            (format!("{risk}"), bars)
        })
        .collect();
    let y0 = 30.0 + risks.len() as f64 * opts.chart_height;
    bar_chart(
        &mut out,
        y0,
        "match rate with the exact solver (%)",
        "chart match-rates",
        &groups,
        opts,
    );
    out.push_str("</svg>\n");
    out
}

fn legend(out: &mut String, opts: &SvgOptions) {
    let mut x = opts.chart_width - 300.0;
    for (name, fill) in [("classical", CLASSICAL), ("VQE", VQE), ("QAOA", QAOA)] {
        let _ = writeln!(
            out,
            r#"<rect class="legend" x="{x:.0}" y="8" width="12" height="12" fill="{fill}"/><text x="{:.0}" y="18" font-size="12">{name}</text>"#,
            x + 16.0
        );
        x += 90.0;
    }
}
