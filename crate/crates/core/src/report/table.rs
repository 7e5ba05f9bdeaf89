use std::fmt::Write;

use crate::sweep::SweepReport;

/// ✓/✗ grid: one row per risk, one column per (algorithm, configuration).
/// `!` marks an errored run, `·` a cell that was not part of the sweep.
pub fn render_table(report: &SweepReport) -> String {
    let labels = report.labels();
    let algorithms = report.algorithms();
    let mut out = String::new();

    let _ = write!(out, "{:>6}", "risk");
    for a in &algorithms {
        let _ = write!(out, " | {:<w$}", a.name().to_uppercase(), w = labels.len() * 2 - 1);
    }
    out.push('\n');
    let _ = write!(out, "{:>6}", "");
    for _ in &algorithms {
        let _ = write!(out, " | {}", labels.join(" "));
    }
    out.push('\n');

    for risk in report.risks() {
        let _ = write!(out, "{risk:>6}");
        for &a in &algorithms {
            out.push_str(" |");
            for label in &labels {
                let mark = match report.record(risk, a, label) {
                    Some(r) if r.matched => '✓',
                    Some(_) => '✗',
                    None if report
                        .errors
                        .iter()
                        .any(|e| (e.risk - risk).abs() < 1e-9 && e.algorithm == a && &e.label == label) =>
                    {
                        '!'
                    }
                    None => '·',
                };
                out.push(' ');
                out.push(mark);
            }
        }
        out.push('\n');
    }

    if !report.match_rates.is_empty() {
        out.push('\n');
        for m in &report.match_rates {
            let _ = write!(
                out,
                "risk {:<4} {:<5} {:>5.1}% ({}/{})",
                m.risk,
                m.algorithm.name(),
                m.percent,
                m.matched,
                m.total
            );
            if m.errored > 0 {
                let _ = write!(out, ", {} errored", m.errored);
            }
            out.push('\n');
        }
    }
    out
}
