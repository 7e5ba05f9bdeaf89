use super::{Counted, Minimum};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.1;

/// Runs Nelder–Mead, then up to `restarts` more times from a fresh simplex
/// around the incumbent while each rerun still improves it by `f_tol`.
pub(super) fn run<F: Fn(&[f64]) -> f64>(mut f: Counted<'_, F>, x0: &[f64], f_tol: f64, restarts: usize) -> Minimum {
    let mut converged = descend(&mut f, x0, f_tol);
    for _ in 0..restarts {
        if !converged || f.exhausted() {
            break;
        }
        let (start, before) = (f.best_x.clone(), f.best_f);
        converged = descend(&mut f, &start, f_tol);
        if f.best_f > before - f_tol {
            break;
        }
    }
    f.finish(converged)
}

fn descend<F: Fn(&[f64]) -> f64>(f: &mut Counted<'_, F>, x0: &[f64], f_tol: f64) -> bool {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    let mut converged = false;

    'run: {
        simplex.push(x0.to_vec());
        let Some(v) = f.eval(x0) else { break 'run };
        values.push(v);
        for i in 0..d {
            let mut x = x0.to_vec();
            x[i] += INITIAL_STEP;
            let Some(v) = f.eval(&x) else { break 'run };
            simplex.push(x);
            values.push(v);
        }

        loop {
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[d];
            let second_worst = order[d - 1];

            if values[worst] - values[best] < f_tol {
                // a flat simplex can straddle the minimum; probe its centre first
                let centre = mean_of(simplex.iter());
                let Some(fc) = f.eval(&centre) else { break };
                if fc < values[best] - f_tol {
                    simplex[worst] = centre;
                    values[worst] = fc;
                    continue;
                }
                converged = true;
                break;
            }

            let centroid = mean_of(order[..d].iter().map(|&k| &simplex[k]));

            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                centroid.iter().zip(from).map(|(c, x)| c + t * (x - c)).collect()
            };

            let xr = along(-REFLECT, &simplex[worst]);
            let Some(fr) = f.eval(&xr) else { break };

            if fr < values[best] {
                let xe = along(EXPAND, &xr);
                let Some(fe) = f.eval(&xe) else { break };
                if fe < fr {
                    simplex[worst] = xe;
                    values[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second_worst] {
                simplex[worst] = xr;
                values[worst] = fr;
                continue;
            }

            let (xc, accept) = if fr < values[worst] {
                let xc = along(CONTRACT, &xr);
                let Some(fc) = f.eval(&xc) else { break };
                (xc, (fc <= fr).then_some(fc))
            } else {
                let xc = along(CONTRACT, &simplex[worst]);
                let Some(fc) = f.eval(&xc) else { break };
                (xc, (fc < values[worst]).then_some(fc))
            };
            if let Some(fc) = accept {
                simplex[worst] = xc;
                values[worst] = fc;
                continue;
            }

            let anchor = simplex[best].clone();
            for &k in &order[1..] {
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&simplex[k])
                    .map(|(b, x)| b + SHRINK * (x - b))
                    .collect();
                let Some(v) = f.eval(&x) else { break 'run };
                simplex[k] = x;
                values[k] = v;
            }
        }
    }
    converged
}

fn mean_of<'a>(points: impl Iterator<Item = &'a Vec<f64>>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for p in points {
        if sum.is_empty() {
            sum = vec![0.0; p.len()];
        }
        for (s, x) in sum.iter_mut().zip(p) {
            *s += x;
        }
        count += 1;
    }
    sum.iter_mut().for_each(|s| *s /= count as f64);
    sum
}
