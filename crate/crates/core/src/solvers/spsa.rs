use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Counted, Minimum};

/// Gain-sequence constants, `a_k = a/(k+1+A)^α`, `c_k = c/(k+1)^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaGains {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaGains {
    fn default() -> Self {
        Self {
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
        }
    }
}

/// Iterations whose `|f₊ − f₋|` must all sit below `f_tol` to stop.
const CONVERGENCE_WINDOW: usize = 10;

pub(super) fn run<F: Fn(&[f64]) -> f64>(
    mut f: Counted<'_, F>,
    x0: &[f64],
    f_tol: f64,
    max_evals: usize,
    gains: SpsaGains,
    seed: u64,
) -> Minimum {
    let stability = max_evals as f64 / 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = x0.to_vec();
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(CONVERGENCE_WINDOW);
    let mut converged = false;

    'run: {
        if f.eval(&theta).is_none() {
            break 'run;
        }
        for k in 0.. {
            let kf = k as f64;
            let ak = gains.a / (kf + 1.0 + stability).powf(gains.alpha);
            let ck = gains.c / (kf + 1.0).powf(gains.gamma);
            let delta: Vec<f64> = theta
                .iter()
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
            let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
            let Some(fp) = f.eval(&plus) else { break 'run };
            let Some(fm) = f.eval(&minus) else { break 'run };

            let diff = fp - fm;
            for (t, d) in theta.iter_mut().zip(&delta) {
                *t -= ak * diff / (2.0 * ck * d);
            }

            if recent.len() == CONVERGENCE_WINDOW {
                recent.pop_front();
            }
            recent.push_back(diff.abs());
            if recent.len() == CONVERGENCE_WINDOW && recent.iter().all(|&v| v < f_tol) {
                converged = true;
                break;
            }
        }
    }
    // a final look at the last iterate, when the budget allows
    let _ = f.eval(&theta);
    f.finish(converged)
}
