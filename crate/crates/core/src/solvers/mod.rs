//! Derivative-free minimization and the VQE/QAOA drivers built on it.
//!
//! Every objective evaluation goes through a counting wrapper that enforces
//! the evaluation budget and keeps the best point seen, so a returned
//! minimum is never worse than the starting point.

mod nelder_mead;
mod spsa;

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{build_two_local, qaoa_ansatz, AnsatzConfig, ParamCircuit};
use crate::encoding::{Bitstring, IsingHamiltonian, Qubo};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

pub use spsa::SpsaGains;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NelderMead,
    Spsa,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::NelderMead => "nelder-mead",
            Method::Spsa => "spsa",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nelder-mead" | "nm" => Ok(Method::NelderMead),
            "spsa" => Ok(Method::Spsa),
            _ => Err(Error::InvalidArgument(format!("unknown optimizer {s:?}"))),
        }
    }
}

/// How starting parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// Algorithm default: uniform in `[−π, π)` for VQE, `[−0.1, 0.1)` for QAOA.
    Random,
    /// All zeros.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub method: Method,
    /// Evaluation cap per start.
    pub max_evals: usize,
    pub f_tol: f64,
    pub seed: u64,
    /// Independent starts; the best one is kept.
    pub starts: usize,
    pub init: InitMode,
    /// Nelder–Mead reruns from the incumbent after convergence.
    #[serde(default)]
    pub restarts: usize,
    /// Optimize against a sampled estimate instead of the exact expectation.
    pub shots: Option<usize>,
    pub spsa: SpsaGains,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            method: Method::NelderMead,
            max_evals: 2000,
            f_tol: 1e-6,
            seed: 0,
            starts: 3,
            init: InitMode::Random,
            restarts: 0,
            shots: None,
            spsa: SpsaGains::default(),
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(Error::InvalidArgument("max_evals must be at least 1".into()));
        }
        if self.f_tol.is_nan() || self.f_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "f_tol must be positive, got {}",
                self.f_tol
            )));
        }
        if self.starts == 0 {
            return Err(Error::InvalidArgument("starts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
    /// 1-based evaluation at which `fx` was first reached.
    pub best_eval: usize,
}

/// Budgeted objective that remembers its best point.
pub(crate) struct Counted<'f, F> {
    f: &'f F,
    max_evals: usize,
    evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
    best_eval: usize,
}

impl<'f, F: Fn(&[f64]) -> f64> Counted<'f, F> {
    fn new(f: &'f F, max_evals: usize) -> Self {
        Self {
            f,
            max_evals,
            evals: 0,
            best_x: Vec::new(),
            best_f: f64::INFINITY,
            best_eval: 0,
        }
    }

    /// `None` once the budget is spent. NaN is treated as `+∞`.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.max_evals {
            return None;
        }
        self.evals += 1;
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        if v < self.best_f || self.best_x.is_empty() {
            self.best_f = v;
            self.best_x = x.to_vec();
            self.best_eval = self.evals;
        }
        Some(v)
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    fn finish(self, converged: bool) -> Minimum {
        Minimum {
            x: self.best_x,
            fx: self.best_f,
            evals: self.evals,
            converged,
            best_eval: self.best_eval,
        }
    }
}

/// Minimizes `f` from `x0` with the method in `opts` (a single start).
///
/// Nelder–Mead uses reflection/expansion/contraction/shrink coefficients
/// 1, 2, 0.5, 0.5 and an initial simplex step of 0.1 per coordinate, and stops
/// once the simplex spread drops below `f_tol`. SPSA uses
/// `a_k = a/(k+1+A)^0.602`, `c_k = c/(k+1)^0.101` with `A = max_evals/10`.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &OptimizerOptions) -> Result<Minimum> {
    if x0.is_empty() {
        return Err(Error::EmptyParameters);
    }
    opts.validate()?;
    let counted = Counted::new(&f, opts.max_evals);
    Ok(match opts.method {
        Method::NelderMead => nelder_mead::run(counted, x0, opts.f_tol, opts.restarts),
        Method::Spsa => spsa::run(
            counted,
            x0,
            opts.f_tol,
            opts.max_evals,
            opts.spsa,
            derive_seed(opts.seed, &["spsa"]),
        ),
    })
}

/// `(f(θ + π/2·eᵢ) − f(θ − π/2·eᵢ)) / 2`.
///
/// Exact for parameters that enter as a single Pauli rotation angle.
pub fn parameter_shift_gradient<F: Fn(&[f64]) -> f64>(f: F, theta: &[f64], index: usize) -> Result<f64> {
    if index >= theta.len() {
        return Err(Error::ParameterIndex {
            index,
            len: theta.len(),
        });
    }
    let mut shifted = theta.to_vec();
    shifted[index] = theta[index] + FRAC_PI_2;
    let plus = f(&shifted);
    shifted[index] = theta[index] - FRAC_PI_2;
    let minus = f(&shifted);
    Ok((plus - minus) / 2.0)
}

/// Outcome of a VQE or QAOA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub params: Vec<f64>,
    /// Exact expectation at `params`, Hamiltonian offset included.
    pub energy: f64,
    /// Most probable bitstring of the final state.
    pub bits: Bitstring,
    /// Objective evaluations across all starts.
    pub evals: usize,
    /// Whether the kept start met `f_tol`.
    pub converged: bool,
    /// Objective at the first start's initial point.
    pub initial_energy: f64,
    /// Best energy of each start, in start order.
    pub start_energies: Vec<f64>,
}

/// Seed of start `k`.
pub fn start_seed(base: u64, k: usize) -> u64 {
    derive_seed(base, &["start", &k.to_string()])
}

fn variational_solve(
    circuit: &ParamCircuit,
    table: &[f64],
    init_range: f64,
    opts: &OptimizerOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let d = circuit.param_count();
    if d == 0 {
        return Err(Error::EmptyParameters);
    }
    // fail early on a malformed circuit or table
    circuit.simulate(&vec![0.0; d])?.expectation_diagonal(table)?;

    let exact = |theta: &[f64]| -> f64 {
        circuit
            .simulate(theta)
            .and_then(|s| s.expectation_diagonal(table))
            .expect("circuit and table validated")
    };

    let starts = if opts.init == InitMode::Zero { 1 } else { opts.starts };
    let mut best: Option<(Minimum, f64)> = None;
    let mut initial_energy = f64::NAN;
    let mut start_energies = Vec::with_capacity(starts);
    let mut evals = 0;

    for k in 0..starts {
        let seed = start_seed(opts.seed, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<f64> = match opts.init {
            InitMode::Zero => vec![0.0; d],
            InitMode::Random => (0..d).map(|_| rng.random_range(-init_range..init_range)).collect(),
        };
        let start_opts = OptimizerOptions { seed, ..*opts };
        let m = match opts.shots {
            None => minimize(exact, &x0, &start_opts)?,
            Some(shots) => {
                let counter = Cell::new(0u64);
                let sampled = |theta: &[f64]| -> f64 {
                    let i = counter.get();
                    counter.set(i + 1);
                    circuit
                        .simulate(theta)
                        .and_then(|s| s.sampled_expectation(table, shots, seed ^ i))
                        .expect("circuit and table validated")
                };
                minimize(sampled, &x0, &start_opts)?
            }
        };
        if k == 0 {
            initial_energy = exact(&x0);
        }
        let energy = if opts.shots.is_some() { exact(&m.x) } else { m.fx };
        evals += m.evals;
        start_energies.push(energy);
        if best.as_ref().is_none_or(|(_, e)| energy < *e) {
            best = Some((m, energy));
        }
    }

    let (m, energy) = best.expect("at least one start");
    let bits = circuit.simulate(&m.x)?.most_probable_bitstring();
    Ok(SolveResult {
        params: m.x,
        energy,
        bits,
        evals,
        converged: m.converged,
        initial_energy,
        start_energies,
    })
}

/// Variational eigensolver over the two-local ansatz `config`.
pub fn vqe_solve(qubo: &Qubo, config: &AnsatzConfig, opts: &OptimizerOptions) -> Result<SolveResult> {
    if qubo.n() > crate::simulator::MAX_QUBITS {
        return Err(Error::QubitCount(qubo.n()));
    }
    let circuit = build_two_local(qubo.n(), config)?;
    variational_solve(&circuit, &qubo.energy_table(), PI, opts)
}

/// QAOA with `p` layers; parameters are `[β…, γ…]`.
pub fn qaoa_solve(ising: &IsingHamiltonian, p: usize, opts: &OptimizerOptions) -> Result<SolveResult> {
    if ising.n == 0 || ising.n > crate::simulator::MAX_QUBITS {
        return Err(Error::QubitCount(ising.n));
    }
    let circuit = qaoa_ansatz(ising, p)?;
    variational_solve(&circuit, &ising.energy_table(), 0.1, opts)
}
