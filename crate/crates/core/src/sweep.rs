//! The experiment grid: every (risk, algorithm, ansatz configuration) cell is
//! solved and compared with the exact ground state of its risk level.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::AnsatzConfig;
use crate::encoding::{
    build_portfolio_qubo, exact_ground_state, qubo_to_ising, Bitstring, IsingHamiltonian, PortfolioProblem, Qubo,
};
use crate::error::{Error, Result};
use crate::market::AssetStatistics;
use crate::seed::derive_seed;
use crate::solvers::{qaoa_solve, vqe_solve, OptimizerOptions, SolveResult};

/// Risks of the motivational low/middle/high comparison.
pub const MOTIVATIONAL_RISKS: [f64; 3] = [0.1, 0.5, 0.9];

const RISK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Vqe,
    Qaoa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Vqe => "vqe",
            Algorithm::Qaoa => "qaoa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vqe" => Ok(Algorithm::Vqe),
            "qaoa" => Ok(Algorithm::Qaoa),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// `0.1, 0.2, …, 0.9`.
pub fn default_risks() -> Vec<f64> {
    (1..=9).map(|i| f64::from(i) / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub risks: Vec<f64>,
    pub configs: Vec<AnsatzConfig>,
    pub algorithms: Vec<Algorithm>,
    pub stats: AssetStatistics,
    pub budget: usize,
    /// `None` selects the default penalty at each risk.
    pub penalty: Option<f64>,
    pub base_seed: u64,
    /// Per-run optimizer settings; the seed is replaced by the cell seed.
    pub optimizer: OptimizerOptions,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl SweepGrid {
    /// All default axes over `stats`, budget `n/2`.
    pub fn new(stats: AssetStatistics, base_seed: u64) -> Self {
        let budget = stats.n() / 2;
        Self {
            risks: default_risks(),
            configs: AnsatzConfig::all_labelled(),
            algorithms: vec![Algorithm::Vqe, Algorithm::Qaoa],
            stats,
            budget,
            penalty: None,
            base_seed,
            optimizer: OptimizerOptions::default(),
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.risks.is_empty() || self.configs.is_empty() || self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("sweep axes must be non-empty".into()));
        }
        if let Some(r) = self.risks.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidArgument(format!("risk {r} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.risks.len() * self.algorithms.len() * self.configs.len()
    }
}

/// Seed of one grid cell.
///
/// A QAOA circuit depends only on the Hamiltonian and the depth, so QAOA
/// cells are keyed by repetitions rather than by label.
pub fn cell_seed(base: u64, algorithm: Algorithm, config: &AnsatzConfig, risk: f64) -> u64 {
    let risk = risk.to_string();
    match algorithm {
        Algorithm::Vqe => derive_seed(base, &["vqe", &config.to_string(), &risk]),
        Algorithm::Qaoa => derive_seed(base, &["qaoa", &format!("p={}", config.reps), &risk]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub label: String,
    pub risk: f64,
    pub algorithm: Algorithm,
    pub energy: f64,
    pub bits: Bitstring,
    pub feasible: bool,
    pub matched: bool,
    pub energy_gap: f64,
    pub evals: usize,
    pub seed: u64,
}

/// A cell that failed; it is left out of the match-rate denominators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunError {
    pub label: String,
    pub risk: f64,
    pub algorithm: Algorithm,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactBaseline {
    pub risk: f64,
    pub bits: Bitstring,
    pub energy: f64,
    pub penalty_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRate {
    pub risk: f64,
    pub algorithm: Algorithm,
    pub matched: usize,
    /// Successful runs only.
    pub total: usize,
    pub errored: usize,
    /// `100 · matched / total`, one decimal.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<ExperimentRecord>,
    pub exact: Vec<ExactBaseline>,
    #[serde(default)]
    pub errors: Vec<RunError>,
    pub match_rates: Vec<MatchRate>,
}

impl SweepReport {
    pub fn exact_at(&self, risk: f64) -> Option<&ExactBaseline> {
        self.exact.iter().find(|e| same_risk(e.risk, risk))
    }

    /// Risks in report order.
    pub fn risks(&self) -> Vec<f64> {
        self.exact.iter().map(|e| e.risk).collect()
    }

    /// Labels in first-seen order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.label) {
                out.push(r.label.clone());
            }
        }
        out
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut out = Vec::new();
        for r in &self.records {
            if !out.contains(&r.algorithm) {
                out.push(r.algorithm);
            }
        }
        out
    }

    pub fn record(&self, risk: f64, algorithm: Algorithm, label: &str) -> Option<&ExperimentRecord> {
        self.records
            .iter()
            .find(|r| same_risk(r.risk, risk) && r.algorithm == algorithm && r.label == label)
    }
}

fn same_risk(a: f64, b: f64) -> bool {
    (a - b).abs() < RISK_EPS
}

struct RiskLevel {
    risk: f64,
    problem: PortfolioProblem,
    qubo: Qubo,
    ising: IsingHamiltonian,
    exact: ExactBaseline,
}

/// Runs every cell of `grid` and aggregates the comparison.
///
/// Records come out ordered by risk, then algorithm, then configuration, in
/// the order the grid lists them, whatever the thread count.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepReport> {
    grid.validate()?;

    let levels: Vec<RiskLevel> = grid
        .risks
        .iter()
        .map(|&risk| {
            let (problem, qubo) = build_portfolio_qubo(&grid.stats, risk, grid.budget, grid.penalty)?;
            let gs = exact_ground_state(&qubo)?;
            let ising = qubo_to_ising(&qubo);
            Ok(RiskLevel {
                risk,
                exact: ExactBaseline {
                    risk,
                    bits: gs.bits,
                    energy: gs.energy,
                    penalty_lambda: problem.penalty_lambda,
                },
                problem,
                qubo,
                ising,
            })
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(&RiskLevel, Algorithm, &AnsatzConfig)> = levels
        .iter()
        .flat_map(|level| {
            grid.algorithms
                .iter()
                .flat_map(move |&algo| grid.configs.iter().map(move |cfg| (level, algo, cfg)))
        })
        .collect();

    let run_cell = |&(level, algo, cfg): &(&RiskLevel, Algorithm, &AnsatzConfig)| {
        let seed = cell_seed(grid.base_seed, algo, cfg, level.risk);
        let opts = OptimizerOptions { seed, ..grid.optimizer };
        let solved: Result<SolveResult> = match algo {
            Algorithm::Vqe => vqe_solve(&level.qubo, cfg, &opts),
            Algorithm::Qaoa => qaoa_solve(&level.ising, cfg.reps, &opts),
        };
        let label = cfg.label_str();
        match solved {
            Ok(r) => Ok(ExperimentRecord {
                label,
                risk: level.risk,
                algorithm: algo,
                feasible: level.problem.is_feasible(&r.bits),
                matched: r.bits == level.exact.bits,
                energy_gap: r.energy - level.exact.energy,
                energy: r.energy,
                bits: r.bits,
                evals: r.evals,
                seed,
            }),
            Err(e) => Err(RunError {
                label,
                risk: level.risk,
                algorithm: algo,
                message: e.to_string(),
            }),
        }
    };

    let outcomes: Vec<std::result::Result<ExperimentRecord, RunError>> = match grid.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };

    let mut records = Vec::with_capacity(outcomes.len());
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(e) => errors.push(e),
        }
    }

    let mut report = SweepReport {
        records,
        exact: levels.into_iter().map(|l| l.exact).collect(),
        errors,
        match_rates: Vec::new(),
    };
    report.match_rates = match_rates(&report)?;
    Ok(report)
}

fn percent(matched: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    (1000.0 * matched as f64 / total as f64).round() / 10.0
}

/// Share of runs per (risk, algorithm) whose bitstring equals the exact one.
pub fn match_rates(report: &SweepReport) -> Result<Vec<MatchRate>> {
    if report.records.is_empty() && report.errors.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut algorithms = report.algorithms();
    for e in &report.errors {
        if !algorithms.contains(&e.algorithm) {
            algorithms.push(e.algorithm);
        }
    }
    let mut out = Vec::new();
    for risk in report.risks() {
        for &algorithm in &algorithms {
            let runs = report
                .records
                .iter()
                .filter(|r| same_risk(r.risk, risk) && r.algorithm == algorithm);
            let (matched, total) = runs.fold((0, 0), |(m, t), r| (m + usize::from(r.matched), t + 1));
            let errored = report
                .errors
                .iter()
                .filter(|e| same_risk(e.risk, risk) && e.algorithm == algorithm)
                .count();
            out.push(MatchRate {
                risk,
                algorithm,
                matched,
                total,
                errored,
                percent: percent(matched, total),
            });
        }
    }
    Ok(out)
}

/// Match percentage of one algorithm over the whole report.
pub fn aggregate_match_rate(report: &SweepReport, algorithm: Algorithm) -> f64 {
    let (matched, total) = report
        .records
        .iter()
        .filter(|r| r.algorithm == algorithm)
        .fold((0, 0), |(m, t), r| (m + usize::from(r.matched), t + 1));
    percent(matched, total)
}

/// Restricts a report to the low, middle and high risk levels.
pub fn motivational_subset(report: &SweepReport) -> Result<SweepReport> {
    subset(report, &MOTIVATIONAL_RISKS)
}

/// Restricts a report to `risks`, keeping its ordering.
pub fn subset(report: &SweepReport, risks: &[f64]) -> Result<SweepReport> {
    if let Some(&missing) = risks.iter().find(|&&r| report.exact_at(r).is_none()) {
        return Err(Error::RiskNotInSweep(missing));
    }
    let keep = |r: f64| risks.iter().any(|&k| same_risk(k, r));
    let mut out = SweepReport {
        records: report.records.iter().filter(|r| keep(r.risk)).cloned().collect(),
        exact: report.exact.iter().filter(|e| keep(e.risk)).cloned().collect(),
        errors: report.errors.iter().filter(|e| keep(e.risk)).cloned().collect(),
        match_rates: Vec::new(),
    };
    out.match_rates = report.match_rates.iter().filter(|m| keep(m.risk)).cloned().collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(risk: f64, algorithm: Algorithm, label: &str, matched: bool) -> ExperimentRecord {
        ExperimentRecord {
            label: label.into(),
            risk,
            algorithm,
            energy: 0.0,
            bits: Bitstring::zeros(2),
            feasible: true,
            matched,
            energy_gap: 0.0,
            evals: 1,
            seed: 0,
        }
    }

    fn baseline(risk: f64) -> ExactBaseline {
        ExactBaseline {
            risk,
            bits: Bitstring::zeros(2),
            energy: 0.0,
            penalty_lambda: 1.0,
        }
    }

    #[test]
    fn rates() {
        let labels = ["B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M"];
        let mut records: Vec<_> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| record(0.5, Algorithm::Vqe, l, i % 2 == 0))
            .collect();
        records.extend(labels.iter().map(|l| record(0.5, Algorithm::Qaoa, l, true)));
        let report = SweepReport {
            records,
            exact: vec![baseline(0.5)],
            errors: vec![RunError {
                label: "B".into(),
                risk: 0.5,
                algorithm: Algorithm::Qaoa,
                message: "boom".into(),
            }],
            match_rates: vec![],
        };
        let rates = match_rates(&report).unwrap();
        assert_eq!(rates[0].percent, 50.0);
        assert_eq!(rates[1].percent, 100.0);
        assert_eq!(rates[1].errored, 1);
        assert_eq!(aggregate_match_rate(&report, Algorithm::Vqe), 50.0);
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent(1, 3), 33.3);
        assert_eq!(percent(2, 3), 66.7);
        assert_eq!(percent(0, 0), 0.0);
    }

    #[test]
    fn empty_report_rejected() {
        let report = SweepReport {
            records: vec![],
            exact: vec![],
            errors: vec![],
            match_rates: vec![],
        };
        assert!(matches!(match_rates(&report), Err(Error::EmptyReport)));
    }

    #[test]
    fn subset_requires_risks() {
        let report = SweepReport {
            records: vec![
                record(0.1, Algorithm::Vqe, "B", true),
                record(0.9, Algorithm::Vqe, "B", true),
            ],
            exact: vec![baseline(0.1), baseline(0.9)],
            errors: vec![],
            match_rates: vec![],
        };
        assert!(matches!(motivational_subset(&report), Err(Error::RiskNotInSweep(r)) if r == 0.5));
        let s = subset(&report, &[0.9]).unwrap();
        assert_eq!(s.records.len(), 1);
    }

    #[test]
    fn qaoa_seed_ignores_label() {
        let b = AnsatzConfig::from_label("B").unwrap();
        let h = AnsatzConfig::from_label("H").unwrap();
        let e = AnsatzConfig::from_label("E").unwrap();
        assert_eq!(
            cell_seed(1, Algorithm::Qaoa, &b, 0.3),
            cell_seed(1, Algorithm::Qaoa, &h, 0.3)
        );
        assert_ne!(
            cell_seed(1, Algorithm::Qaoa, &b, 0.3),
            cell_seed(1, Algorithm::Qaoa, &e, 0.3)
        );
        assert_ne!(
            cell_seed(1, Algorithm::Vqe, &b, 0.3),
            cell_seed(1, Algorithm::Vqe, &h, 0.3)
        );
    }

    #[test]
    fn default_risk_grid() {
        let r = default_risks();
        assert_eq!(r.len(), 9);
        assert_eq!(r[2], 0.3);
        assert_eq!(r[8], 0.9);
    }
}
