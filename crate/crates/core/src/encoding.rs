//! Mean-variance portfolio selection as a QUBO and as a diagonal Ising
//! Hamiltonian, plus the exhaustive classical ground-state solver.
//!
//! The objective over selections `x ∈ {0,1}ⁿ` is
//!
//! ```text
//! E(x) = q·xᵀΣx − μᵀx + λ(Σᵢxᵢ − B)²
//! ```
//!
//! Bit convention, used by every module: asset `i` is qubit `i`, qubit 0 is
//! the least-significant bit of a statevector index, and a displayed
//! [`Bitstring`] lists asset 0 first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::AssetStatistics;

/// Largest variable count [`exact_ground_state`] will enumerate.
pub const EXACT_SOLVER_MAX_VARS: usize = 24;

/// A 0/1 assignment, `bits[i]` is asset `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Decodes a statevector index: bit `i` of `index` is asset `i`.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    /// Statevector index of this assignment.
    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("bad bitstring {s:?}"))),
            })
            .collect::<Result<_>>()
            .map(Self)
    }
}

impl From<Bitstring> for String {
    fn from(b: Bitstring) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for Bitstring {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Inputs of one budget-constrained selection problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioProblem {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub risk_q: f64,
    pub budget_b: usize,
    pub penalty_lambda: f64,
}

impl PortfolioProblem {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Closed-form objective, evaluated directly from μ, Σ and the penalty.
    pub fn objective(&self, bits: &Bitstring) -> f64 {
        let x: Vec<f64> = bits.bits().iter().map(|&b| f64::from(u8::from(b))).collect();
        let n = self.n();
        let mut risk = 0.0;
        for i in 0..n {
            for j in 0..n {
                risk += x[i] * self.sigma[i][j] * x[j];
            }
        }
        let ret: f64 = self.mu.iter().zip(&x).map(|(m, xi)| m * xi).sum();
        let excess = x.iter().sum::<f64>() - self.budget_b as f64;
        self.risk_q * risk - ret + self.penalty_lambda * excess * excess
    }

    pub fn is_feasible(&self, bits: &Bitstring) -> bool {
        bits.count_ones() == self.budget_b
    }
}

/// `min Σ_{i≤j} quad[i][j]·xᵢxⱼ + offset` over `x ∈ {0,1}ⁿ`.
///
/// Only the upper triangle is populated; the diagonal holds linear terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    n: usize,
    quad: Vec<Vec<f64>>,
    offset: f64,
}

impl Qubo {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            quad: vec![vec![0.0; n]; n],
            offset: 0.0,
        }
    }

    /// Builds from a full coefficient table, folding the lower triangle
    /// onto the upper one.
    pub fn from_dense(quad: Vec<Vec<f64>>, offset: f64) -> Result<Self> {
        let n = quad.len();
        let mut q = Self::zeros(n);
        for (i, row) in quad.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &c) in row.iter().enumerate() {
                q.add(i, j, c);
            }
        }
        q.offset = offset;
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of `xᵢxⱼ` for `i ≤ j`; zero below the diagonal.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.quad[i][j]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `c·xᵢxⱼ`; order of `i`, `j` does not matter.
    pub fn add(&mut self, i: usize, j: usize, c: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.quad[a][b] += c;
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    /// Energy of one assignment.
    pub fn evaluate(&self, bits: &Bitstring) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        Ok(self.energy_unchecked(bits.bits()))
    }

    fn energy_unchecked(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if !x[i] {
                continue;
            }
            let row = &self.quad[i];
            for j in i..self.n {
                if x[j] {
                    e += row[j];
                }
            }
        }
        e
    }

    /// Energies of all `2ⁿ` assignments, indexed like statevector amplitudes.
    pub fn energy_table(&self) -> Vec<f64> {
        let mut x = vec![false; self.n];
        (0..1usize << self.n)
            .map(|k| {
                for (i, b) in x.iter_mut().enumerate() {
                    *b = (k >> i) & 1 == 1;
                }
                self.energy_unchecked(&x)
            })
            .collect()
    }
}

/// Free function form of [`Qubo::evaluate`].
pub fn evaluate_bitstring(qubo: &Qubo, bits: &Bitstring) -> Result<f64> {
    qubo.evaluate(bits)
}

/// `Σ hᵢzᵢ + Σ_{i<j} jᵢⱼzᵢzⱼ + offset` over spins `zᵢ ∈ {−1, +1}`.
///
/// Bit `0` maps to spin `+1`, the `+1` eigenvalue of Pauli `Z` on `|0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingHamiltonian {
    pub n: usize,
    pub h: Vec<f64>,
    /// Upper triangle only, zero diagonal.
    pub j: Vec<Vec<f64>>,
    pub offset: f64,
}

impl IsingHamiltonian {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            h: vec![0.0; n],
            j: vec![vec![0.0; n]; n],
            offset: 0.0,
        }
    }

    /// Energy of a spin configuration.
    pub fn energy_spins(&self, z: &[i8]) -> f64 {
        let mut e = self.offset;
        for (i, &zi) in z.iter().enumerate().take(self.n) {
            let zi = f64::from(zi);
            e += self.h[i] * zi;
            for (k, &zk) in z.iter().enumerate().take(self.n).skip(i + 1) {
                e += self.j[i][k] * zi * f64::from(zk);
            }
        }
        e
    }

    /// Energy of the spin image `zᵢ = 1 − 2bᵢ` of a bitstring.
    pub fn energy_bits(&self, bits: &Bitstring) -> f64 {
        let z: Vec<i8> = bits.bits().iter().map(|&b| if b { -1 } else { 1 }).collect();
        self.energy_spins(&z)
    }

    pub fn energy_table(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .map(|k| self.energy_bits(&Bitstring::from_index(k, self.n)))
            .collect()
    }

    /// Nonzero couplings `(i, k, jᵢₖ)` with `i < k`, row-major.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |k| {
                let c = self.j[i][k];
                (c != 0.0).then_some((i, k, c))
            })
        })
    }
}

/// Substitutes `xᵢ = (1 − zᵢ)/2`.
pub fn qubo_to_ising(qubo: &Qubo) -> IsingHamiltonian {
    let n = qubo.n();
    let mut ising = IsingHamiltonian::zeros(n);
    ising.offset = qubo.offset();
    for i in 0..n {
        let c = qubo.coeff(i, i);
        ising.h[i] -= c / 2.0;
        ising.offset += c / 2.0;
        for k in i + 1..n {
            let c = qubo.coeff(i, k);
            if c == 0.0 {
                continue;
            }
            ising.j[i][k] += c / 4.0;
            ising.h[i] -= c / 4.0;
            ising.h[k] -= c / 4.0;
            ising.offset += c / 4.0;
        }
    }
    ising
}

/// `2·(q·Σᵢⱼ|Σᵢⱼ| + Σᵢ|μᵢ|) + 1`: any budget violation then costs more than
/// the whole spread of the unpenalized objective.
pub fn default_penalty(stats: &AssetStatistics, risk_q: f64) -> f64 {
    let sigma_abs: f64 = stats.sigma.iter().flatten().map(|v| v.abs()).sum();
    let mu_abs: f64 = stats.mu.iter().map(|v| v.abs()).sum();
    2.0 * (risk_q * sigma_abs + mu_abs) + 1.0
}

/// Expands the penalized objective into a [`Qubo`].
pub fn build_portfolio_qubo(
    stats: &AssetStatistics,
    risk_q: f64,
    budget_b: usize,
    penalty_lambda: Option<f64>,
) -> Result<(PortfolioProblem, Qubo)> {
    let n = stats.n();
    if stats.sigma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: stats.sigma.len(),
        });
    }
    if let Some(row) = stats.sigma.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    if budget_b > n {
        return Err(Error::InfeasibleBudget { budget: budget_b, n });
    }
    if !(risk_q.is_finite() && risk_q >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "risk factor must be a non-negative number, got {risk_q}"
        )));
    }
    let lambda = penalty_lambda.unwrap_or_else(|| default_penalty(stats, risk_q));
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "penalty weight must be positive, got {lambda}"
        )));
    }

    let b = budget_b as f64;
    let mut qubo = Qubo::zeros(n);
    for i in 0..n {
        qubo.add(
            i,
            i,
            risk_q * stats.sigma[i][i] - stats.mu[i] + lambda * (1.0 - 2.0 * b),
        );
        for k in i + 1..n {
            let cov = stats.sigma[i][k] + stats.sigma[k][i];
            qubo.add(i, k, risk_q * cov + 2.0 * lambda);
        }
    }
    qubo.add_offset(lambda * b * b);

    let problem = PortfolioProblem {
        mu: stats.mu.clone(),
        sigma: stats.sigma.clone(),
        risk_q,
        budget_b,
        penalty_lambda: lambda,
    };
    Ok((problem, qubo))
}

/// Minimum-energy assignment and its energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub bits: Bitstring,
    pub energy: f64,
}

/// Exhaustive minimum over all `2ⁿ` assignments.
///
/// Candidates are visited in lexicographic order of their displayed string
/// and only a strictly lower energy replaces the incumbent, so ties resolve
/// to the lexicographically smallest string.
pub fn exact_ground_state(qubo: &Qubo) -> Result<GroundState> {
    let n = qubo.n();
    if n > EXACT_SOLVER_MAX_VARS {
        return Err(Error::ProblemTooLarge(n));
    }
    let mut x = vec![false; n];
    let mut best_m = 0usize;
    let mut best_e = f64::INFINITY;
    for m in 0..1usize << n {
        // asset 0 is the most significant display position
        for (i, b) in x.iter_mut().enumerate() {
            *b = (m >> (n - 1 - i)) & 1 == 1;
        }
        let e = qubo.energy_unchecked(&x);
        if e < best_e {
            best_e = e;
            best_m = m;
        }
    }
    let bits = Bitstring::new((0..n).map(|i| (best_m >> (n - 1 - i)) & 1 == 1).collect());
    Ok(GroundState { bits, energy: best_e })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> (PortfolioProblem, Qubo) {
        let stats = AssetStatistics {
            mu: vec![0.1, 0.2],
            sigma: vec![vec![0.01, 0.0], vec![0.0, 0.01]],
        };
        build_portfolio_qubo(&stats, 0.5, 1, Some(1.0)).unwrap()
    }

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example_energies() {
        let (problem, qubo) = worked_example();
        for (s, want) in [("00", 1.0), ("10", -0.095), ("01", -0.195), ("11", 0.71)] {
            let e = qubo.evaluate(&bits(s)).unwrap();
            assert!((e - want).abs() < 1e-12, "{s}: {e}");
            assert!((problem.objective(&bits(s)) - want).abs() < 1e-12);
        }
        let gs = exact_ground_state(&qubo).unwrap();
        assert_eq!(gs.bits.to_string(), "01");
        assert!((gs.energy + 0.195).abs() < 1e-12);
    }

    #[test]
    fn penalty_only_problem() {
        let stats = AssetStatistics {
            mu: vec![0.0; 3],
            sigma: vec![vec![0.0; 3]; 3],
        };
        let (_, qubo) = build_portfolio_qubo(&stats, 0.7, 0, Some(1.0)).unwrap();
        for k in 0..8 {
            let b = Bitstring::from_index(k, 3);
            let ones = b.count_ones() as f64;
            assert_eq!(qubo.evaluate(&b).unwrap(), ones * ones);
        }
        let gs = exact_ground_state(&qubo).unwrap();
        assert_eq!(gs.bits, Bitstring::zeros(3));
        assert_eq!(gs.energy, 0.0);
    }

    #[test]
    fn zero_risk_ignores_covariance() {
        let mu = vec![0.1, -0.2, 0.3];
        let a = AssetStatistics {
            mu: mu.clone(),
            sigma: vec![vec![1.0, 0.5, 0.2], vec![0.5, 2.0, 0.1], vec![0.2, 0.1, 3.0]],
        };
        let b = AssetStatistics {
            mu,
            sigma: vec![vec![0.0; 3]; 3],
        };
        let qa = build_portfolio_qubo(&a, 0.0, 1, Some(2.0)).unwrap().1;
        let qb = build_portfolio_qubo(&b, 0.0, 1, Some(2.0)).unwrap().1;
        assert_eq!(qa, qb);
    }

    #[test]
    fn build_errors() {
        let stats = AssetStatistics {
            mu: vec![0.1, 0.2],
            sigma: vec![vec![0.01, 0.0], vec![0.0, 0.01]],
        };
        assert!(matches!(
            build_portfolio_qubo(&stats, 0.5, 3, None),
            Err(Error::InfeasibleBudget { budget: 3, n: 2 })
        ));
        let bad = AssetStatistics {
            mu: vec![0.1, 0.2],
            sigma: vec![vec![0.01]],
        };
        assert!(matches!(
            build_portfolio_qubo(&bad, 0.5, 1, None),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(build_portfolio_qubo(&stats, 0.5, 1, Some(0.0)).is_err());
    }

    #[test]
    fn evaluate_edge_cases() {
        let (_, qubo) = worked_example();
        assert_eq!(qubo.evaluate(&Bitstring::zeros(2)).unwrap(), qubo.offset());
        assert!(matches!(
            qubo.evaluate(&bits("010")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ising_single_linear_term() {
        let mut q = Qubo::zeros(1);
        q.add(0, 0, 3.0);
        let ising = qubo_to_ising(&q);
        assert_eq!(ising.h, [-1.5]);
        assert_eq!(ising.offset, 1.5);
        assert_eq!(qubo_to_ising(&Qubo::zeros(3)), IsingHamiltonian::zeros(3));
    }

    #[test]
    fn exact_solver_guard() {
        assert!(matches!(
            exact_ground_state(&Qubo::zeros(25)),
            Err(Error::ProblemTooLarge(25))
        ));
    }

    #[test]
    fn tie_break_is_lexicographic() {
        // E = 0 for every string
        let gs = exact_ground_state(&Qubo::zeros(3)).unwrap();
        assert_eq!(gs.bits.to_string(), "000");
        // two degenerate minima, 010 and 100, of −1 each
        let mut q = Qubo::zeros(3);
        q.add(0, 0, -1.0);
        q.add(1, 1, -1.0);
        q.add(0, 1, 1.0);
        let gs = exact_ground_state(&q).unwrap();
        assert_eq!(gs.bits.to_string(), "010");
    }

    #[test]
    fn bitstring_index_convention() {
        let b = Bitstring::from_index(0b10, 2);
        assert_eq!(b.to_string(), "01");
        assert_eq!(b.to_index(), 2);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, "\"01\"");
        assert_eq!(serde_json::from_str::<Bitstring>(&json).unwrap(), b);
    }
}
