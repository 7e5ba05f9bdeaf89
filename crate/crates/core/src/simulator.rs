//! Dense statevector simulation.
//!
//! Amplitude index `k` encodes qubit `i` in bit `i` of `k` (little-endian);
//! [`Bitstring`](crate::encoding::Bitstring) handles the asset-0-first display.
//!
//! Rotations follow `R_P(θ) = exp(−iθP/2)` for `P ∈ {X, Y, Z, Z⊗Z}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::Bitstring;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    /// Controlled-X, `targets[0]` is the control.
    Cx,
    Cz,
    Rzz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H => 1,
            GateKind::Cx | GateKind::Cz | GateKind::Rzz => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Rzz => "rzz",
        }
    }
}

/// A gate with all angles bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: [usize; 2],
    angle: f64,
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[usize], angle: Option<f64>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        if kind.is_rotation() != angle.is_some() {
            return Err(Error::InvalidGate(format!(
                "{} {} an angle",
                kind.name(),
                if kind.is_rotation() { "needs" } else { "takes no" }
            )));
        }
        let t1 = targets.get(1).copied().unwrap_or(targets[0]);
        if kind.arity() == 2 && targets[0] == t1 {
            return Err(Error::InvalidGate(format!(
                "{} targets must be distinct, got {}",
                kind.name(),
                targets[0]
            )));
        }
        Ok(Self {
            kind,
            targets: [targets[0], t1],
            angle: angle.unwrap_or(0.0),
        })
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rx,
            targets: [q, q],
            angle: theta,
        }
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Ry,
            targets: [q, q],
            angle: theta,
        }
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rz,
            targets: [q, q],
            angle: theta,
        }
    }

    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            targets: [q, q],
            angle: 0.0,
        }
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, &[control, target], None).expect("distinct qubits")
    }

    /// Panics if `a == b`.
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, &[a, b], None).expect("distinct qubits")
    }

    /// Panics if `a == b`.
    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::Rzz, &[a, b], Some(theta)).expect("distinct qubits")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets[..self.kind.arity()]
    }

    pub fn angle(&self) -> Option<f64> {
        self.kind.is_rotation().then_some(self.angle)
    }

    /// Same gate with the angle negated; self-inverse gates are returned as is.
    pub fn inverse(&self) -> Self {
        Self {
            angle: -self.angle,
            ..*self
        }
    }
}

/// `2ⁿ` complex amplitudes over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amp: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amp })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amp: Vec<Complex64>) -> Result<Self> {
        let n = amp.len().trailing_zeros() as usize;
        if !amp.len().is_power_of_two() || n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(Self { n, amp })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for &t in gate.targets() {
            if t >= self.n {
                return Err(Error::InvalidGate(format!(
                    "{} on qubit {t} of a {}-qubit state",
                    gate.kind.name(),
                    self.n
                )));
            }
        }
        let [a, b] = gate.targets;
        let half = gate.angle / 2.0;
        let (c, s) = (half.cos(), half.sin());
        let zero = Complex64::new(0.0, 0.0);
        match gate.kind {
            GateKind::Rx => self.apply_1q(
                a,
                [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ],
            ),
            GateKind::Ry => self.apply_1q(
                a,
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ],
            ),
            GateKind::Rz => self.apply_1q(a, [[Complex64::new(c, -s), zero], [zero, Complex64::new(c, s)]]),
            GateKind::H => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q(a, [[r, r], [r, -r]])
            }
            GateKind::Cx => {
                let (cm, tm) = (1usize << a, 1usize << b);
                for k in 0..self.amp.len() {
                    if k & cm != 0 && k & tm == 0 {
                        self.amp.swap(k, k | tm);
                    }
                }
            }
            GateKind::Cz => {
                let m = (1usize << a) | (1usize << b);
                for (k, v) in self.amp.iter_mut().enumerate() {
                    if k & m == m {
                        *v = -*v;
                    }
                }
            }
            GateKind::Rzz => {
                let even = Complex64::new(c, -s);
                let odd = Complex64::new(c, s);
                for (k, v) in self.amp.iter_mut().enumerate() {
                    let parity = ((k >> a) ^ (k >> b)) & 1;
                    *v *= if parity == 0 { even } else { odd };
                }
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1usize << q;
        for block in (0..self.amp.len()).step_by(stride << 1) {
            for k0 in block..block + stride {
                let k1 = k0 | stride;
                let (x0, x1) = (self.amp[k0], self.amp[k1]);
                self.amp[k0] = m[0][0] * x0 + m[0][1] * x1;
                self.amp[k1] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    /// `Σₖ |ampₖ|²·table[k]`, exact.
    pub fn expectation_diagonal(&self, table: &[f64]) -> Result<f64> {
        if table.len() != self.amp.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amp.len(),
                actual: table.len(),
            });
        }
        Ok(self.amp.iter().zip(table).map(|(a, e)| a.norm_sqr() * e).sum())
    }

    /// Mean of `table` over `shots` computational-basis samples.
    pub fn sampled_expectation(&self, table: &[f64], shots: usize, seed: u64) -> Result<f64> {
        if table.len() != self.amp.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amp.len(),
                actual: table.len(),
            });
        }
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cumulative = Vec::with_capacity(self.amp.len());
        let mut acc = 0.0;
        for a in &self.amp {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = 0.0;
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cumulative.partition_point(|&c| c <= u).min(table.len() - 1);
            total += table[k];
        }
        Ok(total / shots as f64)
    }

    /// Most likely basis state; the lowest index wins ties.
    pub fn most_probable_bitstring(&self) -> Bitstring {
        let mut best = 0;
        let mut best_p = f64::NEG_INFINITY;
        for (k, a) in self.amp.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best_p {
                best = k;
                best_p = p;
            }
        }
        Bitstring::from_index(best, self.n)
    }
}

/// Free function form of [`Statevector::new`].
pub fn new_statevector(n: usize) -> Result<Statevector> {
    Statevector::new(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn initial_states() {
        let s = Statevector::new(1).unwrap();
        assert_eq!(s.amplitudes(), [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(Statevector::new(2).unwrap().amplitudes().len(), 4);
        let s = Statevector::new(3).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.norm_sqr(), 1.0);
        assert!(matches!(Statevector::new(0), Err(Error::QubitCount(0))));
        assert!(matches!(Statevector::new(25), Err(Error::QubitCount(25))));
    }

    #[test]
    fn rx_zero_is_identity() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::ry(1, 0.3)).unwrap();
        let before = s.clone();
        s.apply(&Gate::rx(1, 0.0)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let mut s = Statevector::new(1).unwrap();
        s.apply(&Gate::rx(0, PI)).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(0.0, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn bell_state() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::cx(0, 1)).unwrap();
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for (a, b) in s.amplitudes().iter().zip([r, zero, zero, r]) {
            assert!(close(*a, b));
        }
        assert_eq!(s.most_probable_bitstring().to_string(), "00");
    }

    #[test]
    fn most_probable_uses_display_order() {
        let mut s = Statevector::new(2).unwrap();
        assert_eq!(s.most_probable_bitstring().to_string(), "00");
        s.apply(&Gate::rx(1, PI)).unwrap();
        assert_eq!(s.most_probable_bitstring().to_string(), "01");
    }

    #[test]
    fn ry_and_rz_conventions() {
        let mut s = Statevector::new(1).unwrap();
        s.apply(&Gate::ry(0, PI)).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0)));
        s.apply(&Gate::rz(0, PI)).unwrap();
        // exp(+iπ/2) on |1⟩
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn rzz_phases_by_parity() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        s.apply(&Gate::rzz(0, 1, 0.8)).unwrap();
        let even = Complex64::from_polar(0.5, -0.4);
        let odd = Complex64::from_polar(0.5, 0.4);
        let a = s.amplitudes();
        assert!(close(a[0], even) && close(a[3], even));
        assert!(close(a[1], odd) && close(a[2], odd));
    }

    #[test]
    fn cz_symmetric() {
        let mut s1 = Statevector::new(3).unwrap();
        for q in 0..3 {
            s1.apply(&Gate::h(q)).unwrap();
        }
        let mut s2 = s1.clone();
        s1.apply(&Gate::cz(0, 2)).unwrap();
        s2.apply(&Gate::cz(2, 0)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn gate_validation() {
        let mut s = Statevector::new(2).unwrap();
        assert!(s.apply(&Gate::rx(2, 0.1)).is_err());
        assert!(Gate::new(GateKind::Cx, &[1, 1], None).is_err());
        assert!(Gate::new(GateKind::Rx, &[0], None).is_err());
        assert!(Gate::new(GateKind::H, &[0], Some(1.0)).is_err());
        assert!(Gate::new(GateKind::Cz, &[0], None).is_err());
        assert_eq!(Gate::h(0).angle(), None);
        assert_eq!(Gate::rx(0, 0.5).angle(), Some(0.5));
    }

    #[test]
    fn expectation_examples() {
        let table = [1.5, -2.0, 3.0, 0.25];
        let mut s = Statevector::new(2).unwrap();
        assert_eq!(s.expectation_diagonal(&table).unwrap(), 1.5);
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        let mean = table.iter().sum::<f64>() / 4.0;
        assert!((s.expectation_diagonal(&table).unwrap() - mean).abs() < 1e-12);
        assert!(s.expectation_diagonal(&table[..3]).is_err());
    }

    #[test]
    fn sampled_expectation_converges() {
        let table = [0.0, 1.0];
        let mut s = Statevector::new(1).unwrap();
        s.apply(&Gate::ry(0, PI / 2.0)).unwrap();
        let e = s.sampled_expectation(&table, 20_000, 3).unwrap();
        assert!((e - 0.5).abs() < 0.02);
        assert_eq!(e, s.sampled_expectation(&table, 20_000, 3).unwrap());
    }
}
