//! Independent reference implementations shared by the integration tests.
//! None of them call into the crate's numerical code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/prices_2016h2.csv")
}

/// Dense random upper-triangular coefficients in `[-1, 1)`.
pub fn random_upper(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            q[i][j] = rng.random_range(-1.0..1.0);
        }
    }
    q
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σᵢ≤ⱼ qᵢⱼ xᵢ xⱼ + offset`, double loop.
pub fn naive_qubo(q: &[Vec<f64>], offset: f64, x: &[bool]) -> f64 {
    let mut e = offset;
    for i in 0..x.len() {
        for j in i..x.len() {
            if x[i] && x[j] {
                e += q[i][j];
            }
        }
    }
    e
}

/// Depth-first enumeration, zero branch first, strict improvement only.
pub fn dfs_minimum(q: &[Vec<f64>], offset: f64) -> (String, f64) {
    fn go(q: &[Vec<f64>], offset: f64, x: &mut Vec<bool>, best: &mut (String, f64)) {
        if x.len() == q.len() {
            let e = naive_qubo(q, offset, x);
            if e < best.1 {
                *best = (x.iter().map(|&b| if b { '1' } else { '0' }).collect(), e);
            }
            return;
        }
        for b in [false, true] {
            x.push(b);
            go(q, offset, x, best);
            x.pop();
        }
    }
    let mut best = (String::new(), f64::INFINITY);
    go(q, offset, &mut Vec::new(), &mut best);
    best
}

/// Closed-form mean-variance objective with budget penalty.
pub fn portfolio_objective(mu: &[f64], sigma: &[Vec<f64>], q: f64, b: usize, lambda: f64, x: &[bool]) -> f64 {
    let n = mu.len();
    let xf: Vec<f64> = x.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
    let mut risk = 0.0;
    for i in 0..n {
        for j in 0..n {
            risk += xf[i] * sigma[i][j] * xf[j];
        }
    }
    let ret: f64 = mu.iter().zip(&xf).map(|(m, v)| m * v).sum();
    let k: f64 = xf.iter().sum();
    q * risk - ret + lambda * (k - b as f64).powi(2)
}

/// Two-pass sample mean and covariance of `rows` (one row per observation).
pub fn two_pass_covariance(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let t = rows.len() as f64;
    let n = rows[0].len();
    let mu: Vec<f64> = (0..n).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / t).collect();
    let centred: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mu).map(|(x, m)| x - m).collect())
        .collect();
    let cov = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| centred.iter().map(|c| c[i] * c[j]).sum::<f64>() / (t - 1.0))
                .collect()
        })
        .collect();
    (mu, cov)
}

pub type Matrix = Vec<Vec<Complex64>>;

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (da, db) = (a.len(), b.len());
    let mut c = vec![vec![Complex64::new(0.0, 0.0); da * db]; da * db];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    c[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    c
}

pub fn pauli_z() -> Matrix {
    let o = Complex64::new(0.0, 0.0);
    vec![vec![Complex64::new(1.0, 0.0), o], vec![o, Complex64::new(-1.0, 0.0)]]
}

pub fn pauli_x() -> Matrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    vec![vec![o, l], vec![l, o]]
}

/// `ops` placed on the listed qubits of an `n`-qubit register, identity
/// elsewhere; qubit 0 is the least significant index bit.
pub fn embed(n: usize, ops: &[(usize, Matrix)]) -> Matrix {
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for q in (0..n).rev() {
        let factor = ops
            .iter()
            .find(|(t, _)| *t == q)
            .map(|(_, o)| o.clone())
            .unwrap_or_else(|| identity(2));
        m = kron(&m, &factor);
    }
    m
}

pub fn scale(a: &Matrix, s: Complex64) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// Matrix exponential by Taylor series with scaling and squaring.
pub fn expm(a: &Matrix) -> Matrix {
    let norm = a
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings) > 0.25 {
        squarings += 1;
    }
    let a = scale(a, Complex64::new(1.0 / f64::from(1u32 << squarings), 0.0));
    let mut sum = identity(a.len());
    let mut term = identity(a.len());
    for k in 1..=24 {
        term = scale(&matmul(&term, &a), Complex64::new(1.0 / f64::from(k), 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// QAOA expectation `⟨ψ|H|ψ⟩` computed from dense operators built out of
/// the fields `h`, couplings `j` and `offset`.
pub fn dense_qaoa_expectation(h: &[f64], j: &[Vec<f64>], offset: f64, betas: &[f64], gammas: &[f64]) -> f64 {
    let n = h.len();
    let d = 1 << n;
    let zero = Complex64::new(0.0, 0.0);
    let mut cost = vec![vec![zero; d]; d];
    for q in 0..n {
        cost = add(&cost, &scale(&embed(n, &[(q, pauli_z())]), Complex64::new(h[q], 0.0)));
        for k in q + 1..n {
            if j[q][k] != 0.0 {
                let zz = embed(n, &[(q, pauli_z()), (k, pauli_z())]);
                cost = add(&cost, &scale(&zz, Complex64::new(j[q][k], 0.0)));
            }
        }
    }
    let mut mixer = vec![vec![zero; d]; d];
    for q in 0..n {
        mixer = add(&mixer, &embed(n, &[(q, pauli_x())]));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut psi = vec![amp; d];
    for (&b, &g) in betas.iter().zip(gammas) {
        psi = matvec(&expm(&scale(&cost, Complex64::new(0.0, -g))), &psi);
        psi = matvec(&expm(&scale(&mixer, Complex64::new(0.0, -b))), &psi);
    }
    let hpsi = matvec(&cost, &psi);
    let e: Complex64 = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
    e.re + offset
}
