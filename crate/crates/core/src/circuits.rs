//! Parameterized circuit builders: the two-local variational ansatz over the
//! rotation/entangler/structure/reps design space, and the QAOA circuit of an
//! Ising Hamiltonian.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::IsingHamiltonian;
use crate::error::{Error, Result};
use crate::simulator::{Gate, GateKind, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Rx,
    Ry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    Cx,
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    /// Every qubit with every other.
    Full,
    /// `(n−1, 0)` then the linear chain.
    Circular,
    /// Disjoint neighbouring pairs, one layer.
    Pairwise,
}

impl Rotation {
    fn gate(self) -> GateKind {
        match self {
            Rotation::Rx => GateKind::Rx,
            Rotation::Ry => GateKind::Ry,
        }
    }
}

impl Entangler {
    fn gate(self) -> GateKind {
        match self {
            Entangler::Cx => GateKind::Cx,
            Entangler::Cz => GateKind::Cz,
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rotation::Rx => "rx",
            Rotation::Ry => "ry",
        })
    }
}

impl fmt::Display for Entangler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entangler::Cx => "cx",
            Entangler::Cz => "cz",
        })
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Full => "full",
            Structure::Circular => "circular",
            Structure::Pairwise => "pairwise",
        })
    }
}

/// One design point of the two-local ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub rotation: Rotation,
    pub entangler: Entangler,
    pub structure: Structure,
    pub reps: usize,
    pub label: Option<char>,
}

/// The labelled configurations, in label order.
///
/// K and L are taken with 5 repetitions so that H–M mirror B–G.
pub const LABELLED_CONFIGS: [AnsatzConfig; 12] = {
    use Entangler::*;
    use Rotation::*;
    use Structure::*;
    const fn c(l: char, s: Structure, r: Rotation, e: Entangler, reps: usize) -> AnsatzConfig {
        AnsatzConfig {
            rotation: r,
            entangler: e,
            structure: s,
            reps,
            label: Some(l),
        }
    }
    [
        c('B', Full, Ry, Cz, 3),
        c('C', Pairwise, Ry, Cz, 3),
        c('D', Circular, Ry, Cz, 3),
        c('E', Full, Ry, Cz, 5),
        c('F', Pairwise, Ry, Cz, 5),
        c('G', Circular, Ry, Cz, 5),
        c('H', Full, Rx, Cx, 3),
        c('I', Pairwise, Rx, Cx, 3),
        c('J', Circular, Rx, Cx, 3),
        c('K', Full, Rx, Cx, 5),
        c('L', Pairwise, Rx, Cx, 5),
        c('M', Circular, Rx, Cx, 5),
    ]
};

impl AnsatzConfig {
    pub fn new(rotation: Rotation, entangler: Entangler, structure: Structure, reps: usize) -> Result<Self> {
        if reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        Ok(Self {
            rotation,
            entangler,
            structure,
            reps,
            label: None,
        })
    }

    /// Looks up one of the labels `B`–`M`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut chars = label.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => LABELLED_CONFIGS
                .iter()
                .find(|cfg| cfg.label == Some(c.to_ascii_uppercase()))
                .copied()
                .ok_or_else(|| Error::UnknownConfig(label.to_string())),
            _ => Err(Error::UnknownConfig(label.to_string())),
        }
    }

    pub fn all_labelled() -> Vec<Self> {
        LABELLED_CONFIGS.to_vec()
    }

    pub fn label_str(&self) -> String {
        self.label.map(String::from).unwrap_or_else(|| "-".into())
    }
}

impl FromStr for AnsatzConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_label(s)
    }
}

impl fmt::Display for AnsatzConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.label {
            write!(f, "{l}=")?;
        }
        write!(
            f,
            "({}, {}, {}, {})",
            self.structure, self.rotation, self.entangler, self.reps
        )
    }
}

/// Ordered entangling pairs for a structure.
pub fn entanglement_pairs(n: usize, structure: Structure) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::EntanglementTooSmall(n));
    }
    Ok(match structure {
        Structure::Full => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        Structure::Circular => {
            let mut pairs = Vec::with_capacity(n);
            // with two qubits the closing pair would repeat (0, 1)
            if n > 2 {
                pairs.push((n - 1, 0));
            }
            pairs.extend((0..n - 1).map(|i| (i, i + 1)));
            pairs
        }
        Structure::Pairwise => (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect(),
    })
}

/// Angle of a templated rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    /// `scale · params[index]`.
    Param {
        index: usize,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: Option<Angle>,
}

/// Gate template whose rotation angles may refer to parameter slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n: usize,
    ops: Vec<Op>,
    param_count: usize,
}

impl ParamCircuit {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.param_count {
            return Err(Error::DimensionMismatch {
                expected: self.param_count,
                actual: params.len(),
            });
        }
        let gates = self
            .ops
            .iter()
            .map(|op| {
                let angle = op.angle.map(|a| match a {
                    Angle::Fixed(v) => v,
                    Angle::Param { index, scale } => scale * params[index],
                });
                Gate::new(op.kind, &op.targets, angle)
            })
            .collect::<Result<_>>()?;
        Ok(Circuit { n: self.n, gates })
    }

    /// Binds `params` and runs the result from `|0…0⟩`.
    pub fn simulate(&self, params: &[f64]) -> Result<Statevector> {
        self.bind(params)?.simulate()
    }
}

/// Fully bound gate list.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn simulate(&self) -> Result<Statevector> {
        let mut s = Statevector::new(self.n)?;
        s.apply_all(&self.gates)?;
        Ok(s)
    }
}

/// Rotation layer, then `reps` × (entangling layer, rotation layer).
/// Slots are numbered layer-major, qubit-minor: `θ[layer·n + qubit]`.
pub fn build_two_local(n: usize, config: &AnsatzConfig) -> Result<ParamCircuit> {
    if config.reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    let pairs = entanglement_pairs(n, config.structure)?;
    let rot = config.rotation.gate();
    let ent = config.entangler.gate();
    let mut ops = Vec::with_capacity((config.reps + 1) * n + config.reps * pairs.len());
    let rotation_layer = |ops: &mut Vec<Op>, layer: usize| {
        for q in 0..n {
            ops.push(Op {
                kind: rot,
                targets: vec![q],
                angle: Some(Angle::Param {
                    index: layer * n + q,
                    scale: 1.0,
                }),
            });
        }
    };
    rotation_layer(&mut ops, 0);
    for layer in 1..=config.reps {
        for &(a, b) in &pairs {
            ops.push(Op {
                kind: ent,
                targets: vec![a, b],
                angle: None,
            });
        }
        rotation_layer(&mut ops, layer);
    }
    Ok(ParamCircuit {
        n,
        ops,
        param_count: n * (config.reps + 1),
    })
}

/// QAOA template with slots `[β₀…β_{p−1}, γ₀…γ_{p−1}]`.
///
/// Uniform superposition, then per layer `rz(2γhᵢ)` on every nonzero field,
/// `rzz(2γjᵢₖ)` on every nonzero coupling and `rx(2β)` on every qubit. The
/// Hamiltonian offset contributes only a global phase and is left out.
pub fn qaoa_ansatz(ising: &IsingHamiltonian, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::InvalidArgument("QAOA needs at least one layer".into()));
    }
    let n = ising.n;
    let mut ops: Vec<Op> = (0..n)
        .map(|q| Op {
            kind: GateKind::H,
            targets: vec![q],
            angle: None,
        })
        .collect();
    for layer in 0..p {
        let gamma = p + layer;
        for (q, &h) in ising.h.iter().enumerate() {
            if h != 0.0 {
                ops.push(Op {
                    kind: GateKind::Rz,
                    targets: vec![q],
                    angle: Some(Angle::Param {
                        index: gamma,
                        scale: 2.0 * h,
                    }),
                });
            }
        }
        for (a, b, j) in ising.couplings() {
            ops.push(Op {
                kind: GateKind::Rzz,
                targets: vec![a, b],
                angle: Some(Angle::Param {
                    index: gamma,
                    scale: 2.0 * j,
                }),
            });
        }
        for q in 0..n {
            ops.push(Op {
                kind: GateKind::Rx,
                targets: vec![q],
                angle: Some(Angle::Param {
                    index: layer,
                    scale: 2.0,
                }),
            });
        }
    }
    Ok(ParamCircuit {
        n,
        ops,
        param_count: 2 * p,
    })
}

/// QAOA circuit with all angles bound.
pub fn build_qaoa_circuit(ising: &IsingHamiltonian, p: usize, betas: &[f64], gammas: &[f64]) -> Result<Circuit> {
    for v in [betas, gammas] {
        if v.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: v.len(),
            });
        }
    }
    let params: Vec<f64> = betas.iter().chain(gammas).copied().collect();
    qaoa_ansatz(ising, p)?.bind(&params)
}
