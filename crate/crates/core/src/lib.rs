//! Budget-constrained mean-variance portfolio selection, encoded as a
//! diagonal Ising Hamiltonian and solved three ways: exhaustively, with a
//! variational eigensolver over a family of two-local ansätze, and with QAOA.
//!
//! The pipeline, module by module:
//!
//! - [`market`]: price history, returns, μ and Σ;
//! - [`encoding`]: QUBO/Ising construction and the exact ground state;
//! - [`simulator`]: dense statevector simulation;
//! - [`circuits`]: two-local and QAOA circuit builders;
//! - [`solvers`]: Nelder–Mead/SPSA and the VQE/QAOA drivers;
//! - [`sweep`]: the risk × configuration × algorithm experiment grid;
//! - [`report`]: CSV, JSON, SVG and text output.
//!
//! ```
//! use poqa::encoding::{build_portfolio_qubo, exact_ground_state};
//! use poqa::market::AssetStatistics;
//!
//! let stats = AssetStatistics {
//!     mu: vec![0.1, 0.2],
//!     sigma: vec![vec![0.01, 0.0], vec![0.0, 0.01]],
//! };
//! let (_, qubo) = build_portfolio_qubo(&stats, 0.5, 1, Some(1.0))?;
//! let ground = exact_ground_state(&qubo)?;
//! assert_eq!(ground.bits.to_string(), "01");
//! # Ok::<(), poqa::Error>(())
//! ```

pub mod circuits;
pub mod cli;
pub mod encoding;
mod error;
pub mod market;
pub mod report;
pub mod seed;
pub mod simulator;
pub mod solvers;
pub mod sweep;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    struct Intro;
    #[doc = include_str!("../../../book/src/data.md")]
    struct Data;
    #[doc = include_str!("../../../book/src/encoding.md")]
    struct Encoding;
    #[doc = include_str!("../../../book/src/simulator.md")]
    struct Simulator;
    #[doc = include_str!("../../../book/src/circuits.md")]
    struct Circuits;
    #[doc = include_str!("../../../book/src/solvers.md")]
    struct Solvers;
    #[doc = include_str!("../../../book/src/sweep.md")]
    struct Sweep;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
