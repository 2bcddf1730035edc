//! Exact diagonalization into a joint eigenbasis of `H` and `t(u)`, zero-root
//! extraction and classification, energies, momenta and decay fits.

mod eigen;
mod fit;
pub mod json;
mod lambda;
mod observables;
mod roots;
pub mod sectors;

use thiserror::Error;

pub use eigen::{hamiltonian_spectrum, joint_eigenbasis, EigenRecord, Spectrum, DEFAULT_PROBE};
pub use fit::{fit_decay, DecayModel, FitResult};
pub use lambda::LambdaPoly;
pub use observables::{energy_from_roots, momentum_from_roots, reduce_momentum};
pub use roots::{
    classify_roots, default_pair_tolerance, extract_roots, Classification, RootSet, RootTag,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("t(u0) stays degenerate after {attempts} probe shifts (min separation {separation:e})")]
    Degenerate { attempts: usize, separation: f64 },
    #[error("root reconstruction residual {residual:e} above {limit:e}")]
    Reconstruction { residual: f64, limit: f64 },
    #[error("companion matrix eigen-decomposition did not converge")]
    Companion,
    #[error("expected {expected} roots, got {got}")]
    RootCount { expected: usize, got: usize },
    #[error("root {index} sits on the pole z = η/2")]
    Pole { index: usize },
    #[error("energy from roots has imaginary part {0:e}")]
    ComplexEnergy(f64),
    #[error("fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-positive deviation {value:e} at N = {n}")]
    NonPositive { n: f64, value: f64 },
}
