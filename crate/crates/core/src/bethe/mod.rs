//! Direct solution of the functional relations for `(Λ_0, {z_j})` with
//! continuation in the inhomogeneities, and the T-Q relation / Bethe equations
//! at small `N`.

mod newton;
mod tq;
mod tt;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::ModelError;
use crate::spectra::SpectraError;

pub use newton::{newton, NewtonOptions, NewtonReport};
pub use tq::{bae_residual, solve_bae, BAE_SEED, tq_lambda, BaeReport, BetheRoots, StringTag};
pub use tt::{polish_tt, solve_tt, theta_path, tt_residual, TTSystem, TT_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetheError {
    #[error("expected {expected} unknowns, got {got}")]
    Unknowns { expected: usize, got: usize },
    #[error("seed residual {0:e} above 1e-2")]
    BadSeed(f64),
    #[error("Newton stalled at residual {residual:e} after {iterations} iterations")]
    Diverged { residual: f64, iterations: usize },
    #[error("continuation failed beyond depth 12; last converged θ = {last_good:?}")]
    Continuation { last_good: Vec<Complex64> },
    #[error("Q(u) vanishes at u = {0}")]
    QZero(Complex64),
    #[error("Bethe equations need θ = 0")]
    Inhomogeneous,
    #[error("Bethe roots {0} and {1} coincide")]
    Coinciding(usize, usize),
    #[error("singular Jacobian")]
    Singular,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}
