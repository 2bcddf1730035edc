//! R-matrix, transfer matrix and Hamiltonian of the antiperiodic XXZ chain.
//!
//! Basis convention: a state index `s` in `0..2^N` stores site `j` (1-based)
//! in bit `N - j`, so site 1 is the most significant bit. Bit value 0 is spin
//! up (`σ^z = +1`). The auxiliary space, where present, sits above all
//! quantum sites.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::scalar::{cre, cx, Cx, Real};

/// Largest chain the dense machinery accepts at all.
pub const MAX_SITES: usize = 14;

/// Default cap for dense constructions; configurable by callers.
pub const DEFAULT_DENSE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("chain length {0} outside 2..={MAX_SITES}")]
    Sites(usize),
    #[error("anisotropy {re}+{im}i is not in the real or real+iπ regime")]
    Regime { re: f64, im: f64 },
    #[error("degenerate anisotropy: sinh(η) vanishes")]
    DegenerateEta,
    #[error("expected {expected} inhomogeneity parameters, got {got}")]
    ThetaCount { expected: usize, got: usize },
    #[error("inhomogeneity θ_{index} = {re}+{im}i must be imaginary with Im θ in [-π/2, π/2)")]
    Theta { index: usize, re: f64, im: f64 },
    #[error("chain length {n} exceeds the dense cap {cap}")]
    DenseCap { n: usize, cap: usize },
}

/// Anisotropy regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `η ∈ ℝ`.
    Ferromagnetic,
    /// `η ∈ ℝ + iπ`.
    Antiferromagnetic,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Ferromagnetic => f.write_str("ferromagnetic"),
            Regime::Antiferromagnetic => f.write_str("antiferromagnetic"),
        }
    }
}

impl Regime {
    pub fn classify<T: Real>(eta: Cx<T>) -> Result<Self, ModelError> {
        let tol = T::lit(1e-9);
        if eta.im.abs() <= tol {
            Ok(Regime::Ferromagnetic)
        } else if (eta.im - T::PI()).abs() <= tol {
            Ok(Regime::Antiferromagnetic)
        } else {
            Err(ModelError::Regime {
                re: eta.re.to_f64().unwrap_or(f64::NAN),
                im: eta.im.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

/// Chain size, anisotropy and inhomogeneities for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    n_sites: usize,
    eta: Cx<T>,
    thetas: Vec<Cx<T>>,
    regime: Regime,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n_sites: usize, eta: Cx<T>, thetas: Vec<Cx<T>>) -> Result<Self, ModelError> {
        if !(2..=MAX_SITES).contains(&n_sites) {
            return Err(ModelError::Sites(n_sites));
        }
        let regime = Regime::classify(eta)?;
        if eta.re.abs() < T::lit(1e-12) {
            return Err(ModelError::DegenerateEta);
        }
        if thetas.len() != n_sites {
            return Err(ModelError::ThetaCount {
                expected: n_sites,
                got: thetas.len(),
            });
        }
        let half = T::FRAC_PI_2();
        for (index, th) in thetas.iter().enumerate() {
            if th.re != T::zero() || th.im < -half || th.im >= half {
                return Err(ModelError::Theta {
                    index: index + 1,
                    re: th.re.to_f64().unwrap_or(f64::NAN),
                    im: th.im.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            n_sites,
            eta,
            thetas,
            regime,
        })
    }

    pub fn homogeneous(n_sites: usize, eta: Cx<T>) -> Result<Self, ModelError> {
        Self::new(n_sites, eta, vec![Cx::zero(); n_sites])
    }

    /// `η = eta_re`, all `θ_j = 0`.
    pub fn ferromagnetic(n_sites: usize, eta_re: T) -> Result<Self, ModelError> {
        Self::homogeneous(n_sites, cre(eta_re))
    }

    /// `η = eta_plus + iπ`, all `θ_j = 0`.
    pub fn antiferromagnetic(n_sites: usize, eta_plus: T) -> Result<Self, ModelError> {
        Self::homogeneous(n_sites, cx(eta_plus, T::PI()))
    }

    /// Replaces the inhomogeneities by `i * im_parts`.
    pub fn with_imaginary_thetas(&self, im_parts: &[T]) -> Result<Self, ModelError> {
        Self::new(
            self.n_sites,
            self.eta,
            im_parts.iter().map(|&t| cx(T::zero(), t)).collect(),
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn eta(&self) -> Cx<T> {
        self.eta
    }

    /// `Re η`; equals `η_+` in the antiferromagnetic regime.
    pub fn eta_re(&self) -> T {
        self.eta.re
    }

    pub fn thetas(&self) -> &[Cx<T>] {
        &self.thetas
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_homogeneous(&self) -> bool {
        self.thetas.iter().all(|t| t.is_zero())
    }

    /// Same `N` and `η` with all inhomogeneities removed.
    pub fn homogeneous_limit(&self) -> Self {
        Self {
            thetas: vec![Cx::zero(); self.n_sites],
            ..self.clone()
        }
    }

    pub fn check_dense_cap(&self, cap: usize) -> Result<(), ModelError> {
        if self.n_sites > cap {
            Err(ModelError::DenseCap {
                n: self.n_sites,
                cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Dense operator on the `2^N` spin space with a provenance label.
#[derive(Clone, Debug)]
pub struct LinearOperator<T> {
    pub matrix: CMatrix<T>,
    pub label: String,
}

impl<T: Real> LinearOperator<T> {
    pub fn new(matrix: CMatrix<T>, label: impl Into<String>) -> Self {
        assert_eq!(matrix.rows(), matrix.cols(), "operators are square");
        assert!(matrix.rows().is_power_of_two(), "dim must be 2^N");
        assert!(matrix.is_finite(), "operator entries must be finite");
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Weights `(sinh(u+η)/sinh η, sinh(u)/sinh η)` of the six-vertex R-matrix.
fn r_weights<T: Real>(u: Cx<T>, eta: Cx<T>) -> (Cx<T>, Cx<T>) {
    let s = eta.sinh();
    ((u + eta).sinh() / s, u.sinh() / s)
}

/// Six-vertex R-matrix on auxiliary ⊗ quantum space (auxiliary index major).
pub fn r_matrix<T: Real>(u: Cx<T>, eta: Cx<T>) -> Result<CMatrix<T>, ModelError> {
    if eta.sinh().norm() < T::lit(1e-12) {
        return Err(ModelError::DegenerateEta);
    }
    let (a, b) = r_weights(u, eta);
    let (o, l) = (Cx::zero(), Cx::one());
    Ok(CMatrix::from_rows(
        4,
        4,
        vec![
            a, o, o, o, //
            o, b, l, o, //
            o, l, b, o, //
            o, o, o, a,
        ],
    ))
}

/// `φ(u) = -sinh(u+η) sinh(u-η) / sinh² η`.
pub fn unitarity_factor<T: Real>(u: Cx<T>, eta: Cx<T>) -> Cx<T> {
    let s = eta.sinh();
    -(u + eta).sinh() * (u - eta).sinh() / (s * s)
}

/// Applies `R_{0,j}` in place on a vector over auxiliary ⊗ quantum space.
fn apply_r_local<T: Real>(x: &mut [Cx<T>], n_sites: usize, site: usize, weights: (Cx<T>, Cx<T>)) {
    let (a, b) = weights;
    let aux = 1usize << n_sites;
    let sb = 1usize << (n_sites - site);
    for i in 0..aux {
        if i & sb != 0 {
            continue;
        }
        let (i00, i01, i10, i11) = (i, i | sb, i | aux, i | aux | sb);
        let (x00, x01, x10, x11) = (x[i00], x[i01], x[i10], x[i11]);
        x[i00] = a * x00;
        x[i11] = a * x11;
        x[i01] = b * x01 + x10;
        x[i10] = x01 + b * x10;
    }
}

/// Matrix-free transfer matrix `t(u) = tr_0{σ^x_0 R_{0,N}(u-θ_N)…R_{0,1}(u-θ_1)}`.
#[derive(Clone, Debug)]
pub struct TransferOperator<T> {
    n_sites: usize,
    weights: Vec<(Cx<T>, Cx<T>)>,
    u: Cx<T>,
}

impl<T: Real> TransferOperator<T> {
    pub fn new(params: &ModelParams<T>, u: Cx<T>) -> Self {
        let weights = params
            .thetas()
            .iter()
            .map(|&th| r_weights(u - th, params.eta()))
            .collect();
        Self {
            n_sites: params.n_sites(),
            weights,
            u,
        }
    }

    pub fn u(&self) -> Cx<T> {
        self.u
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `t(u) v`.
    pub fn apply(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        let d = self.dim();
        assert_eq!(v.len(), d);
        let mut out = vec![Cx::zero(); d];
        let mut x = vec![Cx::zero(); 2 * d];
        for b in 0..2 {
            x.iter_mut().for_each(|e| *e = Cx::zero());
            x[b * d..(b + 1) * d].copy_from_slice(v);
            for (j, &w) in self.weights.iter().enumerate() {
                apply_r_local(&mut x, self.n_sites, j + 1, w);
            }
            // σ^x in the trace pairs input aux b with output aux 1-b
            let src = &x[(1 - b) * d..(2 - b) * d];
            for (o, &y) in out.iter_mut().zip(src) {
                *o = *o + y;
            }
        }
        out
    }

    /// `t(u) e_s` for a basis state.
    pub fn apply_basis(&self, s: usize) -> Vec<Cx<T>> {
        let mut e = vec![Cx::zero(); self.dim()];
        e[s] = Cx::one();
        self.apply(&e)
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let d = self.dim();
        CMatrix::from_columns(d, d, |c| self.apply_basis(c))
    }
}

/// Dense transfer matrix `t(u)`.
pub fn transfer_matrix<T: Real>(params: &ModelParams<T>, u: Cx<T>) -> LinearOperator<T> {
    let op = TransferOperator::new(params, u);
    LinearOperator::new(op.to_dense(), format!("t(u={}{:+}i)", u.re, u.im))
}

/// Nonzero matrix elements `(row, value)` of `H` in column `s`.
///
/// Bulk bonds carry `-(σ^xσ^x + σ^yσ^y + cosh η σ^zσ^z)`; the twisted bond
/// `(N, 1)` becomes `-(σ^xσ^x - σ^yσ^y - cosh η σ^zσ^z)`.
pub fn hamiltonian_column<T: Real>(params: &ModelParams<T>, s: usize) -> Vec<(usize, Cx<T>)> {
    let n = params.n_sites();
    // real in both regimes; dropping the rounding residue keeps H exactly Hermitian
    let ch = cre(params.eta().cosh().re);
    let bit = |site: usize| 1usize << (n - site);
    let sz = |site: usize| if s & bit(site) == 0 { T::one() } else { -T::one() };
    let two = cre(T::two());
    let mut diag = Cx::zero();
    let mut out = Vec::with_capacity(n + 1);
    for j in 1..=n {
        let k = if j == n { 1 } else { j + 1 };
        let zz = sz(j) * sz(k);
        let parallel = zz > T::zero();
        let twisted = j == n;
        if twisted {
            diag = diag + ch * zz;
        } else {
            diag = diag - ch * zz;
        }
        // bulk bonds flip antiparallel pairs, the twisted bond flips parallel pairs
        if parallel == twisted {
            out.push((s ^ bit(j) ^ bit(k), -two));
        }
    }
    out.push((s, diag));
    out
}

/// Dense Hamiltonian with the antiperiodic boundary.
pub fn hamiltonian<T: Real>(params: &ModelParams<T>) -> LinearOperator<T> {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for s in 0..d {
        for (r, v) in hamiltonian_column(params, s) {
            m[(r, s)] = m[(r, s)] + v;
        }
    }
    LinearOperator::new(m, "H")
}

/// `(a(u), d(u))` with `d(u) = ∏ sinh(u-θ_j)/sinh η` and `a(u) = d(u+η)`.
pub fn ad_functions<T: Real>(params: &ModelParams<T>, u: Cx<T>) -> (Cx<T>, Cx<T>) {
    let eta = params.eta();
    let s = eta.sinh();
    params
        .thetas()
        .iter()
        .fold((Cx::one(), Cx::one()), |(a, d), &th| {
            (a * (u - th + eta).sinh() / s, d * (u - th).sinh() / s)
        })
}

/// Largest entrywise residual of `t(θ_j) t(θ_j-η) + a(θ_j) d(θ_j-η)` over `j`.
pub fn verify_tt_identity<T: Real>(params: &ModelParams<T>) -> T {
    let eta = params.eta();
    let mut worst = T::zero();
    for &th in params.thetas() {
        let t1 = TransferOperator::new(params, th).to_dense();
        let t2 = TransferOperator::new(params, th - eta).to_dense();
        let (a, _) = ad_functions(params, th);
        let (_, d) = ad_functions(params, th - eta);
        let prod = &t1 * &t2;
        let shift = CMatrix::identity(params.dim()).scale(a * d);
        worst = worst.max((&prod + &shift).max_abs());
    }
    worst
}

/// `H` rebuilt from `-2 sinh η t'(0) t(0)^{-1} + N cosh η` at `θ = 0`.
///
/// `t'(0)` comes from central differences with two Richardson levels starting
/// at `step`; `t(0)` is a permutation so its inverse is its adjoint.
pub fn hamiltonian_from_transfer<T: Real>(params: &ModelParams<T>, step: T) -> LinearOperator<T> {
    let p = params.homogeneous_limit();
    let central = |h: T| {
        let tp = TransferOperator::new(&p, cre(h)).to_dense();
        let tm = TransferOperator::new(&p, cre(-h)).to_dense();
        (&tp - &tm).scale(cre(T::one() / (T::two() * h)))
    };
    let d1 = central(step);
    let d2 = central(step / T::two());
    let d4 = central(step / T::lit(4.0));
    let r1 = (&d2.scale(cre(T::lit(4.0))) - &d1).scale(cre(T::one() / T::lit(3.0)));
    let r2 = (&d4.scale(cre(T::lit(4.0))) - &d2).scale(cre(T::one() / T::lit(3.0)));
    let deriv = (&r2.scale(cre(T::lit(16.0))) - &r1).scale(cre(T::one() / T::lit(15.0)));
    let t0_inv = TransferOperator::new(&p, Cx::zero()).to_dense().adjoint();
    let eta = p.eta();
    let n = T::from_usize(p.n_sites()).unwrap();
    let h = (&deriv * &t0_inv).scale(-eta.sinh() * cre(T::two()));
    let shift = CMatrix::identity(p.dim()).scale(eta.cosh() * cre(n));
    LinearOperator::new(&h + &shift, "H from t'(0)t(0)^-1")
}
