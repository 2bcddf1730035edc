use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use super::lambda::LambdaPoly;
use super::roots::{classify_roots, extract_roots, RootSet};
use super::sectors::SectorBasis;
use super::SpectraError;
use crate::model::{hamiltonian_column, ModelParams, TransferOperator};

/// Generic probe point for `t(u0)`.
pub const DEFAULT_PROBE: Complex64 = Complex64::new(0.17, 0.09);
const PROBE_STEP: f64 = 0.013;
const MAX_PROBE_SHIFTS: usize = 6;
const COLLISION: f64 = 1e-8;
/// Phase used to form the Hermitian combination `α t + (α t)†`.
const HERMITIAN_PHASE: f64 = 0.3;

/// One joint eigenstate of `H` and the transfer-matrix family.
#[derive(Clone, Debug)]
pub struct EigenRecord {
    pub index: usize,
    pub sector: usize,
    /// Rayleigh quotient of `H`.
    pub energy: f64,
    /// `arg Λ(0)` in `[0, 2π)`.
    pub momentum: f64,
    /// `Λ(u)`; exact trigonometric polynomial built from Rayleigh quotients.
    pub lambda: LambdaPoly,
    pub roots: Option<RootSet>,
    coords: Vec<Complex64>,
}

impl EigenRecord {
    pub fn lambda_at(&self, u: Complex64) -> Complex64 {
        self.lambda.eval(u)
    }

    /// Coordinates in the sector basis.
    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }
}

/// All joint eigenstates of one chain.
#[derive(Clone, Debug)]
pub struct Spectrum {
    params: ModelParams<f64>,
    basis: Arc<SectorBasis>,
    probe: Complex64,
    records: Vec<EigenRecord>,
}

impl Spectrum {
    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    /// Probe point actually used (after any degeneracy shifts).
    pub fn probe(&self) -> Complex64 {
        self.probe
    }

    pub fn records(&self) -> &[EigenRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<EigenRecord> {
        self.records
    }

    pub fn ground(&self) -> &EigenRecord {
        &self.records[0]
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    /// Full `2^N` eigenvector of a record.
    pub fn eigenvector(&self, index: usize) -> Vec<Complex64> {
        let r = &self.records[index];
        self.basis.expand(r.sector, &r.coords)
    }

    /// `v† t(u) v / v† v` evaluated directly on the full vector.
    pub fn lambda_direct(&self, index: usize, u: Complex64) -> Complex64 {
        let v = self.eigenvector(index);
        let tv = TransferOperator::new(&self.params, u).apply(&v);
        let num: Complex64 = v.iter().zip(&tv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        num / den
    }

    /// Extracts roots for the selected records (all when `indices` is `None`).
    pub fn extract_roots(&mut self, indices: Option<&[usize]>) -> Result<(), SpectraError> {
        let params = &self.params;
        let wanted: Vec<usize> = match indices {
            Some(ix) => ix.to_vec(),
            None => (0..self.records.len()).collect(),
        };
        let found: Vec<(usize, Result<RootSet, SpectraError>)> = wanted
            .par_iter()
            .map(|&i| (i, extract_roots(&self.records[i], params)))
            .collect();
        for (i, res) in found {
            self.records[i].roots = Some(res?);
        }
        Ok(())
    }

    /// Classifies every record that already has roots.
    pub fn classify(&mut self, tol: f64) {
        let params = self.params.clone();
        self.records.par_iter_mut().for_each(|r| {
            if let Some(rs) = r.roots.as_mut() {
                let c = classify_roots(rs, &params, tol);
                rs.classification = Some(c);
            }
        });
    }
}

fn rayleigh(m: &DMatrix<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    let my = m * y;
    y.dotc(&my) / y.norm_squared()
}

struct SectorEigen {
    vectors: DMatrix<Complex64>,
    lambdas: Vec<Complex64>,
    /// Smallest separation of `Λ(u0)` values or largest eigen-residual failure.
    separation: f64,
    ok: bool,
}

fn hermitian_part(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let alpha = Complex64::from_polar(1.0, HERMITIAN_PHASE);
    let at = t * alpha;
    &at + at.adjoint()
}

/// Eigenvectors of a normal block `t` from the Hermitian matrix `αt + (αt)†`.
fn diagonalize_normal(t: &DMatrix<Complex64>) -> SectorEigen {
    let d = t.nrows();
    let eig = SymmetricEigen::new(hermitian_part(t));
    let vectors = eig.eigenvectors;
    let scale = t.camax().max(1.0);
    let mut lambdas = Vec::with_capacity(d);
    let mut ok = true;
    for k in 0..d {
        let y = vectors.column(k).into_owned();
        let lam = rayleigh(t, &y);
        let resid = (t * &y - &y * lam).norm();
        if resid > COLLISION * scale {
            ok = false;
        }
        lambdas.push(lam);
    }
    let mut separation = f64::INFINITY;
    for i in 0..d {
        for j in i + 1..d {
            separation = separation.min((lambdas[i] - lambdas[j]).norm());
        }
    }
    if separation < COLLISION * scale {
        ok = false;
    }
    SectorEigen {
        vectors,
        lambdas,
        separation,
        ok,
    }
}

/// Splits clusters of equal `Λ(u0)` using a second probe block.
fn refine_with_second_probe(
    first: SectorEigen,
    t0: &DMatrix<Complex64>,
    t1: &DMatrix<Complex64>,
) -> SectorEigen {
    let d = t0.nrows();
    let scale = t0.camax().max(1.0);
    let herm = SymmetricEigen::new(hermitian_part(t0));
    let values = herm.eigenvalues;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut vectors = DMatrix::zeros(d, d);
    let mut col = 0;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[order[end]] - values[order[end - 1]]).abs() < 1e-6 * scale {
            end += 1;
        }
        let g = end - start;
        let q = DMatrix::from_fn(d, g, |r, c| herm.eigenvectors[(r, order[start + c])]);
        if g == 1 {
            vectors.set_column(col, &q.column(0));
        } else {
            let small = q.adjoint() * t1 * &q;
            let inner = diagonalize_normal(&small);
            let rotated = &q * &inner.vectors;
            for c in 0..g {
                vectors.set_column(col + c, &rotated.column(c));
            }
        }
        col += g;
        start = end;
    }
    let mut lambdas = Vec::with_capacity(d);
    let mut ok = true;
    for k in 0..d {
        let y = vectors.column(k).into_owned();
        let l0 = rayleigh(t0, &y);
        let l1 = rayleigh(t1, &y);
        let r0 = (t0 * &y - &y * l0).norm();
        let r1 = (t1 * &y - &y * l1).norm();
        if r0.max(r1) > COLLISION * scale {
            ok = false;
        }
        lambdas.push(l0);
    }
    SectorEigen {
        vectors,
        lambdas,
        separation: first.separation,
        ok,
    }
}

/// Diagonalizes `t(u0)` sector by sector and builds one record per eigenvector.
///
/// `t(u)` is normal for both regimes, so its eigenvectors are those of the
/// Hermitian matrix `αt + (αt)†`. Collisions of `Λ(u0)` below `1e-8` shift the
/// probe by `0.013`; persistent collisions are split with a second probe.
pub fn joint_eigenbasis(params: &ModelParams<f64>, u0: Complex64) -> Result<Spectrum, SpectraError> {
    let basis = Arc::new(SectorBasis::new(params));
    let h_blocks = basis.project_sparse(|s| hamiltonian_column(params, s));
    let project_t = |u: Complex64| {
        let op = TransferOperator::new(params, u);
        basis.project(|s| op.apply_basis(s))
    };

    let mut probe = u0;
    let mut t_blocks = project_t(probe);
    let mut eigs: Vec<SectorEigen> = t_blocks.par_iter().map(diagonalize_normal).collect();
    let mut attempts = 0;
    while eigs.iter().any(|e| !e.ok) && attempts < MAX_PROBE_SHIFTS {
        attempts += 1;
        probe += PROBE_STEP;
        t_blocks = project_t(probe);
        eigs = t_blocks.par_iter().map(diagonalize_normal).collect();
    }
    if eigs.iter().any(|e| !e.ok) {
        let second = project_t(probe + Complex64::new(0.31, -0.23));
        eigs = eigs
            .into_iter()
            .zip(t_blocks.iter().zip(&second))
            .map(|(e, (t0, t1))| {
                if e.ok {
                    e
                } else {
                    refine_with_second_probe(e, t0, t1)
                }
            })
            .collect();
        if let Some(bad) = eigs.iter().find(|e| !e.ok) {
            return Err(SpectraError::Degenerate {
                attempts,
                separation: bad.separation,
            });
        }
    }

    let n = params.n_sites();
    let nodes = LambdaPoly::unit_circle_nodes(n);
    // samples[sector][record][node]
    let mut samples: Vec<Vec<Vec<Complex64>>> = eigs
        .iter()
        .map(|e| vec![Vec::with_capacity(n); e.lambdas.len()])
        .collect();
    for &u in &nodes {
        let blocks = project_t(u);
        for (si, (e, b)) in eigs.iter().zip(&blocks).enumerate() {
            for k in 0..e.lambdas.len() {
                let y = e.vectors.column(k).into_owned();
                samples[si][k].push(rayleigh(b, &y));
            }
        }
    }

    let mut records = Vec::with_capacity(params.dim());
    for (si, e) in eigs.iter().enumerate() {
        for k in 0..e.lambdas.len() {
            let y = e.vectors.column(k).into_owned();
            let energy = rayleigh(&h_blocks[si], &y);
            debug_assert!(energy.im.abs() < 1e-9 * (1.0 + energy.re.abs()));
            let lambda = LambdaPoly::from_unit_circle_samples(&samples[si][k]);
            let momentum = super::observables::reduce_momentum(lambda.eval(Complex64::zero()).arg());
            records.push(EigenRecord {
                index: 0,
                sector: si,
                energy: energy.re,
                momentum,
                lambda,
                roots: None,
                coords: y.iter().copied().collect(),
            });
        }
    }
    records.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    // ties in energy are ordered by momentum
    let mut start = 0;
    while start < records.len() {
        let mut end = start + 1;
        while end < records.len() && records[end].energy - records[end - 1].energy < 1e-9 {
            end += 1;
        }
        records[start..end].sort_by(|a, b| a.momentum.total_cmp(&b.momentum));
        start = end;
    }
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i;
    }
    Ok(Spectrum {
        params: params.clone(),
        basis,
        probe,
        records,
    })
}

/// Eigenvalues of `H` in ascending order, via the momentum sectors.
pub fn hamiltonian_spectrum(params: &ModelParams<f64>) -> Vec<f64> {
    let p = params.homogeneous_limit();
    let basis = SectorBasis::new(&p);
    let blocks = basis.project_sparse(|s| hamiltonian_column(&p, s));
    let mut out: Vec<f64> = blocks
        .into_par_iter()
        .flat_map_iter(|b| SymmetricEigen::new(b).eigenvalues.iter().copied().collect::<Vec<_>>())
        .collect();
    out.sort_by(f64::total_cmp);
    out
}
