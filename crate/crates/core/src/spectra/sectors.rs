//! Symmetry sectors used to block-diagonalize commuting operators.
//!
//! For a homogeneous chain `t(0)` is a permutation of basis states with
//! `t(0)^{2N} = 1`; its orbits give the momentum sectors. With inhomogeneities
//! the global spin flip is used instead. In both cases an operator `A` that
//! commutes with the permutation is block diagonal in the orbit basis
//! `v_O = L^{-1/2} Σ_j ω^{-j} e_{π^j s}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::model::{ModelParams, TransferOperator};

#[derive(Clone, Debug)]
struct Orbit {
    /// `states[j] = π^j(states[0])`.
    states: Vec<usize>,
}

/// One eigenspace of the symmetry permutation.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Eigenvalue `ω` of the permutation on this sector.
    pub phase: Complex64,
    /// `ω = exp(2πi m / order)`.
    pub index: usize,
    orbits: Vec<usize>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.orbits.len()
    }
}

#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_sites: usize,
    order: usize,
    orbits: Vec<Orbit>,
    /// For every basis state: (orbit index, position in orbit).
    location: Vec<(usize, usize)>,
    sectors: Vec<Sector>,
    momentum_resolved: bool,
}

impl SectorBasis {
    pub fn new(params: &ModelParams<f64>) -> Self {
        let n = params.n_sites();
        let dim = params.dim();
        let (perm, order, momentum_resolved) = if params.is_homogeneous() {
            let shift = TransferOperator::new(params, Complex64::zero());
            let perm: Vec<usize> = (0..dim)
                .map(|s| {
                    let col = shift.apply_basis(s);
                    col.iter()
                        .position(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-12)
                        .expect("t(0) maps basis states to basis states")
                })
                .collect();
            (perm, 2 * n, true)
        } else {
            ((0..dim).map(|s| s ^ (dim - 1)).collect(), 2, false)
        };

        let mut location = vec![(usize::MAX, 0); dim];
        let mut orbits = Vec::new();
        for s in 0..dim {
            if location[s].0 != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut states = vec![s];
            location[s] = (id, 0);
            let mut cur = perm[s];
            while cur != s {
                location[cur] = (id, states.len());
                states.push(cur);
                cur = perm[cur];
            }
            assert_eq!(order % states.len(), 0, "orbit length divides group order");
            orbits.push(Orbit { states });
        }

        let sectors = (0..order)
            .map(|m| {
                let angle = 2.0 * std::f64::consts::PI * m as f64 / order as f64;
                Sector {
                    phase: Complex64::from_polar(1.0, angle),
                    index: m,
                    orbits: (0..orbits.len())
                        .filter(|&o| (m * orbits[o].states.len()) % order == 0)
                        .collect(),
                }
            })
            .filter(|s| !s.orbits.is_empty())
            .collect();

        Self {
            n_sites: n,
            order,
            orbits,
            location,
            sectors,
            momentum_resolved,
        }
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// True when sectors are eigenspaces of `t(0)`.
    pub fn is_momentum_resolved(&self) -> bool {
        self.momentum_resolved
    }

    fn phase_power(&self, sector: &Sector, j: usize) -> Complex64 {
        let k = (sector.index * j) % self.order;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / self.order as f64)
    }

    /// Projects an operator, given by its action on basis states, onto every sector.
    ///
    /// Only orbit representatives are applied, so the cost is one column per
    /// orbit rather than one per basis state.
    pub fn project<F>(&self, column: F) -> Vec<DMatrix<Complex64>>
    where
        F: Fn(usize) -> Vec<Complex64> + Sync,
    {
        let columns: Vec<Vec<Complex64>> = self
            .orbits
            .par_iter()
            .map(|o| column(o.states[0]))
            .collect();
        self.sectors
            .par_iter()
            .map(|sector| {
                let d = sector.dim();
                let mut block = DMatrix::zeros(d, d);
                let phases: Vec<Complex64> =
                    (0..self.order).map(|j| self.phase_power(sector, j)).collect();
                for (col, &oi) in sector.orbits.iter().enumerate() {
                    let w = &columns[oi];
                    let len = self.orbits[oi].states.len() as f64;
                    for (row, &o2) in sector.orbits.iter().enumerate() {
                        let states = &self.orbits[o2].states;
                        let acc: Complex64 = states
                            .iter()
                            .zip(&phases)
                            .map(|(&st, ph)| ph * w[st])
                            .sum();
                        block[(row, col)] = acc * (len / states.len() as f64).sqrt();
                    }
                }
                block
            })
            .collect()
    }

    /// Projects from sparse columns `(row, value)`.
    pub fn project_sparse<F>(&self, column: F) -> Vec<DMatrix<Complex64>>
    where
        F: Fn(usize) -> Vec<(usize, Complex64)> + Sync,
    {
        let dim = self.location.len();
        self.project(|s| {
            let mut w = vec![Complex64::zero(); dim];
            for (r, v) in column(s) {
                w[r] += v;
            }
            w
        })
    }

    /// Expands sector coordinates into a full `2^N` vector.
    pub fn expand(&self, sector: usize, coords: &[Complex64]) -> Vec<Complex64> {
        let s = &self.sectors[sector];
        let mut v = vec![Complex64::zero(); self.location.len()];
        for (&o, &c) in s.orbits.iter().zip(coords) {
            let states = &self.orbits[o].states;
            let norm = 1.0 / (states.len() as f64).sqrt();
            for (j, &st) in states.iter().enumerate() {
                v[st] = c * self.phase_power(s, j).conj() * norm;
            }
        }
        v
    }

    /// Orbit index of basis state `s`.
    pub fn orbit_of(&self, s: usize) -> usize {
        self.location[s].0
    }
}
