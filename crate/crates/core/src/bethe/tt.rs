use nalgebra::DMatrix;
use num_complex::Complex64;

use super::newton::{newton, NewtonOptions};
use super::BetheError;
use crate::model::ModelParams;
use crate::scalar::reduce_half_strip;
use crate::spectra::RootSet;

/// Residual bound accepted at every continuation step.
pub const TT_TOLERANCE: f64 = 1e-10;
const MAX_DEPTH: usize = 12;
const SEED_LIMIT: f64 = 1e-2;
const SAME_THETA: f64 = 1e-12;
const CLUSTER_RADIUS: f64 = 0.25;
const TAYLOR_EXTRA: usize = 60;
/// Largest change of any unknown accepted in one continuation step.
const STEP_LIMIT: f64 = 0.5;

/// Unknowns `(ln Λ_0, z_1..z_{N-1})` of the functional relations for one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct TTSystem {
    params: ModelParams<f64>,
    pub log_lambda0: Complex64,
    pub roots: Vec<Complex64>,
}

impl TTSystem {
    pub fn new(params: ModelParams<f64>, lambda0: Complex64, roots: Vec<Complex64>) -> Result<Self, BetheError> {
        let expected = params.n_sites() - 1;
        if roots.len() != expected {
            return Err(BetheError::Unknowns {
                expected,
                got: roots.len(),
            });
        }
        Ok(Self {
            params,
            log_lambda0: lambda0.ln(),
            roots,
        })
    }

    pub fn from_rootset(params: &ModelParams<f64>, rs: &RootSet) -> Result<Self, BetheError> {
        Self::new(params.clone(), rs.lambda0, rs.roots.clone())
    }

    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    pub fn lambda0(&self) -> Complex64 {
        self.log_lambda0.exp()
    }

    pub fn unknowns(&self) -> Vec<Complex64> {
        std::iter::once(self.log_lambda0).chain(self.roots.iter().copied()).collect()
    }

    fn with_unknowns(&self, params: ModelParams<f64>, x: &[Complex64]) -> Self {
        Self {
            params,
            log_lambda0: x[0],
            roots: x[1..].to_vec(),
        }
    }

    /// Roots reduced into the strip; every shift by `iπ` flips the sign of `Λ_0`.
    pub fn to_rootset(&self) -> RootSet {
        let mut lambda0 = self.lambda0();
        let roots = self
            .roots
            .iter()
            .map(|z| {
                let im = reduce_half_strip(z.im);
                let shifts = ((z.im - im) / std::f64::consts::PI).round() as i64;
                if shifts % 2 != 0 {
                    lambda0 = -lambda0;
                }
                Complex64::new(z.re, im)
            })
            .collect();
        RootSet::new(lambda0, roots)
    }

    /// Replaces `Λ_0` by the least-squares fit of the relations at fixed roots.
    ///
    /// The residual is affine in `Λ_0²`; of the two square roots the one
    /// nearer the current `Λ_0` is kept.
    pub fn fit_lambda0(&mut self) {
        let at = |w: Complex64| {
            let mut x = self.unknowns();
            x[0] = w.ln() / 2.0;
            evaluate(&self.params, &x, false).residual
        };
        let (r1, r4) = (at(Complex64::new(1.0, 0.0)), at(Complex64::new(4.0, 0.0)));
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for (a, b) in r1.iter().zip(&r4) {
            let p = (b - a) / 3.0;
            num -= p.conj() * (a - p);
            den += p.norm_sqr();
        }
        if den == 0.0 {
            return;
        }
        let root = (num / den).sqrt();
        let current = self.lambda0();
        let pick = if (root - current).norm() <= (root + current).norm() { root } else { -root };
        self.log_lambda0 = pick.ln();
    }

    /// `|sinh^{-2N} η ∏_l sinh(θ_j - θ_l + η) sinh(θ_j - θ_l - η)|` per component.
    ///
    /// For a repeated `θ` the rows holding derivatives use the majorant
    /// coefficients of the same product instead.
    pub fn residual_scale(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.params.n_sites());
        for (theta, m) in groups(&self.params) {
            out.extend(driving_series(&self.params, theta, m).1);
        }
        out
    }
}

/// Distinct inhomogeneities with their multiplicities.
fn groups(params: &ModelParams<f64>) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &t in params.thetas() {
        match out.iter_mut().find(|(c, _)| (c - t).norm() < SAME_THETA) {
            Some(g) => g.1 += 1,
            None => out.push((t, 1)),
        }
    }
    out
}

/// Taylor coefficients of `sinh(w + h)` (or `cosh` when `cosh` is set) in `h`.
fn hyperbolic_series(w: Complex64, len: usize, cosh: bool) -> Vec<Complex64> {
    let (s, c) = (w.sinh(), w.cosh());
    let mut fact = 1.0;
    (0..len)
        .map(|m| {
            if m > 0 {
                fact *= m as f64;
            }
            let even = m % 2 == 0;
            (if even != cosh { s } else { c }) / fact
        })
        .collect()
}

fn mul_series(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..len {
        for j in 0..len - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Taylor coefficients of `S(θ + h)` and of its majorant, the same product
/// taken over absolute values of every factor's coefficients.
fn driving_series(params: &ModelParams<f64>, theta: Complex64, len: usize) -> (Vec<Complex64>, Vec<f64>) {
    let eta = params.eta();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    acc[0] = eta.sinh().powi(-2 * params.n_sites() as i32);
    let mut major: Vec<Complex64> = acc.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let abs = |v: Vec<Complex64>| -> Vec<Complex64> { v.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect() };
    for &tl in params.thetas() {
        for w in [theta - tl + eta, theta - tl - eta] {
            let f = hyperbolic_series(w, len, false);
            major = mul_series(&major, &abs(f.clone()));
            acc = mul_series(&acc, &f);
        }
    }
    (acc, major.iter().map(|z| z.re).collect())
}

struct Evaluation {
    residual: Vec<Complex64>,
    jacobian: DMatrix<Complex64>,
}

/// Taylor data of `F` about one centre, before scaling.
struct Local {
    f: Vec<Complex64>,
    /// `jac[d][c] = ∂F_d / ∂x_c`.
    jac: Vec<Vec<Complex64>>,
    major: Vec<f64>,
}

fn local_series(params: &ModelParams<f64>, x: &[Complex64], center: Complex64, len: usize, with_jacobian: bool) -> Local {
    let eta = params.eta();
    let lam2 = (x[0] * 2.0).exp();
    let roots = &x[1..];
    let (s, major) = driving_series(params, center, len);
    let a: Vec<Vec<Complex64>> = roots
        .iter()
        .map(|z| hyperbolic_series(center - z + eta / 2.0, len, false))
        .collect();
    let b: Vec<Vec<Complex64>> = roots
        .iter()
        .map(|z| hyperbolic_series(center - z - eta / 2.0, len, false))
        .collect();
    let mut one = vec![Complex64::new(0.0, 0.0); len];
    one[0] = Complex64::new(1.0, 0.0);
    let p = a
        .iter()
        .zip(&b)
        .fold(one.clone(), |acc, (ai, bi)| mul_series(&mul_series(&acc, ai), bi));
    let f = p.iter().zip(&s).map(|(pd, sd)| pd * lam2 + sd).collect();
    let mut jac = vec![vec![Complex64::new(0.0, 0.0); x.len()]; len];
    if with_jacobian {
        for d in 0..len {
            jac[d][0] = p[d] * lam2 * 2.0;
        }
        for (l, z) in roots.iter().enumerate() {
            let others = a
                .iter()
                .zip(&b)
                .enumerate()
                .filter(|(i, _)| *i != l)
                .fold(one.clone(), |acc, (_, (ai, bi))| mul_series(&mul_series(&acc, ai), bi));
            let da = hyperbolic_series(center - z + eta / 2.0, len, true);
            let db = hyperbolic_series(center - z - eta / 2.0, len, true);
            let pair: Vec<Complex64> = mul_series(&da, &b[l])
                .iter()
                .zip(mul_series(&a[l], &db))
                .map(|(u, v)| -(u + v))
                .collect();
            let col = mul_series(&others, &pair);
            for d in 0..len {
                jac[d][l + 1] = col[d] * lam2;
            }
        }
    }
    Local { f, jac, major }
}

/// `F(u) = Λ_0² ∏ sinh(u - z_l + η/2) sinh(u - z_l - η/2) + S(u)` and its
/// derivatives at each distinct `θ`, up to the multiplicity, each divided by
/// the matching residual scale.
fn evaluate(params: &ModelParams<f64>, x: &[Complex64], with_jacobian: bool) -> Evaluation {
    let n = params.n_sites();
    let mut residual = Vec::with_capacity(n);
    let mut jacobian = DMatrix::zeros(n, n);
    let mut row = 0;
    for (theta, m) in groups(params) {
        let local = local_series(params, x, theta, m, with_jacobian);
        for d in 0..m {
            residual.push(local.f[d] / local.major[d]);
            for c in 0..n {
                jacobian[(row + d, c)] = local.jac[d][c] / local.major[d];
            }
        }
        row += m;
    }
    Evaluation { residual, jacobian }
}

/// Divided differences `F[θ_1..θ_k]`, `k = 1..N`, from a Taylor expansion
/// about the mean `θ`.
///
/// They vanish together with the point values but stay well conditioned as
/// the inhomogeneities merge. Each row is scaled by the same combination of
/// the majorant coefficients.
fn evaluate_divided(params: &ModelParams<f64>, x: &[Complex64], with_jacobian: bool) -> Evaluation {
    let n = params.n_sites();
    let len = n + TAYLOR_EXTRA;
    let center = params.thetas().iter().sum::<Complex64>() / n as f64;
    let local = local_series(params, x, center, len, with_jacobian);
    let h: Vec<Complex64> = params.thetas().iter().map(|t| t - center).collect();
    // table[j] holds the complete homogeneous polynomial of degree j in h_1..h_k
    let mut table = vec![Complex64::new(0.0, 0.0); len];
    let mut major_table = vec![0.0; len];
    table[0] = Complex64::new(1.0, 0.0);
    major_table[0] = 1.0;
    let mut residual = Vec::with_capacity(n);
    let mut jacobian = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 1..len {
            table[j] = table[j] + h[k] * table[j - 1];
            major_table[j] += h[k].norm() * major_table[j - 1];
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for d in k..len {
            let w = table[d - k];
            value += local.f[d] * w;
            scale += local.major[d] * major_table[d - k];
            if with_jacobian {
                for c in 0..n {
                    row[c] += local.jac[d][c] * w;
                }
            }
        }
        residual.push(value / scale);
        for c in 0..n {
            jacobian[(k, c)] = row[c] / scale;
        }
    }
    Evaluation { residual, jacobian }
}

/// Picks the divided-difference form once the inhomogeneities are clustered.
fn solver_form(params: &ModelParams<f64>, x: &[Complex64], with_jacobian: bool) -> Evaluation {
    let n = params.n_sites() as f64;
    let center = params.thetas().iter().sum::<Complex64>() / n;
    let spread = params.thetas().iter().map(|t| (t - center).norm()).fold(0.0, f64::max);
    if spread < CLUSTER_RADIUS && groups(params).len() > 1 {
        evaluate_divided(params, x, with_jacobian)
    } else {
        evaluate(params, x, with_jacobian)
    }
}

/// Scaled residuals of the functional relations, one per inhomogeneity.
///
/// Coinciding inhomogeneities are handled by the confluent form: derivatives
/// of the relation up to the multiplicity must vanish.
pub fn tt_residual(system: &TTSystem) -> Vec<Complex64> {
    evaluate(&system.params, &system.unknowns(), false).residual
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn newton_at(params: &ModelParams<f64>, start: &TTSystem) -> Result<TTSystem, BetheError> {
    let run = |tolerance: f64| {
        newton(
            start.unknowns(),
            |x| solver_form(params, x, false).residual,
            |x| solver_form(params, x, true).jacobian,
            NewtonOptions {
                tolerance,
                ..NewtonOptions::default()
            },
        )
    };
    let rep = match run(TT_TOLERANCE * 1e-2) {
        Ok(rep) => rep,
        Err(BetheError::Diverged { residual, .. }) if residual <= TT_TOLERANCE => run(TT_TOLERANCE)?,
        Err(e) => return Err(e),
    };
    Ok(start.with_unknowns(params.clone(), &rep.x))
}

fn params_at(base: &ModelParams<f64>, thetas: &[Complex64]) -> Result<ModelParams<f64>, BetheError> {
    Ok(ModelParams::new(base.n_sites(), base.eta(), thetas.to_vec())?)
}

fn advance(
    current: TTSystem,
    from: &[Complex64],
    to: &[Complex64],
    depth: usize,
) -> Result<TTSystem, Vec<Complex64>> {
    let target = params_at(&current.params, to).map_err(|_| from.to_vec())?;
    if let Ok(next) = newton_at(&target, &current) {
        let moved = next
            .unknowns()
            .iter()
            .zip(current.unknowns())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if moved <= STEP_LIMIT && sup(&tt_residual(&next)) <= TT_TOLERANCE {
            return Ok(next);
        }
    }
    if depth >= MAX_DEPTH {
        return Err(from.to_vec());
    }
    let mid: Vec<Complex64> = from.iter().zip(to).map(|(a, b)| (a + b) / 2.0).collect();
    let half = advance(current, from, &mid, depth + 1)?;
    advance(half, &mid, to, depth + 1)
}

/// Newton continuation of a converged or near-converged seed along a path of
/// inhomogeneity configurations.
pub fn solve_tt(seed: &TTSystem, path: &[Vec<Complex64>]) -> Result<TTSystem, BetheError> {
    let r0 = sup(&tt_residual(seed));
    if !(r0 <= SEED_LIMIT) {
        return Err(BetheError::BadSeed(r0));
    }
    let n = seed.params.n_sites();
    let mut current = seed.clone();
    for to in path {
        if to.len() != n {
            return Err(BetheError::Unknowns {
                expected: n,
                got: to.len(),
            });
        }
        let from = current.params.thetas().to_vec();
        current = advance(current, &from, to, 0).map_err(|last_good| BetheError::Continuation { last_good })?;
    }
    Ok(current)
}

/// Damped Newton at the seed's own inhomogeneities, without the seed-residual
/// check or step limit of [`solve_tt`]; meant for seeds built from a pattern.
pub fn polish_tt(seed: &TTSystem) -> Result<TTSystem, BetheError> {
    let out = newton_at(&seed.params, seed)?;
    let r = sup(&tt_residual(&out));
    if r > TT_TOLERANCE {
        return Err(BetheError::Diverged {
            residual: r,
            iterations: NewtonOptions::default().max_iterations,
        });
    }
    Ok(out)
}

/// `steps` configurations shrinking `start` linearly to zero.
pub fn theta_path(start: &[Complex64], steps: usize) -> Vec<Vec<Complex64>> {
    (1..=steps)
        .map(|k| {
            let s = (steps - k) as f64 / steps as f64;
            start.iter().map(|t| t * s).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confluent_jacobian_matches_finite_differences() {
        let p = ModelParams::ferromagnetic(4, 0.75)
            .unwrap()
            .with_imaginary_thetas(&[0.1, 0.1, -0.2, 0.3])
            .unwrap();
        let x = vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(0.05, 0.4),
            Complex64::new(-0.2, -0.3),
            Complex64::new(0.1, 1.0),
        ];
        let ev = evaluate(&p, &x, true);
        let nj = super::super::newton::numeric_jacobian(&x, &|y: &[Complex64]| evaluate(&p, y, false).residual);
        assert!((ev.jacobian - nj).camax() < 1e-7);
    }

    #[test]
    fn groups_collect_multiplicities() {
        let p = ModelParams::ferromagnetic(3, 0.75).unwrap();
        assert_eq!(groups(&p), vec![(Complex64::new(0.0, 0.0), 3)]);
    }
}
