use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::BetheError;

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings allowed per iteration.
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 60,
            max_backtracks: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Damped Newton for a holomorphic system `r(x) = 0`.
///
/// `jacobian` returns `∂r_i/∂x_j` row-major. Each step is halved until the
/// sup-norm of the residual decreases.
pub fn newton<R, J>(
    mut x: Vec<Complex64>,
    residual: R,
    jacobian: J,
    opts: NewtonOptions,
) -> Result<NewtonReport, BetheError>
where
    R: Fn(&[Complex64]) -> Vec<Complex64>,
    J: Fn(&[Complex64]) -> DMatrix<Complex64>,
{
    let mut r = residual(&x);
    let mut norm = sup(&r);
    for it in 0..opts.max_iterations {
        if !norm.is_finite() {
            break;
        }
        if norm <= opts.tolerance {
            return Ok(NewtonReport {
                x,
                residual: norm,
                iterations: it,
            });
        }
        let j = jacobian(&x);
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|z| -z));
        let step = j.lu().solve(&rhs).ok_or(BetheError::Singular)?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, d)| a + d * scale).collect();
            let tr = residual(&trial);
            let tn = sup(&tr);
            if tn.is_finite() && tn < norm {
                x = trial;
                r = tr;
                norm = tn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= opts.tolerance {
        let iterations = opts.max_iterations;
        return Ok(NewtonReport {
            x,
            residual: norm,
            iterations,
        });
    }
    Err(BetheError::Diverged {
        residual: norm,
        iterations: opts.max_iterations,
    })
}

/// Central-difference Jacobian of a holomorphic map.
pub(crate) fn numeric_jacobian<R>(x: &[Complex64], residual: &R) -> DMatrix<Complex64>
where
    R: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let m = residual(x).len();
    let n = x.len();
    let mut j = DMatrix::zeros(m, n);
    for c in 0..n {
        let h = 1e-6 * (1.0 + x[c].norm());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h;
        xm[c] -= h;
        let (rp, rm) = (residual(&xp), residual(&xm));
        for r in 0..m {
            j[(r, c)] = (rp[r] - rm[r]) / (2.0 * h);
        }
    }
    j
}
