use super::ThermoError;
use crate::scalar::{cx, Cx, Real};

const POLE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    A,
    B,
    C,
}

/// `a_n`, `b_n`, `c_n` at one point. `a_n` is purely imaginary, `b_n` and `c_n` real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValues<T> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
}

fn cot<T: Real>(z: Cx<T>) -> Cx<T> {
    z.cos() / z.sin()
}

fn tan<T: Real>(z: Cx<T>) -> Cx<T> {
    z.sin() / z.cos()
}

/// `a_n = cot(x - inη/2) - cot(x + inη/2)`, `b_n = cot(x + inη/2) + cot(x - inη/2)`,
/// `c_n = tan(x + inη/2) + tan(x - inη/2)` for real `η > 0`.
pub fn kernels<T: Real>(n: u32, x: T, eta: T) -> Result<KernelValues<T>, ThermoError> {
    let y = T::lit(n as f64) * eta / T::two();
    let plus = cx(x, y);
    let minus = cx(x, -y);
    let floor = T::lit(POLE);
    for z in [plus, minus] {
        let d = z.sin().norm().min(z.cos().norm());
        if d < floor {
            return Err(ThermoError::Pole {
                x: x.to_f64().unwrap_or(f64::NAN),
                distance: d.to_f64().unwrap_or(0.0),
            });
        }
    }
    Ok(KernelValues {
        a: cot(minus) - cot(plus),
        b: cot(plus) + cot(minus),
        c: tan(plus) + tan(minus),
    })
}

/// Fourier coefficient `∫_{-π/2}^{π/2} f(x) e^{-2ikx} dx` of one kernel.
///
/// `ã_n = 2πi e^{-η|nk|}`, `b̃_n = -sign(k) 2πi e^{-η|nk|}`,
/// `c̃_n = (-1)^k sign(k) 2πi e^{-η|nk|}`.
pub fn kernel_fourier<T: Real>(kind: KernelKind, n: u32, k: i64, eta: T) -> Cx<T> {
    let mag = T::TAU() * (-eta * T::lit((n as i64 * k).unsigned_abs() as f64)).exp();
    let sign = T::lit(k.signum() as f64);
    let parity = if k.rem_euclid(2) == 0 { T::one() } else { -T::one() };
    let factor = match kind {
        KernelKind::A => T::one(),
        KernelKind::B => -sign,
        KernelKind::C => parity * sign,
    };
    cx(T::zero(), factor * mag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_and_c_vanish_at_origin_and_b_is_odd() {
        let v = kernels(1, 0.0, 0.75).unwrap();
        assert!(v.b.norm() < 1e-15);
        assert!(v.c.norm() < 1e-15);
        let p = kernels(2, 0.4f64, 0.75).unwrap();
        let m = kernels(2, -0.4, 0.75).unwrap();
        assert!((p.b + m.b).norm() < 1e-14);
        assert!((p.a - m.a).norm() < 1e-14);
        assert!(p.a.re.abs() < 1e-15 && p.b.im.abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        assert!(matches!(kernels(0, 0.0, 0.75), Err(ThermoError::Pole { .. })));
    }
}
