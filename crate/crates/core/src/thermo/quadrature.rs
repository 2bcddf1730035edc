use crate::scalar::Real;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-type initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f`.
    pub fn integrate<R, F>(&self, a: T, b: T, f: F) -> R
    where
        R: std::ops::Add<Output = R> + std::ops::Mul<T, Output = R> + num_traits::Zero,
        F: Fn(T) -> R,
    {
        let half = (b - a) / T::two();
        let mid = (a + b) / T::two();
        let mut acc = R::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }

    /// `∫_{-π/2}^{π/2} f` for a fallible integrand.
    pub fn try_over_strip<R, E, F>(&self, f: F) -> Result<R, E>
    where
        R: std::ops::Add<Output = R> + std::ops::Mul<T, Output = R> + num_traits::Zero,
        F: Fn(T) -> Result<R, E>,
    {
        let h = T::FRAC_PI_2();
        let mut acc = R::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(h * x)? * (w * h);
        }
        Ok(acc)
    }

    /// `∫_{-π/2}^{π/2} f`.
    pub fn over_strip<R, F>(&self, f: F) -> R
    where
        R: std::ops::Add<Output = R> + std::ops::Mul<T, Output = R> + num_traits::Zero,
        F: Fn(T) -> R,
    {
        let h = T::FRAC_PI_2();
        self.integrate(-h, h, f)
    }
}

/// `(P_n(x), P_n'(x))` in `f64`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}
