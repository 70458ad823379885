//! Fixed quadrature rules shared by the L^p integrators.

use std::f64::consts::{FRAC_PI_2, PI};

/// Gauss-Legendre rule mapped to `[0, 1]`; weights sum to one.
#[derive(Debug, Clone)]
pub(crate) struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 0..order {
            // Chebyshev initial guess, then Newton on P_order.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(0.5 * (1.0 - x));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh-sinh rule on `[0, 1]`, stored as (distance from the nearer
/// endpoint, which endpoint, weight) so that nodes crowding an endpoint keep
/// full relative precision.
#[derive(Debug, Clone)]
pub(crate) struct TanhSinh {
    /// `(offset, from_right, weight)`: the node is `offset` when
    /// `from_right` is false and `1 - offset` otherwise.
    pub points: Vec<(f64, bool, f64)>,
}

impl TanhSinh {
    pub fn new(step: f64) -> Self {
        let mut points = Vec::new();
        let mut k = 0i64;
        loop {
            let t = k as f64 * step;
            let u = FRAC_PI_2 * t.sinh();
            let cu = u.cosh();
            // 1 - tanh(u) = 2 / (e^{2u} + 1), halved for the [0, 1] map.
            let offset = 1.0 / ((2.0 * u).exp() + 1.0);
            let weight = 0.5 * step * FRAC_PI_2 * t.cosh() / (cu * cu);
            if weight < 1e-20 || offset < 1e-300 {
                break;
            }
            if k == 0 {
                points.push((0.5, false, weight));
            } else {
                points.push((offset, true, weight));
                points.push((offset, false, weight));
            }
            k += 1;
        }
        Self { points }
    }

    /// Integrates `f` over `[a, b]`.
    #[cfg(test)]
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = b - a;
        if len <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for &(offset, from_right, w) in &self.points {
            let x = if from_right { b - len * offset } else { a + len * offset };
            acc += w * f(x);
        }
        acc * len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = GaussLegendre::new(8);
        assert!((gl.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for deg in 0..16 {
            let approx: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((approx - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn tanh_sinh_handles_endpoint_cusps() {
        let ts = TanhSinh::new(0.125);
        for p in [0.5, 0.75, 1.0] {
            let v = ts.integrate(0.0, 2.0, |x| x.powf(p));
            let exact = 2f64.powf(p + 1.0) / (p + 1.0);
            assert!((v - exact).abs() < 1e-12 * exact, "p={p}: {v} vs {exact}");
            let v = ts.integrate(-1.0, 0.0, |x| (-x).powf(p) * (1.0 + x));
            let exact = 1.0 / (p + 1.0) - 1.0 / (p + 2.0);
            assert!((v - exact).abs() < 1e-12, "p={p}");
        }
    }
}
