//! The smooth partition-of-unity bump and everything sampled from it.
//!
//! `g(s) = h(s) / (h(s) + h(1 - s))` with `h(t) = exp(-1/t)` is the usual
//! C-infinity smoothstep. The bump is `q(t) = g(1 - |t|)`: even, supported
//! on `[-1, 1]`, `q(0) = 1`, and `q(t) + q(t - 1) = 1` on `[0, 1]`.
//!
//! `g` is evaluated directly on `(0, 1/2]` and as `1 - g(1 - s)` above, so
//! `g(s) + g(1 - s)` rounds to exactly 1. Lattice samples `q(k/m)` go
//! through [`BumpFunction::q_lattice`], which forms `1 - |k|/m` as the exact
//! ratio `(m - |k|)/m`; with that the coefficient identities between the
//! sampled polynomials hold bit for bit.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::quad::{GaussLegendre, TanhSinh};
use crate::trigpoly::TrigPoly;

/// Trapezoid nodes on `[-1, 1]` used for the Fourier transform of `q`.
pub const FOURIER_NODES: usize = 4096;
/// Default relative increment that ends the tail extension in [`fq_lp_norm`].
pub const DEFAULT_TRUNC_TOL: f64 = 1e-8;
/// Largest truncation radius tried by [`fq_lp_norm`].
pub const MAX_TRUNCATION: f64 = 1_048_576.0;

/// An even bump on `[-1, 1]` that generates the sampled polynomials.
pub trait BumpFunction: Sync {
    fn q(&self, t: f64) -> f64;

    /// `q(k/m)`.
    fn q_lattice(&self, k: i64, m: u64) -> f64 {
        self.q(k as f64 / m as f64)
    }

    /// Short identifier written to run manifests.
    fn tag(&self) -> String;
}

/// The standard bump `q(t) = g(1 - |t|)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BumpSpec;

impl BumpSpec {
    pub fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
}

impl BumpFunction for BumpSpec {
    fn q(&self, t: f64) -> f64 {
        bump_q(t)
    }

    fn q_lattice(&self, k: i64, m: u64) -> f64 {
        let a = k.unsigned_abs();
        if a >= m {
            0.0
        } else {
            smoothstep_ratio(m - a, m)
        }
    }

    fn tag(&self) -> String {
        "smoothstep-exp(-1/t)".to_string()
    }
}

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `g(s)` for `0 < s <= 1/2`, where `1 - s` is exact.
fn smoothstep_lower(s: f64, one_minus_s: f64) -> f64 {
    let a = h(s);
    a / (a + h(one_minus_s))
}

/// The C-infinity smoothstep: 0 for `s <= 0`, 1 for `s >= 1`.
pub fn smoothstep(s: f64) -> f64 {
    if s.is_nan() {
        return f64::NAN;
    }
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else if s <= 0.5 {
        smoothstep_lower(s, 1.0 - s)
    } else {
        let r = 1.0 - s;
        1.0 - smoothstep_lower(r, 1.0 - r)
    }
}

/// `g(a/m)` with both `a/m` and `(m - a)/m` formed as correctly rounded
/// quotients.
fn smoothstep_ratio(a: u64, m: u64) -> f64 {
    if a == 0 {
        return 0.0;
    }
    if a >= m {
        return 1.0;
    }
    let (mf, af) = (m as f64, a as f64);
    let bf = (m - a) as f64;
    if 2 * a <= m {
        smoothstep_lower(af / mf, bf / mf)
    } else {
        1.0 - smoothstep_lower(bf / mf, af / mf)
    }
}

pub fn bump_q(t: f64) -> f64 {
    smoothstep(1.0 - t.abs())
}

/// `Q_m = sum_k q(k/m) z^k`, degree `m - 1`.
pub fn q_sampled_poly(m: usize) -> Result<TrigPoly> {
    q_sampled_poly_with(&BumpSpec, m)
}

pub fn q_sampled_poly_with(bump: &dyn BumpFunction, m: usize) -> Result<TrigPoly> {
    if m == 0 {
        return Err(domain("Q_m needs m >= 1"));
    }
    let r = m as i64 - 1;
    Ok(TrigPoly::from_coeffs((-r..=r).map(|k| {
        (k, num_complex::Complex64::new(bump.q_lattice(k, m as u64), 0.0))
    })))
}

/// The dyadic window `v(x) = q(log2 x)`, supported on `[1/2, 2]`.
pub fn dyadic_v(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(domain(format!("dyadic window needs x > 0, got {x}")));
    }
    Ok(bump_q(x.log2()))
}

/// `V_n = sum_{j>0} v(j / 2^n) z^j`.
pub fn v_poly(n: u32) -> Result<TrigPoly> {
    v_poly_with(&BumpSpec, n)
}

pub fn v_poly_with(bump: &dyn BumpFunction, n: u32) -> Result<TrigPoly> {
    if n > 60 {
        return Err(domain("V_n index too large"));
    }
    let lo = (1u64 << n) / 2 + 1;
    let hi = (1u64 << (n + 1)) - 1;
    Ok(TrigPoly::from_coeffs((lo..=hi).map(|j| {
        let t = (j as f64).log2() - n as f64;
        (j as i64, num_complex::Complex64::new(bump.q(t), 0.0))
    })))
}

/// Trapezoid approximation of `(Fq)(t) = int q(x) e^{-2 pi i x t} dx`.
///
/// `q` is even, so the transform is real and even and only the cosine sum
/// is formed. The result is periodic in `t` with period `nodes / 2`; it is
/// only meaningful for `|t|` well below that.
#[derive(Debug, Clone)]
pub struct FourierQ {
    nodes: usize,
    /// `q(j h)` for `j = 0..nodes/2`, `h = 2 / nodes`.
    table: Vec<f64>,
}

impl FourierQ {
    pub fn new(bump: &dyn BumpFunction, nodes: usize) -> Result<Self> {
        if nodes < 4 || !nodes.is_multiple_of(2) {
            return Err(domain("Fourier quadrature needs an even node count >= 4"));
        }
        let half = (nodes / 2) as u64;
        let table = (0..half).map(|j| bump.q_lattice(j as i64, half)).collect();
        Ok(Self { nodes, table })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn eval(&self, t: f64) -> f64 {
        let half = self.table.len() as f64;
        // Neumaier-compensated sum of q_j cos(2 pi j t / half).
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for j in 1..self.table.len() {
            let jf = j as f64;
            // j t = hi + lo exactly; only its fractional part matters.
            let hi = jf * t;
            let lo = jf.mul_add(t, -hi);
            let x = hi / half;
            let frac = x - x.round();
            let frac_lo = lo / half;
            // 2 pi (frac + frac_lo) as a double-double angle.
            let a = TAU * frac;
            let a_lo = TAU.mul_add(frac, -a) + TAU_LO * frac + TAU * frac_lo;
            let (s, c) = a.sin_cos();
            let term = self.table[j] * (c - s * a_lo);
            let next = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - next) + term
            } else {
                (term - next) + sum
            };
            sum = next;
        }
        (self.table[0] + 2.0 * (sum + comp)) / half
    }

    /// `(int_R |Fq|^p)^{1/p}` for each `p` in `(0, 1]`.
    pub fn lp_norms(&self, ps: &[f64], trunc_tol: f64) -> Result<Vec<f64>> {
        for &p in ps {
            if !(p > 0.0 && p <= 1.0) {
                return Err(domain(format!("Fourier L^p norm needs p in (0, 1], got {p}")));
            }
        }
        if trunc_tol.is_nan() || trunc_tol <= 0.0 {
            return Err(domain("trunc_tol must be positive"));
        }
        let mut samples = HalfLineSamples::new(self);
        let mut radius = 4.0;
        samples.extend_to(radius);
        let mut totals: Vec<f64> = ps.iter().map(|&p| samples.power_sum(p, 0)).collect();
        let mut done: Vec<Option<f64>> = vec![None; ps.len()];
        loop {
            if radius >= MAX_TRUNCATION {
                return Err(Error::TruncationDiverged(radius));
            }
            let start = samples.len();
            radius *= 2.0;
            samples.extend_to(radius);
            for (i, &p) in ps.iter().enumerate() {
                if done[i].is_some() {
                    continue;
                }
                let inc = samples.power_sum(p, start);
                totals[i] += inc;
                if inc <= trunc_tol * totals[i] {
                    done[i] = Some((2.0 * totals[i]).powf(1.0 / p));
                }
            }
            if done.iter().all(Option::is_some) {
                return Ok(done.into_iter().map(Option::unwrap).collect());
            }
        }
    }
}

/// Round-off floor of [`FourierQ::eval`]; smaller magnitudes are dropped.
const FOURIER_NOISE: f64 = 4e-17;
/// `2 pi - TAU`.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;
const PANEL_WIDTH: f64 = 1.0 / 16.0;

/// `(weight, |Fq|)` pairs discretizing `int_0^R`, built panel by panel.
struct HalfLineSamples<'a> {
    fq: &'a FourierQ,
    gl: GaussLegendre,
    ts: TanhSinh,
    reach: f64,
    points: Vec<(f64, f64)>,
}

impl<'a> HalfLineSamples<'a> {
    fn new(fq: &'a FourierQ) -> Self {
        Self {
            fq,
            gl: GaussLegendre::new(8),
            ts: TanhSinh::new(0.125),
            reach: 0.0,
            points: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn clamp(v: f64) -> f64 {
        if v.abs() <= FOURIER_NOISE {
            0.0
        } else {
            v.abs()
        }
    }

    fn extend_to(&mut self, radius: f64) {
        while self.reach < radius {
            let a = self.reach;
            let b = a + PANEL_WIDTH;
            self.panel(a, b);
            self.reach = b;
        }
    }

    fn panel(&mut self, a: f64, b: f64) {
        let w = b - a;
        let mut xs = vec![a];
        xs.extend(self.gl.nodes.iter().map(|u| a + w * u));
        xs.push(b);
        let vals: Vec<f64> = xs.iter().map(|&x| self.fq.eval(x)).collect();
        let small = vals.iter().filter(|v| v.abs() <= FOURIER_NOISE).count();
        if small == vals.len() {
            return;
        }
        let mut zeros = Vec::new();
        for i in 0..xs.len() - 1 {
            let (fa, fb) = (vals[i], vals[i + 1]);
            if fa.abs() > FOURIER_NOISE && fb.abs() > FOURIER_NOISE && fa.signum() != fb.signum() {
                zeros.push(self.bisect(xs[i], xs[i + 1], fa));
            }
        }
        // Fq vanishes at every nonzero integer, which is a panel edge.
        if zeros.is_empty() && small == 0 {
            for (k, weight) in self.gl.weights.iter().enumerate() {
                self.points.push((weight * w, Self::clamp(vals[k + 1])));
            }
            return;
        }
        let mut lo = a;
        for hi in zeros.into_iter().chain(std::iter::once(b)) {
            let len = hi - lo;
            if len > 0.0 {
                for &(offset, from_right, weight) in &self.ts.points {
                    let x = if from_right {
                        hi - len * offset
                    } else {
                        lo + len * offset
                    };
                    self.points.push((weight * len, Self::clamp(self.fq.eval(x))));
                }
            }
            lo = hi;
        }
    }

    fn bisect(&self, mut a: f64, mut b: f64, fa: f64) -> f64 {
        let sa = fa.signum();
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.fq.eval(mid).signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    fn power_sum(&self, p: f64, start: usize) -> f64 {
        self.points[start..]
            .iter()
            .filter(|(_, v)| *v > 0.0)
            .map(|(w, v)| w * v.powf(p))
            .sum()
    }
}

fn standard_fourier() -> &'static FourierQ {
    static FQ: OnceLock<FourierQ> = OnceLock::new();
    FQ.get_or_init(|| FourierQ::new(&BumpSpec, FOURIER_NODES).expect("valid node count"))
}

/// `(Fq)(t)` for the standard bump, 4096-node trapezoid.
pub fn fourier_q(t: f64) -> f64 {
    standard_fourier().eval(t)
}

/// `||Fq||_{L^p(R)}` for `p` in `(0, 1]`.
pub fn fq_lp_norm(p: f64, trunc_tol: f64) -> Result<f64> {
    Ok(fq_lp_norms(&[p], trunc_tol)?[0])
}

pub fn fq_lp_norms(ps: &[f64], trunc_tol: f64) -> Result<Vec<f64>> {
    standard_fourier().lp_norms(ps, trunc_tol)
}

/// Smallest grid point `T` (step `1/16`) past which `|Fq|` stays at or
/// below `threshold` up to `limit`.
pub fn fourier_decay_radius(threshold: f64, limit: f64) -> f64 {
    let fq = standard_fourier();
    let steps = (limit / PANEL_WIDTH) as usize;
    let mut radius = 0.0;
    for i in 0..=steps {
        let t = i as f64 * PANEL_WIDTH;
        if fq.eval(t).abs() > threshold {
            radius = t + PANEL_WIDTH;
        }
    }
    radius
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_examples() {
        assert_eq!(smoothstep(0.5), 0.5);
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            assert!((smoothstep(s) + smoothstep(1.0 - s) - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn smoothstep_increasing() {
        // Strict growth is only representable away from the flat ends.
        let mut prev = 0.0;
        for i in 5..=960 {
            let v = smoothstep(i as f64 / 1000.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn bump_examples() {
        assert_eq!(bump_q(0.0), 1.0);
        assert_eq!(bump_q(0.5), 0.5);
        assert_eq!(bump_q(1.0), 0.0);
        assert_eq!(bump_q(-1.0), 0.0);
        assert_eq!(bump_q(1.5), 0.0);
        for i in 1..1000 {
            let t = -1.0 + 2.0 * i as f64 / 1000.0;
            assert!(bump_q(t) > 0.0);
            assert!((bump_q(t) - bump_q(-t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn partition_identity_on_grid() {
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            assert!((bump_q(t) + bump_q(t - 1.0) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn lattice_pairs_sum_to_one_exactly() {
        for m in [1u64, 2, 3, 7, 512, 1000] {
            for k in 0..=m as i64 {
                let s = BumpSpec.q_lattice(k, m) + BumpSpec.q_lattice(k - m as i64, m);
                assert_eq!(s, 1.0, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn lattice_matches_plain_evaluation() {
        for k in -64..=64 {
            let a = BumpSpec.q_lattice(k, 64);
            let b = bump_q(k as f64 / 64.0);
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn sampled_poly_examples() {
        assert_eq!(q_sampled_poly(1).unwrap(), TrigPoly::constant(1.0));
        for m in [2usize, 5, 64, 100] {
            let q = q_sampled_poly(m).unwrap();
            assert_eq!(q.max_freq(), Some(m as i64 - 1));
            assert_eq!(q.min_freq(), Some(1 - m as i64));
            let at_one: f64 = q.iter().map(|(_, c)| c.re).sum();
            assert!((at_one - m as f64).abs() <= 1e-12 * m as f64);
        }
        assert!(q_sampled_poly(0).is_err());
    }

    #[test]
    fn dyadic_window_examples() {
        assert!(dyadic_v(0.0).is_err());
        assert_eq!(dyadic_v(1.0).unwrap(), 1.0);
        assert_eq!(dyadic_v(2.0).unwrap(), 0.0);
        assert_eq!(dyadic_v(0.5).unwrap(), 0.0);
        for i in 0..200 {
            let x = 2f64.powf(i as f64 / 17.0);
            let mut s = 0.0;
            let mut j = 0;
            while 2f64.powi(j) <= 4.0 * x {
                s += dyadic_v(x / 2f64.powi(j)).unwrap();
                j += 1;
            }
            assert!((s - 1.0).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn v_poly_examples() {
        assert_eq!(
            v_poly(0).unwrap(),
            TrigPoly::monomial(1, num_complex::Complex64::new(1.0, 0.0))
        );
        for n in 1..8 {
            let v = v_poly(n).unwrap();
            let (lo, hi) = v.support().unwrap();
            assert!(lo > 1 << (n - 1));
            assert!(hi < 1 << (n + 1));
        }
        let polys: Vec<TrigPoly> = (0..=11).map(|n| v_poly(n).unwrap()).collect();
        for j in 1..=1024i64 {
            let s: f64 = polys.iter().map(|v| v.coeff(j).re).sum();
            assert!((s - 1.0).abs() <= 1e-12, "j={j}");
        }
    }

    #[test]
    fn fourier_transform_basics() {
        assert!((fourier_q(0.0) - 1.0).abs() < 1e-13);
        for t in [0.1, 0.37, 1.5, 7.25] {
            assert_eq!(fourier_q(t).to_bits(), fourier_q(-t).to_bits());
        }
        let direct = {
            let n = 20000;
            let h = 2.0 / n as f64;
            (0..=n)
                .map(|i| {
                    let x = -1.0 + i as f64 * h;
                    bump_q(x) * (TAU * x * 0.7).cos() * h
                })
                .sum::<f64>()
        };
        assert!((fourier_q(0.7) - direct).abs() < 1e-10);
    }

    #[test]
    fn fourier_decays() {
        let t = fourier_decay_radius(1e-8, 200.0);
        assert!(t > 1.0 && t < 100.0, "T = {t}");
    }

    #[test]
    fn fourier_norms() {
        let vals = fq_lp_norms(&[0.5, 0.7, 0.9, 1.0], DEFAULT_TRUNC_TOL).unwrap();
        for v in &vals {
            assert!(v.is_finite() && *v > 0.0);
        }
        assert!(vals[3] >= 1.0);
        assert!(fq_lp_norm(1.5, DEFAULT_TRUNC_TOL).is_err());
        assert!(fq_lp_norm(0.0, DEFAULT_TRUNC_TOL).is_err());
    }
}
