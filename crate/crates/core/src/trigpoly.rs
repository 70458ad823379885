//! Trigonometric polynomials and their L^p(T) quasi-norms.
//!
//! A [`TrigPoly`] is a finitely supported map from integer frequencies to
//! complex coefficients. Norms use the normalized measure `dt / 2pi`, so
//! `||z^k||_p = 1` for every `p`.
//!
//! # Quadrature
//!
//! `|f|^p` is smooth away from the zeros of `f` on the circle and has a
//! `|t - t0|^p` cusp at each of them. [`lp_norm`] splits the circle into
//! `M` equal cells, evaluates `f` at the cell edges and at Gauss-Legendre
//! nodes inside every cell (one FFT per node offset), and integrates
//! regular cells with the Gauss rule. Cells where `|f|` dips well below its
//! local maximum are re-integrated from a local interpolant of `f`: the
//! cell is split at the interior minima of `|f|` and every piece gets a
//! tanh-sinh rule, which absorbs the endpoint cusps. `M` is doubled until
//! two successive values agree to `rel_tol`.
//!
//! Values of `|f|` under the FFT round-off floor are set to zero before
//! taking powers; for `p < 1` that noise would otherwise add a spurious
//! positive mass.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rustfft::FftPlanner;

use crate::error::{check_exponent, domain, Error, Result};
use crate::quad::{GaussLegendre, TanhSinh};
use crate::spcore::{sample_entry, Distribution};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Gauss nodes per cell.
const CELL_ORDER: usize = 8;
/// A cell is re-integrated when its smallest sample falls below this
/// fraction of its largest one.
const ROUGH_RATIO: f64 = 0.5;
/// Round-off floor, in units of `eps * ||c||_2 * log2(M)`.
const NOISE_FACTOR: f64 = 4.0;
/// Interior minima per rough cell that are split at.
const MAX_SPLITS: usize = 6;

/// A trigonometric polynomial `sum_j c_j z^j`, `z = e^{it}`.
#[derive(Clone, PartialEq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, Complex64::new(c, 0.0))
    }

    pub fn monomial(j: i64, c: Complex64) -> Self {
        Self::from_coeffs([(j, c)])
    }

    /// Collects `(frequency, coefficient)` pairs, summing repeats and
    /// dropping exact zeros.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (j, c) in pairs {
            *coeffs.entry(j).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c| *c != ZERO);
        Self { coeffs }
    }

    /// `sum_i values[i] z^(offset + i)`.
    pub fn from_dense(offset: i64, values: &[Complex64]) -> Self {
        Self::from_coeffs(values.iter().enumerate().map(|(i, &c)| (offset + i as i64, c)))
    }

    pub fn from_real(offset: i64, values: &[f64]) -> Self {
        Self::from_coeffs(
            values
                .iter()
                .enumerate()
                .map(|(i, &c)| (offset + i as i64, Complex64::new(c, 0.0))),
        )
    }

    pub fn coeff(&self, j: i64) -> Complex64 {
        self.coeffs.get(&j).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&j, &c)| (j, c))
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Same as [`TrigPoly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_freq(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_freq(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        Some((self.min_freq()?, self.max_freq()?))
    }

    /// `max_freq - min_freq + 1`, or zero for the zero polynomial.
    pub fn span(&self) -> usize {
        self.support().map_or(0, |(lo, hi)| (hi - lo + 1) as usize)
    }

    /// Degree of an analytic polynomial (its largest frequency).
    pub fn degree(&self) -> Option<i64> {
        self.max_freq()
    }

    pub fn is_analytic(&self) -> bool {
        self.min_freq().is_none_or(|j| j >= 0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(|c| c.im == 0.0)
    }

    /// `l^1` norm of the coefficients, an upper bound for `sup |f|`.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn coeff_l2(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `f(e^{it})` by direct summation.
    pub fn eval(&self, t: f64) -> Complex64 {
        self.iter().map(|(j, c)| c * Complex64::cis(j as f64 * t)).sum()
    }

    /// `f(z)` for an arbitrary nonzero complex `z`.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.iter().map(|(j, c)| c * z.powi(j as i32)).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_coeffs(self.iter().map(|(j, a)| (j, a * c)))
    }

    pub fn shift(&self, s: i64) -> Self {
        Self {
            coeffs: self.iter().map(|(j, c)| (j + s, c)).collect(),
        }
    }

    /// Keeps the coefficients whose frequency satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            coeffs: self.iter().filter(|&(j, _)| keep(j)).collect(),
        }
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;

    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::from_coeffs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;

    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::from_coeffs(self.iter().chain(rhs.iter().map(|(j, c)| (j, -c))))
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;

    fn neg(self) -> TrigPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

pub fn shift(f: &TrigPoly, s: i64) -> TrigPoly {
    f.shift(s)
}

/// Frequencies `j >= 0`.
pub fn riesz_plus(f: &TrigPoly) -> TrigPoly {
    f.restrict(|j| j >= 0)
}

/// Frequencies `j >= 1`.
pub fn riesz_strict_plus(f: &TrigPoly) -> TrigPoly {
    f.restrict(|j| j >= 1)
}

/// Frequencies `j < 0`.
pub fn riesz_minus(f: &TrigPoly) -> TrigPoly {
    f.restrict(|j| j < 0)
}

/// Coefficientwise product over the common support.
pub fn hadamard_convolve(f: &TrigPoly, g: &TrigPoly) -> TrigPoly {
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    TrigPoly::from_coeffs(
        small
            .iter()
            .filter_map(|(j, a)| large.coeffs.get(&j).map(|b| (j, a * b))),
    )
}

/// The analytic Dirichlet kernel `1 + z + ... + z^(n-1)`.
pub fn dirichlet_kernel(n: usize) -> Result<TrigPoly> {
    if n == 0 {
        return Err(domain("Dirichlet kernel needs n >= 1"));
    }
    Ok(TrigPoly::from_real(0, &vec![1.0; n]))
}

/// `sqrt(2) (1 - 1/e)^2 / (4 pi)`, the constant of the lower Dirichlet
/// envelope.
pub fn dirichlet_lower_constant() -> f64 {
    let a = 1.0 - (-1f64).exp();
    std::f64::consts::SQRT_2 * a * a / (4.0 * PI)
}

/// Two-sided envelope for `||D_n^+||_{H^p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletEnvelopes {
    pub lower: f64,
    pub upper: f64,
}

/// Envelopes for `||D_n^+||_{H^p}` valid for `p` in `[1/2, 1)`:
/// `c min{(1-p)^-1, log n} <= ||D_n^+|| <= min{2 (1-p)^-1, log 5n}`.
/// At `n = 1` the lower value is the exact norm 1.
pub fn dirichlet_envelopes(n: usize, p: f64) -> Result<DirichletEnvelopes> {
    if n == 0 {
        return Err(domain("Dirichlet envelopes need n >= 1"));
    }
    if !(0.5..1.0).contains(&p) {
        return Err(domain(format!("Dirichlet envelopes need p in [1/2, 1), got {p}")));
    }
    let nf = n as f64;
    let inv = 1.0 / (1.0 - p);
    let lower = if n == 1 {
        1.0
    } else {
        dirichlet_lower_constant() * inv.min(nf.ln())
    };
    let upper = (2.0 * inv).min((5.0 * nf).ln());
    Ok(DirichletEnvelopes { lower, upper })
}

/// Polynomial with independent coefficients on `lo..=hi`, deterministic in
/// `seed`. Endpoint coefficients are redrawn until nonzero so the support is
/// exactly `[lo, hi]`.
pub fn random_poly(lo: i64, hi: i64, seed: u64, distribution: Distribution) -> Result<TrigPoly> {
    if lo > hi {
        return Err(domain("random_poly needs lo <= hi"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha20Rng| loop {
        let c = sample_entry(rng, distribution);
        if c != ZERO {
            return c;
        }
    };
    let mut pairs = Vec::with_capacity((hi - lo + 1) as usize);
    for j in lo..=hi {
        let c = if j == lo || j == hi {
            draw(&mut rng)
        } else {
            sample_entry(&mut rng, distribution)
        };
        pairs.push((j, c));
    }
    Ok(TrigPoly::from_coeffs(pairs))
}

/// Values `f(e^{2 pi i k / n})`, `k = 0..n`, by one inverse FFT.
pub fn eval_on_grid(f: &TrigPoly, n: usize) -> Result<Vec<Complex64>> {
    let span = f.span();
    if n == 0 || n < span {
        return Err(Error::Aliasing { grid: n, span });
    }
    let mut buf = vec![ZERO; n];
    for (j, c) in f.iter() {
        buf[j.rem_euclid(n as i64) as usize] = c;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

/// Settings for the L^p integrators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureConfig {
    /// Minimum number of cells on the first pass (power of two).
    pub initial_grid: usize,
    /// Relative change between successive doublings that ends refinement.
    pub rel_tol: f64,
    /// Largest admissible number of cells (power of two).
    pub max_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_grid: 64,
            rel_tol: 1e-7,
            max_grid: 1 << 22,
        }
    }
}

impl QuadratureConfig {
    pub fn new(initial_grid: usize, rel_tol: f64, max_grid: usize) -> Result<Self> {
        let cfg = Self {
            initial_grid,
            rel_tol,
            max_grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.initial_grid.is_power_of_two() || !self.max_grid.is_power_of_two() {
            return Err(domain("quadrature grid sizes must be powers of two"));
        }
        if self.initial_grid > self.max_grid {
            return Err(domain("initial_grid exceeds max_grid"));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(domain("rel_tol must be positive"));
        }
        Ok(())
    }

    /// Number of cells used on the first pass for a polynomial of the given span.
    pub fn starting_cells(&self, span: usize) -> usize {
        self.initial_grid.max((8 * span.max(1)).next_power_of_two())
    }
}

/// An L^p value and the number of cells it converged at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpEstimate {
    pub value: f64,
    pub cells: usize,
}

/// `((1/2pi) int |f|^p dt)^(1/p)`.
pub fn lp_norm(f: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(lp_norm_estimate(f, p, cfg)?.value)
}

pub fn lp_norm_estimate(f: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<LpEstimate> {
    Ok(lp_norms(f, &[p], cfg)?[0])
}

/// [`lp_norm`] for several exponents, sharing the samples of `f`.
pub fn lp_norms(f: &TrigPoly, ps: &[f64], cfg: &QuadratureConfig) -> Result<Vec<LpEstimate>> {
    for &p in ps {
        check_exponent(p)?;
    }
    cfg.validate()?;
    if f.is_zero() {
        return Ok(ps.iter().map(|_| LpEstimate { value: 0.0, cells: 0 }).collect());
    }
    let mut cells = cfg.starting_cells(f.span());
    if cells > cfg.max_grid {
        return Err(Error::NoConvergence {
            max_grid: cfg.max_grid,
            previous: f64::NAN,
            last: f64::NAN,
        });
    }
    let mut prev: Vec<f64> = {
        let s = PowerSamples::new(f, cells);
        ps.iter().map(|&p| s.mean_power(p).powf(1.0 / p)).collect()
    };
    let mut out: Vec<Option<LpEstimate>> = vec![None; ps.len()];
    loop {
        cells *= 2;
        if cells > cfg.max_grid {
            let i = out.iter().position(Option::is_none).unwrap_or(0);
            return Err(Error::NoConvergence {
                max_grid: cfg.max_grid,
                previous: f64::NAN,
                last: prev[i],
            });
        }
        let s = PowerSamples::new(f, cells);
        for (i, &p) in ps.iter().enumerate() {
            if out[i].is_some() {
                continue;
            }
            let cur = s.mean_power(p).powf(1.0 / p);
            if (cur - prev[i]).abs() <= cfg.rel_tol * cur.abs() {
                out[i] = Some(LpEstimate { value: cur, cells });
            } else if cells * 2 > cfg.max_grid {
                return Err(Error::NoConvergence {
                    max_grid: cfg.max_grid,
                    previous: prev[i],
                    last: cur,
                });
            }
            prev[i] = cur;
        }
        if out.iter().all(Option::is_some) {
            return Ok(out.into_iter().map(Option::unwrap).collect());
        }
    }
}

/// Samples of `|f|` on one level of the cell grid, arranged so that the
/// mean of `|f|^p` is a weighted power sum for any `p`.
struct PowerSamples {
    cells: usize,
    gauss_weights: Vec<f64>,
    /// `|f|` at the Gauss nodes of every regular cell, cell-major.
    regular: Vec<f64>,
    /// `(weight, |f|)` pairs covering the rough cells; weights already
    /// include the `1/M` cell measure.
    rough: Vec<(f64, f64)>,
}

impl PowerSamples {
    fn new(f: &TrigPoly, cells: usize) -> Self {
        let gl = GaussLegendre::new(CELL_ORDER);
        let (lo, _) = f.support().expect("nonzero polynomial");
        let span = f.span();
        let dense: Vec<Complex64> = (0..span).map(|i| f.coeff(lo + i as i64)).collect();
        let floor = NOISE_FACTOR * f64::EPSILON * f.coeff_l2() * (cells as f64).log2();

        let fft = FftPlanner::new().plan_fft_inverse(cells);
        // Offsets within a cell: 0 (cell edge) then the Gauss nodes.
        let offsets: Vec<f64> = std::iter::once(0.0).chain(gl.nodes.iter().copied()).collect();
        let grids: Vec<Vec<Complex64>> = offsets
            .iter()
            .map(|&u| {
                let mut buf = vec![ZERO; cells];
                let step = TAU * u / cells as f64;
                for (j, c) in dense.iter().enumerate() {
                    buf[j] = c * Complex64::cis(step * j as f64);
                }
                fft.process(&mut buf);
                buf
            })
            .collect();

        let clamp = |z: Complex64| {
            let a = z.norm();
            if a <= floor {
                0.0
            } else {
                a
            }
        };

        let interp = LocalInterpolant::new(&offsets);
        let ts = TanhSinh::new(0.125);
        let mut regular = Vec::with_capacity(cells * CELL_ORDER);
        let mut rough = Vec::new();
        let mut local = vec![ZERO; CELL_ORDER + 2];
        for i in 0..cells {
            local[0] = grids[0][i];
            for r in 0..CELL_ORDER {
                local[r + 1] = grids[r + 1][i];
            }
            local[CELL_ORDER + 1] = grids[0][(i + 1) % cells];
            let (mut min, mut max) = (f64::INFINITY, 0.0f64);
            for z in &local {
                let a = clamp(*z);
                min = min.min(a);
                max = max.max(a);
            }
            if max > 0.0 && min < ROUGH_RATIO * max {
                interp.integrate_cell(&local, &ts, cells, &clamp, &mut rough);
            } else {
                regular.extend(local[1..=CELL_ORDER].iter().map(|z| clamp(*z)));
            }
        }
        Self {
            cells,
            gauss_weights: gl.weights,
            regular,
            rough,
        }
    }

    fn mean_power(&self, p: f64) -> f64 {
        let mut regular = 0.0;
        for cell in self.regular.chunks(CELL_ORDER) {
            let mut acc = 0.0;
            for (a, w) in cell.iter().zip(&self.gauss_weights) {
                if *a > 0.0 {
                    acc += w * a.powf(p);
                }
            }
            regular += acc;
        }
        let rough: f64 = self
            .rough
            .iter()
            .filter(|(_, a)| *a > 0.0)
            .map(|(w, a)| w * a.powf(p))
            .sum();
        regular / self.cells as f64 + rough
    }
}

/// Barycentric Lagrange interpolation on the sample offsets of one cell
/// (edge, Gauss nodes, far edge).
struct LocalInterpolant {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LocalInterpolant {
    fn new(offsets: &[f64]) -> Self {
        let mut nodes = offsets.to_vec();
        nodes.push(1.0);
        let weights = (0..nodes.len())
            .map(|j| {
                let prod: f64 = (0..nodes.len())
                    .filter(|&k| k != j)
                    .map(|k| nodes[j] - nodes[k])
                    .product();
                1.0 / prod
            })
            .collect();
        Self { nodes, weights }
    }

    fn eval(&self, values: &[Complex64], u: f64) -> Complex64 {
        let mut num = ZERO;
        let mut den = 0.0;
        for ((&x, &w), &v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let d = u - x;
            if d == 0.0 {
                return v;
            }
            let c = w / d;
            num += v * c;
            den += c;
        }
        num / den
    }

    /// Pushes a tanh-sinh discretization of the cell, split at the interior
    /// minima of `|f|`.
    fn integrate_cell(
        &self,
        values: &[Complex64],
        ts: &TanhSinh,
        cells: usize,
        clamp: &impl Fn(Complex64) -> f64,
        out: &mut Vec<(f64, f64)>,
    ) {
        const SCAN: usize = 64;
        let abs2 = |u: f64| self.eval(values, u).norm_sqr();
        let scan: Vec<f64> = (0..=SCAN).map(|i| abs2(i as f64 / SCAN as f64)).collect();
        let mut minima: Vec<(f64, f64)> = Vec::new();
        for i in 1..SCAN {
            if scan[i] <= scan[i - 1] && scan[i] < scan[i + 1] {
                let (u, v) = golden_min(&abs2, (i - 1) as f64 / SCAN as f64, (i + 1) as f64 / SCAN as f64);
                minima.push((u, v));
            }
        }
        if minima.len() > MAX_SPLITS {
            minima.sort_by(|a, b| a.1.total_cmp(&b.1));
            minima.truncate(MAX_SPLITS);
        }
        let mut cuts: Vec<f64> = minima.into_iter().map(|(u, _)| u).collect();
        cuts.sort_by(f64::total_cmp);
        let scale = 1.0 / cells as f64;
        let mut a = 0.0;
        for b in cuts.into_iter().chain(std::iter::once(1.0)) {
            if b > a {
                let len = b - a;
                for &(offset, from_right, w) in &ts.points {
                    let u = if from_right { b - len * offset } else { a + len * offset };
                    out.push((w * len * scale, clamp(self.eval(values, u))));
                }
            }
            a = b;
        }
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if b - a < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u))
}
