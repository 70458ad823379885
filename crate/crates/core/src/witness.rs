//! Lower and upper bounds for the norm of the triangular projection.
//!
//! The witness for `||Delta_n||_{M_p}` is the Hankel matrix of
//! `P_k = z^(2^k) Q_(2^(k-1))`. Cutting `P_k` at frequency `2^k` leaves
//! `P_k^- = z^(2^k) P_- Q_(2^(k-1))`, and on Hankel matrices that cut is the
//! Schur product with `Delta_(2^k)`:
//!
//! ```text
//! Gamma_{P_k^-} = Gamma_{P_k} * Delta_(2^k)
//! ```
//!
//! so `||Gamma_{P_k^-}||_p / ||Gamma_{P_k}||_p` is a certified lower bound
//! for `||Delta_(2^k)||_{M_p}`, which equals the norm of the triangular
//! projection on `2^k x 2^k` matrices. `P_k^-` keeps frequency `2^k - 1`
//! (coefficient `q(-1/2^(k-1)) > 0`), so the mask size is `2^k`.
//!
//! The upper bound is the multiplier estimate for Hankel symbols applied to
//! the Dirichlet kernel: `||P_n|| <= (2n)^{1/p-1} ||D_n^+||_{H^p}`.

use num_complex::Complex64;

use crate::bump::{q_sampled_poly_with, BumpFunction, BumpSpec};
use crate::error::{check_exponent, domain, Result};
use crate::hankel::{hankel_of, HankelBlock, CHECK_SLACK};
use crate::spcore::{delta_window, schur_product, SingularSpectrum};
use crate::trigpoly::{
    dirichlet_kernel, hadamard_convolve, lp_norm, lp_norms, riesz_minus, riesz_strict_plus, QuadratureConfig, TrigPoly,
};

/// Largest `k` accepted without a warning.
pub const DEFAULT_MAX_K: u32 = 10;
/// Largest `k` accepted at all.
pub const HARD_MAX_K: u32 = 12;

/// The polynomials of the construction for one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPolys {
    pub k: u32,
    pub p_k: TrigPoly,
    /// `z^(2^k) P^+ Q`: frequencies above `2^k`.
    pub p_k_plus: TrigPoly,
    /// `z^(2^k) P_- Q`: frequencies below `2^k`.
    pub p_k_minus: TrigPoly,
}

impl WitnessPolys {
    /// `2^k`, the size of the mask realized by the construction.
    pub fn mask_size(&self) -> usize {
        1 << self.k
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(domain(format!("witness needs k >= 2, got {k}")));
    }
    if k > HARD_MAX_K {
        return Err(domain(format!(
            "witness refuses k > {HARD_MAX_K} (memory guard), got {k}"
        )));
    }
    Ok(())
}

pub fn witness_polys(k: u32) -> Result<WitnessPolys> {
    witness_polys_with(&BumpSpec, k)
}

pub fn witness_polys_with(bump: &dyn BumpFunction, k: u32) -> Result<WitnessPolys> {
    check_k(k)?;
    let q = q_sampled_poly_with(bump, 1 << (k - 1))?;
    let s = 1i64 << k;
    Ok(WitnessPolys {
        k,
        p_k: q.shift(s),
        p_k_plus: riesz_strict_plus(&q).shift(s),
        p_k_minus: riesz_minus(&q).shift(s),
    })
}

/// The construction for one `k`, with both Hankel blocks and their spectra.
///
/// Spectra do not depend on `p`; [`WitnessBundle::lower_bound_at`] reuses
/// them for any exponent.
#[derive(Debug, Clone)]
pub struct WitnessBundle {
    pub k: u32,
    pub polys: WitnessPolys,
    pub gamma_pk: HankelBlock,
    pub gamma_pk_minus: HankelBlock,
    pub spectrum_pk: SingularSpectrum,
    pub spectrum_pk_minus: SingularSpectrum,
    pub p: f64,
    pub lower_bound: f64,
}

impl WitnessBundle {
    /// Multiplier size the lower bound applies to: `2^k`.
    pub fn n_effective(&self) -> usize {
        self.polys.mask_size()
    }

    /// `||Gamma_{P_k^-}||_p / ||Gamma_{P_k}||_p` at another exponent.
    pub fn lower_bound_at(&self, p: f64) -> Result<f64> {
        Ok(self.spectrum_pk_minus.quasinorm(p)? / self.spectrum_pk.quasinorm(p)?)
    }

    /// The mask identity `Gamma_{P_k^-} = Gamma_{P_k} * Delta_(2^k)`, checked
    /// entrywise with `==`.
    pub fn mask_identity_holds(&self) -> Result<bool> {
        let size = self.gamma_pk.size();
        let masked = schur_product(self.gamma_pk.matrix(), &delta_window(self.n_effective(), size)?)?;
        Ok(self.gamma_pk_minus.matrix().pad_to(size, size)? == masked)
    }
}

/// Builds the witness for `k` and its lower bound at `p` in `(0, 1]`.
pub fn build_witness(k: u32, p: f64) -> Result<WitnessBundle> {
    build_witness_with(&BumpSpec, k, p)
}

pub fn build_witness_with(bump: &dyn BumpFunction, k: u32, p: f64) -> Result<WitnessBundle> {
    check_exponent(p)?;
    if p > 1.0 {
        return Err(domain(format!("witness needs p <= 1, got {p}")));
    }
    let polys = witness_polys_with(bump, k)?;
    let gamma_pk = hankel_of(&polys.p_k)?;
    let gamma_pk_minus = hankel_of(&polys.p_k_minus)?;
    let spectrum_pk = gamma_pk.spectrum()?;
    let spectrum_pk_minus = gamma_pk_minus.spectrum()?;
    let lower_bound = spectrum_pk_minus.quasinorm(p)? / spectrum_pk.quasinorm(p)?;
    Ok(WitnessBundle {
        k,
        polys,
        gamma_pk,
        gamma_pk_minus,
        spectrum_pk,
        spectrum_pk_minus,
        p,
        lower_bound,
    })
}

/// `P_k^+ + z^(2^(k-1)) P_k^- = z^(2^k + 1) D^+_(2^(k-1) - 1)`, as exact
/// coefficient equality.
pub fn split_identity_holds(polys: &WitnessPolys) -> Result<bool> {
    let k = polys.k;
    let half = 1i64 << (k - 1);
    let lhs = &polys.p_k_plus + &polys.p_k_minus.shift(half);
    let rhs = if half > 1 {
        dirichlet_kernel(half as usize - 1)?.shift((1 << k) + 1)
    } else {
        TrigPoly::zero()
    };
    Ok(lhs == rhs)
}

/// `conj(z) P^+ Q_(m+1) + z^m P_- Q_(m+1) = D_m^+`, exact, for `m >= 1`.
pub fn riesz_split_identity_holds(bump: &dyn BumpFunction, m: usize) -> Result<bool> {
    if m == 0 {
        return Err(domain("identity needs m >= 1"));
    }
    let q = q_sampled_poly_with(bump, m + 1)?;
    let lhs = &riesz_strict_plus(&q).shift(-1) + &riesz_minus(&q).shift(m as i64);
    Ok(lhs == dirichlet_kernel(m)?)
}

/// `P_k^- = P_k * D^+_(2^k)`, exact.
pub fn convolution_identity_holds(polys: &WitnessPolys) -> Result<bool> {
    Ok(hadamard_convolve(&polys.p_k, &dirichlet_kernel(polys.mask_size())?) == polys.p_k_minus)
}

/// `P_k = P_k^+ + P_k^- + q(0) z^(2^k)`, exact.
pub fn decomposition_holds(polys: &WitnessPolys) -> bool {
    let centre = TrigPoly::monomial(1 << polys.k, polys.p_k.coeff(1 << polys.k));
    let sum = &(&polys.p_k_plus + &polys.p_k_minus) + &centre;
    sum == polys.p_k
}

/// Outcome of `||D^+_(2^(k-1)-1)||^p <= 2 ||P_k^-||^p`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SplitCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn dirichlet_split_check(k: u32, p: f64, cfg: &QuadratureConfig) -> Result<SplitCheck> {
    check_exponent(p)?;
    let polys = witness_polys(k)?;
    let m = (1usize << (k - 1)) - 1;
    let lhs = lp_norm(&dirichlet_kernel(m)?, p, cfg)?.powf(p);
    let rhs = 2.0 * lp_norm(&polys.p_k_minus, p, cfg)?.powf(p);
    Ok(SplitCheck {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + CHECK_SLACK),
    })
}

/// `(2n)^{1/p-1} ||D_n^+||_{H^p}`, an upper bound for the triangular
/// projection on `n x n` matrices.
pub fn projection_upper_bound(n: usize, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(projection_upper_bounds(n, &[p], cfg)?[0])
}

pub fn projection_upper_bounds(n: usize, ps: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    for &p in ps {
        check_exponent(p)?;
        if p > 1.0 {
            return Err(domain(format!("upper bound needs p <= 1, got {p}")));
        }
    }
    let d = dirichlet_kernel(n)?;
    let norms = lp_norms(&d, ps, cfg)?;
    Ok(ps
        .iter()
        .zip(norms)
        .map(|(&p, e)| (2.0 * n as f64).powf(1.0 / p - 1.0) * e.value)
        .collect())
}

/// `min{(1-p)^{-1}, log n}` with `(1-p)^{-1} = inf` at `p = 1`.
pub fn lower_min_term(n: usize, p: f64) -> f64 {
    let inv = if p >= 1.0 { f64::INFINITY } else { 1.0 / (1.0 - p) };
    inv.min((n as f64).ln())
}

/// `n^{1/p-1} min{(1-p)^{-1}, log n}`; at `p = 1` this is `log n`.
pub fn lower_shape(n: usize, p: f64) -> f64 {
    (n as f64).powf(1.0 / p - 1.0) * lower_min_term(n, p)
}

/// Shape of the lower estimate and value of the upper estimate for the
/// triangular projection.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MainEnvelopes {
    /// `n^{1/p-1} min{(1-p)^{-1}, log n}`, without the unknown constant.
    pub lower_shape: f64,
    /// `(2n)^{1/p-1} min{2 (1-p)^{-1}, log 5n}`.
    pub upper_value: f64,
}

pub fn main_envelopes(n: usize, p: f64) -> Result<MainEnvelopes> {
    if n < 2 {
        return Err(domain(format!("envelopes need n >= 2, got {n}")));
    }
    if !(0.5..1.0).contains(&p) {
        return Err(domain(format!("envelopes need p in [1/2, 1), got {p}")));
    }
    let nf = n as f64;
    let upper_min = (2.0 / (1.0 - p)).min((5.0 * nf).ln());
    Ok(MainEnvelopes {
        lower_shape: lower_shape(n, p),
        upper_value: (2.0 * nf).powf(1.0 / p - 1.0) * upper_min,
    })
}

/// Coefficient sum `P_k(1)`, which equals `2^(k-1)`.
pub fn witness_mass(polys: &WitnessPolys) -> f64 {
    polys.p_k.iter().map(|(_, c): (i64, Complex64)| c.re).sum()
}
