//! Hankel matrices of analytic polynomials, their Schatten norms, and the
//! Besov quasi-norm that controls them.
//!
//! For `phi` of degree `d` every nonzero entry of `Gamma_phi = {phi^(j+k)}`
//! sits in the leading `(d+1) x (d+1)` block, so that block carries the
//! whole singular spectrum.

use num_complex::Complex64;

use crate::bump::v_poly;
use crate::error::{check_exponent, domain, Error, Result};
use crate::spcore::{schatten_quasinorm, schur_product, singular_spectrum, DenseMatrix, SingularSpectrum};
use crate::trigpoly::{hadamard_convolve, lp_norm, lp_norms, QuadratureConfig, TrigPoly};

/// Relative slack of every inequality check; dominated by quadrature error.
pub const CHECK_SLACK: f64 = 1e-5;

/// The leading block of `Gamma_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelBlock {
    source: TrigPoly,
    matrix: DenseMatrix,
}

impl HankelBlock {
    pub fn source(&self) -> &TrigPoly {
        &self.source
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    /// Side length `degree + 1`.
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spectrum(&self) -> Result<SingularSpectrum> {
        singular_spectrum(&self.matrix)
    }
}

fn check_analytic(phi: &TrigPoly) -> Result<()> {
    match phi.min_freq() {
        Some(j) if j < 0 => Err(Error::NotAnalytic(j)),
        _ => Ok(()),
    }
}

/// `Gamma_phi` as a `(d+1) x (d+1)` block; the zero polynomial gives `[[0]]`.
pub fn hankel_of(phi: &TrigPoly) -> Result<HankelBlock> {
    hankel_sized(phi, phi.degree().map_or(1, |d| d as usize + 1))
}

/// `Gamma_phi` truncated (or zero-padded) to `size x size`.
pub fn hankel_sized(phi: &TrigPoly, size: usize) -> Result<HankelBlock> {
    check_analytic(phi)?;
    let coeffs: Vec<Complex64> = (0..2 * size as i64).map(|j| phi.coeff(j)).collect();
    let matrix = DenseMatrix::from_fn(size, size, |j, k| coeffs[j + k])?;
    Ok(HankelBlock {
        source: phi.clone(),
        matrix,
    })
}

pub fn hankel_sp_norm(phi: &TrigPoly, p: f64) -> Result<f64> {
    check_exponent(p)?;
    schatten_quasinorm(hankel_of(phi)?.matrix(), p)
}

/// [`hankel_sp_norm`] for several exponents from one SVD.
pub fn hankel_sp_norms(phi: &TrigPoly, ps: &[f64]) -> Result<Vec<f64>> {
    let spectrum = hankel_of(phi)?.spectrum()?;
    ps.iter().map(|&p| spectrum.quasinorm(p)).collect()
}

/// Outcome of one inequality check `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + CHECK_SLACK),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

fn check_p_at_most_one(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p > 1.0 {
        return Err(domain(format!("bound needs p <= 1, got {p}")));
    }
    Ok(())
}

fn size_of(phi: &TrigPoly) -> usize {
    phi.degree().map_or(1, |d| d as usize + 1)
}

/// `||Gamma_phi||_{S_p} <= 2^{1/p-1} m^{1/p} ||phi||_{L^p}`, `m = deg + 1`.
pub fn check_polybound(phi: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<BoundCheck> {
    check_p_at_most_one(p)?;
    let lhs = hankel_sp_norm(phi, p)?;
    let m = size_of(phi) as f64;
    let rhs = 2f64.powf(1.0 / p - 1.0) * m.powf(1.0 / p) * lp_norm(phi, p, cfg)?;
    Ok(BoundCheck::new(lhs, rhs))
}

/// [`check_polybound`] for several exponents sharing one SVD and one set
/// of quadrature samples.
pub fn check_polybound_many(phi: &TrigPoly, ps: &[f64], cfg: &QuadratureConfig) -> Result<Vec<BoundCheck>> {
    for &p in ps {
        check_p_at_most_one(p)?;
    }
    let lhs = hankel_sp_norms(phi, ps)?;
    let norms = lp_norms(phi, ps, cfg)?;
    let m = size_of(phi) as f64;
    Ok(ps
        .iter()
        .zip(lhs)
        .zip(norms)
        .map(|((&p, l), n)| BoundCheck::new(l, 2f64.powf(1.0 / p - 1.0) * m.powf(1.0 / p) * n.value))
        .collect())
}

/// Witnessed direction of the multiplier bound:
/// `||Gamma_phi * B||_{S_p} <= (2m)^{1/p-1} ||phi||_{L^p} ||B||_{S_p}`.
pub fn check_multbound(phi: &TrigPoly, b: &DenseMatrix, p: f64, cfg: &QuadratureConfig) -> Result<BoundCheck> {
    check_p_at_most_one(p)?;
    let gamma = hankel_of(phi)?;
    let lhs = schatten_quasinorm(&schur_product(gamma.matrix(), b)?, p)?;
    let m = gamma.size() as f64;
    let rhs = (2.0 * m).powf(1.0 / p - 1.0) * lp_norm(phi, p, cfg)? * schatten_quasinorm(b, p)?;
    Ok(BoundCheck::new(lhs, rhs))
}

/// Terms `(n, 2^n ||phi * V_n||_p^p)` of the Besov sum; only the `n` whose
/// window meets the support of `phi` are listed.
pub fn besov_terms(phi: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<Vec<(u32, f64)>> {
    check_exponent(p)?;
    check_analytic(phi)?;
    if phi.coeff(0) != Complex64::new(0.0, 0.0) {
        return Err(Error::ConstantTerm);
    }
    let Some((lo, hi)) = phi.support() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut n = 0u32;
    // supp V_n = [2^(n-1) + 1, 2^(n+1) - 1].
    while (1i64 << n) / 2 < hi {
        if (1i64 << (n + 1)) > lo {
            let piece = hadamard_convolve(phi, &v_poly(n)?);
            let norm = lp_norm(&piece, p, cfg)?;
            out.push((n, (1u64 << n) as f64 * norm.powf(p)));
        }
        n += 1;
    }
    Ok(out)
}

/// `(sum_n 2^n ||phi * V_n||_p^p)^{1/p}` for `phi` with no constant term.
pub fn besov_quasinorm(phi: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let total: f64 = besov_terms(phi, p, cfg)?.iter().map(|(_, t)| t).sum();
    Ok(total.powf(1.0 / p))
}

/// Upper half of the two-sided estimate for `phi` in the dyadic band
/// `[2^(n-1) + 1, 2^(n+1) - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpecialFormCheck {
    pub sp_norm: f64,
    /// `2^{(n+1)/p} ||phi||_{L^p}`.
    pub upper_env: f64,
    /// `sp_norm / upper_env`; the lower estimate holds with any constant
    /// at most the smallest ratio observed.
    pub ratio: f64,
    pub pass: bool,
}

impl SpecialFormCheck {
    /// Lower envelope with an empirical constant `d`.
    pub fn lower_env(&self, d: f64) -> f64 {
        d * self.upper_env
    }
}

/// The band `[2^(n-1) + 1, 2^(n+1) - 1]` (for `n = 0` just `{1}`).
pub fn dyadic_band(n: u32) -> (i64, i64) {
    ((1i64 << n) / 2 + 1, (1i64 << (n + 1)) - 1)
}

pub fn special_form_check(phi: &TrigPoly, n: u32, p: f64, cfg: &QuadratureConfig) -> Result<SpecialFormCheck> {
    check_p_at_most_one(p)?;
    if n > 40 {
        return Err(domain("band index too large"));
    }
    let (lo, hi) = dyadic_band(n);
    let Some((min, max)) = phi.support() else {
        return Err(Error::DegenerateWitness);
    };
    if min < lo || max > hi {
        return Err(Error::OutsideBand { min, max, lo, hi });
    }
    let sp_norm = hankel_sp_norm(phi, p)?;
    let upper_env = 2f64.powf((n + 1) as f64 / p) * lp_norm(phi, p, cfg)?;
    Ok(SpecialFormCheck {
        sp_norm,
        upper_env,
        ratio: sp_norm / upper_env,
        pass: sp_norm <= upper_env * (1.0 + CHECK_SLACK),
    })
}
