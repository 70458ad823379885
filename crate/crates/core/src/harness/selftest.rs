//! Exact identities and small oracle comparisons run by `sptri selftest`.

use num_complex::Complex64;

use crate::bump::{BumpFunction, BumpSpec};
use crate::hankel::hankel_of;
use crate::spcore::{
    apply_multiplier_witness, column_reverse, delta_window, mask, random_matrix, schur_product, singular_spectrum,
    DenseMatrix, Distribution, MaskKind,
};
use crate::trigpoly::{dirichlet_kernel, lp_norm, QuadratureConfig, TrigPoly};
use crate::witness::{
    convolution_identity_holds, riesz_split_identity_holds, split_identity_holds, witness_polys_with,
};

/// Range of `k` covered by the coefficient identities.
const K_RANGE: std::ops::RangeInclusive<u32> = 2..=10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// `None` on success, otherwise what went wrong.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.failure.is_some())
            .map(|c| c.name)
            .collect()
    }
}

type Check = fn(&dyn BumpFunction) -> Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("partition-identity", partition_identity),
    ("bump-evenness", bump_evenness),
    ("riesz-split-identity", riesz_split),
    ("witness-split-identity", witness_split),
    ("witness-convolution-identity", witness_convolution),
    ("mask-identity", mask_identity),
    ("mask-equivalence", mask_equivalence),
    ("dyadic-partition", dyadic_partition),
    ("dirichlet-unit", dirichlet_unit),
    ("svd-oracle", svd_oracle),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

pub fn selftest() -> SelftestReport {
    selftest_with(&BumpSpec)
}

/// Runs every check against `bump`; a corrupted bump shows up by name.
pub fn selftest_with(bump: &dyn BumpFunction) -> SelftestReport {
    SelftestReport {
        checks: CHECKS
            .iter()
            .map(|(name, f)| CheckResult {
                name,
                failure: f(bump).err(),
            })
            .collect(),
    }
}

fn partition_identity(bump: &dyn BumpFunction) -> Result<(), String> {
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        let s = bump.q(t) + bump.q(t - 1.0);
        if (s - 1.0).abs() > 1e-12 {
            return Err(format!("q({t}) + q({t} - 1) = {s}"));
        }
    }
    for m in [1u64, 2, 3, 64, 512] {
        for k in 0..=m as i64 {
            let s = bump.q_lattice(k, m) + bump.q_lattice(k - m as i64, m);
            if s != 1.0 {
                return Err(format!("q({k}/{m}) + q({k}/{m} - 1) = {s}"));
            }
        }
    }
    Ok(())
}

fn bump_evenness(bump: &dyn BumpFunction) -> Result<(), String> {
    for i in 0..=1000 {
        let t = -1.5 + 3.0 * i as f64 / 1000.0;
        if (bump.q(t) - bump.q(-t)).abs() > 1e-12 {
            return Err(format!("q({t}) != q({})", -t));
        }
    }
    for t in [1.0, 1.25, -1.0, -3.0] {
        if bump.q(t) != 0.0 {
            return Err(format!("q({t}) = {} outside the support", bump.q(t)));
        }
    }
    Ok(())
}

fn riesz_split(bump: &dyn BumpFunction) -> Result<(), String> {
    for k in K_RANGE {
        let m = (1usize << (k - 1)) - 1;
        if !riesz_split_identity_holds(bump, m).map_err(|e| e.to_string())? {
            return Err(format!("fails at m = {m}"));
        }
    }
    Ok(())
}

fn witness_split(bump: &dyn BumpFunction) -> Result<(), String> {
    for k in K_RANGE {
        let w = witness_polys_with(bump, k).map_err(|e| e.to_string())?;
        if !split_identity_holds(&w).map_err(|e| e.to_string())? {
            return Err(format!("fails at k = {k}"));
        }
    }
    Ok(())
}

fn witness_convolution(bump: &dyn BumpFunction) -> Result<(), String> {
    for k in K_RANGE {
        let w = witness_polys_with(bump, k).map_err(|e| e.to_string())?;
        if !convolution_identity_holds(&w).map_err(|e| e.to_string())? {
            return Err(format!("fails at k = {k}"));
        }
    }
    Ok(())
}

fn mask_identity(bump: &dyn BumpFunction) -> Result<(), String> {
    let err = |e: crate::Error| e.to_string();
    for k in K_RANGE {
        let w = witness_polys_with(bump, k).map_err(err)?;
        let full = hankel_of(&w.p_k).map_err(err)?;
        let minus = hankel_of(&w.p_k_minus).map_err(err)?;
        let size = full.size();
        let masked = schur_product(full.matrix(), &delta_window(w.mask_size(), size).map_err(err)?).map_err(err)?;
        if minus.matrix().pad_to(size, size).map_err(err)? != masked {
            return Err(format!("fails at k = {k}"));
        }
    }
    Ok(())
}

fn mask_equivalence(_: &dyn BumpFunction) -> Result<(), String> {
    let err = |e: crate::Error| e.to_string();
    for n in 1..=64 {
        let chi = mask(MaskKind::Chi, n).map_err(err)?;
        let delta = mask(MaskKind::Delta, n).map_err(err)?;
        if &column_reverse(chi.matrix()) != delta.matrix() {
            return Err(format!("column reversal of chi_{n} is not delta_{n}"));
        }
    }
    for (n, seed) in [(3usize, 1u64), (6, 2), (9, 3)] {
        let b = random_matrix(n, n, seed, Distribution::GaussianComplex).map_err(err)?;
        let chi = mask(MaskKind::Chi, n).map_err(err)?;
        let delta = mask(MaskKind::Delta, n).map_err(err)?;
        let a = apply_multiplier_witness(chi.matrix(), &b, 0.6).map_err(err)?;
        let c = apply_multiplier_witness(delta.matrix(), &column_reverse(&b), 0.6).map_err(err)?;
        if (a - c).abs() > 1e-9 * a.max(1.0) {
            return Err(format!("n = {n}: {a} vs {c}"));
        }
    }
    Ok(())
}

fn dyadic_partition(_: &dyn BumpFunction) -> Result<(), String> {
    let polys: Vec<TrigPoly> = (0..=11).map(|n| crate::bump::v_poly(n).expect("n small")).collect();
    for j in 1..=1024i64 {
        let s: f64 = polys.iter().map(|v| v.coeff(j).re).sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(format!("sum_n V_n^({j}) = {s}"));
        }
    }
    Ok(())
}

fn dirichlet_unit(_: &dyn BumpFunction) -> Result<(), String> {
    let d = dirichlet_kernel(1).map_err(|e| e.to_string())?;
    for p in [0.5, 0.75, 1.0] {
        let v = lp_norm(&d, p, &QuadratureConfig::default()).map_err(|e| e.to_string())?;
        if (v - 1.0).abs() > 1e-12 {
            return Err(format!("||D_1||_{p} = {v}"));
        }
    }
    Ok(())
}

fn svd_oracle(_: &dyn BumpFunction) -> Result<(), String> {
    let err = |e: crate::Error| e.to_string();
    let mut cases = Vec::new();
    for (i, &(r, c)) in [(1usize, 1usize), (2, 3), (4, 4), (5, 2), (5, 5)].iter().enumerate() {
        for dist in [
            Distribution::GaussianReal,
            Distribution::GaussianComplex,
            Distribution::Sign,
        ] {
            cases.push(random_matrix(r, c, 100 + i as u64, dist).map_err(err)?);
        }
    }
    cases.push(DenseMatrix::ones(4, 4).map_err(err)?);
    cases.push(mask(MaskKind::Chi, 5).map_err(err)?.into_matrix());
    for a in &cases {
        let got = singular_spectrum(a).map_err(err)?;
        let want = jacobi_singular_values(a);
        let scale = want[0].max(1e-300);
        for (g, w) in got.values().iter().zip(&want) {
            if (g - w).abs() > 1e-8 * scale {
                return Err(format!("{:?}: {g} vs oracle {w}", a.dims()));
            }
        }
    }
    Ok(())
}

/// Singular values from cyclic Jacobi on the real symmetric embedding
/// `[[Re H, -Im H], [Im H, Re H]]` of `H = A^H A` (each eigenvalue of `H`
/// appears twice).
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = a.dims();
    let mut h = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            h[i * cols + j] = (0..rows).map(|r| a.get(r, i).conj() * a.get(r, j)).sum();
        }
    }
    let n = 2 * cols;
    let mut m = vec![0.0; n * n];
    for i in 0..cols {
        for j in 0..cols {
            let z = h[i * cols + j];
            m[i * n + j] = z.re;
            m[(i + cols) * n + (j + cols)] = z.re;
            m[i * n + (j + cols)] = -z.im;
            m[(i + cols) * n + j] = z.im;
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let k = rows.min(cols);
    (0..k).map(|i| eig[2 * i].max(0.0).sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Perturbed;

    impl BumpFunction for Perturbed {
        fn q(&self, t: f64) -> f64 {
            if t == 0.0 {
                1.0 + 1e-6
            } else {
                crate::bump::bump_q(t)
            }
        }

        fn tag(&self) -> String {
            "perturbed".into()
        }
    }

    #[test]
    fn clean_run_passes() {
        let report = selftest();
        assert!(report.passed(), "{:?}", report.failed_names());
        assert_eq!(report.checks.len(), check_names().len());
    }

    #[test]
    fn corrupted_bump_is_named() {
        let report = selftest_with(&Perturbed);
        assert!(!report.passed());
        assert!(report.failed_names().contains(&"partition-identity"));
    }

    #[test]
    fn jacobi_on_diagonal() {
        let a = DenseMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, -4.0]).unwrap();
        let s = jacobi_singular_values(&a);
        assert!((s[0] - 4.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12);
    }
}
