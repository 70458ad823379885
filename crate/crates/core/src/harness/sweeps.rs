//! The sweeps behind `sptri dirichlet`, `sptri witness` and
//! `sptri hankel-check`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{sort_records, HarnessError, SweepOutcome, SweepRecord};
use crate::hankel::{check_multbound, check_polybound_many, CHECK_SLACK};
use crate::spcore::{random_matrix, Distribution};
use crate::trigpoly::{
    dirichlet_envelopes, dirichlet_kernel, lp_norm_estimate, lp_norms, random_poly, LpEstimate, QuadratureConfig,
};
use crate::witness::{build_witness, lower_shape, DEFAULT_MAX_K, HARD_MAX_K};

/// Slack on the certified witness sandwich.
pub const SANDWICH_SLACK: f64 = 1e-4;
/// Largest admissible max/min of the shape ratio band.
pub const SHAPE_BAND_GATE: f64 = 100.0;
/// Largest admissible max/min of the `p = 1` log-growth band.
pub const LOG_BAND_GATE: f64 = 10.0;
/// Witness jobs from this `k` on run one at a time.
const LARGE_K: u32 = 11;

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn check_exponents(ps: &[f64], max: f64) -> Result<(), HarnessError> {
    if ps.is_empty() {
        return Err(HarnessError::Usage("empty p grid".into()));
    }
    for &p in ps {
        if !(p > 0.0 && p <= max) {
            return Err(HarnessError::Usage(format!("p = {p} outside (0, {max}]")));
        }
    }
    Ok(())
}

/// `lp_norms` with a per-exponent fallback, so one failing `p` does not
/// take the others down.
fn norms_or_nan(f: &crate::trigpoly::TrigPoly, ps: &[f64], cfg: &QuadratureConfig) -> Vec<Result<LpEstimate, String>> {
    match lp_norms(f, ps, cfg) {
        Ok(v) => v.into_iter().map(Ok).collect(),
        Err(_) => ps
            .iter()
            .map(|&p| lp_norm_estimate(f, p, cfg).map_err(|e| e.to_string()))
            .collect(),
    }
}

/// `||D_n^+||_{H^p}` over the grid, each row checked against its envelopes
/// (where `p` lies in `[1/2, 1)`).
pub fn cmd_dirichlet(ns: &[u64], ps: &[f64], cfg: &QuadratureConfig) -> Result<SweepOutcome, HarnessError> {
    if ns.is_empty() {
        return Err(HarnessError::Usage("empty n grid".into()));
    }
    check_exponents(ps, f64::INFINITY)?;
    let groups: Vec<(Vec<SweepRecord>, Vec<String>)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let d = dirichlet_kernel(n as usize).expect("n >= 1");
            let norms = norms_or_nan(&d, ps, cfg);
            let wall = elapsed_ms(start);
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for (&p, est) in ps.iter().zip(norms) {
                let mut r = SweepRecord::new("dirichlet", n, p);
                r.wall_ms = wall;
                if let Ok(env) = dirichlet_envelopes(n as usize, p) {
                    r.lower_env = Some(env.lower);
                    r.upper_env = Some(env.upper);
                }
                match est {
                    Ok(e) => {
                        r.value = e.value;
                        r.quad_points = e.cells as u64;
                        if let (Some(lo), Some(hi)) = (r.lower_env, r.upper_env) {
                            if !(e.value >= lo * (1.0 - CHECK_SLACK) && e.value <= hi * (1.0 + CHECK_SLACK)) {
                                failures.push(format!("dirichlet n={n} p={p}: value {} outside [{lo}, {hi}]", e.value));
                            }
                        }
                    }
                    Err(msg) => failures.push(format!("dirichlet n={n} p={p}: {msg}")),
                }
                records.push(r);
            }
            (records, failures)
        })
        .collect();
    Ok(collect(groups, Vec::new()))
}

fn collect(groups: Vec<(Vec<SweepRecord>, Vec<String>)>, notes: Vec<String>) -> SweepOutcome {
    let mut out = SweepOutcome {
        notes,
        ..SweepOutcome::default()
    };
    for (r, f) in groups {
        out.records.extend(r);
        out.failures.extend(f);
    }
    sort_records(&mut out.records);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessParams {
    pub k_min: u32,
    pub k_max: u32,
    pub ps: Vec<f64>,
    pub include_p1: bool,
}

impl WitnessParams {
    pub fn exponents(&self) -> Vec<f64> {
        let mut ps = self.ps.clone();
        if self.include_p1 && !ps.contains(&1.0) {
            ps.push(1.0);
        }
        ps
    }
}

/// Result of one `k`: records, failures and the values the aggregate
/// checks need.
struct WitnessCell {
    k: u32,
    records: Vec<SweepRecord>,
    failures: Vec<String>,
    /// `(p, shape ratio)`.
    shape: Vec<(f64, f64)>,
    /// `(lower bound, lower bound / log(1 + n))` at `p = 1`.
    endpoint: Option<(f64, f64)>,
}

fn witness_cell(k: u32, ps: &[f64], cfg: &QuadratureConfig) -> WitnessCell {
    let start = Instant::now();
    let n = 1usize << k;
    let mut cell = WitnessCell {
        k,
        records: Vec::new(),
        failures: Vec::new(),
        shape: Vec::new(),
        endpoint: None,
    };
    let bundle = build_witness(k, ps[0]);
    let d = dirichlet_kernel(n).expect("n >= 1");
    let norms = norms_or_nan(&d, ps, cfg);
    let wall = elapsed_ms(start);
    for (&p, est) in ps.iter().zip(norms) {
        let mut row = SweepRecord::new("witness", n as u64, p);
        row.k = Some(k);
        row.wall_ms = wall;
        let lower = match &bundle {
            Ok(b) => b.lower_bound_at(p).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        let upper = est.map(|e| {
            row.quad_points = e.cells as u64;
            ((2.0 * n as f64).powf(1.0 / p - 1.0) * e.value, e.value)
        });
        match &lower {
            Ok(lb) => row.value = *lb,
            Err(msg) => cell.failures.push(format!("witness k={k} p={p}: {msg}")),
        }
        match &upper {
            Ok((ub, _)) => row.upper_env = Some(*ub),
            Err(msg) => cell.failures.push(format!("witness k={k} p={p}: upper bound: {msg}")),
        }
        if let (Ok(lb), Ok((ub, _))) = (&lower, &upper) {
            if *lb > ub * (1.0 + SANDWICH_SLACK) {
                cell.failures.push(format!(
                    "witness k={k} p={p}: lower bound {lb} exceeds upper bound {ub}"
                ));
            }
        }
        cell.records.push(row.clone());

        if (0.5..1.0).contains(&p) {
            let shape = lower_shape(n, p);
            let mut r = SweepRecord::new("witness-shape", n as u64, p);
            r.k = Some(k);
            r.wall_ms = wall;
            r.quad_points = row.quad_points;
            if let Ok(lb) = &lower {
                r.value = lb / shape;
                cell.shape.push((p, r.value));
            }
            if let Ok((ub, _)) = &upper {
                r.upper_env = Some(ub / shape);
            }
            cell.records.push(r);
        }
        if p == 1.0 {
            let mut r = SweepRecord::new("witness-log", n as u64, p);
            r.k = Some(k);
            r.wall_ms = wall;
            r.quad_points = row.quad_points;
            let log = (1.0 + n as f64).ln();
            if let Ok(lb) = &lower {
                r.value = lb / log;
                cell.endpoint = Some((*lb, r.value));
            }
            if let Ok((_, h1)) = &upper {
                r.upper_env = Some(*h1);
                let cap = (5.0 * n as f64).ln();
                if *h1 > cap * (1.0 + CHECK_SLACK) {
                    cell.failures
                        .push(format!("witness k={k} p=1: ||D_n||_1 = {h1} exceeds log 5n = {cap}"));
                }
            }
            cell.records.push(r);
        }
    }
    cell
}

fn band(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Witness lower bounds, certified upper bounds and shape ratios for
/// `k = k_min..=k_max`.
pub fn cmd_witness(params: &WitnessParams, cfg: &QuadratureConfig) -> Result<SweepOutcome, HarnessError> {
    if params.k_min < 2 || params.k_min > params.k_max {
        return Err(HarnessError::Usage(format!(
            "witness needs 2 <= k_min <= k_max, got {}..{}",
            params.k_min, params.k_max
        )));
    }
    if params.k_max > HARD_MAX_K {
        return Err(HarnessError::Usage(format!(
            "k_max = {} refused: Hankel blocks beyond k = {HARD_MAX_K} do not fit the memory guard",
            params.k_max
        )));
    }
    check_exponents(&params.ps, 1.0)?;
    let ps = params.exponents();
    let mut notes = Vec::new();
    if params.k_max > DEFAULT_MAX_K {
        notes.push(format!(
            "warning: k_max = {} exceeds {DEFAULT_MAX_K}; dense SVDs of size {} will be slow",
            params.k_max,
            3 << (params.k_max - 1)
        ));
    }
    let small: Vec<u32> = (params.k_min..=params.k_max.min(LARGE_K - 1)).collect();
    let mut cells: Vec<WitnessCell> = small.par_iter().map(|&k| witness_cell(k, &ps, cfg)).collect();
    for k in LARGE_K.max(params.k_min)..=params.k_max {
        cells.push(witness_cell(k, &ps, cfg));
    }
    cells.sort_by_key(|c| c.k);

    let mut failures = Vec::new();
    let shape_band = band(
        cells
            .iter()
            .filter(|c| c.k >= 4)
            .flat_map(|c| c.shape.iter().filter(|(p, _)| *p <= 0.95 + 1e-12).map(|(_, r)| *r)),
    );
    if let Some((lo, hi)) = shape_band {
        notes.push(format!(
            "shape ratio band (k >= 4, p <= 0.95): [{lo:.6}, {hi:.6}], max/min = {:.3}",
            hi / lo
        ));
        if (hi / lo).is_nan() || hi / lo > SHAPE_BAND_GATE {
            failures.push(format!("shape band max/min = {} exceeds {SHAPE_BAND_GATE}", hi / lo));
        }
    }
    let endpoint: Vec<(u32, f64, f64)> = cells
        .iter()
        .filter(|c| c.k >= 4)
        .filter_map(|c| c.endpoint.map(|(lb, r)| (c.k, lb, r)))
        .collect();
    for w in endpoint.windows(2) {
        if w[1].1 < w[0].1 {
            failures.push(format!(
                "p = 1 lower bound decreases from k={} ({}) to k={} ({})",
                w[0].0, w[0].1, w[1].0, w[1].1
            ));
        }
    }
    if let Some((lo, hi)) = band(endpoint.iter().map(|e| e.2)) {
        notes.push(format!(
            "p = 1 log-growth band (k >= 4): [{lo:.6}, {hi:.6}], max/min = {:.3}",
            hi / lo
        ));
        if (hi / lo).is_nan() || hi / lo > LOG_BAND_GATE {
            failures.push(format!("p = 1 band max/min = {} exceeds {LOG_BAND_GATE}", hi / lo));
        }
    }
    let groups = cells.into_iter().map(|c| (c.records, c.failures)).collect();
    let mut out = collect(groups, notes);
    out.failures.extend(failures);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HankelCheckParams {
    pub trials: u64,
    pub m_max: u64,
    pub ps: Vec<f64>,
    pub seed: u64,
}

/// Largest matrix size used for the multiplier check.
const MULT_M_MAX: u64 = 64;

/// Seed of trial `t`.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t)
}

/// Randomized polynomial and multiplier bound checks.
pub fn cmd_hankel_check(params: &HankelCheckParams, cfg: &QuadratureConfig) -> Result<SweepOutcome, HarnessError> {
    if params.trials == 0 {
        return Err(HarnessError::Usage("--trials must be at least 1".into()));
    }
    if params.m_max == 0 {
        return Err(HarnessError::Usage("--m-max must be at least 1".into()));
    }
    check_exponents(&params.ps, 1.0)?;
    let groups: Vec<(Vec<SweepRecord>, Vec<String>)> = (0..params.trials)
        .into_par_iter()
        .map(|t| hankel_trial(params, trial_seed(params.seed, t), cfg))
        .collect();
    Ok(collect(groups, Vec::new()))
}

fn hankel_trial(params: &HankelCheckParams, seed: u64, cfg: &QuadratureConfig) -> (Vec<SweepRecord>, Vec<String>) {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dist = if rng.random::<bool>() {
        Distribution::GaussianComplex
    } else {
        Distribution::GaussianReal
    };
    let m = rng.random_range(1..=params.m_max);
    let mb = m.min(MULT_M_MAX);
    let phi = random_poly(0, m as i64 - 1, rng.random(), dist).expect("valid support");
    let phi_b = random_poly(0, mb as i64 - 1, rng.random(), dist).expect("valid support");
    let b = random_matrix(mb as usize, mb as usize, rng.random(), dist).expect("nonempty");

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let poly = check_polybound_many(&phi, &params.ps, cfg);
    let wall = elapsed_ms(start);
    for (i, &p) in params.ps.iter().enumerate() {
        let mut r = SweepRecord::new("hankel-polybound", m, p);
        r.seed = Some(seed);
        r.quad_points = m;
        r.wall_ms = wall;
        match &poly {
            Ok(v) => {
                r.value = v[i].lhs;
                r.upper_env = Some(v[i].rhs);
                if !v[i].pass {
                    failures.push(format!(
                        "hankel-polybound seed={seed} m={m} p={p}: {} > {}",
                        v[i].lhs, v[i].rhs
                    ));
                }
            }
            Err(e) => failures.push(format!("hankel-polybound seed={seed} m={m} p={p}: {e}")),
        }
        records.push(r);

        let start = Instant::now();
        let mut r = SweepRecord::new("hankel-multbound", mb, p);
        r.seed = Some(seed);
        r.quad_points = mb;
        match check_multbound(&phi_b, &b, p, cfg) {
            Ok(c) => {
                r.value = c.lhs;
                r.upper_env = Some(c.rhs);
                if !c.pass {
                    failures.push(format!(
                        "hankel-multbound seed={seed} m={mb} p={p}: {} > {}",
                        c.lhs, c.rhs
                    ));
                }
            }
            Err(e) => failures.push(format!("hankel-multbound seed={seed} m={mb} p={p}: {e}")),
        }
        r.wall_ms = elapsed_ms(start);
        records.push(r);
    }
    (records, failures)
}
