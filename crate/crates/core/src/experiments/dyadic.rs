use serde::Serialize;

use super::trial_seed;
use crate::lpp::{line_to_point, passage_sequence, point_to_line_excluded};
use crate::par::{try_map_trials, ExecMode};
use crate::randkit::WeightField;
use crate::{Error, Result};

/// `((1 - 0.1) * 96)^(1/3)`: the region threshold constant with `c0 = 1/96`
/// and `eps = 0.1`.
pub const DEFAULT_THRESHOLD_CONST: f64 = 4.420_837_798_368_463;

/// Relative slack allowed in the path-splitting check. The two sides add the
/// same weights in different orders.
const SPLIT_REL_TOL: f64 = 1e-12;

/// `n_j = ceil((1 + eta)^j)` for `j = 0..=k`.
pub fn scales(k: u32, eta: f64) -> Vec<u64> {
    (0..=k).map(|j| (1.0 + eta).powi(j as i32).ceil() as u64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionTest {
    pub j: u32,
    /// Line-to-point weight from `x + y = 2 n_{j-1}` to `(n_j - 1, n_j - 1)`.
    pub t_region: f64,
    pub threshold: f64,
    pub a_j: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitCheck {
    pub j: u32,
    /// `T_{n_j - 1}`.
    pub t_point: f64,
    /// Point-to-line weight at `n_{j-1}` with the last vertex left out.
    pub t_line_excluded: f64,
    pub t_region: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicScan {
    pub seed: u64,
    pub k: u32,
    pub eta: f64,
    pub threshold_const: f64,
    pub scales: Vec<u64>,
    /// One entry per `j` in `ceil(k/2)..=k`.
    pub regions: Vec<RegionTest>,
    pub tau: Option<u32>,
    /// Point-to-line weight (last vertex excluded) at `n_{tau-1}` is below
    /// `4 n_{tau-1}`. False when `tau` is not found.
    pub b_tau: bool,
    pub splits: Vec<SplitCheck>,
}

impl DyadicScan {
    pub fn success(&self) -> bool {
        self.tau.is_some() && self.b_tau
    }

    pub fn split_violations(&self) -> usize {
        self.splits.iter().filter(|s| !s.holds).count()
    }
}

fn region_threshold(span: u64, c: f64) -> f64 {
    let s = span as f64;
    4.0 * s - c * s.cbrt() * s.ln().ln().cbrt()
}

/// Scans the regions between consecutive lines `x + y = 2 n_j` of one field.
///
/// The region test at `j` compares against `4 s - c s^(1/3) (log log s)^(1/3)`
/// with `s = n_j - n_{j-1}`, which is `n_{j-1}` when `eta = 1`.
pub fn dyadic_scan(seed: u64, k: u32, eta: f64, threshold_const: f64) -> Result<DyadicScan> {
    if k < 4 {
        return Err(Error::usage(format!("k must be at least 4, got {k}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::usage(format!("eta must be positive, got {eta}")));
    }
    if !(threshold_const > 0.0 && threshold_const.is_finite()) {
        return Err(Error::usage(format!("threshold constant must be positive, got {threshold_const}")));
    }
    let n = scales(k, eta);
    let j_lo = k.div_ceil(2);
    for j in j_lo..=k {
        if n[j as usize] <= n[j as usize - 1] {
            return Err(Error::usage(format!("scales repeat at j = {j}; increase eta or k")));
        }
    }
    let field = WeightField::new(seed);
    let t_points = passage_sequence(&field, n[k as usize] - 1)?;

    let mut regions = Vec::new();
    let mut splits = Vec::new();
    for j in j_lo..=k {
        let (lo, hi) = (n[j as usize - 1], n[j as usize]);
        let t_region = line_to_point(&field, lo, hi)?;
        let threshold = region_threshold(hi - lo, threshold_const);
        regions.push(RegionTest { j, t_region, threshold, a_j: t_region <= threshold });

        let t_point = t_points[(hi - 2) as usize].t_n;
        let t_line_excluded = point_to_line_excluded(&field, lo)?;
        let rhs = t_line_excluded + t_region;
        let holds = t_point <= rhs + SPLIT_REL_TOL * rhs.abs();
        splits.push(SplitCheck { j, t_point, t_line_excluded, t_region, holds });
    }
    let tau = regions.iter().rev().find(|r| r.a_j).map(|r| r.j);
    let b_tau = tau.is_some_and(|t| {
        let s = &splits[(t - j_lo) as usize];
        s.t_line_excluded < 4.0 * n[t as usize - 1] as f64
    });
    Ok(DyadicScan { seed, k, eta, threshold_const, scales: n, regions, tau, b_tau, splits })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicBatch {
    pub master_seed: u64,
    pub seeds: u64,
    pub successes: u64,
    pub success_fraction: f64,
    pub split_violations: u64,
    pub scans: Vec<DyadicScan>,
}

/// Runs `seeds` scans on independent fields derived from `master`.
pub fn dyadic_batch(master: u64, seeds: u64, k: u32, eta: f64, threshold_const: f64, mode: ExecMode) -> Result<DyadicBatch> {
    if seeds == 0 {
        return Err(Error::usage("need at least one seed"));
    }
    let scans = try_map_trials(seeds, mode, |i| dyadic_scan(trial_seed(master, i), k, eta, threshold_const))?;
    let successes = scans.iter().filter(|s| s.success()).count() as u64;
    let split_violations = scans.iter().map(|s| s.split_violations() as u64).sum();
    Ok(DyadicBatch {
        master_seed: master,
        seeds,
        successes,
        success_fraction: successes as f64 / seeds as f64,
        split_violations,
        scans,
    })
}
