use serde::Serialize;

use super::trial_seed;
use crate::laguerre::{sample_lambda_max, LaguerreParams};
use crate::lpp::{passage_point, point_to_line, LatticePoint};
use crate::par::{try_map_trials, ExecMode};
use crate::randkit::{ks_two_sample, mix64, RngStream, WeightField};
use crate::{Error, Result};

const LPP_SALT: u64 = 0x4C50_5000_0000_0001;
const MATRIX_SALT: u64 = 0x4D41_5452_4958_0002;

/// Two-sample KS comparison at the 0.001 level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub ks_stat: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// `1.95 sqrt((n_a + n_b) / (n_a n_b))`.
    pub critical_001: f64,
    pub pass: bool,
}

pub fn ks_report(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<KsReport> {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let ks_stat = ks_two_sample(&a, &b)?;
    let (na, nb) = (a.len(), b.len());
    let critical_001 = 1.95 * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt();
    Ok(KsReport { ks_stat, n_a: na, n_b: nb, critical_001, pass: ks_stat < critical_001 })
}

/// Paired samples from the two sides of an identity, unsorted and in trial
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySamples {
    pub lpp: Vec<f64>,
    /// Largest eigenvalues, not rescaled.
    pub lambda: Vec<f64>,
}

fn check(n: u64, trials: u64, min_n: u64) -> Result<()> {
    if n < min_n {
        return Err(Error::usage(format!("n must be at least {min_n}, got {n}")));
    }
    if trials < 1000 {
        return Err(Error::usage(format!("identity checks need at least 1000 trials, got {trials}")));
    }
    Ok(())
}

fn lambdas(p: &LaguerreParams, trials: u64, seed: u64, mode: ExecMode) -> Result<Vec<f64>> {
    let master = mix64(seed ^ MATRIX_SALT);
    try_map_trials(trials, mode, |i| sample_lambda_max(p, &mut RngStream::new(master, i), None))
}

fn field(seed: u64, i: u64) -> WeightField {
    WeightField::new(trial_seed(mix64(seed ^ LPP_SALT), i))
}

/// `T*_n` on independent fields and `lambda` of the beta = 1 ensemble with
/// `m = 2n`, `n' = 2n - 1`.
pub fn loe_samples(n: u64, trials: u64, seed: u64, mode: ExecMode) -> Result<IdentitySamples> {
    check(n, trials, 2)?;
    let p = LaguerreParams::new(2 * n as usize, 2 * n as usize - 1, 1.0)?;
    let lpp = try_map_trials(trials, mode, |i| point_to_line(&field(seed, i), n))?;
    Ok(IdentitySamples { lpp, lambda: lambdas(&p, trials, seed, mode)? })
}

/// `T_n` on independent fields and `lambda` of the ensemble with
/// `m = n' = n` at the given `beta` (2 for the identity itself).
pub fn lue_samples(n: u64, trials: u64, seed: u64, beta: f64, mode: ExecMode) -> Result<IdentitySamples> {
    check(n, trials, 1)?;
    let p = LaguerreParams::new(n as usize, n as usize, beta)?;
    let corner = LatticePoint::diagonal(n)?;
    let origin = LatticePoint::diagonal(1)?;
    let lpp = try_map_trials(trials, mode, |i| passage_point(&field(seed, i), origin, corner))?;
    Ok(IdentitySamples { lpp, lambda: lambdas(&p, trials, seed, mode)? })
}

/// KS test of `T*_n` against `lambda / 2` at `beta = 1`, `m = 2n`,
/// `n' = 2n - 1`.
pub fn verify_loe_identity(n: u64, trials: u64, seed: u64, mode: ExecMode) -> Result<KsReport> {
    let s = loe_samples(n, trials, seed, mode)?;
    ks_report(s.lpp, s.lambda.into_iter().map(|l| 0.5 * l).collect())
}

/// KS test of `T_n` against `lambda` at `beta = 2`, `m = n' = n`.
pub fn verify_lue_identity(n: u64, trials: u64, seed: u64, mode: ExecMode) -> Result<KsReport> {
    let s = lue_samples(n, trials, seed, 2.0, mode)?;
    ks_report(s.lpp, s.lambda)
}
