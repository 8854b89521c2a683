use serde::Serialize;

use crate::laguerre::LaguerreParams;
use crate::par::ExecMode;
use crate::tilt::{choose_k, estimate_below, tail_probability, Method, TailEstimate};
use crate::{Error, Result};

/// Points whose standard error exceeds this fraction of `p_hat` are flagged
/// and left out of fits.
pub const REL_SE_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitPoint {
    /// `eps` for Laguerre fits, `x` for point-to-line fits.
    pub param: f64,
    /// Value of the fit predictor at `param`.
    pub predictor: f64,
    pub estimate: TailEstimate,
    pub neg_log_p: Option<f64>,
    /// Excluded from the fit (no hits, or standard error too large).
    pub flagged: bool,
}

impl FitPoint {
    fn new(param: f64, predictor: f64, estimate: TailEstimate) -> Self {
        let flagged = estimate.p_hat <= 0.0 || estimate.std_err > REL_SE_LIMIT * estimate.p_hat;
        Self { param, predictor, estimate, neg_log_p: estimate.log_p_hat.map(|l| -l), flagged }
    }
}

/// Least-squares line through `(x, y)`; `None` unless there are two distinct
/// abscissae.
fn affine_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

fn fit_input(grid: &[FitPoint]) -> Vec<(f64, f64)> {
    grid.iter()
        .filter(|p| !p.flagged)
        .filter_map(|p| p.neg_log_p.map(|y| (p.predictor, y)))
        .collect()
}

fn refusal(grid: &[FitPoint]) -> String {
    let used = grid.iter().filter(|p| !p.flagged).count();
    format!("need at least two usable grid points with distinct predictors, have {used}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreFit {
    pub params: LaguerreParams,
    pub b: f64,
    /// Predictor is `eps^3 m^(3/2) n^(1/2)` (`n^2 eps^3` when `m = n`).
    pub grid: Vec<FitPoint>,
    /// Least-squares slope of `-log p_hat` on the predictor.
    pub coefficient: Option<f64>,
    /// `coefficient / beta`.
    pub c_hat: Option<f64>,
    /// Affine intercept of the least-squares fit.
    pub intercept: Option<f64>,
    /// `log C0` such that `log p_hat >= beta log C0 - c_hat beta predictor` at
    /// every usable grid point.
    pub log_c0_hat: Option<f64>,
    pub refused: Option<String>,
}

/// Importance-sampling estimates of the lower tail over `eps_grid` and a fit
/// of `-log p_hat` against `eps^3 m^(3/2) n^(1/2)`.
pub fn fit_laguerre_lower_tail(
    p: &LaguerreParams,
    eps_grid: &[f64],
    b: f64,
    trials: u64,
    seed: u64,
    mode: ExecMode,
) -> Result<LaguerreFit> {
    if eps_grid.is_empty() {
        return Err(Error::usage("eps grid is empty"));
    }
    let scale = (p.m as f64).powf(1.5) * (p.n as f64).sqrt();
    let grid = eps_grid
        .iter()
        .map(|&eps| {
            let est = tail_probability(p, eps, b, trials, seed, Method::Importance, mode)?;
            Ok(FitPoint::new(eps, eps.powi(3) * scale, est))
        })
        .collect::<Result<Vec<_>>>()?;
    let pts = fit_input(&grid);
    let (coefficient, intercept, log_c0_hat, refused) = match affine_fit(&pts) {
        Some((a, s)) => {
            // Lower envelope: shift the line up until no point lies above it.
            let shift = pts.iter().map(|&(x, y)| y - s * x).fold(f64::NEG_INFINITY, f64::max);
            (Some(s), Some(a), Some(-shift / p.beta), None)
        }
        None => (None, None, None, Some(refusal(&grid))),
    };
    Ok(LaguerreFit {
        params: *p,
        b,
        grid,
        coefficient,
        c_hat: coefficient.map(|s| s / p.beta),
        intercept,
        log_c0_hat,
        refused,
    })
}

/// `P(T*_n <= 4n - x n^(1/3))` through the identity with `lambda / 2` of the
/// beta = 1 ensemble at `m = 2n`, `n' = 2n - 1`.
///
/// The importance method tilts at `eps = x n^(-2/3) / 4`.
pub fn point_to_line_tail(n: u64, x: f64, b: f64, trials: u64, seed: u64, method: Method, mode: ExecMode) -> Result<TailEstimate> {
    if n < 2 {
        return Err(Error::usage(format!("n must be at least 2, got {n}")));
    }
    let nf = n as f64;
    if !(x > 1.0 && x < nf.powf(2.0 / 3.0)) {
        return Err(Error::usage(format!("x must lie in (1, n^(2/3)) = (1, {}), got {x}", nf.powf(2.0 / 3.0))));
    }
    let p = LaguerreParams::new(2 * n as usize, 2 * n as usize - 1, 1.0)?;
    let s_thr = (8.0 * nf - 2.0 * x * nf.cbrt()).sqrt();
    match method {
        Method::Naive => estimate_below(&p, s_thr, None, trials, seed, mode),
        Method::Importance => {
            let cfg = choose_k(&p, x * nf.powf(-2.0 / 3.0) / 4.0, b)?;
            estimate_below(&p, s_thr, Some(&cfg), trials, seed, mode)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointToLineFit {
    pub n: u64,
    /// Predictor is `x^3`.
    pub grid: Vec<FitPoint>,
    /// `(-log p_hat) / (x^3 / 96)` per grid point.
    pub per_point_ratio: Vec<Option<f64>>,
    /// Least-squares slope of `-log p_hat` on `x^3`.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Slope of `log(-log p_hat)` on `log x`.
    pub log_log_exponent: Option<f64>,
    pub refused: Option<String>,
}

pub fn fit_point_to_line_tail(
    n: u64,
    x_grid: &[f64],
    b: f64,
    trials: u64,
    seed: u64,
    method: Method,
    mode: ExecMode,
) -> Result<PointToLineFit> {
    if x_grid.is_empty() {
        return Err(Error::usage("x grid is empty"));
    }
    let grid = x_grid
        .iter()
        .map(|&x| Ok(FitPoint::new(x, x.powi(3), point_to_line_tail(n, x, b, trials, seed, method, mode)?)))
        .collect::<Result<Vec<_>>>()?;
    let per_point_ratio = grid
        .iter()
        .map(|p| p.neg_log_p.map(|y| y / (p.param.powi(3) / 96.0)))
        .collect();
    let pts = fit_input(&grid);
    let cubic = affine_fit(&pts);
    let log_pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|p| !p.flagged)
        .filter_map(|p| p.neg_log_p.filter(|&y| y > 0.0).map(|y| (p.param.ln(), y.ln())))
        .collect();
    let log_log = affine_fit(&log_pts);
    Ok(PointToLineFit {
        n,
        grid: grid.clone(),
        per_point_ratio,
        slope: cubic.map(|c| c.1),
        intercept: cubic.map(|c| c.0),
        log_log_exponent: log_log.map(|c| c.1),
        refused: cubic.is_none().then(|| refusal(&grid)),
    })
}
