//! Exponential tilting and the lower-tail estimator for the largest
//! eigenvalue.
//!
//! The tilted law multiplies the first `K` odd chain entries by
//! `sqrt(1 - eps)`, i.e. `Y_{2k-1}^2 ~ Gam(beta (m+1-k)/2, beta / (2(1-eps)))`
//! for `k <= K`, and leaves every other entry alone. The density ratio of the
//! original to the tilted law at `t = Y^2` is
//!
//! ```text
//! log w = beta eps / (2 (1 - eps)) * sum_{k<=K} t_{2k-1}
//!       + (beta / 2) log(1 - eps) * sum_{k<=K} (m + 1 - k)
//! ```
//!
//! so `E_tilted[w 1{event}]` is the untilted probability of the event.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::laguerre::{sample_chain, EntryChain, LaguerreParams};
use crate::par::{map_blocks, ExecMode};
use crate::quadform::qb_matrix;
use crate::randkit::{mix64, RngStream};
use crate::tridiag::sturm_count;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Narrow,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltConfig {
    pub params: LaguerreParams,
    pub eps: f64,
    pub b: f64,
    /// Number of tilted odd entries.
    pub k: usize,
    pub case: CaseTag,
}

impl TiltConfig {
    /// Config with an explicit `K`, bypassing the selection rule.
    pub fn with_k(params: LaguerreParams, eps: f64, b: f64, k: usize) -> Result<Self> {
        validate(eps, b)?;
        if k < 1 || k > params.n {
            return Err(Error::usage(format!("K must lie in [1, n = {}], got {k}", params.n)));
        }
        let case = if k == params.n { CaseTag::Wide } else { CaseTag::Narrow };
        Ok(Self { params, eps, b, k, case })
    }

    /// `sum_{k<=K} (m + 1 - k)`.
    fn tilted_dof_sum(&self) -> f64 {
        (1..=self.k).map(|k| (self.params.m + 1 - k) as f64).sum()
    }
}

fn validate(eps: f64, b: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::usage(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(b > 0.0 && b < 0.25) {
        return Err(Error::usage(format!("b must lie in (0, 1/4), got {b}")));
    }
    Ok(())
}

/// Narrow case when `eps <= 2 b sqrt(n) / sqrt(m)`, with
/// `K = min(ceil(eps sqrt(mn) / (4b)), n)`; otherwise `K = n`.
pub fn choose_k(p: &LaguerreParams, eps: f64, b: f64) -> Result<TiltConfig> {
    validate(eps, b)?;
    let (m, n) = (p.m as f64, p.n as f64);
    if eps <= 2.0 * b * n.sqrt() / m.sqrt() {
        let raw = eps * (m * n).sqrt() / (4.0 * b);
        // Absorb representation error so that exact integers are not bumped
        // up by one ulp.
        let k = ((raw * (1.0 - 1e-12)).ceil() as usize).clamp(1, p.n);
        Ok(TiltConfig { params: *p, eps, b, k, case: CaseTag::Narrow })
    } else {
        Ok(TiltConfig { params: *p, eps, b, k: p.n, case: CaseTag::Wide })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltedSample {
    pub chain: EntryChain,
    pub log_weight: f64,
}

/// Log density ratio (original over tilted) of a chain under `cfg`.
pub fn log_weight(cfg: &TiltConfig, chain: &EntryChain) -> f64 {
    let beta = cfg.params.beta;
    let eps = cfg.eps;
    let t_sum: f64 = chain.x.iter().step_by(2).take(cfg.k).map(|y| y * y).sum();
    beta * eps / (2.0 * (1.0 - eps)) * t_sum + 0.5 * beta * (1.0 - eps).ln() * cfg.tilted_dof_sum()
}

pub fn sample_tilted(cfg: &TiltConfig, rng: &mut RngStream) -> TiltedSample {
    let mut chain = sample_chain(&cfg.params, rng);
    let scale = (1.0 - cfg.eps).sqrt();
    for y in chain.x.iter_mut().step_by(2).take(cfg.k) {
        *y *= scale;
    }
    let log_weight = log_weight(cfg, &chain);
    TiltedSample { chain, log_weight }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Importance,
}

impl Method {
    fn salt(self) -> u64 {
        match self {
            Method::Naive => 0x6E61_6976_6500_0001,
            Method::Importance => 0x696D_706F_7274_0002,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Importance => "importance",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "importance" => Ok(Method::Importance),
            other => Err(Error::usage(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    /// `None` when no trial hit the event.
    pub log_p_hat: Option<f64>,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
    pub method: Method,
    /// Trials in which the event occurred.
    pub hits: u64,
}

impl TailEstimate {
    fn from_sums(sum: f64, sum_sq: f64, hits: u64, trials: u64, seed: u64, method: Method) -> Self {
        let n = trials as f64;
        let p_hat = sum / n;
        let std_err = if trials > 1 {
            ((sum_sq - n * p_hat * p_hat).max(0.0) / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        let log_p_hat = (p_hat > 0.0).then(|| p_hat.ln());
        Self { p_hat, log_p_hat, std_err, trials, seed, method, hits }
    }
}

/// Edge threshold for `s_n` equivalent to `lambda_n <= (sqrt m + sqrt n)^2 (1 - eps)`.
pub fn s_threshold(p: &LaguerreParams, eps: f64) -> f64 {
    p.edge() * (1.0 - eps).max(0.0).sqrt()
}

/// Estimates `P(s_n < s_thr)` under `p`, by plain sampling when `tilt` is
/// `None` and by importance sampling from the tilted law otherwise. Trial `i`
/// uses stream `i` of a master seed derived from `seed` and the method.
pub(crate) fn estimate_below(
    p: &LaguerreParams,
    s_thr: f64,
    tilt: Option<&TiltConfig>,
    trials: u64,
    seed: u64,
    mode: ExecMode,
) -> Result<TailEstimate> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    let method = if tilt.is_some() { Method::Importance } else { Method::Naive };
    let master = mix64(seed ^ method.salt());
    let dim = 2 * p.n;
    let blocks = map_blocks(trials, mode, |range| {
        let (mut sum, mut sum_sq, mut hits) = (0.0, 0.0, 0u64);
        for i in range {
            let mut rng = RngStream::new(master, i);
            let (chain, lw) = match tilt {
                Some(cfg) => {
                    let s = sample_tilted(cfg, &mut rng);
                    (s.chain, s.log_weight)
                }
                None => (sample_chain(p, &mut rng), 0.0),
            };
            if sturm_count(&chain.linearize(), s_thr) == dim {
                let v = lw.exp();
                sum += v;
                sum_sq += v * v;
                hits += 1;
            }
        }
        (sum, sum_sq, hits)
    });
    let (sum, sum_sq, hits) = blocks
        .into_iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(TailEstimate::from_sums(sum, sum_sq, hits, trials, seed, method))
}

/// Estimates `P(lambda_n <= (sqrt m + sqrt n)^2 (1 - eps))`.
///
/// The event is one Sturm count of the linearised chain at
/// [`s_threshold`]. The importance method tilts with [`choose_k`] at the
/// given `b`.
pub fn tail_probability(
    p: &LaguerreParams,
    eps: f64,
    b: f64,
    trials: u64,
    seed: u64,
    method: Method,
    mode: ExecMode,
) -> Result<TailEstimate> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    match method {
        Method::Naive => {
            if !(eps.is_finite() && eps <= 1.0) {
                return Err(Error::domain(format!("eps must be finite and <= 1, got {eps}")));
            }
            estimate_below(p, s_threshold(p, eps), None, trials, seed, mode)
        }
        Method::Importance => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::domain(format!("importance sampling needs eps in (0, 1), got {eps}")));
            }
            let cfg = choose_k(p, eps, b)?;
            estimate_below(p, s_threshold(p, eps), Some(&cfg), trials, seed, mode)
        }
    }
}

/// Mean and standard error of the bare importance weight, which should be
/// one.
pub fn weight_mean(cfg: &TiltConfig, trials: u64, seed: u64, mode: ExecMode) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::usage("need at least two trials"));
    }
    let master = mix64(seed ^ 0x7765_6967_6874_0003);
    let (sum, sum_sq) = map_blocks(trials, mode, |range| {
        range.fold((0.0, 0.0), |(s, q), i| {
            let w = sample_tilted(cfg, &mut RngStream::new(master, i)).log_weight.exp();
            (s + w, q + w * w)
        })
    })
    .into_iter()
    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq - n * mean * mean).max(0.0) / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Narrow,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub branch: Branch,
    /// Value of the branch that applies.
    pub value: f64,
    /// `-c beta (eps sqrt(mn))^2`.
    pub wide: f64,
    /// `beta log C0 - c beta eps^3 m^(3/2) n^(1/2)`.
    pub narrow: f64,
}

/// Log of the lower bound shape for `P(lambda_n <= (sqrt m + sqrt n)^2 (1 - eps))`
/// with caller-supplied constants. The wide branch applies when
/// `eps >= c2 sqrt(n) / sqrt(m)`. Both branch values are always returned.
pub fn theoretical_lower_bound(p: &LaguerreParams, eps: f64, c: f64, c0: f64, c2: f64) -> Result<LowerBound> {
    if !(eps > 0.0 && eps < 1.0) || !(c > 0.0 && c0 > 0.0 && c2 > 0.0) {
        return Err(Error::usage("need eps in (0, 1) and positive constants"));
    }
    let (m, n, beta) = (p.m as f64, p.n as f64, p.beta);
    let wide = -c * beta * eps * eps * m * n;
    let narrow = beta * c0.ln() - c * beta * eps.powi(3) * m.powf(1.5) * n.sqrt();
    let branch = if eps >= c2 * n.sqrt() / m.sqrt() { Branch::Wide } else { Branch::Narrow };
    let value = match branch {
        Branch::Wide => wide,
        Branch::Narrow => narrow,
    };
    Ok(LowerBound { branch, value, wide, narrow })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbFrequencies {
    pub freq_a: f64,
    pub freq_b: f64,
    pub samples: usize,
}

/// Frequencies of the two events used to lower-bound the density ratio.
///
/// A: every unit `w` has `Q_b(w; Y - E[X]) < -eps sqrt(m) / 8`, tested as a
/// Sturm count of the `Q_b` matrix. B: `sum_{k<=K} Y_{2k-1}^2` exceeds
/// `(1 - eps) sum_{k<=K} (m + 1 - k)`.
pub fn diagnostics_ab(cfg: &TiltConfig, samples: &[TiltedSample]) -> Result<AbFrequencies> {
    if samples.is_empty() {
        return Err(Error::usage("diagnostics need at least one sample"));
    }
    let p = &cfg.params;
    let means = p.chain_means();
    let a_thr = -cfg.eps * (p.m as f64).sqrt() / 8.0;
    let b_thr = (1.0 - cfg.eps) * cfg.tilted_dof_sum();
    let dim = 2 * p.n;
    let (mut a, mut b) = (0usize, 0usize);
    let mut z = vec![0.0; means.len()];
    for s in samples {
        for ((zk, y), mu) in z.iter_mut().zip(&s.chain.x).zip(&means) {
            *zk = y - mu;
        }
        if sturm_count(&qb_matrix(p, cfg.b, &z), a_thr) == dim {
            a += 1;
        }
        let t: f64 = s.chain.x.iter().step_by(2).take(cfg.k).map(|y| y * y).sum();
        if t > b_thr {
            b += 1;
        }
    }
    let n = samples.len() as f64;
    Ok(AbFrequencies { freq_a: a as f64 / n, freq_b: b as f64 / n, samples: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randkit::ln_gamma;

    fn params(m: usize, n: usize, beta: f64) -> LaguerreParams {
        LaguerreParams::new(m, n, beta).unwrap()
    }

    #[test]
    fn choose_k_examples() {
        let c = choose_k(&params(10_000, 10_000, 1.0), 0.01, 0.2).unwrap();
        assert_eq!((c.case, c.k), (CaseTag::Narrow, 125));
        let c = choose_k(&params(10_000, 100, 1.0), 0.1, 0.2).unwrap();
        assert_eq!((c.case, c.k), (CaseTag::Wide, 100));
        let c = choose_k(&params(4, 4, 1.0), 0.9, 0.2).unwrap();
        assert_eq!(c.k, 4);
    }

    #[test]
    fn narrow_k_stays_below_half() {
        for (m, n) in [(3, 3), (50, 10), (400, 7), (1000, 1000)] {
            let p = params(m, n, 1.0);
            let edge_eps = 2.0 * 0.2 * (n as f64 / m as f64).sqrt();
            for i in 1..20 {
                let eps = (edge_eps * i as f64 / 20.0).min(0.99);
                let c = choose_k(&p, eps, 0.2).unwrap();
                assert_eq!(c.case, CaseTag::Narrow);
                assert!(c.k >= 1 && 2 * c.k <= n + 1, "m={m} n={n} eps={eps} K={}", c.k);
            }
        }
    }

    #[test]
    fn choose_k_rejects_bad_input() {
        let p = params(4, 4, 1.0);
        assert!(matches!(choose_k(&p, 0.0, 0.2), Err(Error::Usage(_))));
        assert!(matches!(choose_k(&p, 1.0, 0.2), Err(Error::Usage(_))));
        assert!(matches!(choose_k(&p, 0.1, 0.25), Err(Error::Usage(_))));
    }

    #[test]
    fn weight_hand_value() {
        let cfg = TiltConfig::with_k(params(1, 1, 2.0), 0.5, 0.2, 1).unwrap();
        let chain = EntryChain::new(vec![1.0]).unwrap();
        let lw = log_weight(&cfg, &chain);
        assert!((lw - (1.0 + 0.5f64.ln())).abs() < 1e-15);
        // exp(1) / 2.
        assert!((lw.exp() - 1.359_14).abs() < 1e-5);
    }

    #[test]
    fn weight_vanishes_as_eps_goes_to_zero() {
        let cfg = TiltConfig::with_k(params(6, 4, 1.0), 1e-12, 0.2, 3).unwrap();
        let s = sample_tilted(&cfg, &mut RngStream::new(1, 1));
        assert!(s.log_weight.abs() < 1e-9);
    }

    /// log of the Gam(alpha, rate) density.
    fn ln_gamma_density(t: f64, alpha: f64, rate: f64) -> f64 {
        alpha * rate.ln() - ln_gamma(alpha) + (alpha - 1.0) * t.ln() - rate * t
    }

    #[test]
    fn weight_matches_density_ratio() {
        let p = params(30, 12, 2.5);
        let cfg = choose_k(&p, 0.07, 0.2).unwrap();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..50 {
            let s = sample_tilted(&cfg, &mut rng);
            let mut direct = 0.0;
            for (k, y) in s.chain.x.iter().step_by(2).take(cfg.k).enumerate() {
                let alpha = p.beta * (p.m - k) as f64 / 2.0;
                let t = y * y;
                direct += ln_gamma_density(t, alpha, p.beta / 2.0)
                    - ln_gamma_density(t, alpha, p.beta / (2.0 * (1.0 - cfg.eps)));
            }
            assert!((direct - s.log_weight).abs() <= 1e-10 * s.log_weight.abs().max(1.0));
        }
    }

    #[test]
    fn weights_normalise() {
        let cfg = choose_k(&params(20, 20, 1.0), 0.2, 0.2).unwrap();
        let (mean, se) = weight_mean(&cfg, 100_000, 3, ExecMode::default()).unwrap();
        assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn n_one_closed_form_both_methods() {
        // n = m = 1, beta = 2: lambda = a_1^2 with 2 a_1^2 ~ chi^2_2, so
        // lambda ~ Exp(1) and P(lambda <= 4(1-eps)) = 1 - exp(-4(1-eps)).
        let p = params(1, 1, 2.0);
        for eps in [0.3f64, 0.6, 0.9] {
            let want = 1.0 - (-4.0 * (1.0 - eps)).exp();
            for method in [Method::Naive, Method::Importance] {
                let e = tail_probability(&p, eps, 0.2, 40_000, 9, method, ExecMode::default()).unwrap();
                assert!((e.p_hat - want).abs() < 4.0 * e.std_err, "{method} eps={eps}: {} vs {want}", e.p_hat);
            }
        }
    }

    #[test]
    fn estimate_record_fields() {
        let p = params(5, 5, 1.0);
        let e = tail_probability(&p, 0.3, 0.2, 2000, 42, Method::Naive, ExecMode::default()).unwrap();
        assert_eq!((e.trials, e.seed, e.method), (2000, 42, Method::Naive));
        assert!((0.0..=1.0).contains(&e.p_hat));
        assert_eq!(e.p_hat, e.hits as f64 / 2000.0);
        assert!(tail_probability(&p, 0.3, 0.2, 0, 42, Method::Naive, ExecMode::default()).is_err());
        assert!(matches!(
            tail_probability(&p, 1.0, 0.2, 10, 42, Method::Importance, ExecMode::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn zero_hits_has_no_log() {
        let p = params(10, 10, 1.0);
        let e = tail_probability(&p, 0.9, 0.2, 100, 1, Method::Naive, ExecMode::default()).unwrap();
        assert_eq!(e.hits, 0);
        assert_eq!(e.log_p_hat, None);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn modes_agree_bitwise() {
        let p = params(12, 8, 2.0);
        let a = tail_probability(&p, 0.2, 0.2, 3000, 5, Method::Importance, ExecMode::Sequential).unwrap();
        let b = tail_probability(&p, 0.2, 0.2, 3000, 5, Method::Importance, ExecMode::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lower_bound_values() {
        let p = params(100, 100, 1.0);
        let lb = theoretical_lower_bound(&p, 0.1, 1.0 / 3.0, 1.0, 0.4).unwrap();
        assert_eq!(lb.branch, Branch::Narrow);
        assert!((lb.value + 10.0 / 3.0).abs() < 1e-12);
        // Square case: beta log C0 - c beta n^2 eps^3.
        let p = params(50, 50, 2.0);
        let lb = theoretical_lower_bound(&p, 0.05, 0.3, 0.5, 0.4).unwrap();
        let want = 2.0 * 0.5f64.ln() - 0.3 * 2.0 * 2500.0 * 0.05f64.powi(3);
        assert!((lb.narrow - want).abs() < 1e-12);
        // On the boundary the wide branch applies and both values are present.
        let p = params(400, 100, 1.0);
        let lb = theoretical_lower_bound(&p, 0.2, 1.0 / 3.0, 1.0, 0.4).unwrap();
        assert_eq!(lb.branch, Branch::Wide);
        assert!((lb.wide + 0.04 * 40_000.0 / 3.0).abs() < 1e-9);
        assert!(lb.narrow.is_finite());
    }

    #[test]
    fn diagnostics_b_near_half_for_tiny_eps() {
        let p = params(40, 40, 1.0);
        let cfg = TiltConfig::with_k(p, 1e-6, 0.2, 40).unwrap();
        let mut rng = RngStream::new(7, 0);
        let samples: Vec<_> = (0..4000).map(|_| sample_tilted(&cfg, &mut rng)).collect();
        let f = diagnostics_ab(&cfg, &samples).unwrap();
        assert!((f.freq_b - 0.5).abs() < 0.05, "freq_b = {}", f.freq_b);
        assert!(diagnostics_ab(&cfg, &[]).is_err());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("naive".parse::<Method>().unwrap(), Method::Naive);
        assert_eq!(Method::Importance.to_string(), "importance");
        assert!("other".parse::<Method>().is_err());
    }
}
