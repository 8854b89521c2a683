use std::collections::BTreeMap;

use betalpp::experiments::{
    dyadic_batch, fit_laguerre_lower_tail, fit_point_to_line_tail, run_lil, trial_seed, verify_loe_identity,
    verify_lue_identity, FitPoint, DEFAULT_THRESHOLD_CONST,
};
use betalpp::laguerre::{gershgorin_bound, ld_lower_bound_product, sample_chain, sample_lambda_max, LaguerreParams};
use betalpp::lpp::{passage_point, point_to_line_both, LatticePoint};
use betalpp::par::{try_map_trials, ExecMode};
use betalpp::quadform::DEFAULT_B;
use betalpp::randkit::{RngStream, WeightField};
use betalpp::tilt::{tail_probability, Method};
use betalpp::tridiag::largest_eigenvalue;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::output::{emit, to_csv, to_json, Cell, Format, RunManifest, Table};
use crate::{CliError, Common};

pub struct Ctx<'a> {
    pub common: &'a Common,
    pub threads: usize,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.common.seed
    }

    fn mode(&self) -> ExecMode {
        ExecMode::default()
    }

    fn finish<A, P>(&self, name: &'static str, args: &A, trials: u64, payload: &P, table: Table) -> Result<(), CliError>
    where
        A: Serialize,
        P: Serialize,
    {
        let params: BTreeMap<String, Value> = match serde_json::to_value(args) {
            Ok(Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        let manifest = RunManifest {
            subcommand: name,
            params,
            master_seed: self.seed(),
            trials,
            threads: self.threads,
            output_path: self.common.output.clone(),
            format: self.common.format,
            version: env!("CARGO_PKG_VERSION"),
        };
        let body = match self.common.format {
            Format::Json => to_json(payload)?,
            Format::Csv => to_csv(&table)?,
        };
        emit(&body, &manifest)
    }
}

fn params(m: usize, n: usize, beta: f64) -> Result<LaguerreParams, CliError> {
    Ok(LaguerreParams::new(m, n, beta)?)
}

#[derive(Debug, Args, Serialize)]
pub struct SampleLaguerre {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Serialize)]
struct LambdaSamples {
    params: LaguerreParams,
    seed: u64,
    lambda_max: Vec<f64>,
}

impl SampleLaguerre {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let p = params(self.m, self.n, self.beta)?;
        let seed = ctx.seed();
        let lambda_max = try_map_trials(self.trials, ctx.mode(), |i| {
            sample_lambda_max(&p, &mut RngStream::new(seed, i), None)
        })?;
        let table = Table {
            header: vec!["trial", "lambda_max"],
            rows: lambda_max.iter().enumerate().map(|(i, l)| vec![i.into(), (*l).into()]).collect(),
        };
        ctx.finish("sample-laguerre", self, self.trials, &LambdaSamples { params: p, seed, lambda_max }, table)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Lpp {
    #[arg(long)]
    pub n: u64,
    /// Number of independent fields.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Serialize)]
struct LppRecord {
    trial: u64,
    field_seed: u64,
    t_n: f64,
    t_star: f64,
    t_star_excluded: f64,
}

impl Lpp {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let (n, seed) = (self.n, ctx.seed());
        let corner = LatticePoint::diagonal(n)?;
        let origin = LatticePoint::diagonal(1)?;
        let records = try_map_trials(self.trials, ctx.mode(), |i| {
            let field_seed = trial_seed(seed, i);
            let f = WeightField::new(field_seed);
            let line = point_to_line_both(&f, n)?;
            Ok::<_, betalpp::Error>(LppRecord {
                trial: i,
                field_seed,
                t_n: passage_point(&f, origin, corner)?,
                t_star: line.included,
                t_star_excluded: line.excluded,
            })
        })?;
        let table = Table {
            header: vec!["trial", "field_seed", "t_n", "t_star", "t_star_excluded"],
            rows: records
                .iter()
                .map(|r| vec![r.trial.into(), r.field_seed.into(), r.t_n.into(), r.t_star.into(), r.t_star_excluded.into()])
                .collect(),
        };
        ctx.finish("lpp", self, self.trials, &records, table)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Verify {
    #[arg(long)]
    pub n: u64,
    /// Samples per side.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl Verify {
    pub fn run(&self, ctx: &Ctx, name: &'static str) -> Result<(), CliError> {
        let r = if name == "verify-loe" {
            verify_loe_identity(self.n, self.trials, ctx.seed(), ctx.mode())?
        } else {
            verify_lue_identity(self.n, self.trials, ctx.seed(), ctx.mode())?
        };
        let table = Table {
            header: vec!["ks_stat", "n_a", "n_b", "critical_001", "pass"],
            rows: vec![vec![r.ks_stat.into(), r.n_a.into(), r.n_b.into(), r.critical_001.into(), r.pass.into()]],
        };
        ctx.finish(name, self, self.trials, &r, table)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Tail {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Event `lambda <= (sqrt m + sqrt n)^2 (1 - eps)`.
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value = "importance")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_B)]
    pub b: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl Tail {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let p = params(self.m, self.n, self.beta)?;
        let e = tail_probability(&p, self.eps, self.b, self.trials, ctx.seed(), self.method, ctx.mode())?;
        let table = Table {
            header: vec!["p_hat", "log_p_hat", "std_err", "trials", "seed", "method", "hits"],
            rows: vec![vec![
                e.p_hat.into(),
                e.log_p_hat.into(),
                e.std_err.into(),
                e.trials.into(),
                e.seed.into(),
                Cell::S(e.method.to_string()),
                e.hits.into(),
            ]],
        };
        ctx.finish("tail", self, self.trials, &e, table)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// `-log p` against `eps^3 m^(3/2) n^(1/2)`; grid values are `eps`.
    Laguerre,
    /// `-log p` against `x^3` for point-to-line times; grid values are `x`.
    PointToLine,
}

#[derive(Debug, Args, Serialize)]
pub struct FitTail {
    #[arg(long, value_enum)]
    pub kind: FitKind,
    /// Defaults to `n`. Ignored for point-to-line fits.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Comma-separated `eps` or `x` values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_B)]
    pub b: f64,
    /// Used by point-to-line fits; Laguerre fits always use importance sampling.
    #[arg(long, default_value = "importance")]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

fn grid_table(grid: &[FitPoint]) -> Table {
    Table {
        header: vec!["param", "predictor", "p_hat", "std_err", "hits", "neg_log_p", "flagged"],
        rows: grid
            .iter()
            .map(|g| {
                vec![
                    g.param.into(),
                    g.predictor.into(),
                    g.estimate.p_hat.into(),
                    g.estimate.std_err.into(),
                    g.estimate.hits.into(),
                    g.neg_log_p.into(),
                    g.flagged.into(),
                ]
            })
            .collect(),
    }
}

impl FitTail {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        match self.kind {
            FitKind::Laguerre => {
                let n = self.n as usize;
                let p = params(self.m.unwrap_or(n), n, self.beta)?;
                let fit = fit_laguerre_lower_tail(&p, &self.grid, self.b, self.trials, ctx.seed(), ctx.mode())?;
                ctx.finish("fit-tail", self, self.trials, &fit, grid_table(&fit.grid))
            }
            FitKind::PointToLine => {
                let fit = fit_point_to_line_tail(self.n, &self.grid, self.b, self.trials, ctx.seed(), self.method, ctx.mode())?;
                ctx.finish("fit-tail", self, self.trials, &fit, grid_table(&fit.grid))
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Lil {
    /// Last `n` of the trace.
    #[arg(long, default_value_t = 4096)]
    pub max_n: u64,
    #[arg(long, default_value_t = 16)]
    pub start_n: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl Lil {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let t = run_lil(ctx.seed(), self.max_n, self.start_n)?;
        let offset = (t.start_n - 1) as usize;
        let rows = t
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let scaled = i.checked_sub(offset);
                vec![
                    r.n.into(),
                    r.t_n.into(),
                    r.z_n.into(),
                    scaled.map(|j| t.scaled_min[j]).into(),
                    scaled.map(|j| t.scaled_max[j]).into(),
                ]
            })
            .collect();
        let table = Table { header: vec!["n", "t_n", "z_n", "scaled_min", "scaled_max"], rows };
        ctx.finish("lil", self, 1, &t, table)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Dyadic {
    #[arg(long, default_value_t = 12)]
    pub k: u32,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_CONST)]
    pub threshold_const: f64,
    /// Number of independent fields.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl Dyadic {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let b = dyadic_batch(ctx.seed(), self.seeds, self.k, self.eta, self.threshold_const, ctx.mode())?;
        let rows = b
            .scans
            .iter()
            .enumerate()
            .map(|(i, s)| {
                vec![
                    i.into(),
                    s.seed.into(),
                    s.tau.map(u64::from).into(),
                    s.b_tau.into(),
                    s.success().into(),
                    s.split_violations().into(),
                ]
            })
            .collect();
        let table = Table { header: vec!["scan", "field_seed", "tau", "b_tau", "success", "split_violations"], rows };
        ctx.finish("dyadic", self, self.seeds, &b, table)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Gershgorin {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Also report the log product lower bound at this `eps`.
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Serialize)]
struct GershgorinReport {
    params: LaguerreParams,
    samples: u64,
    /// Samples where the bound falls below the top singular value.
    violations: u64,
    /// Smallest and mean of `bound - s_n`.
    min_slack: f64,
    mean_slack: f64,
    log_product_bound: Option<f64>,
}

impl Gershgorin {
    pub fn run(&self, ctx: &Ctx) -> Result<(), CliError> {
        let p = params(self.m, self.n, self.beta)?;
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        let seed = ctx.seed();
        let slack = try_map_trials(self.trials, ctx.mode(), |i| {
            let chain = sample_chain(&p, &mut RngStream::new(seed, i));
            let s = largest_eigenvalue(&chain.linearize(), None)?.value;
            Ok::<_, betalpp::Error>(gershgorin_bound(&chain) - s)
        })?;
        let log_product_bound = self.eps.map(|e| ld_lower_bound_product(&p, e)).transpose()?;
        let r = GershgorinReport {
            params: p,
            samples: self.trials,
            violations: slack.iter().filter(|&&s| s < 0.0).count() as u64,
            min_slack: slack.iter().copied().fold(f64::INFINITY, f64::min),
            mean_slack: slack.iter().sum::<f64>() / slack.len() as f64,
            log_product_bound,
        };
        let table = Table {
            header: vec!["samples", "violations", "min_slack", "mean_slack", "log_product_bound"],
            rows: vec![vec![
                r.samples.into(),
                r.violations.into(),
                r.min_slack.into(),
                r.mean_slack.into(),
                r.log_product_bound.into(),
            ]],
        };
        ctx.finish("gershgorin", self, self.trials, &r, table)
    }
}
