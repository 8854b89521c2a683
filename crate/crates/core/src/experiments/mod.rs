//! Studies built on the samplers and DP engines: distributional identities,
//! tail-exponent fits, law-of-iterated-logarithm traces and the dyadic scan.
//!
//! Every study is a pure function of its parameters and a master seed.
//! Independent fields or streams for trial `i` are derived with
//! [`trial_seed`].

mod dyadic;
mod fit;
mod identity;
mod lil;

pub use dyadic::{dyadic_batch, dyadic_scan, scales, DyadicBatch, DyadicScan, RegionTest, SplitCheck, DEFAULT_THRESHOLD_CONST};
pub use fit::{
    fit_laguerre_lower_tail, fit_point_to_line_tail, point_to_line_tail, FitPoint, LaguerreFit, PointToLineFit,
    REL_SE_LIMIT,
};
pub use identity::{ks_report, loe_samples, lue_samples, verify_loe_identity, verify_lue_identity, IdentitySamples, KsReport};
pub use lil::{reference_lines, run_lil, LilTrace, ReferenceLines};

use crate::randkit::RngStream;

/// Seed of the `i`-th independent field or stream under `master`.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    RngStream::new(master, i).next_u64()
}
