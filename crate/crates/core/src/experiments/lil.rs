use serde::Serialize;

use crate::lpp::{passage_sequence, PassageRecord};
use crate::randkit::WeightField;
use crate::{Error, Result};

/// Constant overlay lines for trace plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceLines {
    /// `-192^(1/3)`, the conjectured liminf constant.
    pub liminf_conjectured: f64,
    /// `-96^(1/3)`.
    pub liminf_bound: f64,
    /// `3^(2/3)`, the limsup constant.
    pub limsup: f64,
}

pub fn reference_lines() -> ReferenceLines {
    ReferenceLines {
        liminf_conjectured: -(192f64.cbrt()),
        liminf_bound: -(96f64.cbrt()),
        limsup: 3f64.powf(2.0 / 3.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilTrace {
    pub seed: u64,
    pub start_n: u64,
    /// `T_n` and `Z_n` for `n = 1..=N`.
    pub records: Vec<PassageRecord>,
    /// Running minimum of `Z_n / (log log n)^(1/3)` over `start_n..=n`, one
    /// entry per `n >= start_n`.
    pub scaled_min: Vec<f64>,
    /// Running maximum of `Z_n / (log log n)^(2/3)`, aligned with
    /// `scaled_min`.
    pub scaled_max: Vec<f64>,
    pub reference: ReferenceLines,
}

impl LilTrace {
    pub fn final_min(&self) -> f64 {
        *self.scaled_min.last().expect("trace is nonempty")
    }

    pub fn final_max(&self) -> f64 {
        *self.scaled_max.last().expect("trace is nonempty")
    }
}

/// Coupled trace of `T_n` on the field with the given seed.
pub fn run_lil(seed: u64, big_n: u64, start_n: u64) -> Result<LilTrace> {
    if start_n < 16 {
        return Err(Error::usage(format!("start_n must be at least 16, got {start_n}")));
    }
    if big_n < start_n {
        return Err(Error::usage(format!("N = {big_n} is below start_n = {start_n}")));
    }
    let records = passage_sequence(&WeightField::new(seed), big_n)?;
    let mut scaled_min = Vec::with_capacity((big_n - start_n + 1) as usize);
    let mut scaled_max = Vec::with_capacity(scaled_min.capacity());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &records[(start_n - 1) as usize..] {
        let ll = (r.n as f64).ln().ln();
        lo = lo.min(r.z_n / ll.cbrt());
        hi = hi.max(r.z_n / ll.powf(2.0 / 3.0));
        scaled_min.push(lo);
        scaled_max.push(hi);
    }
    Ok(LilTrace { seed, start_n, records, scaled_min, scaled_max, reference: reference_lines() })
}
