//! Last passage times over a [`WeightField`].
//!
//! All sweeps go row by row with one buffer the width of the region, so the
//! live state is `O(width)` while the work is the area. Passage times include
//! the weights of both endpoints unless stated otherwise.

use serde::Serialize;

use crate::randkit::WeightField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticePoint {
    pub x: u64,
    pub y: u64,
}

impl LatticePoint {
    pub fn new(x: u64, y: u64) -> Result<Self> {
        if x < 1 || y < 1 {
            return Err(Error::domain(format!("lattice coordinates must be >= 1, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    pub fn diagonal(n: u64) -> Result<Self> {
        Self::new(n, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassageRecord {
    pub n: u64,
    pub t_n: f64,
    /// `(t_n - 4n) / n^(1/3)`.
    pub z_n: f64,
}

impl PassageRecord {
    pub fn new(n: u64, t_n: f64) -> Self {
        let nf = n as f64;
        Self { n, t_n, z_n: (t_n - 4.0 * nf) / nf.cbrt() }
    }
}

/// Maximum weight of an up/right path from `u` to `v`, both endpoints
/// included.
pub fn passage_point(field: &WeightField, u: LatticePoint, v: LatticePoint) -> Result<f64> {
    if u.x > v.x || u.y > v.y {
        return Err(Error::usage(format!(
            "start ({}, {}) is not below-left of end ({}, {})",
            u.x, u.y, v.x, v.y
        )));
    }
    let width = (v.x - u.x + 1) as usize;
    let mut row = vec![0.0; width];
    for y in u.y..=v.y {
        let mut left = f64::NEG_INFINITY;
        for (i, cell) in row.iter_mut().enumerate() {
            let below = if y == u.y { f64::NEG_INFINITY } else { *cell };
            let best = left.max(below);
            let best = if best == f64::NEG_INFINITY { 0.0 } else { best };
            *cell = field.site(u.x + i as u64, y) + best;
            left = *cell;
        }
    }
    Ok(row[width - 1])
}

/// `T_n = T_{(1,1),(n,n)}` for every `n <= big_n`, from a single sweep of the
/// `big_n x big_n` square.
pub fn passage_sequence(field: &WeightField, big_n: u64) -> Result<Vec<PassageRecord>> {
    if big_n < 1 {
        return Err(Error::usage("sequence length must be at least 1"));
    }
    let n = big_n as usize;
    let mut row = vec![0.0f64; n];
    let mut out = Vec::with_capacity(n);
    for y in 1..=n {
        let mut left = 0.0f64;
        for (i, cell) in row.iter_mut().enumerate() {
            // Row 1 sees zeros below; column 1 sees zero on the left. Weights
            // are positive so zero acts as "no predecessor".
            *cell = field.site(i as u64 + 1, y as u64) + left.max(*cell);
            left = *cell;
        }
        out.push(PassageRecord::new(y as u64, row[y - 1]));
    }
    Ok(out)
}

/// Point-to-line value with and without the final vertex weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointToLine {
    pub included: f64,
    pub excluded: f64,
}

/// Sweeps the triangle `x + y <= 2n` and maximises over the line
/// `x + y = 2n`, both with the endpoint weight and without it.
pub fn point_to_line_both(field: &WeightField, n: u64) -> Result<PointToLine> {
    if n < 1 {
        return Err(Error::usage("point-to-line size must be at least 1"));
    }
    let line = 2 * n;
    let mut row = vec![0.0f64; (line - 1) as usize];
    let (mut inc, mut exc) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for y in 1..line {
        let mut left = 0.0f64;
        let xmax = line - y;
        for x in 1..=xmax {
            let cell = &mut row[(x - 1) as usize];
            let w = field.site(x, y);
            let before = left.max(*cell);
            *cell = w + before;
            left = *cell;
            if x == xmax {
                inc = inc.max(*cell);
                exc = exc.max(before);
            }
        }
    }
    Ok(PointToLine { included: inc, excluded: exc })
}

/// `T*_n`: maximum over endpoints on `x + y = 2n` of the passage time from
/// `(1, 1)`.
pub fn point_to_line(field: &WeightField, n: u64) -> Result<f64> {
    Ok(point_to_line_both(field, n)?.included)
}

/// Like [`point_to_line`] with the weight of the final vertex left out.
pub fn point_to_line_excluded(field: &WeightField, n: u64) -> Result<f64> {
    Ok(point_to_line_both(field, n)?.excluded)
}

/// Maximum passage time from a vertex of the line `x + y = 2 j_lo` to the
/// point `(j_hi - 1, j_hi - 1)`, both endpoints included.
///
/// Computed backwards from the target. When `j_hi <= 2 j_lo` the region is a
/// full triangle and the value has the law of `T*_{j_hi - j_lo}`.
pub fn line_to_point(field: &WeightField, j_lo: u64, j_hi: u64) -> Result<f64> {
    if j_lo < 1 || j_hi <= j_lo {
        return Err(Error::usage(format!("need 1 <= j_lo < j_hi, got j_lo={j_lo}, j_hi={j_hi}")));
    }
    let t = j_hi - 1;
    let line = 2 * j_lo;
    let mut row = vec![f64::NEG_INFINITY; (t + 1) as usize];
    let mut best = f64::NEG_INFINITY;
    let y_min = line.saturating_sub(t).max(1);
    for y in (y_min..=t).rev() {
        let x_min = line.saturating_sub(y).max(1);
        let mut right = f64::NEG_INFINITY;
        for x in (x_min..=t).rev() {
            let cell = &mut row[x as usize];
            let after = right.max(*cell);
            let after = if x == t && y == t { 0.0 } else { after };
            *cell = field.site(x, y) + after;
            right = *cell;
            if x + y == line {
                best = best.max(*cell);
            }
        }
    }
    Ok(best)
}
