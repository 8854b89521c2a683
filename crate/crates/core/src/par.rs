//! Trial-parallel execution with deterministic merging.
//!
//! Trials are split into fixed-size contiguous blocks of stream ids. Each
//! block is reduced sequentially and the per-block results are returned in
//! block order, so the final merge never depends on the thread count or on
//! whether rayon is compiled in at all.

use std::ops::Range;

/// Number of trials per block. Part of the reproducibility contract: changing
/// it changes the floating-point summation order of every estimator.
pub const BLOCK_SIZE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses the rayon global pool. Falls back to sequential execution when the
    /// `parallel` feature is disabled.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

fn blocks(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(BLOCK_SIZE))
        .map(|b| b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(trials))
        .collect()
}

/// Applies `f` to each block of trial indices and returns the block results in
/// order.
pub fn map_blocks<T, F>(trials: u64, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let blocks = blocks(trials);
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            blocks.into_par_iter().map(f).collect()
        }
        _ => blocks.into_iter().map(f).collect(),
    }
}

/// Applies `f` to every trial index and returns the results in index order.
pub fn map_trials<T, F>(trials: u64, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_blocks(trials, mode, |r| r.map(&f).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

/// Like [`map_trials`] for fallible per-trial work; the first error in index
/// order wins.
pub fn try_map_trials<T, E, F>(trials: u64, mode: ExecMode, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    map_trials(trials, mode, f).into_iter().collect()
}
