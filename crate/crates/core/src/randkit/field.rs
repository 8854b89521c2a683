use super::rng::{mix64, open_unit, GOLDEN};
use crate::{Error, Result};

/// The i.i.d. Exp(1) vertex weights on the positive quadrant, realised as a
/// pure function of `(seed, x, y)`.
///
/// No state is stored: any site can be queried in any order, from any thread,
/// and always returns the same value. Experiments sharing a seed therefore see
/// the same environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightField {
    seed: u64,
}

impl WeightField {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Weight of site `(x, y)`; both coordinates must be at least 1.
    pub fn weight(&self, x: u64, y: u64) -> Result<f64> {
        if x < 1 || y < 1 {
            return Err(Error::domain(format!(
                "lattice coordinates must be >= 1, got ({x}, {y})"
            )));
        }
        Ok(self.site(x, y))
    }

    /// Unchecked weight lookup for the DP inner loops.
    #[inline]
    pub fn site(&self, x: u64, y: u64) -> f64 {
        let mixed = x.wrapping_mul(GOLDEN) ^ y.rotate_left(32);
        -libm::log(open_unit(mix64(self.seed ^ mixed)))
    }
}
