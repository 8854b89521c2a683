//! Reproducible random variates, the lattice weight field, and the special
//! functions the rest of the crate needs.

mod field;
mod ks;
mod rng;
mod sampler;
mod special;

pub use field::WeightField;
pub use ks::{ks_one_sample, ks_two_sample};
pub use rng::{mix64, RngStream};
pub use sampler::{sample_chi, sample_chi_sq, sample_exp, sample_gamma, sample_normal, ChiLaw};
pub use special::{chi_mean, ln_gamma, regularized_lower_gamma};

pub(crate) use sampler::standard_gamma;
