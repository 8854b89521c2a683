//! Simulation and rare-event estimation for exponential last passage
//! percolation and the largest eigenvalue of beta-Laguerre ensembles.
//!
//! The crate is organised bottom-up:
//!
//! * [`randkit`]: reproducible counter-based random streams, gamma/chi
//!   samplers, the lattice weight field and the special functions used
//!   elsewhere.
//! * [`tridiag`]: symmetric tridiagonal matrices, Sturm counts, bisection for
//!   the top eigenvalue and a dense Jacobi oracle.
//! * [`laguerre`]: the bidiagonal beta-Laguerre model and its linearisation.
//! * [`quadform`]: the quadratic forms `Q` and `Q_b` and their comparison.
//! * [`tilt`]: exponential tilting and the importance-sampling estimator for
//!   lower-tail probabilities of the largest eigenvalue.
//! * [`lpp`]: dynamic programming over the weight field.
//! * [`experiments`]: the studies built on top of all of the above.
//!
//! Trial-level parallelism lives in [`par`]; it uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise. Results are
//! bit-identical either way.

pub mod error;
pub mod experiments;
pub mod laguerre;
pub mod lpp;
pub mod par;
pub mod quadform;
pub mod randkit;
pub mod tilt;
pub mod tridiag;

pub use error::{Error, Result};
