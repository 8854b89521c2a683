use super::rng::RngStream;
use crate::{Error, Result};

/// Law of a chi / chi-square variable with `r` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiLaw {
    r: f64,
}

impl ChiLaw {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(Self { r })
        } else {
            Err(Error::domain(format!("chi degrees of freedom must be > 0, got {r}")))
        }
    }

    pub fn dof(&self) -> f64 {
        self.r
    }
}

#[inline]
pub fn sample_exp(rng: &mut RngStream) -> f64 {
    -libm::log(rng.uniform())
}

/// Standard normal by the Marsaglia polar method. The second variate of each
/// accepted pair is discarded so that the stream stays stateless.
pub fn sample_normal(rng: &mut RngStream) -> f64 {
    loop {
        let u = 2.0 * rng.uniform() - 1.0;
        let v = 2.0 * rng.uniform() - 1.0;
        let s = u * u + v * v;
        if s < 1.0 && s > 0.0 {
            return u * (-2.0 * libm::log(s) / s).sqrt();
        }
    }
}

/// Gamma(shape, 1) by Marsaglia and Tsang, with the `u^(1/shape)` boost for
/// shape below one. `shape` must be positive.
pub(crate) fn standard_gamma(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let g = standard_gamma(shape + 1.0, rng);
        return g * libm::exp(libm::log(rng.uniform()) / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = sample_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
            return d * v;
        }
    }
}

/// Draw from Gam(shape, rate), density proportional to `x^(shape-1) e^(-rate x)`.
pub fn sample_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!(
            "gamma needs shape > 0 and rate > 0, got shape={shape}, rate={rate}"
        )));
    }
    Ok(standard_gamma(shape, rng) / rate)
}

/// chi-square with `r` degrees of freedom, i.e. Gam(r/2, 1/2).
#[inline]
pub fn sample_chi_sq(law: ChiLaw, rng: &mut RngStream) -> f64 {
    2.0 * standard_gamma(0.5 * law.r, rng)
}

#[inline]
pub fn sample_chi(law: ChiLaw, rng: &mut RngStream) -> f64 {
    sample_chi_sq(law, rng).sqrt()
}
