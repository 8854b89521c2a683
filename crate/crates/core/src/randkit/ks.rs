use crate::{Error, Result};

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|` of two sorted
/// samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::usage("KS statistic needs two nonempty samples"));
    }
    debug_assert!(a.windows(2).all(|w| w[0] <= w[1]), "first sample not sorted");
    debug_assert!(b.windows(2).all(|w| w[0] <= w[1]), "second sample not sorted");
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // Step past every copy of the smallest remaining value in both
        // samples before comparing, so ties do not create phantom gaps.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample Kolmogorov-Smirnov statistic of a sorted sample against a
/// continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::usage("KS statistic needs a nonempty sample"));
    }
    let n = sample.len() as f64;
    Ok(sample.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}
