use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const MAX_ITER: usize = 10_000;
const REL_EPS: f64 = 1e-16;

/// log |Gamma(x)| via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s.abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Mean of the chi law with `r` degrees of freedom,
/// `sqrt(2) Gamma((r+1)/2) / Gamma(r/2)`.
pub fn chi_mean(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("chi degrees of freedom must be > 0, got {r}")));
    }
    Ok(std::f64::consts::SQRT_2 * (ln_gamma(0.5 * r + 0.5) - ln_gamma(0.5 * r)).exp())
}

/// Regularised lower incomplete gamma `P(a, x) = P(Gam(a, 1) <= x)`.
///
/// Power series for `x < a + 1`, Lentz continued fraction for the complement
/// otherwise.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) || !(x >= 0.0) {
        return Err(Error::domain(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..MAX_ITER {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * REL_EPS {
                break;
            }
        }
        Ok((sum * log_prefactor.exp()).min(1.0))
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < REL_EPS {
                break;
            }
        }
        Ok((1.0 - h * log_prefactor.exp()).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent log-gamma: shift to z >= 30 by recurrence, then the
    /// Stirling series through z^-9.
    fn ln_gamma_oracle(x: f64) -> f64 {
        let mut z = x;
        let mut shift = 0.0;
        while z < 30.0 {
            shift += z.ln();
            z += 1.0;
        }
        let z2 = z * z;
        let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
            - 1.0 / (1680.0 * z * z2 * z2 * z2)
            + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
        (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
    }

    #[test]
    fn ln_gamma_matches_oracle() {
        let mut x = 0.5;
        while x < 600.0 {
            let got = ln_gamma(x);
            let want = ln_gamma_oracle(x);
            let tol = 1e-13 * want.abs().max(1.0);
            assert!((got - want).abs() < tol, "x={x}: {got} vs {want}");
            x *= 1.07;
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // Reflection branch: Gamma(0.25) = 3.625609908221908...
        assert!((ln_gamma(0.25) - 3.625_609_908_221_908_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn chi_mean_values() {
        let pi = std::f64::consts::PI;
        assert!((chi_mean(2.0).unwrap() - (pi / 2.0).sqrt()).abs() < 1e-13);
        assert!((chi_mean(1.0).unwrap() - (2.0 / pi).sqrt()).abs() < 1e-13);
        let oracle = |r: f64| 2f64.sqrt() * (ln_gamma_oracle(0.5 * r + 0.5) - ln_gamma_oracle(0.5 * r)).exp();
        assert!((chi_mean(2.0).unwrap() - 1.253_314).abs() < 1e-6);
        assert!((chi_mean(1.0).unwrap() - 0.797_885).abs() < 1e-6);
        for r in [3.0, 17.0, 250.0, 863.0] {
            assert!((chi_mean(r).unwrap() - oracle(r)).abs() < 1e-11 * oracle(r));
        }
    }

    #[test]
    fn chi_mean_bracket_and_monotone() {
        let v5 = chi_mean(5.0).unwrap();
        assert!(v5 >= 4.5f64.sqrt() && v5 <= 5f64.sqrt());
        assert!(chi_mean(3.0).unwrap() < chi_mean(4.0).unwrap());
        let mut r = 1.0;
        let mut prev = 0.0;
        while r < 2000.0 {
            let v = chi_mean(r).unwrap();
            assert!(v >= (r - 0.5).sqrt() - 1e-12 && v <= r.sqrt(), "r={r}");
            assert!(v > prev);
            prev = v;
            r += 0.37;
        }
    }

    #[test]
    fn chi_mean_domain() {
        assert!(chi_mean(0.0).is_err());
        assert!(chi_mean(-1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_exponential_case() {
        let p = regularized_lower_gamma(1.0, 0.5).unwrap();
        assert!((p - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((p - 0.393_469).abs() < 1e-6);
        assert_eq!(regularized_lower_gamma(1.0, 0.0).unwrap(), 0.0);
        for x in [0.1, 1.9, 2.5, 7.0, 30.0] {
            let p = regularized_lower_gamma(1.0, x).unwrap();
            let want = -(-x).exp_m1();
            assert!((p - want).abs() <= 1e-12 * want, "x={x}");
        }
    }

    /// Composite Simpson on the substitution t = s^2, which makes the
    /// integrand smooth at the origin: int_0^x t^(a-1) e^-t dt = int_0^sqrt(x)
    /// 2 s^(2a-1) e^(-s^2) ds.
    fn incomplete_gamma_quadrature(a: f64, x: f64) -> f64 {
        let upper = x.sqrt();
        let n = 20_000;
        let h = upper / n as f64;
        let f = |s: f64| 2.0 * s.powf(2.0 * a - 1.0) * (-s * s).exp();
        let mut sum = f(0.0) + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / 3.0 / ln_gamma_oracle(a).exp()
    }

    #[test]
    fn incomplete_gamma_against_quadrature() {
        let want = incomplete_gamma_quadrature(2.5, 2.5);
        let got = regularized_lower_gamma(2.5, 2.5).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        // Both branches.
        for (a, x) in [(0.5, 0.5), (3.0, 1.0), (4.0, 9.0), (25.0, 20.0), (25.0, 31.0), (1.5, 4.0), (0.5, 3.0)] {
            let want = incomplete_gamma_quadrature(a, x);
            let got = regularized_lower_gamma(a, x).unwrap();
            assert!((got - want).abs() < 1e-10, "a={a} x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn incomplete_gamma_chi_square_one() {
        // P(chi^2_1 <= 1) = erf(1/sqrt 2) = 0.682689492137...
        let p = regularized_lower_gamma(0.5, 0.5).unwrap();
        assert!((p - 0.682_689_492_137_086).abs() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_shape() {
        for a in [0.3f64, 1.0, 2.5, 12.0, 100.0] {
            let mut prev = 0.0;
            let mut x = 0.0;
            while x < a + 40.0 * a.sqrt() {
                let p = regularized_lower_gamma(a, x).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(p >= prev - 1e-15, "a={a} x={x}");
                prev = p;
                x += 0.05 * a.max(1.0);
            }
            let far = regularized_lower_gamma(a, a + 40.0 * a.sqrt()).unwrap();
            assert!((1.0 - far).abs() < 1e-8, "a={a}: {far}");
        }
    }

    #[test]
    fn incomplete_gamma_domain() {
        assert!(regularized_lower_gamma(0.0, 1.0).is_err());
        assert!(regularized_lower_gamma(1.0, -0.1).is_err());
        assert!(regularized_lower_gamma(1.0, f64::NAN).is_err());
    }
}
