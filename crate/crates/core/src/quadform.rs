//! The quadratic forms `Q` and `Q_b` on unit vectors of length `2n`.
//!
//! `Q(w) = 2 sum X_k w_k w_{k+1} - (sqrt m + sqrt n) |w|^2` is the form of
//! `T - (sqrt m + sqrt n) I`. For centred entries `Z` (usually
//! `X_k - E[X_k]`) and `b > 0`,
//!
//! ```text
//! Q_b(w; Z) = 2 sum_{k=1}^{2n-1} Z_k w_k w_{k+1}
//!           - b sqrt(n) sum_{k=0}^{n} (w_{2k} - w_{2k+1})^2
//!           - b sqrt(m) sum_{k=1}^{n} (w_{2k-1} - w_{2k})^2
//!           - (b / sqrt n) sum_{k=1}^{2n} k w_k^2
//! ```
//!
//! with `w_0 = w_{2n+1} = 0`. Every index sits in exactly one `sqrt m` pair and
//! one `sqrt n` pair, so `Q_b` is the form of a tridiagonal matrix with
//! diagonal `-b (sqrt m + sqrt n) - b k / sqrt n` and off-diagonal
//! `Z_k + b sqrt m` (odd `k`) or `Z_k + b sqrt n` (even `k`). For `b < 1/4`,
//! `Q <= Q_b` when `Z = X - E[X]`.

use serde::Serialize;

use crate::laguerre::{EntryChain, LaguerreParams};
use crate::tridiag::TridiagonalSym;
use crate::{Error, Result};

pub const DEFAULT_B: f64 = 0.2;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitVector {
    w: Vec<f64>,
}

impl UnitVector {
    /// Accepts `w` if `|w|^2` is within `1e-12` of one.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let norm2: f64 = w.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::usage(format!("vector is not a unit vector (|w|^2 = {norm2})")));
        }
        Ok(Self { w })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(w: Vec<f64>) -> Result<Self> {
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::usage("cannot normalise a zero or non-finite vector"));
        }
        Ok(Self { w: w.into_iter().map(|x| x / norm).collect() })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

/// `Q_b` data: parameters, `b`, and the centred entries `Z_1..Z_{2n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QbSpec {
    pub params: LaguerreParams,
    pub b: f64,
    pub centered: Vec<f64>,
}

impl QbSpec {
    pub fn new(params: LaguerreParams, b: f64, centered: Vec<f64>) -> Result<Self> {
        if !(b > 0.0 && b < 0.25) {
            return Err(Error::domain(format!("b must lie in (0, 1/4), got {b}")));
        }
        if centered.len() != 2 * params.n - 1 {
            return Err(Error::usage(format!(
                "expected {} centred entries, got {}",
                2 * params.n - 1,
                centered.len()
            )));
        }
        Ok(Self { params, b, centered })
    }

    /// `Z = X - E[X]` for a sampled chain.
    pub fn from_chain(chain: &EntryChain, params: LaguerreParams, b: f64) -> Result<Self> {
        let means = params.chain_means();
        if chain.x.len() != means.len() {
            return Err(Error::usage("chain length does not match the parameters"));
        }
        let z = chain.x.iter().zip(&means).map(|(x, mu)| x - mu).collect();
        Self::new(params, b, z)
    }
}

fn check_len(w: &UnitVector, n: usize) -> Result<&[f64]> {
    if w.w.len() != 2 * n {
        return Err(Error::usage(format!("expected a vector of length {}, got {}", 2 * n, w.w.len())));
    }
    Ok(&w.w)
}

/// Direct evaluation of `Q(w)`.
pub fn evaluate_q(chain: &EntryChain, p: &LaguerreParams, w: &UnitVector) -> Result<f64> {
    if chain.n() != p.n {
        return Err(Error::usage("chain length does not match the parameters"));
    }
    let w = check_len(w, p.n)?;
    let cross: f64 = chain.x.iter().enumerate().map(|(k, x)| x * w[k] * w[k + 1]).sum();
    let norm2: f64 = w.iter().map(|x| x * x).sum();
    Ok(2.0 * cross - p.edge() * norm2)
}

/// Matrix of `Q`: diagonal `-(sqrt m + sqrt n)`, off-diagonal `X`.
pub fn build_q_matrix(chain: &EntryChain, p: &LaguerreParams) -> TridiagonalSym {
    TridiagonalSym::new(vec![-p.edge(); chain.x.len() + 1], chain.x.clone())
        .expect("chain length is one less than the dimension")
}

/// Direct evaluation of `Q_b(w; Z)` term by term, with zero padding at both
/// ends.
pub fn evaluate_qb(spec: &QbSpec, w: &UnitVector) -> Result<f64> {
    let n = spec.params.n;
    let w = check_len(w, n)?;
    let (sm, sn) = ((spec.params.m as f64).sqrt(), (n as f64).sqrt());
    let b = spec.b;
    // Padded 1-based view: wp[0] = w_0 = 0, wp[2n+1] = 0.
    let mut wp = Vec::with_capacity(2 * n + 2);
    wp.push(0.0);
    wp.extend_from_slice(w);
    wp.push(0.0);

    let cross: f64 = spec.centered.iter().enumerate().map(|(j, z)| z * wp[j + 1] * wp[j + 2]).sum();
    let n_pairs: f64 = (0..=n).map(|k| (wp[2 * k] - wp[2 * k + 1]).powi(2)).sum();
    let m_pairs: f64 = (1..=n).map(|k| (wp[2 * k - 1] - wp[2 * k]).powi(2)).sum();
    let index: f64 = (1..=2 * n).map(|k| k as f64 * wp[k] * wp[k]).sum();
    Ok(2.0 * cross - b * sn * n_pairs - b * sm * m_pairs - b / sn * index)
}

/// Matrix of `Q_b(.; Z)`.
pub fn build_qb_matrix(spec: &QbSpec) -> TridiagonalSym {
    qb_matrix(&spec.params, spec.b, &spec.centered)
}

pub(crate) fn qb_matrix(p: &LaguerreParams, b: f64, z: &[f64]) -> TridiagonalSym {
    let (sm, sn) = ((p.m as f64).sqrt(), (p.n as f64).sqrt());
    let diag = (1..=2 * p.n).map(|k| -b * (sm + sn) - b * k as f64 / sn).collect();
    let off = z
        .iter()
        .enumerate()
        .map(|(j, zk)| zk + if j % 2 == 0 { b * sm } else { b * sn })
        .collect();
    TridiagonalSym::new(diag, off).expect("centred entries have length 2n - 1")
}

/// `V = A_b - A_Q` with `Z = X - E[X]`. The chain cancels, leaving diagonal
/// `(1 - b)(sqrt m + sqrt n) - b k / sqrt n` and off-diagonal
/// `b sqrt m - E[X_k]` (odd `k`) or `b sqrt n - E[X_k]` (even `k`).
pub fn domination_matrix(p: &LaguerreParams, b: f64) -> TridiagonalSym {
    let neg_means: Vec<f64> = p.chain_means().into_iter().map(|mu| -mu).collect();
    let v = qb_matrix(p, b, &neg_means);
    let diag = v.diag().iter().map(|d| d + p.edge()).collect();
    TridiagonalSym::new(diag, v.off().to_vec()).expect("shape preserved")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Domination {
    pub holds: bool,
    /// First 0-based row where `V_kk < |V_{k,k-1}| + |V_{k,k+1}|`.
    pub violating_row: Option<usize>,
}

/// Row-wise diagonal dominance of `V`. Any `b > 0` is accepted so that the
/// check can also be run outside `(0, 1/4)`.
pub fn check_domination(chain: &EntryChain, p: &LaguerreParams, b: f64) -> Result<Domination> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("b must be positive, got {b}")));
    }
    if chain.n() != p.n {
        return Err(Error::usage("chain length does not match the parameters"));
    }
    let v = domination_matrix(p, b);
    let (d, e) = (v.diag(), v.off());
    let violating_row = (0..d.len()).find(|&k| {
        let left = if k > 0 { e[k - 1].abs() } else { 0.0 };
        let right = if k < e.len() { e[k].abs() } else { 0.0 };
        d[k] < left + right
    });
    Ok(Domination { holds: violating_row.is_none(), violating_row })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre::sample_chain;
    use crate::randkit::{sample_normal, RngStream};
    use crate::tridiag::largest_eigenvalue;

    fn params(m: usize, n: usize, beta: f64) -> LaguerreParams {
        LaguerreParams::new(m, n, beta).unwrap()
    }

    fn random_unit(rng: &mut RngStream, len: usize) -> UnitVector {
        UnitVector::normalized((0..len).map(|_| sample_normal(rng)).collect()).unwrap()
    }

    #[test]
    fn unit_vector_validation() {
        assert!(UnitVector::new(vec![1.0, 0.0]).is_ok());
        assert!(UnitVector::new(vec![1.0, 1.0]).is_err());
        assert!(UnitVector::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn q_small_cases() {
        let p = params(4, 1, 1.0);
        let c = EntryChain::new(vec![1.7]).unwrap();
        let e1 = UnitVector::new(vec![1.0, 0.0]).unwrap();
        assert!((evaluate_q(&c, &p, &e1).unwrap() + 3.0).abs() < 1e-15);
        let h = UnitVector::normalized(vec![1.0, 1.0]).unwrap();
        assert!((evaluate_q(&c, &p, &h).unwrap() - (1.7 - 3.0)).abs() < 1e-12);
        assert!(evaluate_q(&c, &p, &UnitVector::new(vec![1.0, 0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn q_matrix_one_by_one() {
        let p = params(1, 1, 1.0);
        let c = EntryChain::new(vec![0.6]).unwrap();
        let a = build_q_matrix(&c, &p);
        assert_eq!(a.diag(), &[-2.0, -2.0]);
        assert_eq!(a.off(), &[0.6]);
        let top = largest_eigenvalue(&a, None).unwrap().value;
        assert!((top - (0.6 - 2.0)).abs() < 1e-11);
    }

    #[test]
    fn q_matrix_matches_form_and_eigen_identity() {
        let mut rng = RngStream::new(31, 0);
        for (m, n, beta) in [(6, 3, 1.0), (12, 12, 2.0), (40, 9, 4.0)] {
            let p = params(m, n, beta);
            let c = sample_chain(&p, &mut rng);
            let a = build_q_matrix(&c, &p);
            let scale = a.gershgorin_radius();
            for _ in 0..20 {
                let w = random_unit(&mut rng, 2 * n);
                let direct = evaluate_q(&c, &p, &w).unwrap();
                assert!((direct - a.quadratic_form(w.as_slice()).unwrap()).abs() < 1e-10 * scale);
            }
            let s = largest_eigenvalue(&c.linearize(), None).unwrap();
            let q = largest_eigenvalue(&a, None).unwrap();
            assert!((q.value + p.edge() - s.value).abs() <= 2.0 * (s.bracket_width + q.bracket_width) + 1e-12 * scale);
        }
    }

    #[test]
    fn qb_hand_expansion() {
        let p = params(1, 1, 1.0);
        let spec = QbSpec::new(p, 0.2, vec![0.0]).unwrap();
        let e1 = UnitVector::new(vec![1.0, 0.0]).unwrap();
        let e2 = UnitVector::new(vec![0.0, 1.0]).unwrap();
        assert!((evaluate_qb(&spec, &e1).unwrap() + 0.6).abs() < 1e-15);
        assert!((evaluate_qb(&spec, &e2).unwrap() + 0.8).abs() < 1e-15);

        let spec = QbSpec::new(p, 0.2, vec![0.37]).unwrap();
        let a = build_qb_matrix(&spec);
        assert!((a.diag()[0] + 0.6).abs() < 1e-15 && (a.diag()[1] + 0.8).abs() < 1e-15);
        assert!((a.off()[0] - 0.57).abs() < 1e-15);
    }

    #[test]
    fn qb_spec_validation() {
        let p = params(3, 2, 1.0);
        assert!(QbSpec::new(p, 0.25, vec![0.0; 3]).is_err());
        assert!(QbSpec::new(p, 0.0, vec![0.0; 3]).is_err());
        assert!(QbSpec::new(p, 0.1, vec![0.0; 2]).is_err());
    }

    #[test]
    fn qb_matrix_matches_form() {
        let mut rng = RngStream::new(32, 0);
        for (m, n, b) in [(5, 5, 0.2), (30, 7, 0.05), (9, 8, 0.24)] {
            let p = params(m, n, 1.0);
            let z: Vec<f64> = (0..2 * n - 1).map(|_| sample_normal(&mut rng)).collect();
            let spec = QbSpec::new(p, b, z).unwrap();
            let a = build_qb_matrix(&spec);
            let scale = a.gershgorin_radius();
            for _ in 0..100 {
                let w = random_unit(&mut rng, 2 * n);
                let direct = evaluate_qb(&spec, &w).unwrap();
                assert!((direct - a.quadratic_form(w.as_slice()).unwrap()).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn qb_dominates_q_at_top_eigenvalue() {
        let p = params(16, 16, 1.0);
        let mut rng = RngStream::new(33, 0);
        for _ in 0..200 {
            let c = sample_chain(&p, &mut rng);
            let spec = QbSpec::from_chain(&c, p, DEFAULT_B).unwrap();
            let top_b = largest_eigenvalue(&build_qb_matrix(&spec), None).unwrap();
            let top_q = largest_eigenvalue(&build_q_matrix(&c, &p), None).unwrap();
            assert!(top_b.value >= top_q.value - top_b.bracket_width - top_q.bracket_width);
        }
    }

    #[test]
    fn domination_matrix_is_difference() {
        let p = params(10, 6, 2.0);
        let mut rng = RngStream::new(34, 0);
        let c = sample_chain(&p, &mut rng);
        let spec = QbSpec::from_chain(&c, p, 0.1).unwrap();
        let ab = build_qb_matrix(&spec);
        let aq = build_q_matrix(&c, &p);
        let v = domination_matrix(&p, 0.1);
        for k in 0..ab.dim() {
            assert!((ab.diag()[k] - aq.diag()[k] - v.diag()[k]).abs() < 1e-12);
        }
        for k in 0..ab.off().len() {
            assert!((ab.off()[k] - aq.off()[k] - v.off()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn domination_holds_inside_range() {
        let p = params(8, 8, 1.0);
        let mut rng = RngStream::new(35, 0);
        for _ in 0..1000 {
            let c = sample_chain(&p, &mut rng);
            let d = check_domination(&c, &p, 0.2).unwrap();
            assert!(d.holds, "violating row {:?}", d.violating_row);
        }
        for _ in 0..100 {
            let c = sample_chain(&p, &mut rng);
            let spec = QbSpec::from_chain(&c, p, 0.2).unwrap();
            let w = random_unit(&mut rng, 16);
            let diff = evaluate_qb(&spec, &w).unwrap() - evaluate_q(&c, &p, &w).unwrap();
            assert!(diff >= -1e-10);
        }
    }

    #[test]
    fn domination_outside_range_reports_row() {
        // b = 0.4 carries no guarantee; only the report format is checked.
        let p = params(8, 8, 1.0);
        let c = sample_chain(&p, &mut RngStream::new(36, 0));
        let d = check_domination(&c, &p, 0.4).unwrap();
        assert_eq!(d.holds, d.violating_row.is_none());
        assert!(check_domination(&c, &p, 0.0).is_err());
    }
}
