//! Symmetric tridiagonal matrices: Sturm counts, bisection for the top
//! eigenvalue, and a dense cyclic Jacobi solver kept as a test oracle.

use serde::Serialize;

use crate::{Error, Result};

/// Largest dimension accepted by the dense oracle.
pub const DENSE_CAP: usize = 64;

const PIVOT_FLOOR: f64 = 1e-300;
const BISECTION_CAP: usize = 200;
const DEFAULT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalSym {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalSym {
    /// `off` must have exactly one entry fewer than `diag`, and `diag` must be
    /// nonempty.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::usage(format!(
                "tridiagonal needs N >= 1 diagonal and N-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// `max_k |d_k| + |e_{k-1}| + |e_k|`; every eigenvalue lies in
    /// `[-radius, radius]`.
    pub fn gershgorin_radius(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let left = if k > 0 { self.off[k - 1].abs() } else { 0.0 };
                let right = if k + 1 < n { self.off[k].abs() } else { 0.0 };
                self.diag[k].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `w^T A w`.
    pub fn quadratic_form(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.dim() {
            return Err(Error::usage(format!(
                "vector of length {} against matrix of dimension {}",
                w.len(),
                self.dim()
            )));
        }
        let mut acc: f64 = self.diag.iter().zip(w).map(|(d, x)| d * x * x).sum();
        for (k, e) in self.off.iter().enumerate() {
            acc += 2.0 * e * w[k] * w[k + 1];
        }
        Ok(acc)
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for k in 0..n {
            a[k][k] = self.diag[k];
            if k + 1 < n {
                a[k][k + 1] = self.off[k];
                a[k + 1][k] = self.off[k];
            }
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResult {
    pub value: f64,
    pub iterations: usize,
    pub bracket_width: f64,
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(m: &TridiagonalSym, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..m.dim() {
        let e2 = if k > 0 { m.off[k - 1] * m.off[k - 1] } else { 0.0 };
        q = (m.diag[k] - x) - e2 / q;
        if q.abs() < PIVOT_FLOOR {
            q = if q.is_sign_negative() { -PIVOT_FLOOR } else { PIVOT_FLOOR };
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Top eigenvalue by bisection on [`sturm_count`], starting from the
/// Gershgorin bracket. `tol = None` uses `1e-12` times the Gershgorin radius.
pub fn largest_eigenvalue(m: &TridiagonalSym, tol: Option<f64>) -> Result<EigenResult> {
    let radius = m.gershgorin_radius();
    let tol = tol.unwrap_or(DEFAULT_REL_TOL * radius);
    if !(tol >= 0.0) || (tol == 0.0 && radius > 0.0) {
        return Err(Error::usage(format!("bisection tolerance must be > 0, got {tol}")));
    }
    if radius == 0.0 {
        return Ok(EigenResult { value: 0.0, iterations: 0, bracket_width: 0.0 });
    }
    if !radius.is_finite() {
        return Err(Error::NumericFailure {
            message: "non-finite matrix entries".into(),
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    let n = m.dim();
    // Invariant: fewer than n eigenvalues below lo, all n below hi.
    let mut lo = -radius - tol;
    let mut hi = radius + tol;
    for it in 1..=BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::NumericFailure {
                message: format!("bisection stalled after {it} steps"),
                lo,
                hi,
            });
        }
        if sturm_count(m, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol {
            return Ok(EigenResult { value: 0.5 * (lo + hi), iterations: it, bracket_width: hi - lo });
        }
    }
    Err(Error::NumericFailure {
        message: format!("bisection did not converge in {BISECTION_CAP} steps"),
        lo,
        hi,
    })
}

/// All eigenvalues, ascending, by cyclic Jacobi rotations. Oracle use only.
pub fn dense_spectrum(m: &TridiagonalSym) -> Result<Vec<f64>> {
    if m.dim() > DENSE_CAP {
        return Err(Error::usage(format!(
            "dense oracle is capped at dimension {DENSE_CAP}, got {}",
            m.dim()
        )));
    }
    jacobi_eigenvalues(m.to_dense())
}

/// Eigenvalues of a dense symmetric matrix, ascending, by cyclic Jacobi
/// rotations run until the off-diagonal Frobenius norm is below
/// `1e-12 * ||A||_F`.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::usage("dense oracle needs a nonempty square matrix"));
    }
    if n > DENSE_CAP {
        return Err(Error::usage(format!("dense oracle is capped at dimension {DENSE_CAP}, got {n}")));
    }
    let frob = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-12 * frob;
    let off_norm = |a: &Vec<Vec<f64>>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_norm(&a) > target {
        sweeps += 1;
        if sweeps > 100 {
            let off = off_norm(&a);
            return Err(Error::NumericFailure {
                message: "Jacobi sweeps did not converge".into(),
                lo: -off,
                hi: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
