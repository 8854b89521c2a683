//! The bidiagonal beta-Laguerre model.
//!
//! `B` is lower bidiagonal with diagonal `a_1..a_n` and sub-diagonal
//! `b_1..b_{n-1}`, where `beta a_k^2 ~ chi^2(beta (m + 1 - k))` and
//! `beta b_k^2 ~ chi^2(beta (n - k))`, all independent. The eigenvalues of
//! `B B^T` are then distributed as the beta-Laguerre ensemble with parameters
//! `(m, n, beta)`.
//!
//! Interleaving the entries gives the chain `X = (a_1, b_1, a_2, ..., a_n)` of
//! length `2n - 1`. The zero-diagonal tridiagonal matrix with off-diagonal `X`
//! has eigenvalues `+-s_i` where `s_i^2` are the eigenvalues of `B B^T`, so the
//! largest eigenvalue is `s_n^2`. Arrays are 0-based: `X[j]` is `X_{j+1}`.

use serde::Serialize;

use crate::randkit::{chi_mean, regularized_lower_gamma, standard_gamma, RngStream};
use crate::tridiag::{largest_eigenvalue, TridiagonalSym};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaguerreParams {
    pub m: usize,
    pub n: usize,
    pub beta: f64,
}

impl LaguerreParams {
    /// Requires `m >= n >= 1` and `beta >= 1`.
    pub fn new(m: usize, n: usize, beta: f64) -> Result<Self> {
        if n < 1 || m < n {
            return Err(Error::domain(format!("need m >= n >= 1, got m={m}, n={n}")));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::domain(format!("beta must be a finite real >= 1, got {beta}")));
        }
        Ok(Self { m, n, beta })
    }

    /// `sqrt(m) + sqrt(n)`, the edge of the spectrum of `s`.
    pub fn edge(&self) -> f64 {
        (self.m as f64).sqrt() + (self.n as f64).sqrt()
    }

    /// Chi-square degrees of freedom of `beta X_k^2` along the chain.
    pub fn chain_dofs(&self) -> Vec<f64> {
        (0..2 * self.n - 1)
            .map(|j| {
                let k = j / 2 + 1;
                let r = if j % 2 == 0 { self.m + 1 - k } else { self.n - k };
                self.beta * r as f64
            })
            .collect()
    }

    /// `E[X_k] = E[chi_r] / sqrt(beta)` along the chain.
    pub fn chain_means(&self) -> Vec<f64> {
        let s = self.beta.sqrt();
        self.chain_dofs()
            .into_iter()
            .map(|r| chi_mean(r).expect("chain degrees of freedom are positive") / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidiagonalModel {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl BidiagonalModel {
    pub fn chain(&self) -> EntryChain {
        let mut x = Vec::with_capacity(2 * self.a.len() - 1);
        for (k, &a) in self.a.iter().enumerate() {
            x.push(a);
            if let Some(&b) = self.b.get(k) {
                x.push(b);
            }
        }
        EntryChain { x }
    }

    /// Dense `B B^T` (tridiagonal with diagonal `a_i^2 + b_{i-1}^2` and
    /// off-diagonal `a_i b_i`).
    pub fn gram(&self) -> TridiagonalSym {
        let n = self.a.len();
        let diag = (0..n)
            .map(|i| self.a[i] * self.a[i] + if i > 0 { self.b[i - 1] * self.b[i - 1] } else { 0.0 })
            .collect();
        let off = (0..n - 1).map(|i| self.a[i] * self.b[i]).collect();
        TridiagonalSym::new(diag, off).expect("bidiagonal shapes are consistent")
    }
}

/// The interleaved entries `X_1, ..., X_{2n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryChain {
    pub x: Vec<f64>,
}

impl EntryChain {
    /// Chains have odd length `2n - 1`.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.len() % 2 == 0 {
            return Err(Error::usage(format!("entry chain length must be odd, got {}", x.len())));
        }
        Ok(Self { x })
    }

    pub fn n(&self) -> usize {
        self.x.len().div_ceil(2)
    }

    pub fn to_bidiagonal(&self) -> BidiagonalModel {
        BidiagonalModel {
            a: self.x.iter().step_by(2).copied().collect(),
            b: self.x.iter().skip(1).step_by(2).copied().collect(),
        }
    }

    /// Zero-diagonal tridiagonal of dimension `2n` with off-diagonal `X`.
    pub fn linearize(&self) -> TridiagonalSym {
        TridiagonalSym::new(vec![0.0; self.x.len() + 1], self.x.clone())
            .expect("chain length is one less than the dimension")
    }
}

/// Draws the chain entries in chain order from one stream.
pub fn sample_chain(p: &LaguerreParams, rng: &mut RngStream) -> EntryChain {
    let inv_beta = 1.0 / p.beta;
    let x = p
        .chain_dofs()
        .into_iter()
        .map(|r| (2.0 * standard_gamma(0.5 * r, rng) * inv_beta).sqrt())
        .collect();
    EntryChain { x }
}

pub fn sample_bidiagonal(p: &LaguerreParams, rng: &mut RngStream) -> BidiagonalModel {
    sample_chain(p, rng).to_bidiagonal()
}

pub fn linearize(bm: &BidiagonalModel) -> TridiagonalSym {
    bm.chain().linearize()
}

/// One draw of the largest eigenvalue `lambda_n = s_n^2`.
pub fn sample_lambda_max(p: &LaguerreParams, rng: &mut RngStream, tol: Option<f64>) -> Result<f64> {
    let t = sample_chain(p, rng).linearize();
    let s = largest_eigenvalue(&t, tol)?.value;
    Ok(s * s)
}

/// `max_i (X_i + X_{i+1})` with `X_0 = X_{2n} = 0`, an upper bound for `s_n`.
pub fn gershgorin_bound(chain: &EntryChain) -> f64 {
    let x = &chain.x;
    let ends = x.first().copied().unwrap_or(0.0).max(x.last().copied().unwrap_or(0.0));
    x.windows(2).map(|w| w[0] + w[1]).fold(ends, f64::max)
}

/// `sum_i log P(X_i <= (1 - eps) sqrt(n))`.
///
/// If every entry is below `(1 - eps) sqrt(n)` then the Gershgorin bound puts
/// `s_n` below `2 (1 - eps) sqrt(n)`, so this is a log lower bound on that
/// probability. Meant for `m = n`, where the threshold equals
/// `(1 - eps)(sqrt m + sqrt n)`.
pub fn ld_lower_bound_product(p: &LaguerreParams, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let c = (1.0 - eps) * (p.n as f64).sqrt();
    let arg = 0.5 * p.beta * c * c;
    p.chain_dofs()
        .into_iter()
        .map(|r| regularized_lower_gamma(0.5 * r, arg).map(f64::ln))
        .sum()
}
