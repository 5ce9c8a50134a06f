//! The Conway-Maxwell binomial law `CMB_d(r, nu)` on `{0, ..., d}`:
//!
//! ```text
//! f(k) = C(d,k)^nu r^k (1-r)^(d-k) / S_d(r, nu)
//! ```
//!
//! Everything is computed in log space and normalized with log-sum-exp,
//! since `C(d,k)^nu` overflows for moderate `d` and `nu`.

use num_bigint::BigInt;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::poly::UnivariatePoly;
use crate::PROB_SUM_TOL;

/// Largest `d` accepted for pmf and moment computations.
pub const MAX_D: usize = 1000;

/// Parameters `(d, r, nu)` of a CMB / CMMB law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmbParams {
    d: usize,
    r: f64,
    nu: f64,
}

impl CmbParams {
    pub fn new(d: usize, r: f64, nu: f64) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::domain(format!("d must lie in 1..={MAX_D}, got {d}")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(format!("r must lie in (0, 1), got {r}")));
        }
        if !nu.is_finite() {
            return Err(Error::domain(format!("nu must be finite, got {nu}")));
        }
        Ok(Self { d, r, nu })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// A probability vector on `{0, ..., d}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePmf {
    weights: Vec<f64>,
}

impl DiscretePmf {
    /// Validates nonnegativity and unit mass (within [`PROB_SUM_TOL`]).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::domain("a pmf on {0,...,d} needs d >= 1"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::domain(format!("pmf weights must be finite and >= 0, found {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::domain(format!("pmf weights sum to {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// Divides by the total mass; used after exponentiating log weights.
    pub(crate) fn normalized(mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { weights }
    }

    /// Point mass at `k`.
    pub fn point_mass(d: usize, k: usize) -> Result<Self> {
        if k > d {
            return Err(Error::domain(format!("atom {k} outside 0..={d}")));
        }
        let mut w = vec![0.0; d + 1];
        w[k] = 1.0;
        Self::new(w)
    }

    pub fn d(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| (k as f64 - m).powi(2) * w)
            .sum()
    }

    /// `E[W (W - 1)]`, the second factorial moment.
    pub fn factorial_moment2(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| (k * k.saturating_sub(1)) as f64 * w)
            .sum()
    }

    /// Cumulative distribution `F(k)` for `k = 0..=d`.
    pub fn cdf(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }

    pub fn pgf(&self, z: f64) -> f64 {
        self.weights.iter().rev().fold(0.0, |acc, &w| acc * z + w)
    }
}

fn log_terms(params: &CmbParams) -> Vec<f64> {
    let CmbParams { d, r, nu } = *params;
    let (lr, l1r) = (r.ln(), (-r).ln_1p());
    (0..=d)
        .map(|k| nu * ln_choose(d, k) + k as f64 * lr + (d - k) as f64 * l1r)
        .collect()
}

pub(crate) fn ln_choose(d: usize, k: usize) -> f64 {
    ln_binomial(d as u64, k as u64)
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln S_d(r, nu)`.
pub fn log_normalizer(params: &CmbParams) -> f64 {
    log_sum_exp(&log_terms(params))
}

/// `ln f(k)`.
pub fn log_pmf(params: &CmbParams, k: usize) -> Result<f64> {
    if k > params.d {
        return Err(Error::domain(format!("k = {k} outside 0..={}", params.d)));
    }
    let terms = log_terms(params);
    Ok(terms[k] - log_sum_exp(&terms))
}

pub fn pmf(params: &CmbParams) -> DiscretePmf {
    let terms = log_terms(params);
    let lse = log_sum_exp(&terms);
    DiscretePmf::normalized(terms.iter().map(|t| (t - lse).exp()).collect())
}

pub fn mean(params: &CmbParams) -> f64 {
    pmf(params).mean()
}

pub fn variance(params: &CmbParams) -> f64 {
    pmf(params).variance()
}

/// `G_{d,nu}(z) = sum_k C(d,k)^nu z^k`.
///
/// For `nu` a nonnegative integer the exact integer coefficients are attached
/// as well. When the floating coefficients would overflow they are stored
/// rescaled (see [`UnivariatePoly::is_scaled`]).
pub fn g_poly(d: usize, nu: f64) -> Result<UnivariatePoly> {
    if d == 0 {
        return Err(Error::domain("d must be >= 1"));
    }
    if !nu.is_finite() {
        return Err(Error::domain(format!("nu must be finite, got {nu}")));
    }
    let direct: Vec<f64> = (0..=d).map(|k| binomial_f64(d, k).powf(nu)).collect();
    let mut poly = if direct.iter().all(|c| c.is_finite() && *c > 0.0) {
        UnivariatePoly::new(direct)?
    } else {
        let logs: Vec<f64> = (0..=d).map(|k| nu * ln_choose(d, k)).collect();
        UnivariatePoly::from_log_magnitudes(&logs, std::iter::repeat(false))
    };
    if nu >= 0.0 && nu.fract() == 0.0 {
        let power = nu as u32;
        let exact = binomial_row(d).into_iter().map(|c| c.pow(power)).collect();
        poly.set_exact(exact);
    }
    Ok(poly)
}

/// The pgf of `CMB_d(r, nu)` as a polynomial: coefficient `k` is `f(k)`.
pub fn pgf_poly(params: &CmbParams) -> Result<UnivariatePoly> {
    UnivariatePoly::new(pmf(params).weights)
}

/// Exact row `C(d, 0), ..., C(d, d)`.
pub(crate) fn binomial_row(d: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(d + 1);
    let mut c = BigInt::from(1);
    row.push(c.clone());
    for k in 0..d {
        c = c * BigInt::from(d - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// `C(d, k)` in floating point; exact while the value fits in 53 bits.
pub(crate) fn binomial_f64(d: usize, k: usize) -> f64 {
    let k = k.min(d - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (d - i) as f64 / (i + 1) as f64;
    }
    // integer-valued below 2^53; rounding removes division residue
    if c < 9.0e15 {
        c.round()
    } else {
        c
    }
}
