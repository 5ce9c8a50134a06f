//! Univariate polynomials with real coefficients and, optionally, an exact
//! integer copy of the same coefficients.

use nalgebra::Complex;
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};

/// Polynomial `sum_k c_k z^k`, coefficients in ascending degree.
///
/// The stored floating coefficients may be scaled by a common factor
/// `exp(log_scale)` when the true values overflow `f64`; scaling does not
/// move the roots. `exact_coeffs`, when present, holds the unscaled values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
    log_scale: f64,
    #[serde(skip)]
    exact_coeffs: Option<Vec<BigInt>>,
}

impl UnivariatePoly {
    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("polynomial coefficients must be finite"));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::domain("zero polynomial"));
        }
        Ok(Self {
            coeffs,
            log_scale: 0.0,
            exact_coeffs: None,
        })
    }

    /// Builds a polynomial from exact integer coefficients; the floating copy
    /// is rescaled if any coefficient does not fit in an `f64`.
    pub fn from_exact(mut exact: Vec<BigInt>) -> Result<Self> {
        use num_traits::{ToPrimitive, Zero};
        while exact.last().is_some_and(|c| c.is_zero()) {
            exact.pop();
        }
        if exact.is_empty() {
            return Err(Error::domain("zero polynomial"));
        }
        let direct: Vec<f64> = exact.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
        if direct.iter().all(|c| c.is_finite()) {
            return Ok(Self {
                coeffs: direct,
                log_scale: 0.0,
                exact_coeffs: Some(exact),
            });
        }
        let logs: Vec<f64> = exact.iter().map(ln_abs_bigint).collect();
        let mut poly = Self::from_log_magnitudes(&logs, exact.iter().map(|c| c.sign() == num_bigint::Sign::Minus));
        poly.exact_coeffs = Some(exact);
        Ok(poly)
    }

    /// Builds a polynomial whose `k`-th coefficient is `exp(log_mags[k])`,
    /// normalizing by the largest magnitude when the values overflow.
    pub(crate) fn from_log_magnitudes(
        log_mags: &[f64],
        negative: impl Iterator<Item = bool>,
    ) -> Self {
        let max = log_mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_scale = if max > 700.0 { max } else { 0.0 };
        let coeffs = log_mags
            .iter()
            .zip(negative)
            .map(|(l, neg)| {
                let v = (l - log_scale).exp();
                if neg {
                    -v
                } else {
                    v
                }
            })
            .collect();
        Self {
            coeffs,
            log_scale,
            exact_coeffs: None,
        }
    }

    pub(crate) fn set_exact(&mut self, exact: Vec<BigInt>) {
        self.exact_coeffs = Some(exact);
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Floating coefficients (possibly scaled, see [`Self::log_scale`]).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Natural log of the factor dividing every stored floating coefficient.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// True when the floating coefficients were rescaled to avoid overflow.
    pub fn is_scaled(&self) -> bool {
        self.log_scale != 0.0
    }

    pub fn exact_coeffs(&self) -> Option<&[BigInt]> {
        self.exact_coeffs.as_deref()
    }

    /// Horner evaluation of the stored (scaled) coefficients.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

fn ln_abs_bigint(c: &BigInt) -> f64 {
    use num_traits::{ToPrimitive, Zero};
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits < 1000 {
        return c.to_f64().map_or(f64::INFINITY, |v| v.abs().ln());
    }
    let shift = bits - 64;
    let top = (c.magnitude() >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
