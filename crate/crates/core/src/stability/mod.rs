//! Hyperbolicity of univariate polynomials and the strong Rayleigh (SR)
//! property of CMB laws and multi-affine pgfs.
//!
//! A univariate real polynomial is real stable iff all its roots are real
//! (hyperbolic). `CMB_d(r, nu)` is SR iff `G_{d,nu}` is hyperbolic, for any
//! `r`, so [`cmb_is_sr`] takes no `r`.

mod rayleigh;
mod roots;
mod sturm;

use serde::Serialize;

use crate::cmb;
use crate::error::{Error, Result};
use crate::poly::UnivariatePoly;

pub use rayleigh::{
    d3_quadratics, pair_coefficients, sr_check_multiaffine_d3, sr_falsify_random,
    sr_falsify_random_with, RayleighWitness,
};

/// Default tolerance for classifying a numeric root as real.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactSturm,
    NumericEigen,
}

/// Outcome of a hyperbolicity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityVerdict {
    pub is_hyperbolic: bool,
    /// Real roots counted with multiplicity.
    pub real_root_count: usize,
    pub degree: usize,
    pub method: Method,
    /// A non-real root `(re, im)`; only reported by the numeric method.
    pub witness: Option<(f64, f64)>,
    /// Real roots with multiplicity (numeric method only; empty for Sturm).
    pub real_roots: Vec<f64>,
}

/// Counts real roots exactly with a Sturm sequence on the square-free
/// factors of the exact integer coefficients.
pub fn is_hyperbolic_exact(poly: &UnivariatePoly) -> Result<HyperbolicityVerdict> {
    let exact = poly
        .exact_coeffs()
        .ok_or_else(|| Error::domain("exact hyperbolicity test needs exact integer coefficients"))?;
    let degree = exact.len() - 1;
    if degree == 0 {
        return Err(Error::domain("polynomial must have degree >= 1"));
    }
    let real_root_count = sturm::real_root_count(exact);
    Ok(HyperbolicityVerdict {
        is_hyperbolic: real_root_count == degree,
        real_root_count,
        degree,
        method: Method::ExactSturm,
        witness: None,
        real_roots: Vec::new(),
    })
}

/// Counts real roots among the companion-matrix eigenvalues. A root is real
/// when `|Im z| <= rel_tol (1 + |Re z|)`, or when it belongs to a numerically
/// unresolved cluster that touches the real axis.
pub fn is_hyperbolic_numeric(poly: &UnivariatePoly, rel_tol: f64) -> Result<HyperbolicityVerdict> {
    let degree = poly.degree();
    if degree == 0 {
        return Err(Error::domain("polynomial must have degree >= 1"));
    }
    if !(rel_tol >= 0.0) {
        return Err(Error::domain("rel_tol must be >= 0"));
    }
    let roots = roots::classified_roots(poly.coeffs(), rel_tol)?;
    let mut real_roots: Vec<f64> = roots.iter().filter(|r| r.real).map(|r| r.value.re).collect();
    real_roots.sort_by(f64::total_cmp);
    let witness = roots
        .iter()
        .filter(|r| !r.real)
        .max_by(|a, b| a.value.im.abs().total_cmp(&b.value.im.abs()))
        .map(|r| (r.value.re, r.value.im.abs()));
    let real_root_count = real_roots.len();
    Ok(HyperbolicityVerdict {
        is_hyperbolic: real_root_count == degree,
        real_root_count,
        degree,
        method: Method::NumericEigen,
        witness,
        real_roots,
    })
}

/// Verdict on `G_{d,nu}`: exact for `nu` a nonnegative integer, numeric otherwise.
pub fn cmb_sr_verdict(d: usize, nu: f64) -> Result<HyperbolicityVerdict> {
    let g = cmb::g_poly(d, nu)?;
    if g.exact_coeffs().is_some() {
        is_hyperbolic_exact(&g)
    } else {
        is_hyperbolic_numeric(&g, DEFAULT_REL_TOL)
    }
}

/// Whether `CMB_d(r, nu)` (equivalently `CMMB_d(r, nu)`) is strongly Rayleigh, for every `r`.
pub fn cmb_is_sr(d: usize, nu: f64) -> Result<bool> {
    Ok(cmb_sr_verdict(d, nu)?.is_hyperbolic)
}

/// Bisects on `nu` between a non-SR `lo` and an SR `hi` until the bracket is
/// at most `tol` wide; returns the bracket midpoint.
pub fn find_sr_threshold(d: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::domain(format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}")));
    }
    if cmb_is_sr(d, lo)? {
        return Err(Error::domain(format!("lower end nu = {lo} is already SR for d = {d}")));
    }
    if !cmb_is_sr(d, hi)? {
        return Err(Error::domain(format!("upper end nu = {hi} is not SR for d = {d}")));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cmb_is_sr(d, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
