//! The polytope of laws on `{0, ..., d}` with a fixed mean and its extremal
//! points, the symmetric decomposition of `CMB_d(1/2, nu)`, the `d = 3`
//! constructions and the `nu -> +-inf` limits.

use serde::Serialize;

use crate::cmb::{self, CmbParams, DiscretePmf};
use crate::error::{Error, Result};
use crate::joint::MultiAffinePmf;
use crate::PROB_SUM_TOL;

/// Atoms `j1 <= mu <= j2` of a two-point extremal law with mean `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalIndex {
    pub j1: usize,
    pub j2: usize,
}

impl ExtremalIndex {
    pub fn new(d: usize, mu: f64, j1: usize, j2: usize) -> Result<Self> {
        if !(0.0..=d as f64).contains(&mu) {
            return Err(Error::domain(format!("mean {mu} outside [0, {d}]")));
        }
        if j1 == j2 {
            return Err(Error::domain("extremal atoms must differ"));
        }
        if j1 as f64 > mu || (j2 as f64) < mu || j2 > d {
            return Err(Error::domain(format!(
                "need j1 <= mu <= j2 <= d, got j1 = {j1}, mu = {mu}, j2 = {j2}, d = {d}"
            )));
        }
        Ok(Self { j1, j2 })
    }
}

/// Mixture weights over the symmetric extremal laws `r_j`, `j = 0..=d/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    lambdas: Vec<f64>,
}

impl WeightVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::domain("weights must be finite and >= 0"));
        }
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::domain(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

/// Mass `(j2 - mu)/(j2 - j1)` at `j1` and `(mu - j1)/(j2 - j1)` at `j2`.
pub fn extremal_point(d: usize, mu: f64, j1: usize, j2: usize) -> Result<DiscretePmf> {
    let ExtremalIndex { j1, j2 } = ExtremalIndex::new(d, mu, j1, j2)?;
    let span = (j2 - j1) as f64;
    let mut w = vec![0.0; d + 1];
    w[j1] = (j2 as f64 - mu) / span;
    w[j2] = (mu - j1 as f64) / span;
    DiscretePmf::new(w)
}

/// Symmetric extremal law `r_j` of mean `d/2`: half at `j` and half at `d - j`,
/// or a point mass at `d/2` when `2j = d`.
pub fn symmetric_extremal(d: usize, j: usize) -> Result<DiscretePmf> {
    if 2 * j > d {
        return Err(Error::domain(format!("symmetric index {j} exceeds d/2 = {}", d / 2)));
    }
    if 2 * j == d {
        return DiscretePmf::point_mass(d, j);
    }
    extremal_point(d, d as f64 / 2.0, j, d - j)
}

/// Weights with `CMB_d(1/2, nu) = sum_j lambda_j r_j`:
/// `lambda_j = 2 C(d,j)^nu / S` for `j < d/2` and `C(d,d/2)^nu / S` at the middle.
pub fn symmetric_weights(d: usize, nu: f64) -> Result<WeightVector> {
    let f = cmb::pmf(&CmbParams::new(d, 0.5, nu)?);
    let lambdas = (0..=d / 2)
        .map(|j| if 2 * j == d { f.weights()[j] } else { 2.0 * f.weights()[j] })
        .collect();
    Ok(WeightVector { lambdas })
}

/// `sum_j lambda_j r_j`.
pub fn reconstruct_from_weights(d: usize, weights: &WeightVector) -> Result<DiscretePmf> {
    let lambdas = weights.lambdas();
    if lambdas.len() != d / 2 + 1 {
        return Err(Error::domain(format!(
            "d = {d} needs {} weights, got {}",
            d / 2 + 1,
            lambdas.len()
        )));
    }
    let mut w = vec![0.0; d + 1];
    for (j, l) in lambdas.iter().enumerate() {
        if 2 * j == d {
            w[j] += l;
        } else {
            w[j] += l / 2.0;
            w[d - j] += l / 2.0;
        }
    }
    Ok(DiscretePmf::normalized(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PlusInf,
    MinusInf,
}

/// Weak limit of `CMB_d(1/2, nu)` as `nu -> +inf` or `nu -> -inf`.
pub fn limit_pmf(d: usize, direction: Direction) -> Result<DiscretePmf> {
    if d == 0 {
        return Err(Error::domain("d must be >= 1"));
    }
    match direction {
        Direction::PlusInf => symmetric_extremal(d, d / 2),
        Direction::MinusInf => symmetric_extremal(d, 0),
    }
}

/// `lambda r_0 + (1 - lambda) r_1` on `{0, 1, 2, 3}`.
pub fn d3_line_pmf(lambda: f64) -> Result<DiscretePmf> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("lambda = {lambda} outside [0, 1]")));
    }
    let (a, b) = (lambda / 2.0, (1.0 - lambda) / 2.0);
    DiscretePmf::new(vec![a, b, b, a])
}

/// `lambda0 r_0^e + (1 - lambda0) sum_k w_k r_k` in the class with all means 1/2,
/// where `r_0^e` is the upper Frechet bound and `r_k` puts half its mass on
/// `e_k` and half on `1 - e_k`.
pub fn d3_nonexch_family(lambda0: f64, w: [f64; 3]) -> Result<MultiAffinePmf> {
    if !(0.0..=1.0).contains(&lambda0) {
        return Err(Error::domain(format!("lambda0 = {lambda0} outside [0, 1]")));
    }
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::domain("mixing weights must be finite and >= 0"));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::domain(format!("mixing weights sum to {total}, expected 1")));
    }
    let mut table = vec![0.0; 8];
    table[0] = lambda0 / 2.0;
    table[7] = lambda0 / 2.0;
    for (k, wk) in w.iter().enumerate() {
        let m = (1.0 - lambda0) * wk / 2.0;
        table[1 << k] += m;
        table[7 ^ (1 << k)] += m;
    }
    MultiAffinePmf::new(3, table)
}
