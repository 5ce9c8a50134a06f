//! Supermodular order between Bernoulli laws of dimension at most 4.
//!
//! `lo <=sm hi` iff `E_lo[phi] <= E_hi[phi]` for every supermodular `phi`.
//! The cone of supermodular functions on `{0,1}^d` is cut out by the local
//! inequalities `phi(x + e_i + e_j) + phi(x) >= phi(x + e_i) + phi(x + e_j)`,
//! so the worst case over `phi` in `[-1, 1]^(2^d)` is a small LP.

use serde::Serialize;

use super::simplex;
use crate::error::{Error, Result};
use crate::joint::MultiAffinePmf;

pub const MAX_SM_DIM: usize = 4;
const MARGIN_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmVerdict {
    pub dominates: bool,
    /// `max_phi E_lo[phi] - E_hi[phi]` over supermodular `phi` with values in `[-1, 1]`.
    pub gap: f64,
    /// The maximizing `phi` as a table over outcome masks, when `dominates` is false.
    pub witness: Option<Vec<f64>>,
}

/// Index pairs `(x, x+e_i, x+e_j, x+e_i+e_j)` of every local supermodularity constraint.
pub fn local_squares(d: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let (ei, ej) = (1 << i, 1 << j);
            for x in (0..1usize << d).filter(|x| x & (ei | ej) == 0) {
                out.push([x, x | ei, x | ej, x | ei | ej]);
            }
        }
    }
    out
}

/// True when `phi` satisfies every local supermodularity inequality within `tol`.
pub fn is_supermodular(phi: &[f64], d: usize, tol: f64) -> bool {
    local_squares(d)
        .iter()
        .all(|&[x, xi, xj, xij]| phi[x] + phi[xij] - phi[xi] - phi[xj] >= -tol)
}

/// Decides `pmf_lo <=sm pmf_hi` for `d <= 4`.
pub fn sm_dominates_lp(pmf_lo: &MultiAffinePmf, pmf_hi: &MultiAffinePmf) -> Result<SmVerdict> {
    let d = pmf_lo.d();
    if pmf_hi.d() != d {
        return Err(Error::domain(format!(
            "dimensions differ: {} vs {}",
            d,
            pmf_hi.d()
        )));
    }
    if d > MAX_SM_DIM {
        return Err(Error::Capacity {
            what: "supermodular LP",
            max: MAX_SM_DIM,
            got: d,
        });
    }
    let (m_lo, m_hi) = (pmf_lo.marginal_means(), pmf_hi.marginal_means());
    if m_lo.iter().zip(&m_hi).any(|(a, b)| (a - b).abs() > MARGIN_TOL) {
        return Err(Error::domain(format!(
            "marginal means differ: {m_lo:?} vs {m_hi:?}"
        )));
    }

    let n = 1usize << d;
    let c: Vec<f64> = pmf_lo
        .weights()
        .iter()
        .zip(pmf_hi.weights())
        .map(|(a, b)| a - b)
        .collect();
    // psi = phi + 1 in [0, 2]
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for x in 0..n {
        let mut row = vec![0.0; n];
        row[x] = 1.0;
        rows.push(row);
        rhs.push(2.0);
    }
    for [x, xi, xj, xij] in local_squares(d) {
        let mut row = vec![0.0; n];
        row[x] -= 1.0;
        row[xij] -= 1.0;
        row[xi] += 1.0;
        row[xj] += 1.0;
        rows.push(row);
        rhs.push(0.0);
    }
    let sol = simplex::maximize(&c, &rows, &rhs)?;
    let phi: Vec<f64> = sol.x.iter().map(|v| v - 1.0).collect();
    let gap = pmf_lo.expectation(&phi) - pmf_hi.expectation(&phi);
    debug_assert!((gap - sol.value).abs() < 1e-9);
    let dominates = gap <= GAP_TOL;
    Ok(SmVerdict {
        dominates,
        gap,
        witness: (!dominates).then_some(phi),
    })
}
