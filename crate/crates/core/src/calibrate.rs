//! Calibration of `r` so that `E[W] = d p` for a given dependence level `nu`,
//! which keeps `CMMB_d(r, nu)` inside the Frechet class with common mean `p`.

use serde::Serialize;

use crate::cmb::{self, CmbParams};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Default absolute tolerance on `|E[W] - d p|`.
pub const DEFAULT_TOL: f64 = 1e-10;

const EDGE: f64 = 1e-12;
const MAX_ITER: usize = 200;
const PRESCAN_POINTS: usize = 64;
const FALLBACK_POINTS: usize = 10_000;

/// One calibrated member of a supermodular chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainRow {
    pub nu: f64,
    pub r: f64,
    pub mean: f64,
    pub variance: f64,
}

fn mean_at(d: usize, nu: f64, r: f64) -> Result<f64> {
    Ok(cmb::mean(&CmbParams::new(d, r, nu)?))
}

/// Checks on a grid of `points` values of `r` that the mean is nondecreasing.
pub fn mean_is_monotone(d: usize, nu: f64, points: usize) -> Result<bool> {
    let grid = grid(points);
    let means = grid
        .iter()
        .map(|&r| mean_at(d, nu, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(means.windows(2).all(|w| w[1] >= w[0]))
}

fn grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| EDGE + (1.0 - 2.0 * EDGE) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Finds `r` in `(0, 1)` with `|E[W] - d p| <= tol` for `W ~ CMB_d(r, nu)`.
pub fn solve_r(d: usize, nu: f64, p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let target = d as f64 * p;
    let (lo, hi) = if mean_is_monotone(d, nu, PRESCAN_POINTS)? {
        (EDGE, 1.0 - EDGE)
    } else {
        sign_change_bracket(d, nu, target)?
    };
    bisect(d, nu, target, tol, lo, hi)
}

fn sign_change_bracket(d: usize, nu: f64, target: f64) -> Result<(f64, f64)> {
    let grid = grid(FALLBACK_POINTS);
    let excess = grid
        .iter()
        .map(|&r| Ok(mean_at(d, nu, r)? - target))
        .collect::<Result<Vec<_>>>()?;
    let changes: Vec<usize> = excess
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] <= 0.0) != (w[1] <= 0.0))
        .map(|(i, _)| i)
        .collect();
    match changes.as_slice() {
        [i] => Ok((grid[*i], grid[i + 1])),
        [] => Err(Error::Numeric(format!(
            "mean of CMB_{d}(r, {nu}) never crosses {target} on the r grid"
        ))),
        many => Err(Error::Numeric(format!(
            "calibration is ambiguous: mean crosses {target} {} times",
            many.len()
        ))),
    }
}

fn bisect(d: usize, nu: f64, target: f64, tol: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = mean_at(d, nu, lo)? - target;
    let f_hi = mean_at(d, nu, hi)? - target;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Numeric(format!(
            "target mean {target} outside the attainable range [{}, {}]",
            f_lo + target,
            f_hi + target
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let excess = mean_at(d, nu, mid)? - target;
        if excess.abs() <= tol {
            return Ok(mid);
        }
        if excess < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Solver {
        iterations: MAX_ITER,
        lo,
        hi,
    })
}

/// Calibrates one row per `nu` at common mean `p`, in input order.
pub fn chain_table(d: usize, p: f64, nu_list: &[f64]) -> Result<Vec<ChainRow>> {
    chain_table_with(Execution::default(), d, p, nu_list, DEFAULT_TOL)
}

pub fn chain_table_with(
    exec: Execution,
    d: usize,
    p: f64,
    nu_list: &[f64],
    tol: f64,
) -> Result<Vec<ChainRow>> {
    if nu_list.is_empty() {
        return Err(Error::domain("nu list is empty"));
    }
    exec.map_collect(nu_list.len(), |i| {
        let nu = nu_list[i];
        let r = solve_r(d, nu, p, tol)?;
        let f = cmb::pmf(&CmbParams::new(d, r, nu)?);
        Ok(ChainRow {
            nu,
            r,
            mean: f.mean(),
            variance: f.variance(),
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_case_returns_p() {
        for p in [0.1, 1.0 / 3.0, 0.77] {
            let r = solve_r(7, 1.0, p, 1e-12).unwrap();
            assert!((r - p).abs() < 1e-12, "{r} vs {p}");
        }
    }

    #[test]
    fn half_mean_gives_half() {
        for nu in [-2.0, 0.0, 0.5, 3.0, 7.5] {
            assert!((solve_r(6, nu, 0.5, 1e-12).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_nu_two_row() {
        let r = solve_r(9, 2.0, 1.0 / 3.0, 1e-10).unwrap();
        assert!((r - 0.21367747).abs() < 5e-9);
        assert!((mean_at(9, 2.0, r).unwrap() - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(solve_r(9, 2.0, 0.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(solve_r(9, 2.0, 1.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(solve_r(9, 2.0, 0.3, 0.0), Err(Error::Domain(_))));
        assert!(chain_table(9, 0.3, &[]).is_err());
    }

    #[test]
    fn unreachable_tolerance_reports_bracket() {
        match solve_r(9, 2.5, 0.01, 1e-300) {
            Err(Error::Solver { iterations, lo, hi }) => {
                assert_eq!(iterations, MAX_ITER);
                assert!(lo <= hi && lo > 0.0 && hi < 1.0);
            }
            other => panic!("expected solver error, got {other:?}"),
        }
    }

    #[test]
    fn mean_is_monotone_in_r() {
        for nu in [-3.0, -0.5, 0.0, 1.0, 2.5, 6.0] {
            for d in [1, 2, 5, 9, 30] {
                assert!(mean_is_monotone(d, nu, 200).unwrap(), "d={d} nu={nu}");
            }
        }
    }

    #[test]
    fn symmetric_chain_rows() {
        for row in chain_table(2, 0.5, &[-1.0, 0.3, 4.0]).unwrap() {
            assert!((row.r - 0.5).abs() < 1e-12);
            assert!((row.mean - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sequential_and_parallel_tables_match() {
        let nus = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            chain_table_with(Execution::Sequential, 9, 1.0 / 3.0, &nus, DEFAULT_TOL).unwrap(),
            chain_table_with(Execution::Parallel, 9, 1.0 / 3.0, &nus, DEFAULT_TOL).unwrap()
        );
    }
}
