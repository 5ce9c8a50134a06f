//! Dependence orders: convex order on sums, supermodular order and negative
//! association on Bernoulli vectors, and the exchangeable vector behind a
//! sum law.

mod association;
mod simplex;
mod supermodular;

use serde::Serialize;

use crate::cmb::{self, binomial_f64, CmbParams, DiscretePmf};
use crate::error::{Error, Result};
use crate::joint::{check_dim, MultiAffinePmf};

pub use association::{na_check_exhaustive, na_check_exhaustive_with, NaWitness, MAX_NA_DIM};
pub use supermodular::{is_supermodular, local_squares, sm_dominates_lp, SmVerdict, MAX_SM_DIM};

/// Default slack on stop-loss comparisons.
pub const DEFAULT_CX_TOL: f64 = 1e-12;

/// The exchangeable Bernoulli vector whose coordinate sum has law `sum_pmf`:
/// `f(i) = sum_pmf(k) / C(d, k)` with `k` the number of ones in `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchBernoulliPmf {
    sum_pmf: DiscretePmf,
}

impl ExchBernoulliPmf {
    pub fn d(&self) -> usize {
        self.sum_pmf.d()
    }

    pub fn sum_pmf(&self) -> &DiscretePmf {
        &self.sum_pmf
    }

    /// Common marginal mean `E[W] / d`.
    pub fn marginal_mean(&self) -> f64 {
        self.sum_pmf.mean() / self.d() as f64
    }

    /// Probability of one outcome with `k` ones.
    pub fn outcome_prob(&self, k: usize) -> f64 {
        self.sum_pmf.weights()[k] / binomial_f64(self.d(), k)
    }

    /// Materializes the `2^d` joint table (`d <= 20`).
    pub fn expand(&self) -> Result<MultiAffinePmf> {
        let d = self.d();
        check_dim(d)?;
        let level: Vec<f64> = (0..=d).map(|k| self.outcome_prob(k)).collect();
        Ok(MultiAffinePmf::from_raw(
            d,
            (0..1usize << d).map(|m| level[m.count_ones() as usize]).collect(),
        ))
    }
}

/// Wraps a sum law as its unique exchangeable Bernoulli vector.
pub fn exchangeable_from_sum(pmf: DiscretePmf) -> ExchBernoulliPmf {
    ExchBernoulliPmf { sum_pmf: pmf }
}

/// `CMMB_d(r, nu)`: the exchangeable vector behind `CMB_d(r, nu)`.
pub fn cmmb(params: &CmbParams) -> ExchBernoulliPmf {
    exchangeable_from_sum(cmb::pmf(params))
}

/// Stop-loss transform `E[(W - t)_+]`.
pub fn stop_loss(pmf: &DiscretePmf, t: f64) -> f64 {
    pmf.weights()
        .iter()
        .enumerate()
        .map(|(k, w)| (k as f64 - t).max(0.0) * w)
        .sum()
}

/// Decides `pmf_lo <=cx pmf_hi` for laws on a common grid `{0, ..., d}`;
/// `tol` bounds the mean gap and is the slack on each stop-loss comparison.
///
/// With equal means the stop-loss transforms are piecewise linear between
/// integers and agree below 0, so comparing them at `t = 0, ..., d` is exact.
pub fn cx_dominates(pmf_hi: &DiscretePmf, pmf_lo: &DiscretePmf, tol: f64) -> Result<bool> {
    if pmf_hi.d() != pmf_lo.d() {
        return Err(Error::domain(format!(
            "supports differ: d = {} vs d = {}",
            pmf_hi.d(),
            pmf_lo.d()
        )));
    }
    let (m_hi, m_lo) = (pmf_hi.mean(), pmf_lo.mean());
    if (m_hi - m_lo).abs() > tol {
        return Err(Error::domain(format!(
            "convex order needs equal means, got {m_hi} and {m_lo}"
        )));
    }
    Ok((0..=pmf_hi.d()).all(|t| {
        let t = t as f64;
        stop_loss(pmf_lo, t) <= stop_loss(pmf_hi, t) + tol
    }))
}

/// Sign changes of `f_a - f_b`, skipping entries that vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignPattern {
    /// Indices `k` at which the sign differs from the previous nonzero sign.
    pub positions: Vec<usize>,
    /// Signs (`+1` / `-1`) of the successive nonzero runs.
    pub signs: Vec<i8>,
}

impl SignPattern {
    pub fn changes(&self) -> usize {
        self.positions.len()
    }
}

/// Entries with `|f_a - f_b| <= 1e-12 max(f_a, f_b)` count as zero.
pub fn sign_changes(pmf_a: &DiscretePmf, pmf_b: &DiscretePmf) -> Result<SignPattern> {
    if pmf_a.d() != pmf_b.d() {
        return Err(Error::domain("sign changes need pmfs on the same support"));
    }
    let mut positions = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    for (k, (a, b)) in pmf_a.weights().iter().zip(pmf_b.weights()).enumerate() {
        let diff = a - b;
        if diff.abs() <= 1e-12 * a.max(*b) || diff == 0.0 {
            continue;
        }
        let s: i8 = if diff > 0.0 { 1 } else { -1 };
        if let Some(&last) = signs.last() {
            if last != s {
                positions.push(k);
                signs.push(s);
            }
        } else {
            signs.push(s);
        }
    }
    Ok(SignPattern { positions, signs })
}

/// `Cov(I_1, I_2) = E[W (W - 1)] / (d (d - 1)) - p^2`.
pub fn pairwise_covariance(pmf: &ExchBernoulliPmf) -> Result<f64> {
    let d = pmf.d();
    if d < 2 {
        return Err(Error::domain("pairwise covariance needs d >= 2"));
    }
    let p = pmf.marginal_mean();
    Ok(pmf.sum_pmf().factorial_moment2() / (d * (d - 1)) as f64 - p * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(w: &[f64]) -> DiscretePmf {
        DiscretePmf::new(w.to_vec()).unwrap()
    }

    #[test]
    fn exchangeable_expansion() {
        let e = exchangeable_from_sum(DiscretePmf::point_mass(3, 3).unwrap()).expand().unwrap();
        assert_eq!(e.prob(0b111), 1.0);
        let f = cmmb(&CmbParams::new(3, 0.5, 1.7).unwrap());
        let j = f.expand().unwrap();
        let w1 = f.sum_pmf().weights()[1];
        for m in [0b001, 0b010, 0b100] {
            assert!((j.prob(m) - w1 / 3.0).abs() < 1e-16);
        }
        let upper = exchangeable_from_sum(law(&[0.5, 0.0, 0.0, 0.5])).expand().unwrap();
        assert_eq!(upper, MultiAffinePmf::upper_frechet(3, 0.5).unwrap());
        assert!(exchangeable_from_sum(DiscretePmf::point_mass(21, 0).unwrap()).expand().is_err());
    }

    #[test]
    fn stop_loss_edges() {
        let f = cmb::pmf(&CmbParams::new(9, 1.0 / 3.0, 1.0).unwrap());
        assert!((stop_loss(&f, 0.0) - 3.0).abs() < 1e-12);
        assert!((stop_loss(&f, -2.0) - 5.0).abs() < 1e-12);
        assert_eq!(stop_loss(&f, 9.0), 0.0);
        assert_eq!(stop_loss(&f, 12.5), 0.0);
    }

    #[test]
    fn cx_reflexive_and_jensen_floor() {
        let f = law(&[0.1, 0.2, 0.4, 0.2, 0.1]);
        assert!(cx_dominates(&f, &f, 1e-12).unwrap());
        let point = DiscretePmf::point_mass(4, 2).unwrap();
        assert!(cx_dominates(&f, &point, 1e-12).unwrap());
        assert!(!cx_dominates(&point, &f, 1e-12).unwrap());
    }

    #[test]
    fn cx_unequal_means_names_both() {
        let a = law(&[0.5, 0.5, 0.0]);
        let b = law(&[0.0, 0.5, 0.5]);
        match cx_dominates(&a, &b, 1e-12) {
            Err(Error::Domain(msg)) => assert!(msg.contains("0.5") && msg.contains("1.5")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_change_patterns() {
        let f = law(&[0.1, 0.2, 0.4, 0.2, 0.1]);
        assert_eq!(sign_changes(&f, &f).unwrap().changes(), 0);
        let lo = DiscretePmf::point_mass(4, 0).unwrap();
        let hi = DiscretePmf::point_mass(4, 4).unwrap();
        let s = sign_changes(&lo, &hi).unwrap();
        assert_eq!(s.positions, vec![4]);
        assert_eq!(s.signs, vec![1, -1]);
    }

    #[test]
    fn covariance_examples() {
        let ind = cmmb(&CmbParams::new(6, 0.5, 1.0).unwrap());
        assert!(pairwise_covariance(&ind).unwrap().abs() < 1e-15);
        let neg = cmmb(&CmbParams::new(9, 0.5, 2.0).unwrap());
        assert!(pairwise_covariance(&neg).unwrap() < 0.0);
        let upper = exchangeable_from_sum(law(&[0.5, 0.0, 0.0, 0.5]));
        assert!((pairwise_covariance(&upper).unwrap() - 0.25).abs() < 1e-15);
        let one = exchangeable_from_sum(law(&[0.5, 0.5]));
        assert!(pairwise_covariance(&one).is_err());
    }
}
