//! General `d`-variate Bernoulli laws stored as a dense `2^d` table.
//!
//! Outcomes are indexed by bit masks: bit `j` of the index is the value of
//! coordinate `j + 1`. The textual form used in files writes coordinate 1
//! first, so the key `"100"` is the mask `0b001`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::{MAX_JOINT_DIM, PROB_SUM_TOL};

/// Joint pmf of a Bernoulli vector; its pgf is the multi-affine polynomial
/// `sum_i f(i) prod_j z_j^{i_j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiAffinePmf {
    d: usize,
    weights: Vec<f64>,
}

impl MultiAffinePmf {
    pub fn new(d: usize, weights: Vec<f64>) -> Result<Self> {
        check_dim(d)?;
        if weights.len() != 1 << d {
            return Err(Error::domain(format!(
                "a {d}-variate table needs {} entries, got {}",
                1usize << d,
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::domain(format!("joint weights must be finite and >= 0, found {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::domain(format!("joint weights sum to {total}, expected 1")));
        }
        Ok(Self { d, weights })
    }

    /// Builds a table from binary-string keys (coordinate 1 first); missing keys are zero.
    pub fn from_binary_table<'a>(
        d: usize,
        table: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        check_dim(d)?;
        let mut weights = vec![0.0; 1 << d];
        for (key, p) in table {
            let mask = mask_from_key(key, d)?;
            weights[mask] += p;
        }
        Self::new(d, weights)
    }

    /// Product law of independent Bernoulli(`p_j`) coordinates.
    pub fn independent(p: &[f64]) -> Result<Self> {
        if p.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::domain("Bernoulli means must lie in [0, 1]"));
        }
        let d = p.len();
        check_dim(d)?;
        let weights = (0..1usize << d)
            .map(|mask| {
                p.iter()
                    .enumerate()
                    .map(|(j, q)| if mask >> j & 1 == 1 { *q } else { 1.0 - q })
                    .product()
            })
            .collect();
        Self::new(d, weights)
    }

    /// Upper Frechet bound of the class with common mean `p`: mass `p` at the
    /// all-ones outcome and `1 - p` at the origin.
    pub fn upper_frechet(d: usize, p: f64) -> Result<Self> {
        check_dim(d)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("mean must lie in [0, 1]"));
        }
        let mut weights = vec![0.0; 1 << d];
        weights[0] = 1.0 - p;
        *weights.last_mut().unwrap() += p;
        Self::new(d, weights)
    }

    pub(crate) fn from_raw(d: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), 1 << d);
        Self { d, weights }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn prob(&self, mask: usize) -> f64 {
        self.weights[mask]
    }

    /// Probability of the outcome written as a binary key, coordinate 1 first.
    pub fn prob_of(&self, key: &str) -> Result<f64> {
        Ok(self.weights[mask_from_key(key, self.d)?])
    }

    /// Nonzero entries keyed by binary strings.
    pub fn to_binary_table(&self) -> BTreeMap<String, f64> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(mask, w)| (key_from_mask(mask, self.d), *w))
            .collect()
    }

    /// `E[I_j]` for every coordinate.
    pub fn marginal_means(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| {
                self.weights
                    .iter()
                    .enumerate()
                    .filter(|(mask, _)| mask >> j & 1 == 1)
                    .map(|(_, w)| w)
                    .sum()
            })
            .collect()
    }

    /// `Cov(I_a, I_b)` for zero-based coordinates.
    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        let m = self.marginal_means();
        let both: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .map(|(_, w)| w)
            .sum();
        both - m[a] * m[b]
    }

    /// `E[phi(I)]` for a function given as a table over masks.
    pub fn expectation(&self, phi: &[f64]) -> f64 {
        self.weights.iter().zip(phi).map(|(w, f)| w * f).sum()
    }

    /// Law of the coordinate sum.
    pub fn sum_weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.d + 1];
        for (mask, w) in self.weights.iter().enumerate() {
            out[mask.count_ones() as usize] += w;
        }
        out
    }

    /// Evaluates the multi-affine pgf at a real point.
    pub fn pgf(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.d, "pgf argument has wrong dimension");
        let mut v = self.weights.clone();
        for j in (0..self.d).rev() {
            let half = 1 << j;
            for i in 0..half {
                v[i] += z[j] * v[i + half];
            }
            v.truncate(half);
        }
        v[0]
    }

    /// True when the table is invariant under coordinate permutations, i.e.
    /// every outcome with the same number of ones has the same probability.
    pub fn is_exchangeable(&self, tol: f64) -> bool {
        let mut level: Vec<Option<f64>> = vec![None; self.d + 1];
        self.weights.iter().enumerate().all(|(mask, w)| {
            let k = mask.count_ones() as usize;
            match level[k] {
                None => {
                    level[k] = Some(*w);
                    true
                }
                Some(v) => (v - w).abs() <= tol,
            }
        })
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    if d > MAX_JOINT_DIM {
        return Err(Error::Capacity {
            what: "joint Bernoulli table",
            max: MAX_JOINT_DIM,
            got: d,
        });
    }
    Ok(())
}

/// Parses a key such as `"010"` (coordinate 1 first) into a mask.
pub fn mask_from_key(key: &str, d: usize) -> Result<usize> {
    if key.len() != d {
        return Err(Error::domain(format!("key {key:?} must have {d} binary digits")));
    }
    key.bytes().enumerate().try_fold(0usize, |mask, (j, b)| match b {
        b'0' => Ok(mask),
        b'1' => Ok(mask | 1 << j),
        _ => Err(Error::domain(format!("key {key:?} is not a binary string"))),
    })
}

pub fn key_from_mask(mask: usize, d: usize) -> String {
    (0..d).map(|j| if mask >> j & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn keys_put_coordinate_one_first() {
        assert_eq!(mask_from_key("100", 3).unwrap(), 0b001);
        assert_eq!(mask_from_key("011", 3).unwrap(), 0b110);
        assert_eq!(key_from_mask(0b110, 3), "011");
        assert!(mask_from_key("0102", 4).is_err());
        assert!(mask_from_key("01", 3).is_err());
    }

    #[test]
    fn validation() {
        assert!(MultiAffinePmf::new(2, vec![0.25; 4]).is_ok());
        assert!(MultiAffinePmf::new(2, vec![0.25; 3]).is_err());
        assert!(MultiAffinePmf::new(2, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(MultiAffinePmf::new(2, vec![0.3; 4]).is_err());
        assert!(matches!(
            MultiAffinePmf::new(21, vec![]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn independent_product_moments() {
        let f = MultiAffinePmf::independent(&[0.2, 0.5, 0.9]).unwrap();
        let m = f.marginal_means();
        assert_relative_eq!(m[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(m[2], 0.9, epsilon = 1e-15);
        assert!(f.covariance(0, 1).abs() < 1e-15);
        let z = [0.3, -1.2, 2.0];
        let want: f64 = [0.2, 0.5, 0.9].iter().zip(z).map(|(p, z)| 1.0 - p + p * z).product();
        assert_relative_eq!(f.pgf(&z), want, epsilon = 1e-14);
    }

    #[test]
    fn upper_frechet_has_positive_covariance() {
        let f = MultiAffinePmf::upper_frechet(3, 0.5).unwrap();
        assert_relative_eq!(f.covariance(0, 2), 0.25, epsilon = 1e-15);
        assert_eq!(f.sum_weights(), vec![0.5, 0.0, 0.0, 0.5]);
        assert!(f.is_exchangeable(0.0));
    }

    #[test]
    fn binary_table_round_trip() {
        let f = MultiAffinePmf::from_binary_table(2, [("10", 0.7), ("11", 0.3)]).unwrap();
        assert_eq!(f.prob(0b01), 0.7);
        assert_eq!(f.prob_of("11").unwrap(), 0.3);
        let back = f.to_binary_table();
        assert_eq!(back.get("10"), Some(&0.7));
        assert!(!f.is_exchangeable(1e-12));
    }
}
