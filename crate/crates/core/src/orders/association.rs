//! Exhaustive negative-association check for Bernoulli vectors with `d <= 5`.
//!
//! Every increasing function on a finite distributive lattice is a positive
//! combination of indicators of up-sets plus a constant, and
//! `E[h1 h2] - E[h1] E[h2]` is bilinear in `(h1, h2)`. It is therefore
//! enough to test indicator functions of nontrivial up-sets on each block.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::joint::{key_from_mask, MultiAffinePmf};

pub const MAX_NA_DIM: usize = 5;
const NA_TOL: f64 = 1e-12;

/// A pair of disjoint blocks and increasing indicators with positive covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaWitness {
    /// One-based coordinates of the first block, ascending.
    pub block1: Vec<usize>,
    pub block2: Vec<usize>,
    /// Outcomes of each block (binary keys over the block's coordinates, in
    /// block order) on which the indicator equals one.
    pub h1: Vec<String>,
    pub h2: Vec<String>,
    /// `E[h1 h2] - E[h1] E[h2]`, positive.
    pub covariance: f64,
}

/// Nontrivial up-sets of `{0,1}^n` for `n <= 4`, each as a bit set over the `2^n` points.
fn upsets(n: usize) -> &'static [u16] {
    static CACHE: OnceLock<Vec<Vec<u16>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| (0..=4).map(enumerate_upsets).collect());
    &all[n]
}

fn enumerate_upsets(n: usize) -> Vec<u16> {
    let points = 1usize << n;
    let full: u32 = (1u32 << points) - 1;
    (1..full)
        .map(|s| s as u16)
        .filter(|&set| {
            (0..points).all(|x| {
                set >> x & 1 == 0 || (0..n).all(|j| set >> (x | 1 << j) & 1 == 1)
            })
        })
        .collect()
}

fn coords(mask: usize, d: usize) -> Vec<usize> {
    (0..d).filter(|j| mask >> j & 1 == 1).collect()
}

/// Projection of the outcome `mask` onto the coordinates `block`, packed into low bits.
fn project(mask: usize, block: &[usize]) -> usize {
    block
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &j)| acc | (mask >> j & 1) << i)
}

fn points_of(set: u16, n: usize) -> Vec<String> {
    (0..1usize << n)
        .filter(|x| set >> x & 1 == 1)
        .map(|x| key_from_mask(x, n))
        .collect()
}

/// Checks `E[h1 h2] <= E[h1] E[h2] + 1e-12` over all ordered pairs of disjoint
/// nonempty blocks and all nontrivial increasing indicators on them.
pub fn na_check_exhaustive(pmf: &MultiAffinePmf) -> Result<Option<NaWitness>> {
    na_check_exhaustive_with(Execution::default(), pmf)
}

pub fn na_check_exhaustive_with(
    exec: Execution,
    pmf: &MultiAffinePmf,
) -> Result<Option<NaWitness>> {
    let d = pmf.d();
    if d > MAX_NA_DIM {
        return Err(Error::Capacity {
            what: "exhaustive negative-association check",
            max: MAX_NA_DIM,
            got: d,
        });
    }
    let full = (1usize << d) - 1;
    let pairs: Vec<(usize, usize)> = (1..=full)
        .flat_map(|a| {
            (1..=full)
                .filter(move |b| a & b == 0)
                .map(move |b| (a, b))
        })
        .collect();
    Ok(exec.find_map_first(pairs.len(), |i| {
        let (a, b) = pairs[i];
        check_blocks(pmf, &coords(a, d), &coords(b, d))
    }))
}

fn check_blocks(pmf: &MultiAffinePmf, block1: &[usize], block2: &[usize]) -> Option<NaWitness> {
    let (n1, n2) = (block1.len(), block2.len());
    let (p1, p2) = (1usize << n1, 1usize << n2);
    // joint law of the two block projections
    let mut q = vec![0.0; p1 * p2];
    for (mask, w) in pmf.weights().iter().enumerate() {
        q[project(mask, block1) * p2 + project(mask, block2)] += w;
    }
    let marg2: Vec<f64> = (0..p2).map(|y| (0..p1).map(|x| q[x * p2 + y]).sum()).collect();
    for &u1 in upsets(n1) {
        // column sums of q restricted to rows in u1
        let restricted: Vec<f64> = (0..p2)
            .map(|y| (0..p1).filter(|x| u1 >> x & 1 == 1).map(|x| q[x * p2 + y]).sum())
            .collect();
        let e1: f64 = restricted.iter().sum();
        for &u2 in upsets(n2) {
            let in2 = |y: &usize| u2 >> y & 1 == 1;
            let e12: f64 = (0..p2).filter(in2).map(|y| restricted[y]).sum();
            let e2: f64 = (0..p2).filter(in2).map(|y| marg2[y]).sum();
            let cov = e12 - e1 * e2;
            if cov > NA_TOL {
                return Some(NaWitness {
                    block1: block1.iter().map(|j| j + 1).collect(),
                    block2: block2.iter().map(|j| j + 1).collect(),
                    h1: points_of(u1, n1),
                    h2: points_of(u2, n2),
                    covariance: cov,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upset_counts_are_dedekind_minus_two() {
        // Dedekind numbers 3, 6, 20, 168 include the empty and full sets
        let counts: Vec<usize> = (1..=4).map(|n| upsets(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 18, 166]);
    }

    #[test]
    fn projection_packs_bits() {
        assert_eq!(project(0b10110, &[1, 2, 4]), 0b111);
        assert_eq!(project(0b10110, &[0, 3]), 0b00);
    }

    #[test]
    fn independent_is_na() {
        let f = MultiAffinePmf::independent(&[0.2, 0.5, 0.7, 0.9]).unwrap();
        assert!(na_check_exhaustive(&f).unwrap().is_none());
    }

    #[test]
    fn upper_frechet_witness_is_first_pair() {
        let f = MultiAffinePmf::upper_frechet(3, 0.5).unwrap();
        let w = na_check_exhaustive(&f).unwrap().expect("witness");
        assert_eq!((w.block1.as_slice(), w.block2.as_slice()), (&[1][..], &[2][..]));
        assert_eq!((w.h1.as_slice(), w.h2.as_slice()), (&["1".to_string()][..], &["1".to_string()][..]));
        assert!((w.covariance - 0.25).abs() < 1e-15);
    }

    #[test]
    fn capacity() {
        let f = MultiAffinePmf::independent(&[0.5; 6]).unwrap();
        assert!(matches!(na_check_exhaustive(&f), Err(Error::Capacity { .. })));
    }

    #[test]
    fn modes_agree() {
        let f = MultiAffinePmf::new(
            4,
            (0..16).map(|m| if m == 3 || m == 12 { 0.3 } else { 0.4 / 14.0 }).collect(),
        )
        .unwrap();
        assert_eq!(
            na_check_exhaustive_with(Execution::Sequential, &f).unwrap(),
            na_check_exhaustive_with(Execution::Parallel, &f).unwrap()
        );
    }
}
