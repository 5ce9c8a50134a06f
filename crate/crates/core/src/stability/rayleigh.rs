//! Strong Rayleigh checks for multi-affine pgfs.
//!
//! A multi-affine `P` with real coefficients is real stable iff for every
//! pair `j1 < j2` and every real `x`,
//! `dP/dz_j1 (x) dP/dz_j2 (x) >= d2P/dz_j1 dz_j2 (x) P(x)`.
//! Writing `P = A + B z_j1 + C z_j2 + D z_j1 z_j2` with `A..D` free of the pair,
//! the difference of the two sides is `B C - A D`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::joint::MultiAffinePmf;

/// Relative slack on the closed-form `d = 3` inequalities.
const D3_TOL: f64 = 1e-13;
/// Relative slack below which a Rayleigh difference counts as a violation.
const FALSIFY_REL_TOL: f64 = 1e-9;
/// Fixed shard count; keeps results independent of the thread pool.
const SHARDS: usize = 64;

/// Decides the strong Rayleigh property of a trivariate Bernoulli law.
///
/// For each pair `(a, b)` with remaining coordinate `c`, `B C - A D` is the
/// quadratic `q2 x^2 + q1 x + q0` in `x = x_c`; it is nonnegative on the
/// whole line iff `q2 >= 0`, `q0 >= 0` and `q1^2 <= 4 q2 q0`.
pub fn sr_check_multiaffine_d3(pmf: &MultiAffinePmf) -> Result<bool> {
    if pmf.d() != 3 {
        return Err(Error::domain(format!(
            "closed-form check needs d = 3, got d = {}",
            pmf.d()
        )));
    }
    Ok(d3_quadratics(pmf).iter().all(|&[q0, q1, q2]| {
        q2 >= -D3_TOL && q0 >= -D3_TOL && 4.0 * q2 * q0 - q1 * q1 >= -D3_TOL * D3_TOL
    }))
}

/// Coefficients `[q0, q1, q2]` of `B C - A D` for the pairs (1,2), (1,3), (2,3).
pub fn d3_quadratics(pmf: &MultiAffinePmf) -> [[f64; 3]; 3] {
    let f = |mask: usize| pmf.prob(mask);
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    pairs.map(|(a, b, c)| {
        let (ea, eb, ec) = (1 << a, 1 << b, 1 << c);
        let q2 = f(ea | ec) * f(eb | ec) - f(ec) * f(7);
        let q1 = f(ea) * f(eb | ec) + f(eb) * f(ea | ec) - f(0) * f(7) - f(ec) * f(ea | eb);
        let q0 = f(ea) * f(eb) - f(0) * f(ea | eb);
        [q0, q1, q2]
    })
}

/// A real point where the Rayleigh inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayleighWitness {
    pub x: Vec<f64>,
    /// One-based coordinates of the failing pair, `j1 < j2`.
    pub j1: usize,
    pub j2: usize,
    /// `dP/dz_j1 dP/dz_j2 - d2P/dz_j1dz_j2 P` at `x`; negative.
    pub margin: f64,
}

/// `(A, B, C, D)` of the pair `(j1, j2)` (zero-based) at `x`.
pub fn pair_coefficients(pmf: &MultiAffinePmf, x: &[f64], j1: usize, j2: usize) -> [f64; 4] {
    let monomials = monomials(x);
    pair_from_monomials(pmf, &monomials, j1, j2).0
}

fn monomials(x: &[f64]) -> Vec<f64> {
    let mut m = vec![1.0; 1 << x.len()];
    for (j, xj) in x.iter().enumerate() {
        let half = 1 << j;
        for i in 0..half {
            m[i + half] = m[i] * xj;
        }
    }
    m
}

/// The coefficients and the same sums taken over absolute values of the terms.
fn pair_from_monomials(
    pmf: &MultiAffinePmf,
    monomials: &[f64],
    j1: usize,
    j2: usize,
) -> ([f64; 4], [f64; 4]) {
    let (b1, b2) = (1usize << j1, 1usize << j2);
    let mut acc = [0.0; 4];
    let mut abs = [0.0; 4];
    for (mask, w) in pmf.weights().iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let slot = (mask & b1 != 0) as usize + 2 * (mask & b2 != 0) as usize;
        let term = w * monomials[mask & !(b1 | b2)];
        acc[slot] += term;
        abs[slot] += term.abs();
    }
    (acc, abs)
}

fn check_point(pmf: &MultiAffinePmf, x: &[f64]) -> Option<RayleighWitness> {
    let m = monomials(x);
    let d = pmf.d();
    for j1 in 0..d {
        for j2 in j1 + 1..d {
            let ([a, b, c, dd], [sa, sb, sc, sd]) = pair_from_monomials(pmf, &m, j1, j2);
            let margin = b * c - a * dd;
            // bounds the rounding error of both products, cancellation included
            let scale = sb * sc + sa * sd;
            if margin < -FALSIFY_REL_TOL * scale {
                return Some(RayleighWitness {
                    x: x.to_vec(),
                    j1: j1 + 1,
                    j2: j2 + 1,
                    margin,
                });
            }
        }
    }
    None
}

/// Draws one coordinate: uniform on `[-3, 3]` or `+-1/u` with `u` uniform on `(0, 1]`, each with probability 1/2.
fn draw_coordinate(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<bool>() {
        rng.random_range(-3.0..=3.0)
    } else {
        let u: f64 = 1.0 - rng.random::<f64>();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign / u
    }
}

/// Searches `trials` random real points for a violation of the Rayleigh
/// inequality; returns the first one found, or `None`.
///
/// The trials are split over 64 shards; shard `s` uses ChaCha8 seeded with
/// `rng_seed` on stream `s`. The result depends only on the arguments.
pub fn sr_falsify_random(
    pmf: &MultiAffinePmf,
    trials: usize,
    rng_seed: u64,
) -> Result<Option<RayleighWitness>> {
    sr_falsify_random_with(Execution::default(), pmf, trials, rng_seed)
}

pub fn sr_falsify_random_with(
    exec: Execution,
    pmf: &MultiAffinePmf,
    trials: usize,
    rng_seed: u64,
) -> Result<Option<RayleighWitness>> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let d = pmf.d();
    Ok(exec.find_map_first(SHARDS, |shard| {
        let begin = shard * trials / SHARDS;
        let end = (shard + 1) * trials / SHARDS;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(shard as u64);
        let mut x = vec![0.0; d];
        (begin..end).find_map(|_| {
            x.iter_mut().for_each(|xi| *xi = draw_coordinate(&mut rng));
            check_point(pmf, &x)
        })
    }))
}
