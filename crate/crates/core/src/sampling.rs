//! Seeded samplers for `W`, the exchangeable vector and thinned vectors.
//!
//! Draws are produced in shards of [`SHARD`] rows. Shard `s` uses a ChaCha8
//! generator seeded with `seed` on stream `s`, so a batch depends only on
//! `(law, n, seed)` and not on the execution mode or thread count.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cmb::{self, CmbParams, DiscretePmf};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::thinning::ThinningSpec;

/// Rows per generator stream.
pub const SHARD: usize = 1 << 16;

/// Largest batch, in cells (`n` for `W`, `n d` for vectors), held in memory.
pub const MAX_CELLS: usize = 1 << 31;

/// Row-major `n x d` matrix of 0/1 draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryMatrix {
    n: usize,
    d: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks(self.d)
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().map(|&x| x as usize).sum())
            .collect()
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.d];
        for r in self.rows() {
            for (c, &x) in counts.iter_mut().zip(r) {
                *c += x as usize;
            }
        }
        counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    /// Sample covariance matrix (divisor `n`).
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        let d = self.d;
        let mut both = vec![0usize; d * d];
        for r in self.rows() {
            for a in 0..d {
                if r[a] == 1 {
                    for b in 0..d {
                        both[a * d + b] += r[b] as usize;
                    }
                }
            }
        }
        let means = self.column_means();
        let n = self.n as f64;
        (0..d)
            .map(|a| (0..d).map(|b| both[a * d + b] as f64 / n - means[a] * means[b]).collect())
            .collect()
    }
}

fn check_n(n: usize, width: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    let cells = n.saturating_mul(width);
    if cells > MAX_CELLS {
        return Err(Error::Capacity {
            what: "sample batch cells",
            max: MAX_CELLS,
            got: cells,
        });
    }
    Ok(())
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Fills `out` (rows of `width` entries) shard by shard, calling `draw` once per row.
fn fill_sharded<T, F>(exec: Execution, out: &mut [T], width: usize, seed: u64, draw: F)
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, &mut [T]) + Sync + Send,
{
    exec.for_each_chunk(out, SHARD * width, |shard, block| {
        let mut rng = shard_rng(seed, shard);
        for row in block.chunks_mut(width) {
            draw(&mut rng, row);
        }
    });
}

/// Inverse-CDF lookup table for a pmf on `{0, ..., d}`.
struct InverseCdf {
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(pmf: &DiscretePmf) -> Self {
        let mut cdf = pmf.cdf();
        // the last atom absorbs rounding in the running sum
        *cdf.last_mut().unwrap() = f64::INFINITY;
        Self { cdf }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u)
    }
}

/// `n` i.i.d. draws from an arbitrary pmf on `{0, ..., d}`.
pub fn sample_pmf(pmf: &DiscretePmf, n: usize, seed: u64) -> Result<Vec<usize>> {
    sample_pmf_with(Execution::default(), pmf, n, seed)
}

pub fn sample_pmf_with(
    exec: Execution,
    pmf: &DiscretePmf,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    check_n(n, 1)?;
    let table = InverseCdf::new(pmf);
    let mut out = vec![0usize; n];
    fill_sharded(exec, &mut out, 1, seed, |rng, row| row[0] = table.draw(rng));
    Ok(out)
}

/// `n` i.i.d. draws of `W ~ CMB_d(r, nu)`.
pub fn sample_w(params: &CmbParams, n: usize, seed: u64) -> Result<Vec<usize>> {
    sample_pmf(&cmb::pmf(params), n, seed)
}

pub fn sample_w_with(exec: Execution, params: &CmbParams, n: usize, seed: u64) -> Result<Vec<usize>> {
    sample_pmf_with(exec, &cmb::pmf(params), n, seed)
}

fn place_ones(rng: &mut ChaCha8Rng, row: &mut [u8], k: usize) {
    row.fill(0);
    for j in index::sample(rng, row.len(), k) {
        row[j] = 1;
    }
}

/// Draws of the exchangeable vector: `k ~ W`, then ones at a uniform `k`-subset.
pub fn sample_exchangeable(params: &CmbParams, n: usize, seed: u64) -> Result<BinaryMatrix> {
    sample_exchangeable_with(Execution::default(), params, n, seed)
}

pub fn sample_exchangeable_with(
    exec: Execution,
    params: &CmbParams,
    n: usize,
    seed: u64,
) -> Result<BinaryMatrix> {
    let d = params.d();
    check_n(n, d)?;
    let table = InverseCdf::new(&cmb::pmf(params));
    let mut data = vec![0u8; n * d];
    fill_sharded(exec, &mut data, d, seed, |rng, row| {
        let k = table.draw(rng);
        place_ones(rng, row, k);
    });
    Ok(BinaryMatrix { n, d, data })
}

/// Draws of `(K_1 J_1, ..., K_d J_d)`: an exchangeable `CMMB_d(1/2, nu)` row
/// times independent Bernoulli(`theta_m`) masks.
pub fn sample_thinned(spec: &ThinningSpec, n: usize, seed: u64) -> Result<BinaryMatrix> {
    sample_thinned_with(Execution::default(), spec, n, seed)
}

pub fn sample_thinned_with(
    exec: Execution,
    spec: &ThinningSpec,
    n: usize,
    seed: u64,
) -> Result<BinaryMatrix> {
    let d = spec.d();
    check_n(n, d)?;
    let table = InverseCdf::new(spec.base().sum_pmf());
    let theta = spec.theta();
    let mut data = vec![0u8; n * d];
    fill_sharded(exec, &mut data, d, seed, |rng, row| {
        let k = table.draw(rng);
        place_ones(rng, row, k);
        for (x, t) in row.iter_mut().zip(theta) {
            let keep = rng.random::<f64>() < *t;
            *x &= keep as u8;
        }
    });
    Ok(BinaryMatrix { n, d, data })
}
