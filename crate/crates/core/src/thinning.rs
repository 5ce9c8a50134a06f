//! Non-exchangeable laws with prescribed marginal means built by thinning a
//! `CMMB_d(1/2, nu)` vector `J`: `I_m = K_m J_m` with independent
//! `K_m ~ Bernoulli(theta_m)` and `theta_m = 2 p_m`.

use serde::Serialize;

use crate::cmb::{CmbParams, MAX_D};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::joint::{check_dim, MultiAffinePmf};
use crate::orders::{cmmb, ExchBernoulliPmf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinningSpec {
    base_nu: f64,
    p: Vec<f64>,
    theta: Vec<f64>,
}

impl ThinningSpec {
    /// Targets means `p` (each in `[0, 1/2]`); the dimension is `p.len()`.
    pub fn new(base_nu: f64, p: Vec<f64>) -> Result<Self> {
        if !base_nu.is_finite() {
            return Err(Error::domain(format!("nu must be finite, got {base_nu}")));
        }
        if p.is_empty() || p.len() > MAX_D {
            return Err(Error::domain(format!("need 1 <= d <= {MAX_D}, got {}", p.len())));
        }
        if let Some(q) = p.iter().find(|q| !(0.0..=0.5).contains(*q)) {
            return Err(Error::domain(format!("target means must lie in [0, 1/2], got {q}")));
        }
        let theta = p.iter().map(|q| 2.0 * q).collect();
        Ok(Self { base_nu, p, theta })
    }

    pub fn base_nu(&self) -> f64 {
        self.base_nu
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// The exchangeable base vector `J ~ CMMB_d(1/2, nu)`.
    pub fn base(&self) -> ExchBernoulliPmf {
        cmmb(&CmbParams::new(self.d(), 0.5, self.base_nu).expect("validated in new"))
    }
}

/// Exact joint law of `(K_1 J_1, ..., K_d J_d)` for `d <= 20`.
pub fn thin_joint_pmf(spec: &ThinningSpec) -> Result<MultiAffinePmf> {
    thin_joint_pmf_with(Execution::default(), spec)
}

pub fn thin_joint_pmf_with(exec: Execution, spec: &ThinningSpec) -> Result<MultiAffinePmf> {
    check_dim(spec.d())?;
    let mut weights = spec.base().expand()?.weights().to_vec();
    for (m, &theta) in spec.theta().iter().enumerate() {
        thin_in_place(exec, &mut weights, m, theta);
    }
    Ok(MultiAffinePmf::from_raw(spec.d(), weights))
}

/// Moves mass `(1 - theta)` of every outcome with coordinate `m` set onto the
/// outcome with that coordinate cleared.
fn thin_in_place(exec: Execution, weights: &mut [f64], m: usize, theta: f64) {
    let half = 1usize << m;
    exec.for_each_chunk(weights, 2 * half, |_, block| {
        let (low, high) = block.split_at_mut(half);
        for (lo, hi) in low.iter_mut().zip(high.iter_mut()) {
            *lo += (1.0 - theta) * *hi;
            *hi *= theta;
        }
    });
}

/// Law of `base` after thinning coordinate `m` (one-based) by an independent
/// Bernoulli(`p_k`): the pgf with `z_m` replaced by `1 - p_k + p_k z_m`.
pub fn single_thin_pgf(base: &MultiAffinePmf, m: usize, p_k: f64) -> Result<MultiAffinePmf> {
    if m == 0 || m > base.d() {
        return Err(Error::domain(format!("coordinate {m} outside 1..={}", base.d())));
    }
    if !(0.0..=1.0).contains(&p_k) {
        return Err(Error::domain(format!("thinning probability {p_k} outside [0, 1]")));
    }
    let mut weights = base.weights().to_vec();
    thin_in_place(Execution::Sequential, &mut weights, m - 1, p_k);
    Ok(MultiAffinePmf::from_raw(base.d(), weights))
}

/// `P_J(1 - theta_1 + theta_1 z_1, ..., 1 - theta_d + theta_d z_d)`, using that
/// the exchangeable pgf is `sum_k f_W(k) e_k(y) / C(d, k)` with `e_k` the
/// elementary symmetric polynomials.
pub fn thinned_pgf_eval(spec: &ThinningSpec, z: &[f64]) -> Result<f64> {
    let d = spec.d();
    if z.len() != d {
        return Err(Error::domain(format!("expected {d} arguments, got {}", z.len())));
    }
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for (i, (zi, t)) in z.iter().zip(spec.theta()).enumerate() {
        let y = 1.0 - t + t * zi;
        for k in (1..=i + 1).rev() {
            e[k] += y * e[k - 1];
        }
    }
    let base = spec.base();
    Ok((0..=d).map(|k| base.outcome_prob(k) * e[k]).sum())
}
