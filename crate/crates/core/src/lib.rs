//! Conway-Maxwell binomial (CMB) and Conway-Maxwell multivariate Bernoulli
//! (CMMB) distributions.
//!
//! The crate covers:
//!
//! - pmf, moments and generating polynomials of `CMB_d(r, nu)` ([`cmb`]);
//! - calibration of `r` so that the marginal mean stays fixed ([`calibrate`]);
//! - hyperbolicity and strong Rayleigh checks, exact (Sturm) and numeric
//!   (companion matrix) ([`stability`]);
//! - convex, supermodular and negative-association checks ([`orders`]);
//! - the polytope decomposition of symmetric sum laws ([`geometry`]);
//! - non-exchangeable laws built by independent thinning ([`thinning`]);
//! - seeded samplers ([`sampling`]).
//!
//! Loops over trials, subsets and base outcomes run on rayon when the
//! `parallel` feature is on (default); see [`Execution`].

pub mod calibrate;
pub mod cmb;
mod error;
mod exec;
pub mod geometry;
pub mod joint;
pub mod orders;
pub mod poly;
pub mod sampling;
pub mod stability;
pub mod thinning;

pub use calibrate::{chain_table, solve_r, ChainRow};
pub use cmb::{CmbParams, DiscretePmf};
pub use error::{Error, Result};
pub use exec::Execution;
pub use joint::MultiAffinePmf;
pub use orders::ExchBernoulliPmf;
pub use poly::UnivariatePoly;
pub use stability::{HyperbolicityVerdict, Method};
pub use thinning::ThinningSpec;

/// Absolute tolerance used when validating that probability vectors sum to one.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Largest dimension for which joint (2^d) tables are materialized.
pub const MAX_JOINT_DIM: usize = 20;
