//! Risk of batched predictors.
//!
//! A batched predictor is judged on the loss between the mean prediction and
//! the mean label of a batch of `k` samples instead of sample by sample. This
//! crate computes that *k-risk* exactly (subset enumeration), through the
//! closed-form interpolation between the 1-risk and the n-risk, and by
//! Monte-Carlo sampling; it estimates k-Rademacher complexities and evaluates
//! the associated generalization bounds.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and the experiment harness live in the `batchrisk` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod complexity;
mod error;
pub mod hypotheses;
pub mod losses;
pub mod risk;
pub mod rng;
pub mod sum;

pub use error::{Error, Result};
pub use losses::{LossConstants, LossKind};
pub use risk::{DiscreteDistribution, EvalSet, LabeledPrediction, Method, RiskEstimate};

/// Upper limit on the number of batch evaluations performed by an exact
/// enumeration (`C(n,k)` subsets or `atoms^k` multisets).
pub const ENUMERATION_CAP: u128 = 2_000_000;

/// Default tolerance for identity checks: `max(1e-9 abs, 1e-9 rel)`.
pub fn within_tolerance(a: f64, b: f64) -> bool {
    let tol = 1e-9_f64.max(1e-9 * a.abs().max(b.abs()));
    (a - b).abs() <= tol
}
