//! Self-auditing verification suite.
//!
//! Every check takes the implementation under test as a plain function, runs
//! it on seeded random instances (plus hand fixtures where random instances
//! are too weak), and records the largest violation. `run_verification` runs
//! each check twice: once on the library and once on a deliberately broken
//! mutant from [`mutants`], which the check must flag.

use batchrisk_core::combinatorics::{binom, for_each_subset};
use batchrisk_core::complexity::{
    corollary4_bound, hypothesis_table, k_rademacher_exact, loss_table_from_evalsets,
    massart_bound, theorem3_bound, vc_bound, xi, xi_ratio, Constants, LossTable,
};
use batchrisk_core::losses::{batch_loss, loss_constants};
use batchrisk_core::risk::{
    empirical_k_risk_closed, empirical_k_risk_exact, empirical_k_risk_mc,
    error_variance_mse, expected_k_risk_exact, k_risk_from_variance, limit_k_risk, one_risk,
};
use batchrisk_core::rng::{child_seed, substream, Stream, RNG_ID};
use batchrisk_core::sum::NeumaierSum;
use batchrisk_core::{
    within_tolerance, DiscreteDistribution, EvalSet, LabeledPrediction, LossKind,
    Result as CoreResult,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counterexample::search_increasing;

pub type RiskFn = fn(&EvalSet, usize, LossKind) -> CoreResult<f64>;
pub type ExpectedFn = fn(&DiscreteDistribution, usize, LossKind) -> CoreResult<f64>;
pub type LimitFn = fn(&DiscreteDistribution, LossKind) -> CoreResult<f64>;
pub type MseRiskFn = fn(&EvalSet, usize) -> CoreResult<f64>;
pub type CardinalityBoundFn = fn(u64, usize, usize) -> CoreResult<f64>;
pub type BetaFn = fn(LossKind) -> CoreResult<f64>;
pub type RatioFn = fn(usize, usize) -> CoreResult<(f64, f64)>;
pub type XiFn = fn(f64, usize, usize) -> CoreResult<f64>;
pub type ComplexityFn = fn(&LossTable) -> CoreResult<f64>;
/// `(set, k, kind, draws, seed) -> (estimate, standard error)`.
pub type McFn = fn(&EvalSet, usize, LossKind, u64, u64) -> CoreResult<(f64, f64)>;
/// `(empirical risk, ln S, n, k, delta) -> total`.
pub type FiniteBoundFn = fn(f64, f64, usize, usize, f64) -> CoreResult<f64>;
/// `(empirical risk, rademacher, kind, n, delta) -> total`.
pub type LipschitzBoundFn = fn(f64, f64, LossKind, usize, f64) -> CoreResult<f64>;

const CLOSED_KINDS: [LossKind; 3] = [LossKind::Mse, LossKind::ZeroOne, LossKind::GeomCrossEntropy];
const MONOTONE_SLACK: f64 = 1e-12;
const UNBIASED_SE: f64 = 4.0;
const MC_SE: f64 = 5.0;
const MC_DRAWS: u64 = 400;
const MC_REQUIRED_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Property1ClosedForm,
    EmpiricalMonotonicity,
    ExpectedMonotonicity,
    Unbiasedness,
    LimitKToInfinity,
    VarianceDecomposition,
    MassartBound,
    BetaPeelOff,
    XiRatio,
    OverparametrizedXi,
    RademacherInvariance,
    McConsistency,
    BceNonMonotonicity,
    PermutationInvariance,
    BoundMonotonicity,
    BoundConsistency,
}

impl CheckName {
    pub const ALL: [CheckName; 16] = [
        CheckName::Property1ClosedForm,
        CheckName::EmpiricalMonotonicity,
        CheckName::ExpectedMonotonicity,
        CheckName::Unbiasedness,
        CheckName::LimitKToInfinity,
        CheckName::VarianceDecomposition,
        CheckName::MassartBound,
        CheckName::BetaPeelOff,
        CheckName::XiRatio,
        CheckName::OverparametrizedXi,
        CheckName::RademacherInvariance,
        CheckName::McConsistency,
        CheckName::BceNonMonotonicity,
        CheckName::PermutationInvariance,
        CheckName::BoundMonotonicity,
        CheckName::BoundConsistency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Property1ClosedForm => "property1_closed_form",
            CheckName::EmpiricalMonotonicity => "empirical_monotonicity",
            CheckName::ExpectedMonotonicity => "expected_monotonicity",
            CheckName::Unbiasedness => "unbiasedness",
            CheckName::LimitKToInfinity => "limit_k_to_infinity",
            CheckName::VarianceDecomposition => "variance_decomposition",
            CheckName::MassartBound => "massart_bound",
            CheckName::BetaPeelOff => "beta_peel_off",
            CheckName::XiRatio => "xi_ratio",
            CheckName::OverparametrizedXi => "overparametrized_xi",
            CheckName::RademacherInvariance => "rademacher_invariance",
            CheckName::McConsistency => "mc_consistency",
            CheckName::BceNonMonotonicity => "bce_non_monotonicity",
            CheckName::PermutationInvariance => "permutation_invariance",
            CheckName::BoundMonotonicity => "bound_monotonicity",
            CheckName::BoundConsistency => "bound_consistency",
        }
    }

    fn tolerance(self) -> &'static str {
        match self {
            CheckName::Property1ClosedForm
            | CheckName::VarianceDecomposition
            | CheckName::RademacherInvariance
            | CheckName::PermutationInvariance
            | CheckName::BoundConsistency => "max(1e-9 abs, 1e-9 rel)",
            CheckName::EmpiricalMonotonicity
            | CheckName::ExpectedMonotonicity
            | CheckName::LimitKToInfinity
            | CheckName::MassartBound
            | CheckName::BetaPeelOff
            | CheckName::XiRatio
            | CheckName::BoundMonotonicity => "1e-12",
            CheckName::Unbiasedness => "4 standard errors",
            CheckName::McConsistency => "5 standard errors in >= 99% of trials",
            CheckName::OverparametrizedXi => "strict",
            CheckName::BceNonMonotonicity => "increase > 1e-9 certified by enumeration",
        }
    }
}

/// Instance counts per check; zero skips the check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub property1_closed_form: u64,
    pub empirical_monotonicity: u64,
    pub expected_monotonicity: u64,
    /// Number of distributions; each one is sampled `unbiasedness_draws`
    /// times.
    pub unbiasedness: u64,
    pub unbiasedness_draws: u64,
    pub limit_k_to_infinity: u64,
    pub variance_decomposition: u64,
    pub massart_bound: u64,
    pub beta_peel_off: u64,
    /// Largest n; every `1 <= k <= n` pair is checked.
    pub xi_ratio: u64,
    /// Number of n values, starting at n = 6.
    pub overparametrized_xi: u64,
    pub rademacher_invariance: u64,
    pub mc_consistency: u64,
    /// Candidate sets examined by the counterexample search.
    pub bce_non_monotonicity: u64,
    pub permutation_invariance: u64,
    pub bound_monotonicity: u64,
    pub bound_consistency: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            property1_closed_form: 300,
            empirical_monotonicity: 300,
            expected_monotonicity: 200,
            unbiasedness: 6,
            unbiasedness_draws: 4000,
            limit_k_to_infinity: 200,
            variance_decomposition: 300,
            massart_bound: 300,
            beta_peel_off: 200,
            xi_ratio: 60,
            overparametrized_xi: 195,
            rademacher_invariance: 200,
            mc_consistency: 200,
            bce_non_monotonicity: 10_000,
            permutation_invariance: 200,
            bound_monotonicity: 500,
            bound_consistency: 500,
        }
    }
}

impl Budget {
    /// Every check gets `instances`; the unbiasedness draw count keeps its
    /// default.
    pub fn uniform(instances: u64) -> Self {
        let mut b = Self::default();
        for name in CheckName::ALL {
            *b.get_mut(name) = instances;
        }
        b
    }

    pub fn get(&self, name: CheckName) -> u64 {
        match name {
            CheckName::Property1ClosedForm => self.property1_closed_form,
            CheckName::EmpiricalMonotonicity => self.empirical_monotonicity,
            CheckName::ExpectedMonotonicity => self.expected_monotonicity,
            CheckName::Unbiasedness => self.unbiasedness,
            CheckName::LimitKToInfinity => self.limit_k_to_infinity,
            CheckName::VarianceDecomposition => self.variance_decomposition,
            CheckName::MassartBound => self.massart_bound,
            CheckName::BetaPeelOff => self.beta_peel_off,
            CheckName::XiRatio => self.xi_ratio,
            CheckName::OverparametrizedXi => self.overparametrized_xi,
            CheckName::RademacherInvariance => self.rademacher_invariance,
            CheckName::McConsistency => self.mc_consistency,
            CheckName::BceNonMonotonicity => self.bce_non_monotonicity,
            CheckName::PermutationInvariance => self.permutation_invariance,
            CheckName::BoundMonotonicity => self.bound_monotonicity,
            CheckName::BoundConsistency => self.bound_consistency,
        }
    }

    pub fn get_mut(&mut self, name: CheckName) -> &mut u64 {
        match name {
            CheckName::Property1ClosedForm => &mut self.property1_closed_form,
            CheckName::EmpiricalMonotonicity => &mut self.empirical_monotonicity,
            CheckName::ExpectedMonotonicity => &mut self.expected_monotonicity,
            CheckName::Unbiasedness => &mut self.unbiasedness,
            CheckName::LimitKToInfinity => &mut self.limit_k_to_infinity,
            CheckName::VarianceDecomposition => &mut self.variance_decomposition,
            CheckName::MassartBound => &mut self.massart_bound,
            CheckName::BetaPeelOff => &mut self.beta_peel_off,
            CheckName::XiRatio => &mut self.xi_ratio,
            CheckName::OverparametrizedXi => &mut self.overparametrized_xi,
            CheckName::RademacherInvariance => &mut self.rademacher_invariance,
            CheckName::McConsistency => &mut self.mc_consistency,
            CheckName::BceNonMonotonicity => &mut self.bce_non_monotonicity,
            CheckName::PermutationInvariance => &mut self.permutation_invariance,
            CheckName::BoundMonotonicity => &mut self.bound_monotonicity,
            CheckName::BoundConsistency => &mut self.bound_consistency,
        }
    }
}

/// Outcome of running one check against one implementation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub instances_run: u64,
    pub failures: u64,
    pub max_violation: f64,
    /// First failing instance, self-contained so it can be replayed.
    pub counterexample: Option<Value>,
}

impl Tally {
    pub fn failed(&self) -> bool {
        self.failures > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantAudit {
    pub mutant: String,
    pub instances_run: u64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub tolerance: String,
    pub instances_run: u64,
    pub max_violation: f64,
    pub passed: bool,
    pub skipped: bool,
    pub mutant: Option<MutantAudit>,
    pub counterexample: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub rng: String,
    pub seed: u64,
    pub budget: Budget,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Result of one instance: the measured violation, whether it breaks the
/// tolerance, and a replay payload when it does.
#[derive(Debug, Default)]
struct Finding {
    violation: f64,
    failed: bool,
    payload: Option<Value>,
}

impl Finding {
    fn update(&mut self, violation: f64, failed: bool, payload: impl FnOnce() -> Value) {
        if violation > self.violation || violation.is_nan() {
            self.violation = violation;
        }
        if failed && !self.failed {
            self.failed = true;
            self.payload = Some(payload());
        }
    }
}

fn run<F>(instances: u64, f: F) -> Tally
where
    F: Fn(u64) -> CoreResult<Finding> + Sync,
{
    let findings: Vec<Finding> = (0..instances)
        .into_par_iter()
        .map(|i| {
            f(i).unwrap_or_else(|e| Finding {
                violation: f64::INFINITY,
                failed: true,
                payload: Some(json!({ "instance": i, "error": e.to_string() })),
            })
        })
        .collect();
    let mut tally = Tally {
        instances_run: instances,
        failures: 0,
        max_violation: 0.0,
        counterexample: None,
    };
    for (i, f) in findings.into_iter().enumerate() {
        if f.violation > tally.max_violation || f.violation.is_nan() {
            tally.max_violation = f.violation;
        }
        if f.failed {
            tally.failures += 1;
            if tally.counterexample.is_none() {
                let mut payload = f.payload.unwrap_or(Value::Null);
                if let Value::Object(map) = &mut payload {
                    map.insert("instance".into(), json!(i));
                }
                tally.counterexample = Some(payload);
            }
        }
    }
    tally
}

fn rng_for(seed: u64, name: CheckName, instance: u64) -> ChaCha8Rng {
    let check_seed = child_seed(seed, Stream::Verification, name as u64);
    substream(check_seed, Stream::Verification, instance)
}

fn sample_item(rng: &mut ChaCha8Rng, kind: LossKind) -> LabeledPrediction {
    match kind {
        LossKind::Mse => {
            let y = if rng.random_bool(0.3) {
                f64::from(u8::from(rng.random_bool(0.5)))
            } else {
                rng.random()
            };
            LabeledPrediction::new(rng.random(), y)
        }
        LossKind::ZeroOne => {
            let sign = |b: bool| if b { 1.0 } else { -1.0 };
            LabeledPrediction::new(sign(rng.random_bool(0.5)), sign(rng.random_bool(0.5)))
        }
        _ => LabeledPrediction::new(
            rng.random_range(0.001..0.999),
            f64::from(u8::from(rng.random_bool(0.5))),
        ),
    }
}

/// Random evaluation set of size `n` in the sample domains of `kind`.
pub fn random_set(rng: &mut ChaCha8Rng, kind: LossKind, n: usize) -> EvalSet {
    EvalSet::new((0..n).map(|_| sample_item(rng, kind)).collect()).expect("n >= 1")
}

/// Random distribution with 1..=`max_atoms` atoms in the domains of `kind`.
pub fn random_distribution(rng: &mut ChaCha8Rng, kind: LossKind, max_atoms: usize) -> DiscreteDistribution {
    let m = rng.random_range(1..=max_atoms);
    let atoms: Vec<LabeledPrediction> = (0..m).map(|_| sample_item(rng, kind)).collect();
    let weights: Vec<f64> = (0..m).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // put the rounding residue on the last atom so the sum is 1 to an ulp
    let head: f64 = probs[..m - 1].iter().sum();
    probs[m - 1] = 1.0 - head;
    DiscreteDistribution::new(atoms.into_iter().zip(probs).collect()).expect("valid probabilities")
}

/// `(n, k)` pairs with `C(n, k) <= max_cols`, n <= 16.
fn small_shapes(max_cols: u128) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=16usize {
        for k in 1..=n {
            if binom(n as u64, k as u64).map_or(false, |c| c <= max_cols) {
                out.push((n, k));
            }
        }
    }
    out
}

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        rng.random_range(-1.0..=1.0)
                    } else if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect()
        })
        .collect()
}

fn set_json(set: &EvalSet) -> Value {
    serde_json::to_value(set).unwrap_or(Value::Null)
}

pub fn check_property1(seed: u64, instances: u64, closed: RiskFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::Property1ClosedForm, i);
        let kind = CLOSED_KINDS[(i % 3) as usize];
        let n = rng.random_range(2..=12);
        let set = random_set(&mut rng, kind, n);
        let mut f = Finding::default();
        for k in 1..=n {
            let exact = empirical_k_risk_exact(&set, k, kind)?.value;
            let value = closed(&set, k, kind)?;
            f.update((value - exact).abs(), !within_tolerance(value, exact), || {
                json!({ "kind": kind, "k": k, "set": set_json(&set), "closed": value, "exact": exact })
            });
        }
        Ok(f)
    })
}

fn monotone_finding(curve: &[f64], payload: impl Fn(usize) -> Value) -> Finding {
    let mut f = Finding::default();
    for (i, w) in curve.windows(2).enumerate() {
        let rise = (w[1] - w[0]).max(0.0);
        f.update(rise, rise > MONOTONE_SLACK, || payload(i + 1));
    }
    f
}

/// Exact empirical k-risk is non-increasing in k for the doubly convex
/// losses (Mse, Kl).
pub fn check_empirical_monotonicity(seed: u64, instances: u64, risk: RiskFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::EmpiricalMonotonicity, i);
        let kind = if i % 2 == 0 { LossKind::Mse } else { LossKind::Kl };
        let n = rng.random_range(1..=10);
        let set = random_set(&mut rng, kind, n);
        let curve = (1..=n).map(|k| risk(&set, k, kind)).collect::<CoreResult<Vec<_>>>()?;
        Ok(monotone_finding(&curve, |k| {
            json!({ "kind": kind, "k": k, "set": set_json(&set), "curve": curve })
        }))
    })
}

/// Expected k-risk is non-increasing in k = 1..4 for Mse and Kl.
pub fn check_expected_monotonicity(seed: u64, instances: u64, risk: ExpectedFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::ExpectedMonotonicity, i);
        let kind = if i % 2 == 0 { LossKind::Mse } else { LossKind::Kl };
        let dist = random_distribution(&mut rng, kind, 5);
        let curve = (1..=4).map(|k| risk(&dist, k, kind)).collect::<CoreResult<Vec<_>>>()?;
        Ok(monotone_finding(&curve, |k| {
            json!({ "kind": kind, "k": k, "distribution": dist, "curve": curve })
        }))
    })
}

/// The empirical k-risk of an i.i.d. sample of size 5 is unbiased for the
/// expected k-risk (Mse, k in {2, 3}): the sample mean over `draws` samples
/// lies within 4 standard errors. Instance 0 is a two-atom distribution with
/// unit error variance.
pub fn check_unbiasedness(seed: u64, instances: u64, draws: u64, estimator: MseRiskFn) -> Tally {
    const N: usize = 5;
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::Unbiasedness, i);
        let dist = if i == 0 {
            DiscreteDistribution::new(vec![
                (LabeledPrediction::new(0.0, 1.0), 0.5),
                (LabeledPrediction::new(1.0, 0.0), 0.5),
            ])?
        } else {
            random_distribution(&mut rng, LossKind::Mse, 4)
        };
        let k = 2 + (i % 2) as usize;
        let expected = expected_k_risk_exact(&dist, k, LossKind::Mse)?.value;
        let instance_seed = rng.random::<u64>();
        let values = (0..draws)
            .map(|d| {
                let mut r = substream(instance_seed, Stream::Verification, d);
                estimator(&dist.sample(&mut r, N)?, k)
            })
            .collect::<CoreResult<Vec<_>>>()?;
        let (mean, sd) = batchrisk_core::sum::mean_and_sample_std(&values);
        let se = sd / (draws as f64).sqrt();
        let diff = (mean - expected).abs();
        let mut f = Finding::default();
        let z = if diff <= 1e-12 { 0.0 } else { diff / se };
        f.update(z, diff > UNBIASED_SE * se + 1e-12, || {
            json!({ "k": k, "n": N, "draws": draws, "sample_seed": instance_seed,
                    "distribution": dist, "mean": mean, "std_error": se, "expected": expected })
        });
        Ok(f)
    })
}

/// Mse: `r_k = L + (r_1 - L) / k` with `L` the loss at the means, so the
/// approach is monotone; Kl: `r_k >= L`.
pub fn check_limit(seed: u64, instances: u64, limit: LimitFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::LimitKToInfinity, i);
        let mut f = Finding::default();
        let dist = random_distribution(&mut rng, LossKind::Mse, 5);
        let l = limit(&dist, LossKind::Mse)?;
        let curve = (1..=6)
            .map(|k| expected_k_risk_exact(&dist, k, LossKind::Mse).map(|r| r.value))
            .collect::<CoreResult<Vec<_>>>()?;
        for (j, &r) in curve.iter().enumerate() {
            let k = j + 1;
            let predicted = l + (curve[0] - l) / k as f64;
            f.update((r - predicted).abs(), !within_tolerance(r, predicted), || {
                json!({ "kind": LossKind::Mse, "k": k, "distribution": dist, "limit": l, "curve": curve })
            });
            if j > 0 {
                let rise = ((r - l).abs() - (curve[j - 1] - l).abs()).max(0.0);
                f.update(rise, rise > MONOTONE_SLACK, || {
                    json!({ "kind": LossKind::Mse, "k": k, "distribution": dist, "limit": l, "curve": curve })
                });
            }
        }
        let dist = random_distribution(&mut rng, LossKind::Kl, 5);
        let l = limit(&dist, LossKind::Kl)?;
        for k in 1..=4 {
            let r = expected_k_risk_exact(&dist, k, LossKind::Kl)?.value;
            let below = (l - r).max(0.0);
            f.update(below, below > MONOTONE_SLACK, || {
                json!({ "kind": LossKind::Kl, "k": k, "distribution": dist, "limit": l, "risk": r })
            });
        }
        Ok(f)
    })
}

/// `r_1 - (1 - 1/k) V` reproduces the exact Mse k-risk.
pub fn check_variance_decomposition(seed: u64, instances: u64, reconstruct: MseRiskFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::VarianceDecomposition, i);
        let n = rng.random_range(2..=12);
        let set = random_set(&mut rng, LossKind::Mse, n);
        let mut f = Finding::default();
        for k in 1..=n {
            let exact = empirical_k_risk_exact(&set, k, LossKind::Mse)?.value;
            let value = reconstruct(&set, k)?;
            f.update((value - exact).abs(), !within_tolerance(value, exact), || {
                json!({ "k": k, "set": set_json(&set), "reconstructed": value, "exact": exact })
            });
        }
        Ok(f)
    })
}

/// Exact k-Rademacher complexity of a table never exceeds the finite-class
/// bound for its row count. Instance 0: two opposite constant rows over 15
/// columns.
pub fn check_massart(seed: u64, instances: u64, bound: CardinalityBoundFn) -> Tally {
    let shapes = small_shapes(16);
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::MassartBound, i);
        let (n, k, rows) = if i == 0 {
            (6, 2, vec![vec![1.0; 15], vec![-1.0; 15]])
        } else {
            let (n, k) = shapes[rng.random_range(0..shapes.len())];
            let cols = binom(n as u64, k as u64)? as usize;
            let r = rng.random_range(1..=8);
            (n, k, random_rows(&mut rng, r, cols))
        };
        let table = LossTable::from_rows(&rows, n, k)?;
        let r = k_rademacher_exact(&table)?;
        let b = bound(rows.len() as u64, n, k)?;
        let mut f = Finding::default();
        let excess = (r - b).max(0.0);
        f.update(excess, r > b + MONOTONE_SLACK, || {
            json!({ "n": n, "k": k, "rows": rows, "rademacher": r, "bound": b })
        });
        Ok(f)
    })
}

/// The loss table's complexity is at most beta times the complexity of the
/// mean-prediction table (ZeroOne beta = 1/2, Mse beta = 2). Instances 0
/// and 1 are fixtures on which the factor is attained or nearly attained.
pub fn check_beta_peel_off(seed: u64, instances: u64, beta: BetaFn) -> Tally {
    let shapes = small_shapes(16);
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::BetaPeelOff, i);
        let (kind, hyps, labels, k) = match i {
            0 => (
                LossKind::ZeroOne,
                vec![vec![1.0; 4], vec![-1.0; 4]],
                vec![1.0; 4],
                2,
            ),
            1 => (LossKind::Mse, vec![vec![1.0; 4], vec![0.9; 4]], vec![0.0; 4], 2),
            _ => {
                let kind = if i % 2 == 0 { LossKind::ZeroOne } else { LossKind::Mse };
                let (n, k) = shapes[rng.random_range(0..shapes.len())];
                let rows = rng.random_range(1..=6);
                let hyps: Vec<Vec<f64>> = (0..rows)
                    .map(|_| (0..n).map(|_| sample_item(&mut rng, kind).prediction).collect())
                    .collect();
                let labels = (0..n).map(|_| sample_item(&mut rng, kind).label).collect();
                (kind, hyps, labels, k)
            }
        };
        let losses = loss_table_from_evalsets(&hyps, &labels, k, kind)?;
        let means = hypothesis_table(&hyps, k)?;
        let lhs = k_rademacher_exact(&losses)?;
        let rhs = beta(kind)? * k_rademacher_exact(&means)?;
        let mut f = Finding::default();
        f.update((lhs - rhs).max(0.0), lhs > rhs + MONOTONE_SLACK, || {
            json!({ "kind": kind, "k": k, "hypotheses": hyps, "labels": labels,
                    "loss_complexity": lhs, "scaled_hypothesis_complexity": rhs })
        });
        Ok(f)
    })
}

/// `sqrt(n / C(n,k)) <= k^(k/2) / n^((k-1)/2)` for all `1 <= k <= n <= max_n`.
pub fn check_xi_ratio(max_n: u64, ratio: RatioFn) -> Tally {
    run(max_n, |i| {
        let n = i as usize + 1;
        let mut f = Finding::default();
        for k in 1..=n {
            let (r, upper) = ratio(n, k)?;
            let excess = (r - upper).max(0.0);
            f.update(excess, r > upper * (1.0 + MONOTONE_SLACK), || {
                json!({ "n": n, "k": k, "ratio": r, "upper": upper })
            });
        }
        Ok(f)
    })
}

/// With all `2^n` labelings, the k = 2 class term is below 1 for every n in
/// `[6, 5 + count]` and the k = 1 term is never below 1.
pub fn check_overparametrized_xi(count: u64, xi_fn: XiFn) -> Tally {
    run(count, |i| {
        let n = i as usize + 6;
        let ln_s = n as f64 * std::f64::consts::LN_2;
        let two = xi_fn(ln_s, n, 2)?;
        let one = xi_fn(ln_s, n, 1)?;
        let mut f = Finding::default();
        f.update((two - 1.0).max(0.0), two >= 1.0, || json!({ "n": n, "k": 2, "xi": two }));
        f.update((1.0 - one).max(0.0), one < 1.0, || json!({ "n": n, "k": 1, "xi": one }));
        Ok(f)
    })
}

/// Complexity is unchanged by duplicating rows and by permuting rows and
/// columns.
pub fn check_rademacher_invariance(seed: u64, instances: u64, complexity: ComplexityFn) -> Tally {
    let shapes = small_shapes(16);
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::RademacherInvariance, i);
        let (n, k) = shapes[rng.random_range(0..shapes.len())];
        let cols = binom(n as u64, k as u64)? as usize;
        let r = rng.random_range(1..=6);
        let rows = random_rows(&mut rng, r, cols);
        let base = complexity(&LossTable::from_rows(&rows, n, k)?)?;

        let mut duplicated = rows.clone();
        for _ in 0..rng.random_range(1..=3) {
            duplicated.push(rows[rng.random_range(0..r)].clone());
        }
        let mut perm: Vec<usize> = (0..cols).collect();
        perm.shuffle(&mut rng);
        let mut permuted: Vec<Vec<f64>> = rows.iter().map(|row| perm.iter().map(|&j| row[j]).collect()).collect();
        permuted.shuffle(&mut rng);

        let mut f = Finding::default();
        for (label, variant) in [("duplicated_rows", &duplicated), ("permuted", &permuted)] {
            let v = complexity(&LossTable::from_rows(variant, n, k)?)?;
            f.update((v - base).abs(), !within_tolerance(v, base), || {
                json!({ "n": n, "k": k, "transform": label, "rows": rows,
                        "transformed_rows": variant, "original": base, "transformed": v })
            });
        }
        Ok(f)
    })
}

/// Fraction of trials where the Monte-Carlo estimate lies within 5 standard
/// errors of the exact value; `failures` counts misses and the check passes
/// when at least 99% of trials hit.
pub fn check_mc_consistency(seed: u64, instances: u64, mc: McFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::McConsistency, i);
        let kind = LossKind::ALL[(i % 5) as usize];
        let n = rng.random_range(3..=10);
        let k = rng.random_range(1..=n);
        let set = random_set(&mut rng, kind, n);
        let mc_seed = rng.random::<u64>();
        let exact = empirical_k_risk_exact(&set, k, kind)?.value;
        let (value, se) = mc(&set, k, kind, MC_DRAWS, mc_seed)?;
        let diff = (value - exact).abs();
        let mut f = Finding::default();
        let z = if diff <= 1e-12 { 0.0 } else { diff / se };
        f.update(z, diff > MC_SE * se + 1e-12, || {
            json!({ "kind": kind, "k": k, "set": set_json(&set), "draws": MC_DRAWS,
                    "seed": mc_seed, "estimate": value, "std_error": se, "exact": exact })
        });
        Ok(f)
    })
}

fn mc_passes(t: &Tally) -> bool {
    t.instances_run == 0
        || (t.instances_run - t.failures) as f64 >= MC_REQUIRED_FRACTION * t.instances_run as f64
}

/// Searches for a certified BCE increase; a single found witness passes.
pub fn check_bce_non_monotonicity(seed: u64, budget: u64, kind: LossKind) -> Tally {
    let search_seed = child_seed(seed, Stream::Verification, CheckName::BceNonMonotonicity as u64);
    match search_increasing(search_seed, budget, kind) {
        Ok(report) => Tally {
            instances_run: report.attempts,
            failures: u64::from(!report.found),
            max_violation: report.witness.as_ref().map_or(0.0, |w| w.increase),
            counterexample: (!report.found).then(|| {
                json!({ "kind": kind, "seed": search_seed, "budget": budget,
                        "reason": "no certified increase found" })
            }),
        },
        Err(e) => Tally {
            instances_run: 0,
            failures: 1,
            max_violation: f64::INFINITY,
            counterexample: Some(json!({ "error": e.to_string() })),
        },
    }
}

/// Risks agree between a set and a random permutation of it, for every k
/// and every loss.
pub fn check_permutation_invariance(seed: u64, instances: u64, risk: RiskFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::PermutationInvariance, i);
        let kind = LossKind::ALL[(i % 5) as usize];
        let n = rng.random_range(2..=10);
        let set = random_set(&mut rng, kind, n);
        let mut items = set.items().to_vec();
        items.shuffle(&mut rng);
        let shuffled = EvalSet::new(items)?;
        let mut f = Finding::default();
        for k in 1..=n {
            let a = risk(&set, k, kind)?;
            let b = risk(&shuffled, k, kind)?;
            f.update((a - b).abs(), !within_tolerance(a, b), || {
                json!({ "kind": kind, "k": k, "set": set_json(&set),
                        "permuted": set_json(&shuffled), "original_risk": a, "permuted_risk": b })
            });
        }
        Ok(f)
    })
}

/// Increasing the empirical risk, the complexity input or `1/delta` never
/// lowers any bound. `finite` stands in for the shattering-coefficient
/// bound; the Lipschitz and VC calculators are always the library ones.
pub fn check_bound_monotonicity(seed: u64, instances: u64, finite: FiniteBoundFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::BoundMonotonicity, i);
        let n = rng.random_range(2..=500);
        let k = rng.random_range(1..=n.min(10));
        let emp = rng.random_range(0.0..1.0);
        let complexity = rng.random_range(0.0..2.0);
        let ln_s = rng.random_range(0.0..(n as f64));
        let vc = rng.random_range(1..=10u32);
        let delta = rng.random_range(0.001..0.5);
        let bump = rng.random_range(1e-6..0.5);
        let smaller_delta = delta * rng.random_range(0.05..0.99);
        let kind = if i % 2 == 0 { LossKind::ZeroOne } else { LossKind::Mse };
        let constants = if i % 3 == 0 { Constants::Stated } else { Constants::Strict(kind) };

        let t3 = |e, r, d| theorem3_bound(e, r, kind, n, d).map(|b| b.total);
        let c4 = |e, s, d| finite(e, s, n, k, d);
        let vcb = |e, v, d| vc_bound(e, v, n, k, d, constants).map(|b| b.total);

        let cases: [(&str, f64, f64); 9] = [
            ("theorem3_risk", t3(emp, complexity, delta)?, t3(emp + bump, complexity, delta)?),
            ("theorem3_rademacher", t3(emp, complexity, delta)?, t3(emp, complexity + bump, delta)?),
            ("theorem3_delta", t3(emp, complexity, delta)?, t3(emp, complexity, smaller_delta)?),
            ("finite_risk", c4(emp, ln_s, delta)?, c4(emp + bump, ln_s, delta)?),
            ("finite_ln_shatter", c4(emp, ln_s, delta)?, c4(emp, ln_s + bump, delta)?),
            ("finite_delta", c4(emp, ln_s, delta)?, c4(emp, ln_s, smaller_delta)?),
            ("vc_risk", vcb(emp, vc, delta)?, vcb(emp + bump, vc, delta)?),
            ("vc_dimension", vcb(emp, vc, delta)?, vcb(emp, vc + 1, delta)?),
            ("vc_delta", vcb(emp, vc, delta)?, vcb(emp, vc, smaller_delta)?),
        ];
        let mut f = Finding::default();
        for (name, before, after) in cases {
            let drop = (before - after).max(0.0);
            f.update(drop, drop > MONOTONE_SLACK, || {
                json!({ "argument": name, "n": n, "k": k, "empirical_risk": emp,
                        "complexity": complexity, "ln_shatter": ln_s, "vc_dimension": vc,
                        "delta": delta, "bump": bump, "smaller_delta": smaller_delta,
                        "before": before, "after": after })
            });
        }
        Ok(f)
    })
}

/// The Lipschitz bound with its complexity term replaced by `beta * xi`
/// equals the strict finite-class bound, and for ZeroOne also the stated
/// one.
pub fn check_bound_consistency(seed: u64, instances: u64, lipschitz: LipschitzBoundFn) -> Tally {
    run(instances, |i| {
        let mut rng = rng_for(seed, CheckName::BoundConsistency, i);
        let n = rng.random_range(1..=300);
        let k = rng.random_range(1..=n.min(12));
        let emp = rng.random_range(0.0..1.0);
        let ln_s = rng.random_range(0.0..(2.0 * n as f64));
        let delta = rng.random_range(0.001..0.5);
        let x = xi(ln_s, n, k)?;
        let mut f = Finding::default();
        for kind in [LossKind::ZeroOne, LossKind::Mse] {
            let beta = loss_constants(kind)?.beta;
            let lhs = lipschitz(emp, beta * x, kind, n, delta)?;
            let mut targets = vec![("strict", corollary4_bound(emp, ln_s, n, k, delta, Constants::Strict(kind))?.total)];
            if kind == LossKind::ZeroOne {
                targets.push(("stated", corollary4_bound(emp, ln_s, n, k, delta, Constants::Stated)?.total));
            }
            for (form, rhs) in targets {
                f.update((lhs - rhs).abs(), !within_tolerance(lhs, rhs), || {
                    json!({ "kind": kind, "form": form, "n": n, "k": k, "empirical_risk": emp,
                            "ln_shatter": ln_s, "delta": delta, "lipschitz_total": lhs, "finite_total": rhs })
                });
            }
        }
        Ok(f)
    })
}

/// Library implementations in the shapes the checks expect.
pub mod subjects {
    use super::*;

    pub fn closed(set: &EvalSet, k: usize, kind: LossKind) -> CoreResult<f64> {
        empirical_k_risk_closed(set, k, kind).map(|r| r.value)
    }

    pub fn exact(set: &EvalSet, k: usize, kind: LossKind) -> CoreResult<f64> {
        empirical_k_risk_exact(set, k, kind).map(|r| r.value)
    }

    pub fn expected(dist: &DiscreteDistribution, k: usize, kind: LossKind) -> CoreResult<f64> {
        expected_k_risk_exact(dist, k, kind).map(|r| r.value)
    }

    pub fn exact_mse(set: &EvalSet, k: usize) -> CoreResult<f64> {
        exact(set, k, LossKind::Mse)
    }

    pub fn variance_reconstruction(set: &EvalSet, k: usize) -> CoreResult<f64> {
        Ok(k_risk_from_variance(one_risk(set, LossKind::Mse)?, error_variance_mse(set)?, k))
    }

    pub fn beta(kind: LossKind) -> CoreResult<f64> {
        loss_constants(kind).map(|c| c.beta)
    }

    pub fn ratio(n: usize, k: usize) -> CoreResult<(f64, f64)> {
        xi_ratio(n, k).map(|r| (r.ratio, r.upper))
    }

    pub fn mc(set: &EvalSet, k: usize, kind: LossKind, draws: u64, seed: u64) -> CoreResult<(f64, f64)> {
        let r = empirical_k_risk_mc(set, k, kind, draws, seed)?;
        Ok((r.value, r.std_error.unwrap_or(0.0)))
    }

    pub fn finite_bound(emp: f64, ln_s: f64, n: usize, k: usize, delta: f64) -> CoreResult<f64> {
        corollary4_bound(emp, ln_s, n, k, delta, Constants::Stated).map(|b| b.total)
    }

    pub fn lipschitz_bound(emp: f64, rad: f64, kind: LossKind, n: usize, delta: f64) -> CoreResult<f64> {
        theorem3_bound(emp, rad, kind, n, delta).map(|b| b.total)
    }
}

/// Deliberately wrong implementations used to audit the checks.
pub mod mutants {
    use super::*;

    /// Interpolation weight `k/n` instead of `n(k-1)/(k(n-1))`.
    pub fn closed_k_over_n(set: &EvalSet, k: usize, kind: LossKind) -> CoreResult<f64> {
        let a = k as f64 / set.n() as f64;
        let r1 = empirical_k_risk_exact(set, 1, kind)?.value;
        let rn = empirical_k_risk_exact(set, set.n(), kind)?.value;
        Ok((1.0 - a) * r1 + a * rn)
    }

    /// Exact risk read at `n + 1 - k`, which runs the curve backwards.
    pub fn reversed_k(set: &EvalSet, k: usize, kind: LossKind) -> CoreResult<f64> {
        empirical_k_risk_exact(set, set.n() + 1 - k, kind).map(|r| r.value)
    }

    /// Expected risk read at `5 - k`.
    pub fn expected_reversed_k(dist: &DiscreteDistribution, k: usize, kind: LossKind) -> CoreResult<f64> {
        expected_k_risk_exact(dist, 5 - k.min(4), kind).map(|r| r.value)
    }

    /// Batches drawn with replacement from the sample (`n^k` normalization).
    pub fn with_replacement_mse(set: &EvalSet, k: usize) -> CoreResult<f64> {
        expected_k_risk_exact(&DiscreteDistribution::empirical(set), k, LossKind::Mse).map(|r| r.value)
    }

    /// Mean pointwise loss in place of the loss at the means.
    pub fn limit_as_one_risk(dist: &DiscreteDistribution, kind: LossKind) -> CoreResult<f64> {
        expected_k_risk_exact(dist, 1, kind).map(|r| r.value)
    }

    /// Variance scaled by `(n-1)/n`.
    pub fn variance_scaled(set: &EvalSet, k: usize) -> CoreResult<f64> {
        let n = set.n() as f64;
        let v = error_variance_mse(set)? * (n - 1.0) / n;
        Ok(k_risk_from_variance(one_risk(set, LossKind::Mse)?, v, k))
    }

    /// `sqrt(2 ln |A|) / C(n,k)` instead of `sqrt(2 ln |A| / C(n,k))`.
    pub fn massart_wrong_scaling(cardinality: u64, n: usize, k: usize) -> CoreResult<f64> {
        let c = binom(n as u64, k as u64)? as f64;
        Ok((2.0 * (cardinality as f64).ln()).sqrt() / c)
    }

    pub fn beta_halved(kind: LossKind) -> CoreResult<f64> {
        loss_constants(kind).map(|c| c.beta / 2.0)
    }

    /// Ratio upper estimate without the `k^(k/2)` factor.
    pub fn ratio_missing_factor(n: usize, k: usize) -> CoreResult<(f64, f64)> {
        let r = xi_ratio(n, k)?;
        Ok((r.ratio, (n as f64).powf(-((k as f64) - 1.0) / 2.0)))
    }

    /// Class term without the factor 2 under the root.
    pub fn xi_missing_two(ln_s: f64, n: usize, k: usize) -> CoreResult<f64> {
        Ok(xi(ln_s, n, k)? / std::f64::consts::SQRT_2)
    }

    /// Complexity divided by the number of rows.
    pub fn complexity_per_row(table: &LossTable) -> CoreResult<f64> {
        Ok(k_rademacher_exact(table)? / table.rows() as f64)
    }

    /// Standard error computed as `sd / draws`.
    pub fn mc_wrong_std_error(set: &EvalSet, k: usize, kind: LossKind, draws: u64, seed: u64) -> CoreResult<(f64, f64)> {
        let r = empirical_k_risk_mc(set, k, kind, draws, seed)?;
        Ok((r.value, r.std_error.unwrap_or(0.0) / (draws as f64).sqrt()))
    }

    /// Subsets containing the first item weighted twice.
    pub fn first_item_weighted(set: &EvalSet, k: usize, kind: LossKind) -> CoreResult<f64> {
        let (p, y) = (set.predictions(), set.labels());
        let mut num = NeumaierSum::new();
        let mut den = NeumaierSum::new();
        let mut failure = None;
        for_each_subset(set.n(), k, |s| {
            let w = if s.contains(&0) { 2.0 } else { 1.0 };
            let sp: Vec<f64> = s.iter().map(|&i| p[i]).collect();
            let sy: Vec<f64> = s.iter().map(|&i| y[i]).collect();
            match batch_loss(kind, &sp, &sy) {
                Ok(l) => {
                    num.add(w * l);
                    den.add(w);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(num.total() / den.total()),
        }
    }

    /// `r + xi - psi`: the confidence term enters with the wrong sign.
    pub fn finite_bound_sign_error(emp: f64, ln_s: f64, n: usize, k: usize, delta: f64) -> CoreResult<f64> {
        let b = corollary4_bound(emp, ln_s, n, k, delta, Constants::Stated)?;
        Ok(emp + b.xi - b.psi)
    }

    /// Confidence term multiplied by an extra `sqrt(2)`.
    pub fn lipschitz_extra_root_two(emp: f64, rad: f64, kind: LossKind, n: usize, delta: f64) -> CoreResult<f64> {
        let b = theorem3_bound(emp, rad, kind, n, delta)?;
        Ok(emp + 2.0 * rad + std::f64::consts::SQRT_2 * b.c * b.psi)
    }
}

/// Mutant instances are capped so the audit stays cheap next to the real
/// run.
const MUTANT_CAP: u64 = 200;

fn run_check(name: CheckName, seed: u64, budget: &Budget, instances: u64, mutant: bool) -> (Tally, &'static str) {
    use mutants as m;
    use subjects as s;
    let draws = budget.unbiasedness_draws;
    match name {
        CheckName::Property1ClosedForm => {
            let f = if mutant { m::closed_k_over_n } else { s::closed };
            (check_property1(seed, instances, f), "interpolation weight k/n")
        }
        CheckName::EmpiricalMonotonicity => {
            let f = if mutant { m::reversed_k } else { s::exact };
            (check_empirical_monotonicity(seed, instances, f), "risk curve read backwards in k")
        }
        CheckName::ExpectedMonotonicity => {
            let f = if mutant { m::expected_reversed_k } else { s::expected };
            (check_expected_monotonicity(seed, instances, f), "expected risk read backwards in k")
        }
        CheckName::Unbiasedness => {
            let f = if mutant { m::with_replacement_mse } else { s::exact_mse };
            (check_unbiasedness(seed, instances, draws, f), "with-replacement (n^k) empirical risk")
        }
        CheckName::LimitKToInfinity => {
            let f = if mutant { m::limit_as_one_risk } else { limit_k_risk };
            (check_limit(seed, instances, f), "limit taken as the mean pointwise loss")
        }
        CheckName::VarianceDecomposition => {
            let f = if mutant { m::variance_scaled } else { s::variance_reconstruction };
            (check_variance_decomposition(seed, instances, f), "variance scaled by (n-1)/n")
        }
        CheckName::MassartBound => {
            let f = if mutant { m::massart_wrong_scaling } else { massart_bound };
            (check_massart(seed, instances, f), "sqrt(2 ln|A|) / C(n,k)")
        }
        CheckName::BetaPeelOff => {
            let f = if mutant { m::beta_halved } else { s::beta };
            (check_beta_peel_off(seed, instances, f), "beta halved")
        }
        CheckName::XiRatio => {
            let f = if mutant { m::ratio_missing_factor } else { s::ratio };
            (check_xi_ratio(instances, f), "upper estimate without k^(k/2)")
        }
        CheckName::OverparametrizedXi => {
            let f = if mutant { m::xi_missing_two } else { xi };
            (check_overparametrized_xi(instances, f), "xi without the factor 2")
        }
        CheckName::RademacherInvariance => {
            let f = if mutant { m::complexity_per_row } else { k_rademacher_exact };
            (check_rademacher_invariance(seed, instances, f), "complexity divided by row count")
        }
        CheckName::McConsistency => {
            let f = if mutant { m::mc_wrong_std_error } else { s::mc };
            (check_mc_consistency(seed, instances, f), "standard error sd/draws")
        }
        CheckName::BceNonMonotonicity => {
            let kind = if mutant { LossKind::Kl } else { LossKind::Bce };
            (check_bce_non_monotonicity(seed, instances, kind), "search run on the doubly convex KL loss")
        }
        CheckName::PermutationInvariance => {
            let f = if mutant { m::first_item_weighted } else { s::exact };
            (check_permutation_invariance(seed, instances, f), "subsets with the first item weighted twice")
        }
        CheckName::BoundMonotonicity => {
            let f = if mutant { m::finite_bound_sign_error } else { s::finite_bound };
            (check_bound_monotonicity(seed, instances, f), "confidence term subtracted")
        }
        CheckName::BoundConsistency => {
            let f = if mutant { m::lipschitz_extra_root_two } else { s::lipschitz_bound };
            (check_bound_consistency(seed, instances, f), "confidence term times sqrt(2)")
        }
    }
}

fn tally_passes(name: CheckName, t: &Tally) -> bool {
    match name {
        CheckName::McConsistency => mc_passes(t),
        _ => !t.failed(),
    }
}

/// Runs one check and its mutant audit.
pub fn run_check_audited(name: CheckName, seed: u64, budget: &Budget) -> CheckResult {
    let instances = budget.get(name);
    if instances == 0 {
        return CheckResult {
            name,
            tolerance: name.tolerance().into(),
            instances_run: 0,
            max_violation: 0.0,
            passed: true,
            skipped: true,
            mutant: None,
            counterexample: None,
        };
    }
    let (real, _) = run_check(name, seed, budget, instances, false);
    let mutant_instances = match name {
        // the mutant search must exhaust its budget to be flagged
        CheckName::BceNonMonotonicity => instances.min(2000),
        CheckName::XiRatio | CheckName::OverparametrizedXi => instances,
        _ => instances.min(MUTANT_CAP),
    };
    let (bad, description) = run_check(name, seed, budget, mutant_instances, true);
    let flagged = !tally_passes(name, &bad);
    let real_ok = tally_passes(name, &real);
    let counterexample = if real_ok && !flagged {
        Some(json!({ "mutant_not_flagged": description }))
    } else if real_ok {
        None
    } else {
        real.counterexample.clone()
    };
    CheckResult {
        name,
        tolerance: name.tolerance().into(),
        instances_run: real.instances_run,
        max_violation: real.max_violation,
        passed: real_ok && flagged,
        skipped: false,
        mutant: Some(MutantAudit {
            mutant: description.into(),
            instances_run: bad.instances_run,
            flagged,
        }),
        counterexample,
    }
}

/// Runs every check; deterministic for a given seed and budget.
pub fn run_verification(seed: u64, budget: &Budget) -> VerificationReport {
    let checks: Vec<CheckResult> = CheckName::ALL
        .par_iter()
        .map(|&name| run_check_audited(name, seed, budget))
        .collect();
    VerificationReport {
        version: crate::VERSION.into(),
        rng: RNG_ID.into(),
        seed,
        budget: budget.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
