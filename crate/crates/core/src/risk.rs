//! Empirical and expected k-risk.
//!
//! The empirical k-risk of an [`EvalSet`] of size `n` averages the batch loss
//! over all `C(n,k)` subsets of size `k`, drawn *without* replacement. The
//! expected k-risk of a [`DiscreteDistribution`] averages over `k` i.i.d.
//! draws, i.e. *with* replacement. The empirical estimator is unbiased for
//! the expected one when the set itself is an i.i.d. sample.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, for_each_multiset, for_each_subset, multinomial};
use crate::losses::{loss_from_means, BatchTerms, LossKind};
use crate::rng::{substream, Stream};
use crate::sum::{self, NeumaierSum};
use crate::{Error, Result, ENUMERATION_CAP};

/// One model output paired with its ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledPrediction {
    pub prediction: f64,
    pub label: f64,
}

impl LabeledPrediction {
    pub fn new(prediction: f64, label: f64) -> Self {
        Self { prediction, label }
    }
}

/// Ordered, nonempty collection of (prediction, label) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LabeledPrediction>", into = "Vec<LabeledPrediction>")]
pub struct EvalSet {
    items: Vec<LabeledPrediction>,
}

impl EvalSet {
    pub fn new(items: Vec<LabeledPrediction>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::argument("an evaluation set needs at least one item"));
        }
        Ok(Self { items })
    }

    pub fn from_slices(predictions: &[f64], labels: &[f64]) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::LengthMismatch {
                predictions: predictions.len(),
                labels: labels.len(),
            });
        }
        Self::new(
            predictions
                .iter()
                .zip(labels)
                .map(|(&p, &y)| LabeledPrediction::new(p, y))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[LabeledPrediction] {
        &self.items
    }

    pub fn predictions(&self) -> Vec<f64> {
        self.items.iter().map(|z| z.prediction).collect()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.items.iter().map(|z| z.label).collect()
    }

    /// Checks every item against the domains of `kind`.
    pub fn validate(&self, kind: LossKind) -> Result<()> {
        self.terms(kind).map(|_| ())
    }

    pub(crate) fn terms(&self, kind: LossKind) -> Result<Vec<BatchTerms>> {
        self.items
            .iter()
            .map(|z| {
                kind.check_sample_label(z.label)?;
                BatchTerms::new(kind, z.prediction, z.label)
            })
            .collect()
    }

    /// Same items in reverse order.
    pub fn reversed(&self) -> EvalSet {
        let mut items = self.items.clone();
        items.reverse();
        EvalSet { items }
    }
}

impl TryFrom<Vec<LabeledPrediction>> for EvalSet {
    type Error = Error;

    fn try_from(items: Vec<LabeledPrediction>) -> Result<Self> {
        EvalSet::new(items)
    }
}

impl From<EvalSet> for Vec<LabeledPrediction> {
    fn from(set: EvalSet) -> Self {
        set.items
    }
}

/// Finite-support distribution over (prediction, label) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<(LabeledPrediction, f64)>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(LabeledPrediction, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::argument("a distribution needs at least one atom"));
        }
        if let Some((_, p)) = atoms.iter().find(|(_, p)| !(*p > 0.0)) {
            return Err(Error::argument(alloc::format!(
                "atom probabilities must be positive, got {p}"
            )));
        }
        let total = sum::sum(atoms.iter().map(|(_, p)| *p));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::argument(alloc::format!(
                "atom probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Point mass on a single pair.
    pub fn point(z: LabeledPrediction) -> Self {
        Self {
            atoms: alloc::vec![(z, 1.0)],
        }
    }

    /// Uniform distribution over the items of a set (the empirical
    /// distribution).
    pub fn empirical(set: &EvalSet) -> Self {
        let w = 1.0 / set.n() as f64;
        Self {
            atoms: set.items().iter().map(|&z| (z, w)).collect(),
        }
    }

    pub fn atoms(&self) -> &[(LabeledPrediction, f64)] {
        &self.atoms
    }

    /// Draws `n` i.i.d. items by inverse-CDF sampling.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R, n: usize) -> Result<EvalSet> {
        let mut cdf = Vec::with_capacity(self.atoms.len());
        let mut acc = NeumaierSum::new();
        for (_, p) in &self.atoms {
            acc.add(*p);
            cdf.push(acc.total());
        }
        let items = (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc.total();
                let idx = cdf.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
                self.atoms[idx].0
            })
            .collect();
        EvalSet::new(items)
    }

    /// Mean prediction and mean label under the distribution.
    pub fn means(&self) -> (f64, f64) {
        let p = sum::sum(self.atoms.iter().map(|(z, w)| w * z.prediction));
        let y = sum::sum(self.atoms.iter().map(|(z, w)| w * z.label));
        (p, y)
    }
}

/// How a risk value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "closed" | "closed_form" => Ok(Method::ClosedForm),
            "mc" | "monte_carlo" => Ok(Method::MonteCarlo),
            _ => Err(Error::argument(alloc::format!(
                "unknown method '{s}' (expected exact, closed or mc)"
            ))),
        }
    }
}

/// Method plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Exact,
    ClosedForm,
    MonteCarlo { draws: u64, seed: u64 },
}

impl Estimator {
    pub fn method(&self) -> Method {
        match self {
            Estimator::Exact => Method::Exact,
            Estimator::ClosedForm => Method::ClosedForm,
            Estimator::MonteCarlo { .. } => Method::MonteCarlo,
        }
    }

    pub fn estimate(&self, set: &EvalSet, k: usize, kind: LossKind) -> Result<RiskEstimate> {
        match *self {
            Estimator::Exact => empirical_k_risk_exact(set, k, kind),
            Estimator::ClosedForm => empirical_k_risk_closed(set, k, kind),
            Estimator::MonteCarlo { draws, seed } => {
                empirical_k_risk_mc(set, k, kind, draws, seed)
            }
        }
    }
}

/// A k-risk value together with how it was computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    pub k: usize,
    pub kind: LossKind,
    pub method: Method,
    /// Standard error of the mean; Monte-Carlo only.
    pub std_error: Option<f64>,
    pub subsets_evaluated: u64,
    /// Seed of the subset sampler; Monte-Carlo only.
    pub seed: Option<u64>,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::argument(alloc::format!(
            "batch size k = {k} must lie in [1, {n}]"
        )));
    }
    Ok(())
}

/// Weight `a_{k,n} = n(k-1) / (k(n-1))` of the n-risk in the closed form.
pub fn interpolation_coefficient(k: usize, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::argument(alloc::format!(
            "interpolation needs n >= 2, got n = {n}"
        )));
    }
    check_k(k, n)?;
    let (k, n) = (k as f64, n as f64);
    Ok(n * (k - 1.0) / (k * (n - 1.0)))
}

fn mean_terms(terms: &[BatchTerms]) -> BatchTerms {
    let mut acc = [NeumaierSum::new(); 4];
    for t in terms {
        acc[0].add(t.prediction);
        acc[1].add(t.label);
        acc[2].add(t.log_prediction);
        acc[3].add(t.log_one_minus);
    }
    let n = terms.len() as f64;
    BatchTerms {
        prediction: acc[0].total() / n,
        label: acc[1].total() / n,
        log_prediction: acc[2].total() / n,
        log_one_minus: acc[3].total() / n,
    }
}

/// Plain per-sample empirical risk `r_1`.
pub fn one_risk(set: &EvalSet, kind: LossKind) -> Result<f64> {
    let terms = set.terms(kind)?;
    Ok(sum::sum(terms.iter().map(|t| loss_from_means(kind, t))) / terms.len() as f64)
}

/// Loss of the whole set taken as one batch, `r_n`.
pub fn full_batch_risk(set: &EvalSet, kind: LossKind) -> Result<f64> {
    let terms = set.terms(kind)?;
    Ok(loss_from_means(kind, &mean_terms(&terms)))
}

#[inline]
pub(crate) fn subset_loss(kind: LossKind, terms: &[BatchTerms], subset: &[usize]) -> f64 {
    let mut acc = BatchTerms::default();
    for &i in subset {
        acc.accumulate(&terms[i]);
    }
    loss_from_means(kind, &acc.scaled(1.0 / subset.len() as f64))
}

fn enumeration_size(n: usize, k: usize) -> Result<u128> {
    let count = binom(n as u64, k as u64).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::Budget {
            required: count,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(count)
}

/// Empirical k-risk by enumerating every k-subset.
pub fn empirical_k_risk_exact(set: &EvalSet, k: usize, kind: LossKind) -> Result<RiskEstimate> {
    check_k(k, set.n())?;
    let count = enumeration_size(set.n(), k)?;
    let terms = set.terms(kind)?;
    let mut acc = NeumaierSum::new();
    for_each_subset(set.n(), k, |s| acc.add(subset_loss(kind, &terms, s)));
    debug_assert_eq!(acc.count() as u128, count);
    Ok(RiskEstimate {
        value: acc.mean(),
        k,
        kind,
        method: Method::Exact,
        std_error: None,
        subsets_evaluated: count as u64,
        seed: None,
    })
}

/// Empirical k-risk as `(1 - a) r_1 + a r_n`; O(n) for every k.
pub fn empirical_k_risk_closed(set: &EvalSet, k: usize, kind: LossKind) -> Result<RiskEstimate> {
    if !kind.closed_form_eligible() {
        return Err(Error::UnsupportedLoss {
            kind,
            operation: "the closed-form k-risk",
        });
    }
    check_k(k, set.n())?;
    let r1 = one_risk(set, kind)?;
    let value = if set.n() == 1 {
        r1
    } else {
        let a = interpolation_coefficient(k, set.n())?;
        let rn = full_batch_risk(set, kind)?;
        (1.0 - a) * r1 + a * rn
    };
    Ok(RiskEstimate {
        value,
        k,
        kind,
        method: Method::ClosedForm,
        std_error: None,
        subsets_evaluated: 0,
        seed: None,
    })
}

/// Uniform k-subset of `0..n` by a partial Fisher-Yates shuffle over a
/// virtual identity permutation; O(k log k) regardless of `n`.
pub fn sample_subset<R: RngCore + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut swapped: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out.sort_unstable();
    out
}

/// Empirical k-risk estimated from `draws` uniformly sampled k-subsets.
///
/// Draw `d` uses its own random stream, so the estimate depends only on
/// `(set, k, kind, draws, seed)`.
pub fn empirical_k_risk_mc(
    set: &EvalSet,
    k: usize,
    kind: LossKind,
    draws: u64,
    seed: u64,
) -> Result<RiskEstimate> {
    if draws < 2 {
        return Err(Error::argument(alloc::format!(
            "Monte-Carlo estimation needs at least 2 draws, got {draws}"
        )));
    }
    check_k(k, set.n())?;
    let terms = set.terms(kind)?;
    let losses: Vec<f64> = (0..draws)
        .map(|d| {
            let mut rng = substream(seed, Stream::SubsetSampling, d);
            let subset = sample_subset(&mut rng, set.n(), k);
            subset_loss(kind, &terms, &subset)
        })
        .collect();
    let (value, std) = sum::mean_and_sample_std(&losses);
    Ok(RiskEstimate {
        value,
        k,
        kind,
        method: Method::MonteCarlo,
        std_error: Some(std / libm::sqrt(draws as f64)),
        subsets_evaluated: draws,
        seed: Some(seed),
    })
}

/// One estimate per requested k.
pub fn risk_curve(
    set: &EvalSet,
    ks: &[usize],
    kind: LossKind,
    estimator: &Estimator,
) -> Result<Vec<RiskEstimate>> {
    ks.iter()
        .enumerate()
        .map(|(index, &k)| {
            estimator
                .estimate(set, k, kind)
                .map_err(|e| Error::AtIndex {
                    index,
                    k,
                    source: alloc::boxed::Box::new(e),
                })
        })
        .collect()
}

/// Sample variance (divisor `n - 1`) of the errors `prediction - label`,
/// obtained as `n/(n-1) (r_1 - r_n)` under the squared loss.
pub fn error_variance_mse(set: &EvalSet) -> Result<f64> {
    let n = set.n();
    if n < 2 {
        return Err(Error::argument(alloc::format!(
            "error variance needs n >= 2, got n = {n}"
        )));
    }
    let r1 = one_risk(set, LossKind::Mse)?;
    let rn = full_batch_risk(set, LossKind::Mse)?;
    Ok(n as f64 / (n as f64 - 1.0) * (r1 - rn))
}

/// Squared-loss k-risk rebuilt from the 1-risk and the error variance:
/// `r_1 - (1 - 1/k) V`.
pub fn k_risk_from_variance(r1: f64, variance: f64, k: usize) -> f64 {
    r1 - (1.0 - 1.0 / k as f64) * variance
}

/// Expected k-risk under i.i.d. draws, by enumerating the k-multisets of
/// atoms with their multinomial weights.
pub fn expected_k_risk_exact(
    dist: &DiscreteDistribution,
    k: usize,
    kind: LossKind,
) -> Result<RiskEstimate> {
    if k == 0 {
        return Err(Error::argument("batch size k must be positive"));
    }
    let m = dist.atoms.len();
    let required = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if required > ENUMERATION_CAP {
        return Err(Error::Budget {
            required,
            cap: ENUMERATION_CAP,
        });
    }
    let terms: Vec<BatchTerms> = dist
        .atoms
        .iter()
        .map(|(z, _)| {
            kind.check_sample_label(z.label)?;
            BatchTerms::new(kind, z.prediction, z.label)
        })
        .collect::<Result<_>>()?;
    let probs: Vec<f64> = dist.atoms.iter().map(|(_, p)| *p).collect();
    let mut acc = NeumaierSum::new();
    let mut evaluated = 0u64;
    let mut failure = None;
    for_each_multiset(m, k, |counts| {
        let coeff = match multinomial(counts) {
            Ok(c) => c as f64,
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        let mut weight = coeff;
        let mut means = BatchTerms::default();
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                weight *= libm::pow(probs[i], c as f64);
                means.accumulate(&terms[i].scaled(c as f64));
            }
        }
        acc.add(weight * loss_from_means(kind, &means.scaled(1.0 / k as f64)));
        evaluated += 1;
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RiskEstimate {
        value: acc.total(),
        k,
        kind,
        method: Method::Exact,
        std_error: None,
        subsets_evaluated: evaluated,
        seed: None,
    })
}

/// Limit of the expected k-risk as `k -> infinity`: the loss between the
/// expected prediction and the expected label.
pub fn limit_k_risk(dist: &DiscreteDistribution, kind: LossKind) -> Result<f64> {
    let mut acc = [NeumaierSum::new(); 4];
    for (z, p) in &dist.atoms {
        let t = BatchTerms::new(kind, z.prediction, z.label)?;
        acc[0].add(p * t.prediction);
        acc[1].add(p * t.label);
        acc[2].add(p * t.log_prediction);
        acc[3].add(p * t.log_one_minus);
    }
    let means = BatchTerms {
        prediction: acc[0].total(),
        label: acc[1].total(),
        log_prediction: acc[2].total(),
        log_one_minus: acc[3].total(),
    };
    Ok(loss_from_means(kind, &means))
}

/// `|r_k(test) - r_k(train)|` with the same estimator on both sides.
pub fn generalization_gap(
    train: &EvalSet,
    test: &EvalSet,
    k: usize,
    kind: LossKind,
    estimator: &Estimator,
) -> Result<f64> {
    let train_risk = estimator.estimate(train, k, kind)?.value;
    let test_risk = estimator.estimate(test, k, kind)?.value;
    Ok((test_risk - train_risk).abs())
}
