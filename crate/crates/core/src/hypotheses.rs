//! Synthetic data and toy hypothesis classes.
//!
//! Features are i.i.d. uniform on `[0,1]^d`. Labels follow one of two
//! documented families:
//!
//! * `regression_unit`: `y = clip(0.25 + 0.5 * mean_j x_j^2 + noise * 0.25 * (2u - 1), 0, 1)`
//!   with `u ~ U[0,1)`; `E[y] = 5/12` for every dimension and noise level.
//! * `classification_sign`: `y = sign(sum_j (x_j - 1/2) / (j + 1))`, flipped
//!   with probability `noise`; `E[y] = 0`.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::losses::LossKind;
use crate::risk::{EvalSet, LabeledPrediction};
use crate::rng::{mix64, substream, Stream};
use crate::sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    RegressionUnit,
    ClassificationSign,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::RegressionUnit => "regression_unit",
            Task::ClassificationSign => "classification_sign",
        }
    }

    /// Analytic label mean of the generating family.
    pub fn label_mean(self) -> f64 {
        match self {
            Task::RegressionUnit => 5.0 / 12.0,
            Task::ClassificationSign => 0.0,
        }
    }

    /// Maps a (prediction, label) pair of this task into the domains of
    /// `kind`. Sign-valued classification outputs become probabilities
    /// `(v + 1) / 2` for every kind except `zero_one`.
    pub fn to_loss_domain(self, kind: LossKind, prediction: f64, label: f64) -> Result<(f64, f64)> {
        match (self, kind) {
            (Task::RegressionUnit, LossKind::Mse) => Ok((prediction, label)),
            (Task::RegressionUnit, _) => Err(Error::UnsupportedLoss {
                kind,
                operation: "the regression_unit task",
            }),
            (Task::ClassificationSign, LossKind::ZeroOne) => Ok((prediction, label)),
            (Task::ClassificationSign, _) => Ok(((prediction + 1.0) / 2.0, (label + 1.0) / 2.0)),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Task::RegressionUnit, Task::ClassificationSign]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::argument(alloc::format!(
                    "unknown task '{s}' (expected regression_unit or classification_sign)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub task: Task,
    /// Label-flip probability (classification) or additive-noise scale
    /// (regression).
    pub noise: f64,
    pub feature_dim: usize,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::argument("train and test sizes must be at least 1"));
        }
        if self.feature_dim == 0 {
            return Err(Error::argument("feature dimension must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::argument(alloc::format!(
                "noise must lie in [0, 1], got {}",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Feature rows with their labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub task: Task,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn new(task: Task, features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                got: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::argument("a dataset needs at least one row"));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::argument("feature dimension must be at least 1"));
        }
        if let Some(row) = features.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        Ok(Self {
            task,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features[0].len()
    }
}

fn classification_score(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(j, v)| (v - 0.5) / (j as f64 + 1.0))
        .sum()
}

fn regression_signal(x: &[f64]) -> f64 {
    0.25 + 0.5 * sum::mean(&x.iter().map(|v| v * v).collect::<Vec<_>>())
}

fn draw(config: &SyntheticConfig, n: usize, rng: &mut impl RngCore) -> Dataset {
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..config.feature_dim).map(|_| rng.random::<f64>()).collect();
        let y = match config.task {
            Task::RegressionUnit => {
                let u: f64 = rng.random();
                (regression_signal(&x) + config.noise * 0.25 * (2.0 * u - 1.0)).clamp(0.0, 1.0)
            }
            Task::ClassificationSign => {
                let clean = if classification_score(&x) > 0.0 { 1.0 } else { -1.0 };
                let flip: f64 = rng.random();
                if flip < config.noise {
                    -clean
                } else {
                    clean
                }
            }
        };
        features.push(x);
        labels.push(y);
    }
    Dataset {
        task: config.task,
        features,
        labels,
    }
}

/// Draws a train and a test set; bit-identical for identical configs.
pub fn generate(config: &SyntheticConfig) -> Result<(Dataset, Dataset)> {
    config.validate()?;
    let train = draw(
        config,
        config.n_train,
        &mut substream(config.seed, Stream::SyntheticData, 0),
    );
    let test = draw(
        config,
        config.n_test,
        &mut substream(config.seed, Stream::SyntheticData, 1),
    );
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ConstantMean,
    Threshold,
    LookupMemorizer,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::ConstantMean,
        Variant::Threshold,
        Variant::LookupMemorizer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::ConstantMean => "constant_mean",
            Variant::Threshold => "threshold",
            Variant::LookupMemorizer => "lookup_memorizer",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                Error::argument(alloc::format!(
                    "unknown hypothesis '{s}' (expected constant_mean, threshold or lookup_memorizer)"
                ))
            })
    }
}

/// A fitted model from one of the three toy classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Hypothesis {
    /// Predicts the mean training label everywhere.
    ConstantMean {
        task: Task,
        feature_dim: usize,
        value: f64,
    },
    /// Predicts `sign` when `x_0 > threshold`, `-sign` otherwise.
    Threshold {
        feature_dim: usize,
        threshold: f64,
        sign: f64,
    },
    /// Returns the stored label for a training feature vector and a seeded
    /// pseudo-random label anywhere else.
    LookupMemorizer {
        task: Task,
        feature_dim: usize,
        seed: u64,
        /// Sorted by the bit patterns of the features.
        entries: Vec<(Vec<f64>, f64)>,
    },
}

fn feature_key(x: &[f64]) -> impl Iterator<Item = u64> + '_ {
    x.iter().map(|v| v.to_bits())
}

fn cmp_features(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    feature_key(a).cmp(feature_key(b))
}

fn fallback_label(task: Task, seed: u64, x: &[f64]) -> f64 {
    let mut h = mix64(seed ^ 0x6C6F_6F6B_7570);
    for bits in feature_key(x) {
        h = mix64(h ^ bits);
    }
    match task {
        Task::ClassificationSign => {
            if h >> 63 == 1 {
                1.0
            } else {
                -1.0
            }
        }
        Task::RegressionUnit => (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64),
    }
}

/// Fits `variant` on `train`. `seed` only affects the memorizer's fallback.
pub fn fit(variant: Variant, train: &Dataset, seed: u64) -> Result<Hypothesis> {
    if train.is_empty() {
        return Err(Error::argument("cannot fit on an empty training set"));
    }
    let feature_dim = train.feature_dim();
    match variant {
        Variant::ConstantMean => Ok(Hypothesis::ConstantMean {
            task: train.task,
            feature_dim,
            value: sum::mean(&train.labels),
        }),
        Variant::Threshold => {
            if train.task != Task::ClassificationSign {
                return Err(Error::TaskMismatch {
                    variant: variant.as_str(),
                    task: train.task.as_str(),
                });
            }
            let (threshold, sign) = best_threshold(train);
            Ok(Hypothesis::Threshold {
                feature_dim,
                threshold,
                sign,
            })
        }
        Variant::LookupMemorizer => {
            let mut entries: Vec<(Vec<f64>, f64)> = Vec::with_capacity(train.len());
            for (x, &y) in train.features.iter().zip(&train.labels) {
                entries.push((x.clone(), y));
            }
            // first occurrence wins for repeated feature vectors
            entries.sort_by(|a, b| cmp_features(&a.0, &b.0));
            entries.dedup_by(|later, earlier| cmp_features(&later.0, &earlier.0).is_eq());
            Ok(Hypothesis::LookupMemorizer {
                task: train.task,
                feature_dim,
                seed,
                entries,
            })
        }
    }
}

/// 1-risk minimizing `(threshold, sign)` over the unique values of `x_0`;
/// ties go to the smaller threshold, then to `sign = +1`.
fn best_threshold(train: &Dataset) -> (f64, f64) {
    let mut pairs: Vec<(f64, f64)> = train
        .features
        .iter()
        .zip(&train.labels)
        .map(|(x, &y)| (x[0], y))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pos_total = pairs.iter().filter(|p| p.1 > 0.0).count();
    let neg_total = pairs.len() - pos_total;
    let (mut pos_le, mut neg_le) = (0usize, 0usize);
    let mut best = (usize::MAX, 0.0, 1.0);
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == t {
            if pairs[i].1 > 0.0 {
                pos_le += 1;
            } else {
                neg_le += 1;
            }
            i += 1;
        }
        // sign +1: positives at or below t and negatives above t are wrong
        let err_pos = pos_le + (neg_total - neg_le);
        let err_neg = neg_le + (pos_total - pos_le);
        if err_pos < best.0 {
            best = (err_pos, t, 1.0);
        }
        if err_neg < best.0 {
            best = (err_neg, t, -1.0);
        }
    }
    (best.1, best.2)
}

impl Hypothesis {
    pub fn variant(&self) -> Variant {
        match self {
            Hypothesis::ConstantMean { .. } => Variant::ConstantMean,
            Hypothesis::Threshold { .. } => Variant::Threshold,
            Hypothesis::LookupMemorizer { .. } => Variant::LookupMemorizer,
        }
    }

    pub fn feature_dim(&self) -> usize {
        match self {
            Hypothesis::ConstantMean { feature_dim, .. }
            | Hypothesis::Threshold { feature_dim, .. }
            | Hypothesis::LookupMemorizer { feature_dim, .. } => *feature_dim,
        }
    }

    /// Prediction for one feature vector, in the task's own units.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            Hypothesis::ConstantMean { value, .. } => *value,
            Hypothesis::Threshold {
                threshold, sign, ..
            } => {
                if x[0] > *threshold {
                    *sign
                } else {
                    -*sign
                }
            }
            Hypothesis::LookupMemorizer {
                task,
                seed,
                entries,
                ..
            } => match entries.binary_search_by(|(key, _)| cmp_features(key, x)) {
                Ok(i) => entries[i].1,
                Err(_) => fallback_label(*task, *seed, x),
            },
        })
    }

    /// Predictions for every row of `features`.
    pub fn predict_all(&self, features: &[Vec<f64>]) -> Result<Vec<f64>> {
        features.iter().map(|x| self.predict(x)).collect()
    }
}

/// Pairs the predictions of `h` on `data` with its labels, mapped into the
/// domains of `kind`.
pub fn apply(h: &Hypothesis, data: &Dataset, kind: LossKind) -> Result<EvalSet> {
    let items = data
        .features
        .iter()
        .zip(&data.labels)
        .map(|(x, &y)| {
            let (p, y) = data.task.to_loss_domain(kind, h.predict(x)?, y)?;
            Ok(LabeledPrediction::new(p, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let set = EvalSet::new(items)?;
    set.validate(kind)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::{empirical_k_risk_closed, empirical_k_risk_exact, full_batch_risk, one_risk};
    use alloc::vec;

    fn config(task: Task, noise: f64, n: usize) -> SyntheticConfig {
        SyntheticConfig {
            n_train: n,
            n_test: n,
            task,
            noise,
            feature_dim: 3,
            seed: 42,
        }
    }

    #[test]
    fn noise_free_labels_follow_the_score() {
        let (train, test) = generate(&config(Task::ClassificationSign, 0.0, 500)).unwrap();
        for d in [&train, &test] {
            for (x, y) in d.features.iter().zip(&d.labels) {
                assert_eq!(*y, if classification_score(x) > 0.0 { 1.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let c = config(Task::RegressionUnit, 0.3, 100);
        assert_eq!(generate(&c).unwrap(), generate(&c).unwrap());
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(generate(&c).unwrap().0, generate(&other).unwrap().0);
    }

    #[test]
    fn label_means_match_the_family() {
        for (task, noise) in [(Task::RegressionUnit, 0.5), (Task::ClassificationSign, 0.2)] {
            let c = SyntheticConfig {
                n_train: 100_000,
                n_test: 1,
                task,
                noise,
                feature_dim: 2,
                seed: 9,
            };
            let (train, _) = generate(&c).unwrap();
            let (m, s) = sum::mean_and_sample_std(&train.labels);
            let se = s / libm::sqrt(train.len() as f64);
            assert!((m - task.label_mean()).abs() <= 4.0 * se, "{task}: {m} vs {}", task.label_mean());
        }
    }

    #[test]
    fn config_validation() {
        let mut c = config(Task::RegressionUnit, 0.1, 10);
        c.noise = 1.5;
        assert!(generate(&c).is_err());
        c.noise = 0.1;
        c.n_test = 0;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn constant_mean_value() {
        let data = Dataset::new(
            Task::RegressionUnit,
            vec![vec![0.1], vec![0.2], vec![0.3]],
            vec![0.0, 1.0, 1.0],
        )
        .unwrap();
        let h = fit(Variant::ConstantMean, &data, 0).unwrap();
        let preds = h.predict_all(&data.features).unwrap();
        assert!(preds.iter().all(|p| (p - 2.0 / 3.0).abs() < 1e-15));
        let set = apply(&h, &data, LossKind::Mse).unwrap();
        assert!(set.predictions().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn memorizer_interpolates() {
        for task in [Task::RegressionUnit, Task::ClassificationSign] {
            let (train, test) = generate(&config(task, 0.3, 60)).unwrap();
            let h = fit(Variant::LookupMemorizer, &train, 5).unwrap();
            assert_eq!(h.predict_all(&train.features).unwrap(), train.labels);
            let kind = if task == Task::RegressionUnit { LossKind::Mse } else { LossKind::ZeroOne };
            let set = apply(&h, &train, kind).unwrap();
            assert_eq!(one_risk(&set, kind).unwrap(), 0.0);
            // unseen features get in-domain, reproducible fallbacks
            let a = apply(&h, &test, kind).unwrap();
            let b = apply(&h, &test, kind).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn memorizer_train_k_risk_vanishes_under_mse() {
        let (train, _) = generate(&config(Task::RegressionUnit, 0.3, 12)).unwrap();
        let h = fit(Variant::LookupMemorizer, &train, 5).unwrap();
        let set = apply(&h, &train, LossKind::Mse).unwrap();
        for k in 1..=12 {
            assert_eq!(empirical_k_risk_exact(&set, k, LossKind::Mse).unwrap().value, 0.0);
            assert!(empirical_k_risk_closed(&set, k, LossKind::Mse).unwrap().value.abs() < 1e-15);
        }
    }

    #[test]
    fn threshold_separates_separable_data() {
        // labels depend on x_0 only
        let xs = [0.05, 0.9, 0.3, 0.7, 0.45, 0.55, 0.2, 0.8];
        let features: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, 0.5]).collect();
        let labels: Vec<f64> = xs.iter().map(|&x| if x > 0.5 { -1.0 } else { 1.0 }).collect();
        let data = Dataset::new(Task::ClassificationSign, features, labels).unwrap();
        let h = fit(Variant::Threshold, &data, 0).unwrap();
        let set = apply(&h, &data, LossKind::ZeroOne).unwrap();
        assert_eq!(one_risk(&set, LossKind::ZeroOne).unwrap(), 0.0);
        assert_eq!(
            h,
            Hypothesis::Threshold {
                feature_dim: 2,
                threshold: 0.45,
                sign: -1.0
            }
        );
    }

    #[test]
    fn threshold_matches_brute_force_scan() {
        for seed in 0..20 {
            let mut c = config(Task::ClassificationSign, 0.25, 40);
            c.seed = seed;
            let (train, _) = generate(&c).unwrap();
            let h = fit(Variant::Threshold, &train, 0).unwrap();
            let fitted = one_risk(&apply(&h, &train, LossKind::ZeroOne).unwrap(), LossKind::ZeroOne)
                .unwrap();
            // oracle: every (candidate, sign) pair evaluated directly
            let mut best = f64::INFINITY;
            for x in &train.features {
                for sign in [1.0, -1.0] {
                    let errors = train
                        .features
                        .iter()
                        .zip(&train.labels)
                        .filter(|(z, y)| (if z[0] > x[0] { sign } else { -sign }) != **y)
                        .count();
                    best = best.min(errors as f64 / train.len() as f64);
                }
            }
            assert!((fitted - best).abs() < 1e-15, "seed {seed}");
        }
    }

    #[test]
    fn threshold_rejects_regression() {
        let (train, _) = generate(&config(Task::RegressionUnit, 0.1, 10)).unwrap();
        assert!(matches!(
            fit(Variant::Threshold, &train, 0),
            Err(Error::TaskMismatch { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let (train, _) = generate(&config(Task::RegressionUnit, 0.1, 10)).unwrap();
        let h = fit(Variant::ConstantMean, &train, 0).unwrap();
        assert!(matches!(
            h.predict(&[0.1]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn constant_mean_minimizes_full_batch_risk() {
        for seed in 0..30 {
            let mut c = config(Task::RegressionUnit, 0.4, 25);
            c.seed = seed;
            let (train, _) = generate(&c).unwrap();
            let best = full_batch_risk(
                &apply(&fit(Variant::ConstantMean, &train, 0).unwrap(), &train, LossKind::Mse).unwrap(),
                LossKind::Mse,
            )
            .unwrap();
            let memo = fit(Variant::LookupMemorizer, &train, seed).unwrap();
            let other = full_batch_risk(&apply(&memo, &train, LossKind::Mse).unwrap(), LossKind::Mse)
                .unwrap();
            assert!(best <= other + 1e-12);
        }
    }

    #[test]
    fn log_loss_mapping() {
        let (train, _) = generate(&config(Task::ClassificationSign, 0.1, 20)).unwrap();
        let h = fit(Variant::ConstantMean, &train, 0).unwrap();
        let set = apply(&h, &train, LossKind::Kl).unwrap();
        assert!(set.labels().iter().all(|&y| y == 0.0 || y == 1.0));
        let (reg, _) = generate(&config(Task::RegressionUnit, 0.1, 20)).unwrap();
        let h = fit(Variant::ConstantMean, &reg, 0).unwrap();
        assert!(apply(&h, &reg, LossKind::ZeroOne).is_err());
    }
}
