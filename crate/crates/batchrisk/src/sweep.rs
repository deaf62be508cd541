//! Gap-versus-k experiment on synthetic data.
//!
//! Each repetition draws a fresh train/test pair, fits every requested
//! hypothesis on the train split and records `|r_k(test) - r_k(train)|` for
//! every requested loss and batch size.

use batchrisk_core::combinatorics::binom;
use batchrisk_core::hypotheses::{apply, fit, generate, SyntheticConfig, Variant};
use batchrisk_core::risk::Estimator;
use batchrisk_core::rng::{child_seed, Stream, RNG_ID};
use batchrisk_core::{EvalSet, LossKind, Method, ENUMERATION_CAP};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "variant,seed,k,kind,train_risk,test_risk,gap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Data settings; `data.seed` is the base seed of the whole sweep.
    pub data: SyntheticConfig,
    pub ks: Vec<usize>,
    pub kinds: Vec<LossKind>,
    pub variants: Vec<Variant>,
    pub repetitions: usize,
    /// Monte-Carlo draws used when a loss has no closed form and exact
    /// enumeration exceeds the cap.
    pub mc_draws: u64,
    /// Evaluate on the training split instead of a fresh test split.
    pub test_on_train: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.ks.is_empty() || self.kinds.is_empty() || self.variants.is_empty() {
            return Err(Error::Config("ks, kinds and variants must be nonempty".into()));
        }
        let limit = if self.test_on_train {
            self.data.n_train
        } else {
            self.data.n_train.min(self.data.n_test)
        };
        if let Some(&k) = self.ks.iter().find(|&&k| k == 0 || k > limit) {
            return Err(Error::Config(format!(
                "k = {k} must lie in [1, {limit}] (the smaller split size)"
            )));
        }
        if self.mc_draws < 2 {
            return Err(Error::Config("mc_draws must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub seed: u64,
    pub k: usize,
    pub kind: LossKind,
    pub method: Method,
    pub train_risk: f64,
    pub test_risk: f64,
    pub gap: f64,
}

/// Gap quantiles per k, in the order of the requested ks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub variant: Variant,
    pub kind: LossKind,
    pub ks: Vec<usize>,
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub rng: String,
    pub config: SweepConfig,
    /// Seed of each repetition.
    pub seeds: Vec<u64>,
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<GapSummary>,
}

impl SweepReport {
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.variant.as_str(),
                r.seed,
                r.k,
                r.kind.as_str(),
                r.train_risk,
                r.test_risk,
                r.gap
            ));
        }
        out
    }

    pub fn summary(&self, variant: Variant, kind: LossKind) -> Option<&GapSummary> {
        self.summaries
            .iter()
            .find(|s| s.variant == variant && s.kind == kind)
    }
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Closed form where the loss has one, otherwise exact enumeration when it
/// fits under the cap, otherwise Monte-Carlo.
pub fn choose_estimator(kind: LossKind, n: usize, k: usize, draws: u64, seed: u64) -> Estimator {
    if kind.closed_form_eligible() {
        Estimator::ClosedForm
    } else if binom(n as u64, k as u64).map_or(false, |c| c <= ENUMERATION_CAP) {
        Estimator::Exact
    } else {
        Estimator::MonteCarlo { draws, seed }
    }
}

fn risk(set: &EvalSet, k: usize, kind: LossKind, draws: u64, seed: u64) -> Result<(f64, Method)> {
    let est = choose_estimator(kind, set.n(), k, draws, seed);
    Ok((est.estimate(set, k, kind)?.value, est.method()))
}

fn context(e: impl Into<Error>, what: String) -> Error {
    e.into().context(what)
}

fn run_repetition(config: &SweepConfig, rep: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let data = SyntheticConfig {
        seed,
        ..config.data.clone()
    };
    let (train, test) = generate(&data)?;
    let test = if config.test_on_train { &train } else { &test };
    let mut rows = Vec::new();
    for &variant in &config.variants {
        let h = fit(variant, &train, seed).map_err(|e| {
            context(e, format!("repetition {rep} (seed {seed}), fitting {}", variant.as_str()))
        })?;
        for &kind in &config.kinds {
            let where_ = || format!("repetition {rep} (seed {seed}), {} on {kind}", variant.as_str());
            let train_set = apply(&h, &train, kind).map_err(|e| context(e, where_()))?;
            let test_set = apply(&h, test, kind).map_err(|e| context(e, where_()))?;
            for (j, &k) in config.ks.iter().enumerate() {
                let mc_seed = child_seed(seed, Stream::Sweep, j as u64);
                let (train_risk, method) = risk(&train_set, k, kind, config.mc_draws, mc_seed)
                    .map_err(|e| context(e, format!("{}, k = {k}, train", where_())))?;
                let (test_risk, _) = risk(&test_set, k, kind, config.mc_draws, mc_seed)
                    .map_err(|e| context(e, format!("{}, k = {k}, test", where_())))?;
                rows.push(SweepRow {
                    variant,
                    seed,
                    k,
                    kind,
                    method,
                    train_risk,
                    test_risk,
                    gap: (test_risk - train_risk).abs(),
                });
            }
        }
    }
    Ok(rows)
}

/// Runs the sweep; repetitions run in parallel and the report is identical
/// for any thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.repetitions)
        .map(|r| child_seed(config.data.seed, Stream::Sweep, r as u64))
        .collect();
    let per_rep = seeds
        .par_iter()
        .enumerate()
        .map(|(rep, &seed)| run_repetition(config, rep, seed))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<SweepRow> = per_rep.into_iter().flatten().collect();

    let mut summaries = Vec::new();
    for &variant in &config.variants {
        for &kind in &config.kinds {
            let mut s = GapSummary {
                variant,
                kind,
                ks: config.ks.clone(),
                median: Vec::new(),
                q1: Vec::new(),
                q3: Vec::new(),
            };
            for &k in &config.ks {
                let gaps: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.variant == variant && r.kind == kind && r.k == k)
                    .map(|r| r.gap)
                    .collect();
                s.median.push(quantile(&gaps, 0.5));
                s.q1.push(quantile(&gaps, 0.25));
                s.q3.push(quantile(&gaps, 0.75));
            }
            summaries.push(s);
        }
    }
    Ok(SweepReport {
        version: crate::VERSION.into(),
        rng: RNG_ID.into(),
        config: config.clone(),
        seeds,
        rows,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        assert_eq!(quantile(&[7.0], 0.75), 7.0);
    }
}
