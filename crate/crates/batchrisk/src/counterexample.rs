//! Random search for evaluation sets on which the binary cross-entropy
//! k-risk grows with k.
//!
//! BCE splits into KL plus the entropy of the batch label mean. The KL part
//! cannot grow in k, but the entropy part averages a concave function of
//! batch means and does grow, so sets with confident, mostly correct
//! predictions and mixed labels are natural witnesses.

use batchrisk_core::risk::empirical_k_risk_exact;
use batchrisk_core::rng::{substream, Stream};
use batchrisk_core::{EvalSet, LabeledPrediction, LossKind, Result as CoreResult};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest set size searched; exact enumeration of every k stays tiny.
pub const MAX_SEARCH_N: usize = 6;

/// Minimum increase accepted as a violation, well above rounding noise.
pub const MIN_INCREASE: f64 = 1e-9;

/// Slack allowed when confirming that the KL curve does not increase.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// A set on which the risk of `kind` increases from `k` to `k + 1`, with both
/// curves recorded for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub set: EvalSet,
    pub kind: LossKind,
    pub k: usize,
    pub increase: f64,
    /// Exact risk of `kind` at k = 1..n.
    pub curve: Vec<f64>,
    /// Exact KL risk at k = 1..n.
    pub kl_curve: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub found: bool,
    pub attempts: u64,
    pub budget: u64,
    pub seed: u64,
    pub witness: Option<Witness>,
}

fn exact_curve(set: &EvalSet, kind: LossKind) -> CoreResult<Vec<f64>> {
    (1..=set.n())
        .map(|k| empirical_k_risk_exact(set, k, kind).map(|r| r.value))
        .collect()
}

/// Certifies `set` by exact enumeration: the `kind` curve must increase by
/// more than [`MIN_INCREASE`] at some k while the KL curve never increases
/// by more than [`MONOTONE_SLACK`]. Returns the first such k.
pub fn certify(set: &EvalSet, kind: LossKind) -> CoreResult<Option<Witness>> {
    let curve = exact_curve(set, kind)?;
    let Some(k) = (1..set.n()).find(|&k| curve[k] - curve[k - 1] > MIN_INCREASE) else {
        return Ok(None);
    };
    let kl_curve = exact_curve(set, LossKind::Kl)?;
    if kl_curve.windows(2).any(|w| w[1] - w[0] > MONOTONE_SLACK) {
        return Ok(None);
    }
    Ok(Some(Witness {
        set: set.clone(),
        kind,
        k,
        increase: curve[k] - curve[k - 1],
        curve,
        kl_curve,
    }))
}

/// Candidate `attempt` of a search: n in [2, 6], labels in {0, 1}, half the
/// time uniform predictions, otherwise predictions pulled towards the labels.
pub fn candidate(seed: u64, attempt: u64) -> EvalSet {
    let mut rng = substream(seed, Stream::CounterexampleSearch, attempt);
    let n = rng.random_range(2..=MAX_SEARCH_N);
    let confident = rng.random_bool(0.5);
    let items = (0..n)
        .map(|_| {
            let y = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
            let p = if confident {
                let off = 0.3 * rng.random::<f64>();
                if y == 1.0 {
                    1.0 - off
                } else {
                    off
                }
            } else {
                rng.random::<f64>()
            };
            LabeledPrediction::new(p.clamp(1e-6, 1.0 - 1e-6), y)
        })
        .collect();
    EvalSet::new(items).expect("n >= 2")
}

/// Searches up to `budget` candidates for a set whose `kind` risk increases
/// in k while KL does not.
pub fn search_increasing(seed: u64, budget: u64, kind: LossKind) -> CoreResult<SearchReport> {
    for attempt in 0..budget {
        if let Some(witness) = certify(&candidate(seed, attempt), kind)? {
            return Ok(SearchReport {
                found: true,
                attempts: attempt + 1,
                budget,
                seed,
                witness: Some(witness),
            });
        }
    }
    Ok(SearchReport {
        found: false,
        attempts: budget,
        budget,
        seed,
        witness: None,
    })
}

/// BCE witness search; not finding one within `budget` is reported, not an
/// error.
pub fn find_bce_counterexample(seed: u64, budget: u64) -> CoreResult<SearchReport> {
    search_increasing(seed, budget, LossKind::Bce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_witness() {
        // perfect-ish predictions on mixed labels: BCE near 0 at k = 1,
        // near ln 2 for the mixed pair at k = 2
        let set = EvalSet::from_slices(&[0.99, 0.01], &[1.0, 0.0]).unwrap();
        let w = certify(&set, LossKind::Bce).unwrap().unwrap();
        assert_eq!(w.k, 1);
        assert!(w.curve[1] > 0.69);
    }

    #[test]
    fn uniform_labels_never_certify() {
        let set = EvalSet::from_slices(&[0.2, 0.7, 0.4], &[0.0, 0.0, 0.0]).unwrap();
        assert!(certify(&set, LossKind::Bce).unwrap().is_none());
    }

    #[test]
    fn kl_search_finds_nothing() {
        let r = search_increasing(3, 500, LossKind::Kl).unwrap();
        assert!(!r.found);
        assert_eq!(r.attempts, 500);
    }
}
