//! Loss functions evaluated on batch means.
//!
//! Each [`LossKind`] fixes its own label and prediction conventions:
//!
//! | kind   | labels      | predictions          |
//! |--------|-------------|----------------------|
//! | `mse`  | `[0, 1]`    | `[0, 1]`             |
//! | `zero_one` | `{-1, +1}` | `[-1, 1]`         |
//! | `gce`, `kl`, `bce` | `{0, 1}` | `(0, 1)`, clamped |
//!
//! Batch means of the labels land in `[0, 1]` or `[-1, 1]`, so the pointwise
//! losses accept the whole interval for their label argument.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Clamp applied to predictions before any logarithm.
pub const LOG_CLAMP: f64 = 1e-12;

/// Slack for values that should lie in a closed interval but were produced
/// by floating-point averaging.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    ZeroOne,
    #[serde(rename = "gce")]
    GeomCrossEntropy,
    Kl,
    Bce,
}

impl LossKind {
    pub const ALL: [LossKind; 5] = [
        LossKind::Mse,
        LossKind::ZeroOne,
        LossKind::GeomCrossEntropy,
        LossKind::Kl,
        LossKind::Bce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::ZeroOne => "zero_one",
            LossKind::GeomCrossEntropy => "gce",
            LossKind::Kl => "kl",
            LossKind::Bce => "bce",
        }
    }

    /// The empirical k-risk is an exact mix of the 1-risk and the n-risk.
    pub fn closed_form_eligible(self) -> bool {
        matches!(
            self,
            LossKind::Mse | LossKind::ZeroOne | LossKind::GeomCrossEntropy
        )
    }

    /// Jointly convex in (prediction, label); the expected k-risk is then
    /// non-increasing in k.
    pub fn doubly_convex(self) -> bool {
        matches!(self, LossKind::Mse | LossKind::Kl)
    }

    pub fn is_log_loss(self) -> bool {
        matches!(
            self,
            LossKind::GeomCrossEntropy | LossKind::Kl | LossKind::Bce
        )
    }

    /// Accepts a per-sample label (strict: `{0,1}` or `{-1,+1}` where the
    /// kind is a classification loss).
    pub fn check_sample_label(self, y: f64) -> Result<f64> {
        let ok = match self {
            LossKind::Mse => (0.0..=1.0).contains(&y),
            LossKind::ZeroOne => y == 1.0 || y == -1.0,
            _ => y == 0.0 || y == 1.0,
        };
        if ok {
            Ok(y)
        } else {
            Err(self.domain_error("label", y))
        }
    }

    /// Accepts a per-sample prediction.
    pub fn check_sample_prediction(self, p: f64) -> Result<f64> {
        self.check_prediction(p)
    }

    /// Validates (and for log-losses clamps) a prediction or mean prediction.
    pub fn check_prediction(self, p: f64) -> Result<f64> {
        let (lo, hi) = self.prediction_interval();
        if !(p >= lo - DOMAIN_SLACK && p <= hi + DOMAIN_SLACK) {
            return Err(self.domain_error("prediction", p));
        }
        Ok(if self.is_log_loss() {
            p.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP)
        } else {
            p.clamp(lo, hi)
        })
    }

    /// Validates a label or label mean.
    pub fn check_label(self, y: f64) -> Result<f64> {
        let (lo, hi) = self.label_interval();
        if !(y >= lo - DOMAIN_SLACK && y <= hi + DOMAIN_SLACK) {
            return Err(self.domain_error("label", y));
        }
        Ok(y.clamp(lo, hi))
    }

    fn prediction_interval(self) -> (f64, f64) {
        match self {
            LossKind::ZeroOne => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    fn label_interval(self) -> (f64, f64) {
        self.prediction_interval()
    }

    fn domain_error(self, role: &'static str, value: f64) -> Error {
        Error::InputDomain {
            kind: self,
            role,
            value,
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::argument(alloc::format!(
                    "unknown loss '{s}' (expected mse, zero_one, gce, kl or bce)"
                ))
            })
    }
}

/// Constants entering the Lipschitz-based generalization bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConstants {
    /// Lipschitz constant of the loss.
    pub lipschitz: f64,
    /// Width `|a - b|` of the label range.
    pub range_width: f64,
    /// `lipschitz * range_width`.
    pub c: f64,
    /// Factor relating the k-Rademacher complexity of the loss class to that
    /// of the hypothesis class.
    pub beta: f64,
}

pub fn loss_constants(kind: LossKind) -> Result<LossConstants> {
    let (lipschitz, range_width, beta) = match kind {
        LossKind::ZeroOne => (0.5, 2.0, 0.5),
        LossKind::Mse => (2.0, 1.0, 2.0),
        _ => {
            return Err(Error::UnsupportedLoss {
                kind,
                operation: "loss constants (unbounded Lipschitz constant)",
            })
        }
    };
    Ok(LossConstants {
        lipschitz,
        range_width,
        c: lipschitz * range_width,
        beta,
    })
}

/// `x * ln(x / y)` with `0 ln 0 = 0`.
fn xlog_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (libm::log(x) - libm::log(y))
    }
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

/// Binary entropy `h(y)` in nats.
pub fn entropy(y: f64) -> f64 {
    -xlogx(y) - xlogx(1.0 - y)
}

fn bce_raw(p: f64, y: f64) -> f64 {
    -y * libm::log(p) - (1.0 - y) * libm::log(1.0 - p)
}

fn kl_raw(p: f64, y: f64) -> f64 {
    xlog_ratio(y, p) + xlog_ratio(1.0 - y, 1.0 - p)
}

/// Loss of a single (prediction, label) pair, or of a pair of batch means.
pub fn pointwise_loss(kind: LossKind, yhat: f64, y: f64) -> Result<f64> {
    let p = kind.check_prediction(yhat)?;
    let y = kind.check_label(y)?;
    Ok(eval_unchecked(kind, p, y))
}

/// Evaluates a loss on already validated (and clamped) arguments.
#[inline]
pub(crate) fn eval_unchecked(kind: LossKind, p: f64, y: f64) -> f64 {
    match kind {
        LossKind::Mse => (p - y) * (p - y),
        LossKind::ZeroOne => 0.5 * (1.0 - p * y),
        LossKind::Kl => kl_raw(p, y),
        LossKind::Bce | LossKind::GeomCrossEntropy => bce_raw(p, y),
    }
}

/// Returns `(kl, bce, h)` with `kl = bce - h`.
pub fn kl_bce_entropy(yhat: f64, y: f64) -> Result<(f64, f64, f64)> {
    let p = LossKind::Kl.check_prediction(yhat)?;
    let y = LossKind::Kl.check_label(y)?;
    Ok((kl_raw(p, y), bce_raw(p, y), entropy(y)))
}

/// Per-sample quantities whose batch means determine every batch loss.
///
/// The geometric-mean cross entropy aggregates predictions through the mean
/// of their logarithms; all other kinds use the arithmetic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatchTerms {
    pub prediction: f64,
    pub label: f64,
    pub log_prediction: f64,
    pub log_one_minus: f64,
}

impl BatchTerms {
    /// Validates one sample and precomputes its terms.
    pub fn new(kind: LossKind, prediction: f64, label: f64) -> Result<Self> {
        let p = kind.check_prediction(prediction)?;
        let y = kind.check_label(label)?;
        let (lp, l1p) = if kind == LossKind::GeomCrossEntropy {
            (libm::log(p), libm::log(1.0 - p))
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            prediction: p,
            label: y,
            log_prediction: lp,
            log_one_minus: l1p,
        })
    }

    #[inline]
    pub(crate) fn accumulate(&mut self, other: &BatchTerms) {
        self.prediction += other.prediction;
        self.label += other.label;
        self.log_prediction += other.log_prediction;
        self.log_one_minus += other.log_one_minus;
    }

    #[inline]
    pub(crate) fn scaled(&self, s: f64) -> BatchTerms {
        BatchTerms {
            prediction: self.prediction * s,
            label: self.label * s,
            log_prediction: self.log_prediction * s,
            log_one_minus: self.log_one_minus * s,
        }
    }
}

/// Loss of a batch given the batch means of its [`BatchTerms`].
#[inline]
pub fn loss_from_means(kind: LossKind, means: &BatchTerms) -> f64 {
    match kind {
        LossKind::GeomCrossEntropy => {
            -means.label * means.log_prediction - (1.0 - means.label) * means.log_one_minus
        }
        LossKind::Kl | LossKind::Bce => {
            let p = means.prediction.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP);
            let y = means.label.clamp(0.0, 1.0);
            eval_unchecked(kind, p, y)
        }
        LossKind::Mse => {
            let d = means.prediction - means.label;
            d * d
        }
        LossKind::ZeroOne => 0.5 * (1.0 - means.prediction * means.label),
    }
}

/// Loss of a batch: the loss between its mean prediction and mean label.
pub fn batch_loss(kind: LossKind, predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut acc = BatchTerms::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        acc.accumulate(&BatchTerms::new(kind, p, y)?);
    }
    Ok(loss_from_means(
        kind,
        &acc.scaled(1.0 / predictions.len() as f64),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN2: f64 = core::f64::consts::LN_2;

    #[test]
    fn pointwise_examples() {
        assert_eq!(pointwise_loss(LossKind::Mse, 0.5, 1.0).unwrap(), 0.25);
        assert_eq!(pointwise_loss(LossKind::ZeroOne, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(pointwise_loss(LossKind::Kl, 0.5, 0.5).unwrap(), 0.0);
        // -ln 0.5 = 0.693147180559945309417232...
        let bce = pointwise_loss(LossKind::Bce, 0.5, 1.0).unwrap();
        assert!((bce - 0.693_147_180_559_945_3).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_the_value() {
        let err = pointwise_loss(LossKind::Mse, 1.5, 0.0).unwrap_err();
        assert_eq!(
            err,
            Error::InputDomain {
                kind: LossKind::Mse,
                role: "prediction",
                value: 1.5
            }
        );
        assert!(pointwise_loss(LossKind::Kl, 0.5, f64::NAN).is_err());
        assert!(pointwise_loss(LossKind::Bce, -0.1, 1.0).is_err());
        assert!(LossKind::ZeroOne.check_sample_label(0.0).is_err());
        assert!(LossKind::Bce.check_sample_label(-1.0).is_err());
    }

    #[test]
    fn log_losses_clamp_saturated_predictions() {
        let v = pointwise_loss(LossKind::Bce, 0.0, 1.0).unwrap();
        assert!((v - (-libm::log(LOG_CLAMP))).abs() < 1e-9);
        assert!(v.is_finite());
    }

    #[test]
    fn batch_examples() {
        assert_eq!(
            batch_loss(LossKind::Mse, &[0.0, 1.0], &[1.0, 1.0]).unwrap(),
            0.25
        );
        assert_eq!(
            batch_loss(LossKind::ZeroOne, &[1.0, -1.0], &[1.0, 1.0]).unwrap(),
            0.5
        );
        let g = batch_loss(LossKind::GeomCrossEntropy, &[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((g - LN2).abs() < 1e-15);
    }

    #[test]
    fn batch_errors() {
        assert_eq!(
            batch_loss(LossKind::Mse, &[0.1], &[0.1, 0.2]),
            Err(Error::LengthMismatch {
                predictions: 1,
                labels: 2
            })
        );
        assert_eq!(batch_loss(LossKind::Mse, &[], &[]), Err(Error::EmptyBatch));
    }

    #[test]
    fn kl_bce_entropy_examples() {
        let (kl, bce, h) = kl_bce_entropy(0.5, 1.0).unwrap();
        assert!((kl - LN2).abs() < 1e-15 && (bce - LN2).abs() < 1e-15 && h == 0.0);
        let (kl, bce, h) = kl_bce_entropy(0.5, 0.5).unwrap();
        assert!(kl.abs() < 1e-15 && (bce - LN2).abs() < 1e-15 && (h - LN2).abs() < 1e-15);
        let (kl, bce, h) = kl_bce_entropy(0.9, 0.9).unwrap();
        let h09 = -(0.9 * libm::log(0.9) + 0.1 * libm::log(0.1));
        assert!(kl.abs() < 1e-15);
        assert!((bce - h09).abs() < 1e-15 && (h - h09).abs() < 1e-15);
    }

    #[test]
    fn constants_table() {
        let z = loss_constants(LossKind::ZeroOne).unwrap();
        assert_eq!((z.lipschitz, z.range_width, z.c, z.beta), (0.5, 2.0, 1.0, 0.5));
        let m = loss_constants(LossKind::Mse).unwrap();
        assert_eq!((m.lipschitz, m.range_width, m.c, m.beta), (2.0, 1.0, 2.0, 2.0));
        for kind in [LossKind::Kl, LossKind::Bce, LossKind::GeomCrossEntropy] {
            assert!(matches!(
                loss_constants(kind),
                Err(Error::UnsupportedLoss { .. })
            ));
        }
    }

    #[test]
    fn flags() {
        let eligible: alloc::vec::Vec<_> = LossKind::ALL
            .into_iter()
            .filter(|k| k.closed_form_eligible())
            .collect();
        assert_eq!(
            eligible,
            [LossKind::Mse, LossKind::ZeroOne, LossKind::GeomCrossEntropy]
        );
        let convex: alloc::vec::Vec<_> =
            LossKind::ALL.into_iter().filter(|k| k.doubly_convex()).collect();
        assert_eq!(convex, [LossKind::Mse, LossKind::Kl]);
    }

    #[test]
    fn names_round_trip() {
        for kind in LossKind::ALL {
            assert_eq!(kind.as_str().parse::<LossKind>().unwrap(), kind);
        }
        assert!("ce".parse::<LossKind>().is_err());
    }

    fn sample_for(kind: LossKind) -> impl Strategy<Value = (f64, f64)> {
        let pred = if kind == LossKind::ZeroOne {
            prop_oneof![Just(-1.0), Just(1.0)].boxed()
        } else if kind.is_log_loss() {
            (0.001f64..0.999).boxed()
        } else {
            (0.0f64..=1.0).boxed()
        };
        let label = match kind {
            LossKind::Mse => (0.0f64..=1.0).boxed(),
            LossKind::ZeroOne => prop_oneof![Just(-1.0), Just(1.0)].boxed(),
            _ => prop_oneof![Just(0.0), Just(1.0)].boxed(),
        };
        (pred, label)
    }

    proptest! {
        #[test]
        fn kl_is_bce_minus_entropy(p in 1e-6f64..(1.0 - 1e-6), y in prop_oneof![Just(0.0), Just(1.0)]) {
            let (kl, bce, h) = kl_bce_entropy(p, y).unwrap();
            prop_assert!((kl - (bce - h)).abs() <= 1e-12);
        }

        #[test]
        fn kl_is_bce_minus_entropy_for_soft_labels(p in 1e-6f64..(1.0 - 1e-6), y in 0.0f64..=1.0) {
            let (kl, bce, h) = kl_bce_entropy(p, y).unwrap();
            prop_assert!((kl - (bce - h)).abs() <= 1e-12);
        }

        #[test]
        fn batch_of_one_is_pointwise(
            (kind, (p, y)) in (0usize..5).prop_flat_map(|i| (Just(LossKind::ALL[i]), sample_for(LossKind::ALL[i])))
        ) {
            let single = batch_loss(kind, &[p], &[y]).unwrap();
            let point = pointwise_loss(kind, p, y).unwrap();
            prop_assert!((single - point).abs() <= 1e-12 * point.abs().max(1.0));
        }

        #[test]
        fn mse_jointly_convex(x1 in 0.0f64..=1.0, y1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0,
                              y2 in 0.0f64..=1.0, lam in 0.0f64..=1.0) {
            let mix = |a: f64, b: f64| lam * a + (1.0 - lam) * b;
            let lhs = pointwise_loss(LossKind::Mse, mix(x1, x2), mix(y1, y2)).unwrap();
            let rhs = lam * pointwise_loss(LossKind::Mse, x1, y1).unwrap()
                + (1.0 - lam) * pointwise_loss(LossKind::Mse, x2, y2).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn kl_jointly_convex(x1 in 0.01f64..0.99, y1 in 0.0f64..=1.0, x2 in 0.01f64..0.99,
                             y2 in 0.0f64..=1.0, lam in 0.0f64..=1.0) {
            let mix = |a: f64, b: f64| lam * a + (1.0 - lam) * b;
            let lhs = pointwise_loss(LossKind::Kl, mix(x1, x2), mix(y1, y2)).unwrap();
            let rhs = lam * pointwise_loss(LossKind::Kl, x1, y1).unwrap()
                + (1.0 - lam) * pointwise_loss(LossKind::Kl, x2, y2).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn zero_one_on_sign_averages_in_unit_interval(
            preds in proptest::collection::vec(prop_oneof![Just(-1.0), Just(1.0)], 1..10),
            flip in any::<u16>(),
        ) {
            let labels: alloc::vec::Vec<f64> = preds
                .iter()
                .enumerate()
                .map(|(i, _)| if flip >> (i % 16) & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let v = batch_loss(LossKind::ZeroOne, &preds, &labels).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
