//! k-Rademacher complexity and generalization bounds.
//!
//! The empirical k-Rademacher complexity of a finite class is
//!
//! ```text
//! R = E_sigma [ max_row (1/C(n,k)) sum_S sigma_S * value[row][S] ]
//! ```
//!
//! with one independent sign per k-subset `S`. A [`LossTable`] holds the
//! values, one row per hypothesis and one column per k-subset in colex order.
//!
//! The bound calculators combine an empirical k-risk with either a
//! complexity value (`theorem3_bound`) or the finite-class estimate
//! `xi = sqrt(2 ln S / C(n,k))` (`corollary4_bound`, `vc_bound`), plus the
//! deviation term `psi = sqrt(ln(1/delta) / n)`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, for_each_subset, ln_binom};
use crate::losses::{loss_constants, BatchTerms, LossKind};
use crate::risk::subset_loss;
use crate::rng::{substream, Stream};
use crate::sum::{self, NeumaierSum};
use crate::{Error, Result, ENUMERATION_CAP};

/// Largest column count accepted by [`k_rademacher_exact`].
pub const EXACT_RADEMACHER_MAX_COLUMNS: usize = 20;

/// Values of a finite class on every k-subset of an `n`-point sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossTable {
    rows: usize,
    cols: usize,
    n: usize,
    k: usize,
    /// Entries are stored divided by `scale` so that they lie in `[-1, 1]`.
    scale: f64,
    values: Vec<f64>,
}

impl LossTable {
    /// Builds a table from rows already bounded in `[-1, 1]`.
    pub fn from_rows(rows: &[Vec<f64>], n: usize, k: usize) -> Result<Self> {
        Self::build(rows, n, k, false)
    }

    /// Builds a table from arbitrary finite rows, dividing by the largest
    /// magnitude when it exceeds 1 (see [`LossTable::scale`]).
    pub fn from_raw_rows(rows: &[Vec<f64>], n: usize, k: usize) -> Result<Self> {
        Self::build(rows, n, k, true)
    }

    fn build(rows: &[Vec<f64>], n: usize, k: usize, normalize: bool) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::argument("a loss table needs at least one row"));
        }
        if k == 0 || k > n {
            return Err(Error::argument(alloc::format!(
                "table needs 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let cols = binom(n as u64, k as u64)?;
        if cols > ENUMERATION_CAP {
            return Err(Error::Budget {
                required: cols,
                cap: ENUMERATION_CAP,
            });
        }
        let cols = cols as usize;
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::argument(alloc::format!("non-finite table entry {v}")));
        }
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = if max_abs > 1.0 {
            if !normalize {
                return Err(Error::argument(alloc::format!(
                    "table entry of magnitude {max_abs} outside [-1, 1]"
                )));
            }
            max_abs
        } else {
            1.0
        };
        if scale != 1.0 {
            values.iter_mut().for_each(|v| *v /= scale);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            n,
            k,
            scale,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Factor the stored entries were divided by (1 unless some raw entry
    /// exceeded 1 in magnitude).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Normalized row `r`.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    /// Raw (unnormalized) entries, row by row.
    pub fn raw_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v * self.scale).collect())
            .collect()
    }

    /// Number of distinct rows, the cardinality of the class restricted to
    /// the sample.
    pub fn distinct_rows(&self) -> usize {
        let mut seen: Vec<&[f64]> = Vec::new();
        for r in 0..self.rows {
            let row = self.row(r);
            if !seen.iter().any(|s| *s == row) {
                seen.push(row);
            }
        }
        seen.len()
    }
}

fn check_predictions(hypotheses: &[Vec<f64>], n: usize) -> Result<()> {
    if hypotheses.is_empty() {
        return Err(Error::argument("need at least one hypothesis"));
    }
    for h in hypotheses {
        if h.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h.len(),
            });
        }
    }
    Ok(())
}

/// Loss table of a finite class: cell `(h, S)` is the batch loss of
/// hypothesis `h` on subset `S`, columns in colex order.
pub fn loss_table_from_evalsets(
    hypotheses: &[Vec<f64>],
    labels: &[f64],
    k: usize,
    kind: LossKind,
) -> Result<LossTable> {
    let n = labels.len();
    check_predictions(hypotheses, n)?;
    if k == 0 || k > n {
        return Err(Error::argument(alloc::format!(
            "table needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let cols = binom(n as u64, k as u64)?;
    if cols > ENUMERATION_CAP {
        return Err(Error::Budget {
            required: cols,
            cap: ENUMERATION_CAP,
        });
    }
    let rows = hypotheses
        .iter()
        .map(|preds| {
            let terms = preds
                .iter()
                .zip(labels)
                .map(|(&p, &y)| {
                    kind.check_sample_label(y)?;
                    BatchTerms::new(kind, p, y)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut row = Vec::with_capacity(cols as usize);
            for_each_subset(n, k, |s| row.push(subset_loss(kind, &terms, s)));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    LossTable::build(&rows, n, k, true)
}

/// Table of mean predictions: cell `(h, S)` is the average of hypothesis `h`
/// over subset `S`. Predictions must lie in `[-1, 1]`.
pub fn hypothesis_table(hypotheses: &[Vec<f64>], k: usize) -> Result<LossTable> {
    let n = hypotheses.first().map_or(0, Vec::len);
    check_predictions(hypotheses, n)?;
    if k == 0 || k > n {
        return Err(Error::argument(alloc::format!(
            "table needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let cols = binom(n as u64, k as u64)?;
    if cols > ENUMERATION_CAP {
        return Err(Error::Budget {
            required: cols,
            cap: ENUMERATION_CAP,
        });
    }
    let rows: Vec<Vec<f64>> = hypotheses
        .iter()
        .map(|preds| {
            let mut row = Vec::with_capacity(cols as usize);
            for_each_subset(n, k, |s| {
                row.push(sum::sum(s.iter().map(|&i| preds[i])) / k as f64)
            });
            row
        })
        .collect();
    LossTable::from_rows(&rows, n, k)
}

/// Signed sums `sum_j s_j * row[offset + j]` for every sign mask over a block
/// of `width` columns; bit `j` set means `+1`. Layout `[mask][row]`.
fn block_sums(table: &LossTable, offset: usize, width: usize) -> Vec<f64> {
    let masks = 1usize << width;
    let mut out = alloc::vec![0.0; masks * table.rows];
    for mask in 0..masks {
        for r in 0..table.rows {
            let row = &table.row(r)[offset..offset + width];
            let mut acc = 0.0;
            for (j, v) in row.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            out[mask * table.rows + r] = acc;
        }
    }
    out
}

/// Exact empirical k-Rademacher complexity by enumerating all `2^C(n,k)`
/// sign vectors.
///
/// The columns are split in two blocks whose signed sums are tabulated once,
/// so each sign vector costs one addition per row and no error accumulates
/// across vectors.
pub fn k_rademacher_exact(table: &LossTable) -> Result<f64> {
    let m = table.cols;
    if m > EXACT_RADEMACHER_MAX_COLUMNS {
        return Err(Error::Budget {
            required: 1u128 << m.min(127),
            cap: 1u128 << EXACT_RADEMACHER_MAX_COLUMNS,
        });
    }
    let lo_width = m / 2;
    let hi_width = m - lo_width;
    let lo = block_sums(table, 0, lo_width);
    let hi = block_sums(table, lo_width, hi_width);
    let rows = table.rows;
    let mut acc = NeumaierSum::new();
    for h in 0..1usize << hi_width {
        let hi_row = &hi[h * rows..(h + 1) * rows];
        let mut partial = NeumaierSum::new();
        for l in 0..1usize << lo_width {
            let lo_row = &lo[l * rows..(l + 1) * rows];
            let best = lo_row
                .iter()
                .zip(hi_row)
                .map(|(a, b)| a + b)
                .fold(f64::NEG_INFINITY, f64::max);
            partial.add(best);
        }
        acc.add(partial.total());
    }
    let vectors = (1u64 << m) as f64;
    Ok(table.scale * acc.total() / (vectors * m as f64))
}

/// Monte-Carlo estimate of the empirical k-Rademacher complexity; returns
/// `(estimate, standard error)`.
pub fn k_rademacher_mc(table: &LossTable, sigma_draws: u64, seed: u64) -> Result<(f64, f64)> {
    if sigma_draws < 2 {
        return Err(Error::argument(alloc::format!(
            "need at least 2 sign draws, got {sigma_draws}"
        )));
    }
    let m = table.cols;
    let mut signs = alloc::vec![0.0f64; m];
    let sups: Vec<f64> = (0..sigma_draws)
        .map(|d| {
            let mut rng = substream(seed, Stream::RademacherSigns, d);
            let mut bits = 0u64;
            for (j, s) in signs.iter_mut().enumerate() {
                if j % 64 == 0 {
                    bits = rng.next_u64();
                }
                *s = if bits >> (j % 64) & 1 == 1 { 1.0 } else { -1.0 };
            }
            (0..table.rows)
                .map(|r| sum::sum(table.row(r).iter().zip(&signs).map(|(v, s)| v * s)))
                .fold(f64::NEG_INFINITY, f64::max)
                / m as f64
        })
        .collect();
    let (mean, std) = sum::mean_and_sample_std(&sups);
    Ok((
        table.scale * mean,
        table.scale * std / libm::sqrt(sigma_draws as f64),
    ))
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::argument(alloc::format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// Finite-class bound `sqrt(2 ln |A| / C(n,k))` on the k-Rademacher
/// complexity of any `A` inside `[-1, 1]^C(n,k)`.
pub fn massart_bound(cardinality: u64, n: usize, k: usize) -> Result<f64> {
    if cardinality == 0 {
        return Err(Error::argument("class cardinality must be at least 1"));
    }
    xi(libm::log(cardinality as f64), n, k)
}

/// `xi = sqrt(2 ln S / C(n,k))`, with the shattering coefficient given as
/// `ln S` so that `S = 2^n` stays representable.
pub fn xi(ln_shatter: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    if !(ln_shatter >= 0.0) || !ln_shatter.is_finite() {
        return Err(Error::argument(alloc::format!(
            "ln of the shattering coefficient must be finite and >= 0, got {ln_shatter}"
        )));
    }
    Ok(libm::sqrt(2.0 * ln_shatter * libm::exp(-ln_binom(n as u64, k as u64))))
}

/// `ln 2^n`, the shattering coefficient of an unrestricted binary classifier.
pub fn ln_shatter_all_labelings(n: usize) -> f64 {
    n as f64 * core::f64::consts::LN_2
}

/// Deviation term `psi = sqrt(ln(1/delta) / n)`.
pub fn psi(n: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument(alloc::format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if n == 0 {
        return Err(Error::argument("sample size n must be positive"));
    }
    Ok(libm::sqrt(-libm::log(delta) / n as f64))
}

/// `xi(S; n, k) / xi(S; n, 1) = sqrt(n / C(n,k))` and its upper estimate
/// `k^(k/2) / n^((k-1)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiRatio {
    pub ratio: f64,
    pub upper: f64,
}

pub fn xi_ratio(n: usize, k: usize) -> Result<XiRatio> {
    check_nk(n, k)?;
    let ln_n = libm::log(n as f64);
    let ratio = libm::exp(0.5 * (ln_n - ln_binom(n as u64, k as u64)));
    let kf = k as f64;
    let upper = libm::exp(0.5 * kf * libm::log(kf) - 0.5 * (kf - 1.0) * ln_n);
    Ok(XiRatio { ratio, upper })
}

/// `xi` with the shattering coefficient replaced by its Sauer bound `n^V`.
pub fn sauer_xi(vc_dimension: u32, n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::argument(alloc::format!("need n >= 2, got n = {n}")));
    }
    xi(vc_dimension as f64 * libm::log(n as f64), n, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Theorem3,
    Corollary4,
    Vc,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Theorem3 => "theorem3",
            Regime::Corollary4 => "corollary4",
            Regime::Vc => "vc",
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Regime::Theorem3, Regime::Corollary4, Regime::Vc]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                Error::argument(alloc::format!(
                    "unknown regime '{s}' (expected theorem3, corollary4 or vc)"
                ))
            })
    }
}

/// Which constants multiply `xi` and `psi` in the finite-class bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constants {
    /// `xi + psi`, the classification statement.
    Stated,
    /// `2 beta xi + c psi` with the constants of the given loss.
    Strict(LossKind),
}

const STATED_NOTE: &str = "stated form xi + psi; the derivation carries 2*beta*xi + c*psi, \
    identical for zero_one (beta = 1/2, c = 1)";
const STRICT_NOTE: &str = "strict form 2*beta*xi + c*psi with the loss constants";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub regime: Regime,
    pub empirical_risk: f64,
    /// Value (or upper estimate) of the k-Rademacher complexity of the loss
    /// class.
    pub rademacher_term: f64,
    pub xi: f64,
    pub psi: f64,
    pub c: f64,
    pub beta: f64,
    pub delta: f64,
    pub n: usize,
    pub k: Option<usize>,
    pub total: f64,
    /// `xi >= 1`: the class-dependent term alone exceeds the risk range.
    pub vacuous: bool,
    pub strict_constants: bool,
    pub note: String,
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::argument(alloc::format!(
            "{name} must be finite and >= 0, got {v}"
        )));
    }
    Ok(())
}

/// `r_k(Z) + 2 R + c psi` for a Lipschitz loss.
pub fn theorem3_bound(
    empirical_risk: f64,
    rademacher: f64,
    kind: LossKind,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    check_nonnegative("empirical risk", empirical_risk)?;
    check_nonnegative("rademacher complexity", rademacher)?;
    let constants = loss_constants(kind)?;
    let psi = psi(n, delta)?;
    Ok(BoundReport {
        regime: Regime::Theorem3,
        empirical_risk,
        rademacher_term: rademacher,
        xi: 0.0,
        psi,
        c: constants.c,
        beta: constants.beta,
        delta,
        n,
        k: None,
        total: empirical_risk + 2.0 * rademacher + constants.c * psi,
        vacuous: false,
        strict_constants: true,
        note: String::from("r_k(Z) + 2 R + c psi"),
    })
}

fn finite_class_bound(
    regime: Regime,
    empirical_risk: f64,
    ln_shatter: f64,
    n: usize,
    k: usize,
    delta: f64,
    constants: Constants,
) -> Result<BoundReport> {
    check_nonnegative("empirical risk", empirical_risk)?;
    let xi = xi(ln_shatter, n, k)?;
    let psi = psi(n, delta)?;
    let (beta, c, strict) = match constants {
        Constants::Stated => (0.5, 1.0, false),
        Constants::Strict(kind) => {
            let lc = loss_constants(kind)?;
            (lc.beta, lc.c, true)
        }
    };
    let total = if strict {
        empirical_risk + 2.0 * beta * xi + c * psi
    } else {
        empirical_risk + xi + psi
    };
    Ok(BoundReport {
        regime,
        empirical_risk,
        rademacher_term: beta * xi,
        xi,
        psi,
        c,
        beta,
        delta,
        n,
        k: Some(k),
        total,
        vacuous: xi >= 1.0,
        strict_constants: strict,
        note: String::from(if strict { STRICT_NOTE } else { STATED_NOTE }),
    })
}

/// `r_k(Z) + xi + psi` in terms of the shattering coefficient (as `ln S`).
pub fn corollary4_bound(
    empirical_risk: f64,
    ln_shatter: f64,
    n: usize,
    k: usize,
    delta: f64,
    constants: Constants,
) -> Result<BoundReport> {
    finite_class_bound(
        Regime::Corollary4,
        empirical_risk,
        ln_shatter,
        n,
        k,
        delta,
        constants,
    )
}

/// Finite-class bound with `S <= n^V`.
pub fn vc_bound(
    empirical_risk: f64,
    vc_dimension: u32,
    n: usize,
    k: usize,
    delta: f64,
    constants: Constants,
) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::argument(alloc::format!("need n >= 2, got n = {n}")));
    }
    finite_class_bound(
        Regime::Vc,
        empirical_risk,
        vc_dimension as f64 * libm::log(n as f64),
        n,
        k,
        delta,
        constants,
    )
}
