//! Performance metrics from the binary confusion matrix, and the group
//! fairness metrics CVS (statistical parity difference), DI (disparate
//! impact) and NPI (normalised prejudice index).
//!
//! Outcome vectors use `true` for the favourable outcome; sensitive vectors
//! use `true` for the privileged group. All probabilities are plug-in
//! estimates from counts.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A metric that may legitimately have no finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue<F> {
    Finite(F),
    /// Positive numerator over a zero denominator.
    Infinite,
    /// Zero over zero, or a degenerate distribution.
    Undefined,
}

impl<F: Scalar> MetricValue<F> {
    pub fn finite(self) -> Option<F> {
        match self {
            MetricValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, MetricValue::Finite(_))
    }

    pub fn map(self, f: impl FnOnce(F) -> F) -> Self {
        match self {
            MetricValue::Finite(x) => MetricValue::Finite(f(x)),
            other => other,
        }
    }

    /// `num / den`, with explicit markers for a zero denominator.
    pub fn quotient(num: F, den: F) -> Self {
        if den != F::zero() {
            MetricValue::Finite(num / den)
        } else if num != F::zero() {
            MetricValue::Infinite
        } else {
            MetricValue::Undefined
        }
    }

    fn of_counts(num: usize, den: usize) -> Self {
        if den == 0 {
            MetricValue::Undefined
        } else {
            MetricValue::Finite(F::ratio(num, den))
        }
    }
}

impl<F: Scalar> fmt::Display for MetricValue<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Finite(x) => write!(f, "{x}"),
            MetricValue::Infinite => f.write_str("inf"),
            MetricValue::Undefined => f.write_str("NA"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

/// Tallies the confusion matrix with `favourable` as the positive class.
pub fn confusion<T: PartialEq>(labels: &[T], predictions: &[T], favourable: &T) -> Result<ConfusionMatrix> {
    check_len(labels.len(), predictions.len())?;
    let mut cm = ConfusionMatrix::default();
    for (y, p) in labels.iter().zip(predictions) {
        match (y == favourable, p == favourable) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Performance<F> {
    pub accuracy: MetricValue<F>,
    pub precision: MetricValue<F>,
    pub recall: MetricValue<F>,
    pub specificity: MetricValue<F>,
    pub fpr: MetricValue<F>,
    pub f1: MetricValue<F>,
}

pub fn performance<F: Scalar>(cm: &ConfusionMatrix) -> Performance<F> {
    let specificity = MetricValue::of_counts(cm.tn, cm.tn + cm.fp);
    Performance {
        accuracy: MetricValue::of_counts(cm.tp + cm.tn, cm.total()),
        precision: MetricValue::of_counts(cm.tp, cm.tp + cm.fp),
        recall: MetricValue::of_counts(cm.tp, cm.tp + cm.fn_),
        specificity,
        fpr: specificity.map(|s| F::one() - s),
        f1: MetricValue::of_counts(2 * cm.tp, 2 * cm.tp + cm.fn_ + cm.fp),
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// 2×2 contingency table, `table[outcome][privileged]`.
pub fn contingency(outcomes: &[bool], sensitive: &[bool]) -> Result<[[usize; 2]; 2]> {
    check_len(outcomes.len(), sensitive.len())?;
    let mut t = [[0usize; 2]; 2];
    for (&y, &s) in outcomes.iter().zip(sensitive) {
        t[y as usize][s as usize] += 1;
    }
    Ok(t)
}

/// Favourable rates `(P(Y=1|S=1), P(Y=1|S=0))`.
pub fn group_rates<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<(F, F)> {
    let t = contingency(outcomes, sensitive)?;
    let n_priv = t[0][1] + t[1][1];
    let n_unpriv = t[0][0] + t[1][0];
    if n_priv == 0 {
        return Err(Error::EmptyGroup("privileged"));
    }
    if n_unpriv == 0 {
        return Err(Error::EmptyGroup("unprivileged"));
    }
    Ok((F::ratio(t[1][1], n_priv), F::ratio(t[1][0], n_unpriv)))
}

/// Statistical parity difference `P(Y=1|S=1) - P(Y=1|S=0)`.
pub fn cvs<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<F> {
    let (privileged, unprivileged) = group_rates::<F>(outcomes, sensitive)?;
    Ok(privileged - unprivileged)
}

/// Disparate impact `P(Y=1|S=0) / P(Y=1|S=1)`.
pub fn disparate_impact<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<MetricValue<F>> {
    let (privileged, unprivileged) = group_rates::<F>(outcomes, sensitive)?;
    Ok(MetricValue::quotient(unprivileged, privileged))
}

/// Four-fifths rule: fair iff `0.8 < DI < 1.25`.
pub fn passes_80_rule<F: Scalar>(di: MetricValue<F>) -> bool {
    match di {
        MetricValue::Finite(d) => d > F::lit(0.8) && d < F::lit(1.25),
        _ => false,
    }
}

/// Shannon entropy of a count vector, natural log, `0 log 0 = 0`.
fn entropy<F: Scalar>(counts: &[usize], n: usize) -> F {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = F::ratio(c, n);
            -p * p.ln()
        })
        .sum()
}

/// Normalised prejudice index from a 2×2 table `table[outcome][group]`:
/// mutual information over the geometric mean of the two marginal
/// entropies. Undefined when either marginal is degenerate.
pub fn npi_from_table<F: Scalar>(table: [[usize; 2]; 2]) -> MetricValue<F> {
    let n: usize = table.iter().flatten().sum();
    if n == 0 {
        return MetricValue::Undefined;
    }
    let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let h_outcome = entropy::<F>(&rows, n);
    let h_group = entropy::<F>(&cols, n);
    if h_outcome <= F::zero() || h_group <= F::zero() {
        return MetricValue::Undefined;
    }
    let mut mi = F::zero();
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            // exact independence in a cell contributes exactly zero
            let num = c as u128 * n as u128;
            let den = rows[i] as u128 * cols[j] as u128;
            if num == den {
                continue;
            }
            let ratio = F::from_u128(num).unwrap() / F::from_u128(den).unwrap();
            mi = mi + F::ratio(c, n) * ratio.ln();
        }
    }
    // guard against -0 and rounding just below zero
    let mi = mi.max(F::zero());
    MetricValue::Finite((mi / (h_outcome * h_group).sqrt()).min(F::one()))
}

pub fn npi<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<MetricValue<F>> {
    Ok(npi_from_table(contingency(outcomes, sensitive)?))
}

/// Prejudice index (mutual information) in nats.
pub fn prejudice_index<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<F> {
    let t = contingency(outcomes, sensitive)?;
    let n = outcomes.len();
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let mut mi = F::zero();
    for i in 0..2 {
        for j in 0..2 {
            if t[i][j] > 0 {
                let p = F::ratio(t[i][j], n);
                mi = mi + p * (p / (F::ratio(rows[i], n) * F::ratio(cols[j], n))).ln();
            }
        }
    }
    Ok(mi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessReport<F> {
    pub cvs: F,
    pub di: MetricValue<F>,
    pub npi: MetricValue<F>,
    pub passes_80_rule: bool,
    /// `P(Y=1|S=1)`
    pub rate_privileged: F,
    /// `P(Y=1|S=0)`
    pub rate_unprivileged: F,
}

pub fn fairness_report<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> Result<FairnessReport<F>> {
    let (rate_privileged, rate_unprivileged) = group_rates::<F>(outcomes, sensitive)?;
    let di = MetricValue::quotient(rate_unprivileged, rate_privileged);
    Ok(FairnessReport {
        cvs: rate_privileged - rate_unprivileged,
        di,
        npi: npi(outcomes, sensitive)?,
        passes_80_rule: passes_80_rule(di),
        rate_privileged,
        rate_unprivileged,
    })
}

/// Ratio of a prediction-level metric to the same metric on the training
/// subset. A zero baseline makes the ratio meaningless, so the prediction
/// metric itself is reported and `substituted` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEntry<F> {
    pub value: MetricValue<F>,
    pub substituted: bool,
}

pub fn fairness_ratio<F: Scalar>(prediction: MetricValue<F>, training: MetricValue<F>) -> RatioEntry<F> {
    match (prediction, training) {
        (p, MetricValue::Finite(t)) if t == F::zero() => RatioEntry {
            value: p,
            substituted: true,
        },
        (MetricValue::Finite(p), MetricValue::Finite(t)) => RatioEntry {
            value: MetricValue::Finite(p / t),
            substituted: false,
        },
        _ => RatioEntry {
            value: MetricValue::Undefined,
            substituted: false,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport<F> {
    pub cvs_ratio: RatioEntry<F>,
    pub cvs_ratio_abs: MetricValue<F>,
    pub npi_ratio: RatioEntry<F>,
}

pub fn ratio_report<F: Scalar>(
    prediction_cvs: MetricValue<F>,
    training_cvs: MetricValue<F>,
    prediction_npi: MetricValue<F>,
    training_npi: MetricValue<F>,
) -> RatioReport<F> {
    let cvs_ratio = fairness_ratio(prediction_cvs, training_cvs);
    RatioReport {
        cvs_ratio,
        cvs_ratio_abs: cvs_ratio.value.map(|x| x.abs()),
        npi_ratio: fairness_ratio(prediction_npi, training_npi),
    }
}
