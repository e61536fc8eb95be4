//! Gini impurity and binary category-subset split search.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::CategoricalMatrix;
use crate::scalar::Scalar;

/// Class counts `[unfavourable, favourable]`.
pub type ClassCounts = [usize; 2];

/// `1 - sum p_i^2` over the two classes.
pub fn gini<F: Scalar>(counts: ClassCounts) -> Result<F> {
    let n = counts[0] + counts[1];
    if n == 0 {
        return Err(Error::invalid("gini of an empty node"));
    }
    Ok(gini_unchecked(counts))
}

#[inline]
pub(crate) fn gini_unchecked<F: Scalar>(counts: ClassCounts) -> F {
    let n = counts[0] + counts[1];
    let p0 = F::ratio(counts[0], n);
    let p1 = F::ratio(counts[1], n);
    F::one() - (p0 * p0 + p1 * p1)
}

/// Impurity decrease of splitting `parent` into `left` and `right`.
pub fn gain<F: Scalar>(parent: ClassCounts, left: ClassCounts, right: ClassCounts) -> F {
    let n = parent[0] + parent[1];
    let nl = left[0] + left[1];
    let nr = right[0] + right[1];
    if nl == 0 || nr == 0 {
        return F::zero();
    }
    gini_unchecked::<F>(parent)
        - F::ratio(nl, n) * gini_unchecked::<F>(left)
        - F::ratio(nr, n) * gini_unchecked::<F>(right)
}

/// Smallest impurity decrease treated as a real improvement; guards against
/// rounding noise on splits whose true gain is zero.
pub fn min_gain<F: Scalar>() -> F {
    F::epsilon() * F::lit(64.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split<F> {
    pub feature: usize,
    /// Ascending category codes routed left.
    pub left: Vec<u32>,
    /// Ascending category codes routed right (observed at the node).
    pub right: Vec<u32>,
    pub gain: F,
    pub left_counts: ClassCounts,
    pub right_counts: ClassCounts,
}

/// Left categories, right categories, gain, left counts, right counts.
pub type Partition<F> = (Vec<u32>, Vec<u32>, F, ClassCounts, ClassCounts);

/// Best binary partition of the categories of one feature, given the
/// per-category class counts.
///
/// Categories are ordered by favourable rate and only the `K - 1` prefix
/// cuts of that order are evaluated; for two classes and Gini impurity the
/// optimum over all `2^(K-1) - 1` partitions is among them.
pub fn best_partition<F: Scalar>(per_category: &[ClassCounts]) -> Option<Partition<F>> {
    let mut present: Vec<u32> = (0..per_category.len() as u32)
        .filter(|&c| {
            let k = per_category[c as usize];
            k[0] + k[1] > 0
        })
        .collect();
    if present.len() < 2 {
        return None;
    }
    present.sort_by(|&a, &b| {
        let ka = per_category[a as usize];
        let kb = per_category[b as usize];
        // ka.pos / ka.n  vs  kb.pos / kb.n, cross-multiplied
        let lhs = ka[1] as u128 * (kb[0] + kb[1]) as u128;
        let rhs = kb[1] as u128 * (ka[0] + ka[1]) as u128;
        lhs.cmp(&rhs).then(a.cmp(&b))
    });
    let mut parent = [0usize; 2];
    for &c in &present {
        let k = per_category[c as usize];
        parent[0] += k[0];
        parent[1] += k[1];
    }
    let mut left = [0usize; 2];
    let mut best: Option<(usize, F, ClassCounts)> = None;
    for cut in 1..present.len() {
        let k = per_category[present[cut - 1] as usize];
        left[0] += k[0];
        left[1] += k[1];
        let right = [parent[0] - left[0], parent[1] - left[1]];
        let g = gain::<F>(parent, left, right);
        if best.as_ref().is_none_or(|(_, bg, _)| g > *bg) {
            best = Some((cut, g, left));
        }
    }
    let (cut, g, left) = best?;
    let mut l = present[..cut].to_vec();
    let mut r = present[cut..].to_vec();
    l.sort_unstable();
    r.sort_unstable();
    Some((l, r, g, left, [parent[0] - left[0], parent[1] - left[1]]))
}

/// Per-category class counts of `feature` over `rows`.
pub fn category_counts(x: &CategoricalMatrix, y: &[bool], rows: &[usize], feature: usize, buf: &mut Vec<ClassCounts>) {
    buf.clear();
    buf.resize(x.arity()[feature] as usize, [0, 0]);
    for &i in rows {
        let c = x.get(i, feature) as usize;
        if c >= buf.len() {
            buf.resize(c + 1, [0, 0]);
        }
        buf[c][y[i] as usize] += 1;
    }
}

/// Best split of `rows` over the candidate `features`, or `None` when no
/// split decreases impurity or every split leaves a child with fewer than
/// `min_instances` rows. Ties go to the lower feature index.
pub fn best_split<F: Scalar>(
    x: &CategoricalMatrix,
    y: &[bool],
    rows: &[usize],
    features: &[usize],
    min_instances: usize,
) -> Option<Split<F>> {
    let mut buf = Vec::new();
    let mut best: Option<Split<F>> = None;
    let threshold = min_gain::<F>();
    let mut sorted = features.to_vec();
    sorted.sort_unstable();
    for &f in &sorted {
        category_counts(x, y, rows, f, &mut buf);
        let Some((left, right, g, lc, rc)) = best_partition::<F>(&buf) else {
            continue;
        };
        if lc[0] + lc[1] < min_instances || rc[0] + rc[1] < min_instances {
            continue;
        }
        if g <= threshold {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => g.partial_cmp(&b.gain) == Some(Ordering::Greater),
        };
        if better {
            best = Some(Split {
                feature: f,
                left,
                right,
                gain: g,
                left_counts: lc,
                right_counts: rc,
            });
        }
    }
    best
}
