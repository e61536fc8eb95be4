//! Random undersampling of a training fold by label, by sensitive group, or
//! by the joint (label, sensitive) cell.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::dataset::joint_cell;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplingStrategy {
    WithoutResampling,
    UndersamplingLabel,
    UndersamplingProtected,
    UndersamplingMultivariate,
}

impl SamplingStrategy {
    pub const ALL: [SamplingStrategy; 4] = [
        SamplingStrategy::WithoutResampling,
        SamplingStrategy::UndersamplingLabel,
        SamplingStrategy::UndersamplingProtected,
        SamplingStrategy::UndersamplingMultivariate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SamplingStrategy::WithoutResampling => "without-resampling",
            SamplingStrategy::UndersamplingLabel => "undersampling-label",
            SamplingStrategy::UndersamplingProtected => "undersampling-protected",
            SamplingStrategy::UndersamplingMultivariate => "undersampling-multivariate",
        }
    }

    /// Grouping key of an instance, and the number of groups.
    fn key(self, label: bool, privileged: bool) -> (usize, usize) {
        match self {
            SamplingStrategy::WithoutResampling => (0, 1),
            SamplingStrategy::UndersamplingLabel => (label as usize, 2),
            SamplingStrategy::UndersamplingProtected => (privileged as usize, 2),
            SamplingStrategy::UndersamplingMultivariate => (joint_cell(label, privileged), 4),
        }
    }

    fn group_name(self, g: usize) -> String {
        match self {
            SamplingStrategy::WithoutResampling => "fold".into(),
            SamplingStrategy::UndersamplingLabel => {
                format!("label class {}", ["unfavourable", "favourable"][g])
            }
            SamplingStrategy::UndersamplingProtected => {
                format!("sensitive group {}", ["unprivileged", "privileged"][g])
            }
            SamplingStrategy::UndersamplingMultivariate => format!(
                "joint cell ({}, {})",
                ["unfavourable", "favourable"][g / 2],
                ["unprivileged", "privileged"][g % 2]
            ),
        }
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SamplingStrategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown sampling strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledSubset {
    /// Ascending row indices into the parent dataset.
    pub indices: Vec<usize>,
    pub strategy: SamplingStrategy,
    pub seed: u64,
}

/// Keeps the smallest group whole and draws, uniformly without replacement,
/// the same number of instances from every other group.
pub fn undersample(
    fold: &[usize],
    labels: &[bool],
    sensitive: &[bool],
    strategy: SamplingStrategy,
    seed: u64,
) -> Result<SampledSubset> {
    if fold.is_empty() {
        return Err(Error::invalid("cannot sample an empty fold"));
    }
    if labels.len() != sensitive.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: sensitive.len(),
        });
    }
    let (_, n_groups) = strategy.key(false, false);
    let mut groups = vec![Vec::new(); n_groups];
    for &i in fold {
        if i >= labels.len() {
            return Err(Error::invalid(format!("fold index {i} out of range")));
        }
        groups[strategy.key(labels[i], sensitive[i]).0].push(i);
    }
    if let Some(g) = groups.iter().position(Vec::is_empty) {
        return Err(Error::EmptyCell(strategy.group_name(g)));
    }
    let min = groups.iter().map(Vec::len).min().expect("at least one group");
    let mut rng = seed::rng(seed);
    let mut indices = Vec::with_capacity(min * n_groups);
    for mut g in groups {
        // sort first so the draw does not depend on the order of `fold`
        g.sort_unstable();
        if g.len() > min {
            g.shuffle(&mut rng);
            g.truncate(min);
        }
        indices.extend(g);
    }
    indices.sort_unstable();
    indices.dedup();
    Ok(SampledSubset {
        indices,
        strategy,
        seed,
    })
}

/// Cell, class and group counts of a subset, with the equality the strategy
/// promises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    /// Counts per joint cell, see [`joint_cell`].
    pub cells: [usize; 4],
    /// `[unfavourable, favourable]`
    pub labels: [usize; 2],
    /// `[unprivileged, privileged]`
    pub groups: [usize; 2],
    pub labels_equal: bool,
    pub groups_equal: bool,
    pub cells_equal: bool,
    /// Whether the strategy's own equality contract holds.
    pub contract_holds: bool,
}

pub fn verify_balance(subset: &SampledSubset, labels: &[bool], sensitive: &[bool]) -> BalanceReport {
    let mut cells = [0usize; 4];
    for &i in &subset.indices {
        cells[joint_cell(labels[i], sensitive[i])] += 1;
    }
    let label_counts = [cells[0] + cells[1], cells[2] + cells[3]];
    let group_counts = [cells[0] + cells[2], cells[1] + cells[3]];
    let labels_equal = label_counts[0] == label_counts[1];
    let groups_equal = group_counts[0] == group_counts[1];
    let cells_equal = cells.iter().all(|&c| c == cells[0]);
    let contract_holds = match subset.strategy {
        SamplingStrategy::WithoutResampling => true,
        SamplingStrategy::UndersamplingLabel => labels_equal,
        SamplingStrategy::UndersamplingProtected => groups_equal,
        SamplingStrategy::UndersamplingMultivariate => cells_equal,
    };
    BalanceReport {
        cells,
        labels: label_counts,
        groups: group_counts,
        labels_equal,
        groups_equal,
        cells_equal,
        contract_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cells: [usize; 4]) -> (Vec<bool>, Vec<bool>) {
        let mut y = Vec::new();
        let mut s = Vec::new();
        for (c, &n) in cells.iter().enumerate() {
            for _ in 0..n {
                y.push(c >= 2);
                s.push(c % 2 == 1);
            }
        }
        (y, s)
    }

    #[test]
    fn without_resampling_is_identity() {
        let (y, s) = table([3, 5, 1, 9]);
        let fold: Vec<usize> = (0..y.len()).rev().collect();
        let out = undersample(&fold, &y, &s, SamplingStrategy::WithoutResampling, 1).unwrap();
        assert_eq!(out.indices, (0..y.len()).collect::<Vec<_>>());
    }

    #[test]
    fn german_multivariate_size() {
        let (y, s) = table([43, 167, 62, 428]);
        let fold: Vec<usize> = (0..y.len()).collect();
        let out = undersample(&fold, &y, &s, SamplingStrategy::UndersamplingMultivariate, 9).unwrap();
        assert_eq!(out.indices.len(), 172);
        let r = verify_balance(&out, &y, &s);
        assert_eq!(r.cells, [43; 4]);
        assert!(r.contract_holds);
        // the smallest cell survives whole
        assert!((0..43).all(|i| out.indices.contains(&i)));
    }

    #[test]
    fn balanced_input_unchanged() {
        let (y, s) = table([4, 4, 4, 4]);
        let fold: Vec<usize> = (0..16).collect();
        for strategy in SamplingStrategy::ALL {
            let out = undersample(&fold, &y, &s, strategy, 3).unwrap();
            assert_eq!(out.indices, fold, "{strategy}");
        }
    }

    #[test]
    fn label_strategy_leaves_groups_unequal() {
        let (y, s) = table([2, 8, 5, 5]);
        let fold: Vec<usize> = (0..20).collect();
        let out = undersample(&fold, &y, &s, SamplingStrategy::UndersamplingLabel, 0).unwrap();
        let r = verify_balance(&out, &y, &s);
        assert_eq!(r.labels, [10, 10]);
        assert!(r.contract_holds);
    }

    #[test]
    fn empty_cell_is_error() {
        let (y, s) = table([0, 3, 2, 2]);
        let fold: Vec<usize> = (0..7).collect();
        assert!(matches!(
            undersample(&fold, &y, &s, SamplingStrategy::UndersamplingMultivariate, 0),
            Err(Error::EmptyCell(_))
        ));
        assert!(undersample(&fold, &y, &s, SamplingStrategy::UndersamplingLabel, 0).is_ok());
        assert!(undersample(&[], &y, &s, SamplingStrategy::WithoutResampling, 0).is_err());
    }

    #[test]
    fn same_seed_same_subset() {
        let (y, s) = table([10, 20, 30, 40]);
        let fold: Vec<usize> = (0..100).collect();
        let a = undersample(&fold, &y, &s, SamplingStrategy::UndersamplingProtected, 5).unwrap();
        let b = undersample(&fold, &y, &s, SamplingStrategy::UndersamplingProtected, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in SamplingStrategy::ALL {
            assert_eq!(s.as_str().parse::<SamplingStrategy>().unwrap(), s);
        }
    }
}
