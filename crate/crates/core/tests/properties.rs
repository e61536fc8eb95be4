use fairprep::dataset::{joint_cell, stratified_split_indices};
use fairprep::experiment::{boxplot, make_folds, CvConfig};
use fairprep::learners::{
    self, best_partition, predict, Candidates, ClassCounts, DecisionTree, ForestConfig, RandomForest, TreeConfig,
};
use fairprep::matrix::CategoricalMatrix;
use fairprep::metrics::{self, confusion, npi_from_table, performance, ConfusionMatrix, MetricValue};
use fairprep::preprocess::quantile;
use fairprep::sampling::{undersample, verify_balance, SamplingStrategy};
use proptest::prelude::*;

fn h2(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// NPI through entropies in bits: (H(Y) + H(S) - H(Y,S)) / sqrt(H(Y) H(S)).
fn npi_oracle(t: [[usize; 2]; 2]) -> Option<f64> {
    let hy = h2(&[t[0][0] + t[0][1], t[1][0] + t[1][1]]);
    let hs = h2(&[t[0][0] + t[1][0], t[0][1] + t[1][1]]);
    let hys = h2(&[t[0][0], t[0][1], t[1][0], t[1][1]]);
    if hy == 0.0 || hs == 0.0 {
        return None;
    }
    Some(((hy + hs - hys) / (hy * hs).sqrt()).clamp(0.0, 1.0))
}

fn vectors(t: [[usize; 2]; 2]) -> (Vec<bool>, Vec<bool>) {
    let mut y = Vec::new();
    let mut s = Vec::new();
    for (i, row) in t.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            y.extend(std::iter::repeat_n(i == 1, c));
            s.extend(std::iter::repeat_n(j == 1, c));
        }
    }
    (y, s)
}

#[test]
fn npi_matches_entropy_oracle_on_all_small_tables() {
    let mut checked = 0;
    for a in 0..=20 {
        for b in 0..=20 {
            for c in 0..=20 {
                for d in 0..=20 {
                    if a + b + c + d == 0 {
                        continue;
                    }
                    let t = [[a, b], [c, d]];
                    let got = npi_from_table::<f64>(t);
                    match npi_oracle(t) {
                        Some(want) => {
                            let v = got.finite().unwrap_or_else(|| panic!("{t:?}: {got:?}"));
                            assert!((v - want).abs() <= 1e-12, "{t:?}: {v} vs {want}");
                        }
                        None => assert_eq!(got, MetricValue::Undefined, "{t:?}"),
                    }
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 21usize.pow(4) - 1);
}

#[test]
fn npi_on_vectors_matches_table_form() {
    for t in [[[3, 4], [5, 6]], [[0, 9], [2, 0]], [[20, 1], [1, 20]], [[7, 7], [0, 0]]] {
        let (y, s) = vectors(t);
        assert_eq!(metrics::npi::<f64>(&y, &s).unwrap(), npi_from_table(t));
    }
}

fn confusion_matrix() -> impl Strategy<Value = ConfusionMatrix> {
    (0usize..200, 0usize..200, 0usize..200, 0usize..200).prop_map(|(tp, fn_, fp, tn)| ConfusionMatrix {
        tp,
        fn_,
        fp,
        tn,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn f1_equals_harmonic_mean(cm in confusion_matrix()) {
        let p = performance::<f64>(&cm);
        match (p.precision, p.recall) {
            (MetricValue::Finite(pr), MetricValue::Finite(re)) if pr + re > 0.0 => {
                let hm = 2.0 * pr * re / (pr + re);
                prop_assert!((p.f1.finite().unwrap() - hm).abs() <= 1e-12);
            }
            _ => {
                // precision or recall undefined: f1 still follows 2tp/(2tp+fn+fp)
                let den = 2 * cm.tp + cm.fn_ + cm.fp;
                if den == 0 {
                    prop_assert_eq!(p.f1, MetricValue::Undefined);
                } else {
                    prop_assert_eq!(p.f1, MetricValue::Finite(2.0 * cm.tp as f64 / den as f64));
                }
            }
        }
        for v in [p.accuracy, p.precision, p.recall, p.specificity, p.fpr, p.f1] {
            if let MetricValue::Finite(x) = v {
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn confusion_counts_partition(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..100)) {
        let (y, p): (Vec<bool>, Vec<bool>) = pairs.iter().copied().unzip();
        let cm = confusion(&y, &p, &true).unwrap();
        prop_assert_eq!(cm.total(), y.len());
        prop_assert_eq!(cm.tp, pairs.iter().filter(|&&(a, b)| a && b).count());
    }
}

fn outcome_pairs() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    prop::collection::vec((any::<bool>(), any::<bool>()), 2..120)
        .prop_filter("both groups present", |v| {
            v.iter().any(|p| p.1) && v.iter().any(|p| !p.1)
        })
        .prop_map(|v| v.into_iter().unzip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn group_swap(pair in outcome_pairs()) {
        let (y, s) = pair;
        let flipped: Vec<bool> = s.iter().map(|b| !b).collect();
        let cvs = metrics::cvs::<f64>(&y, &s).unwrap();
        let cvs_swapped = metrics::cvs::<f64>(&y, &flipped).unwrap();
        prop_assert!((cvs + cvs_swapped).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&cvs));
        let di = metrics::disparate_impact::<f64>(&y, &s).unwrap();
        let di_swapped = metrics::disparate_impact::<f64>(&y, &flipped).unwrap();
        match (di, di_swapped) {
            (MetricValue::Finite(a), MetricValue::Finite(b)) if a > 0.0 => prop_assert!((a * b - 1.0).abs() <= 1e-12),
            (MetricValue::Finite(a), MetricValue::Infinite) => prop_assert_eq!(a, 0.0),
            (MetricValue::Infinite, MetricValue::Finite(b)) => prop_assert_eq!(b, 0.0),
            (MetricValue::Undefined, MetricValue::Undefined) => {}
            other => prop_assert!(false, "unexpected pair {:?}", other),
        }
        match (metrics::npi::<f64>(&y, &s).unwrap(), metrics::npi::<f64>(&y, &flipped).unwrap()) {
            (MetricValue::Finite(a), MetricValue::Finite(b)) => prop_assert!((a - b).abs() <= 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}

// --- learners

fn gini(c: ClassCounts) -> f64 {
    let n = (c[0] + c[1]) as f64;
    1.0 - (c[0] as f64 / n).powi(2) - (c[1] as f64 / n).powi(2)
}

/// Best gain over every proper non-empty subset of the present categories.
fn exhaustive_best(per_category: &[ClassCounts]) -> Option<f64> {
    let present: Vec<usize> = (0..per_category.len())
        .filter(|&c| per_category[c][0] + per_category[c][1] > 0)
        .collect();
    if present.len() < 2 {
        return None;
    }
    let parent = present
        .iter()
        .fold([0, 0], |a, &c| [a[0] + per_category[c][0], a[1] + per_category[c][1]]);
    let n = (parent[0] + parent[1]) as f64;
    let mut best = f64::NEG_INFINITY;
    for mask in 1..(1u32 << present.len()) - 1 {
        let mut l = [0, 0];
        for (bit, &c) in present.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                l[0] += per_category[c][0];
                l[1] += per_category[c][1];
            }
        }
        let r = [parent[0] - l[0], parent[1] - l[1]];
        let g = gini(parent) - (l[0] + l[1]) as f64 / n * gini(l) - (r[0] + r[1]) as f64 / n * gini(r);
        best = best.max(g);
    }
    Some(best)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ordered_split_is_optimal(table in prop::collection::vec((0usize..15, 0usize..15), 2..=6)) {
        let per: Vec<ClassCounts> = table.iter().map(|&(a, b)| [a, b]).collect();
        let got = best_partition::<f64>(&per);
        match exhaustive_best(&per) {
            None => prop_assert!(got.is_none()),
            Some(want) => {
                let (l, r, g, lc, rc) = got.expect("split exists");
                prop_assert!((g - want).abs() <= 1e-12, "{} vs {}", g, want);
                prop_assert!(!l.is_empty() && !r.is_empty());
                let sum = |cats: &[u32]| cats.iter().fold([0, 0], |a, &c| [a[0] + per[c as usize][0], a[1] + per[c as usize][1]]);
                prop_assert_eq!(sum(&l), lc);
                prop_assert_eq!(sum(&r), rc);
            }
        }
    }
}

fn random_data() -> impl Strategy<Value = (CategoricalMatrix, Vec<bool>)> {
    (1usize..5, 4usize..60).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(2u32..5, d),
            prop::collection::vec(prop::collection::vec(0u32..100, d), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(arity, raw, y)| {
                let rows: Vec<Vec<u32>> = raw
                    .into_iter()
                    .map(|r| r.iter().zip(&arity).map(|(v, a)| v % a).collect())
                    .collect();
                (CategoricalMatrix::from_rows(arity, &rows).unwrap(), y)
            })
    })
}

/// Every combination of categories, for predicting unseen rows too.
fn all_rows(arity: &[u32]) -> CategoricalMatrix {
    let mut rows = vec![vec![]];
    for &a in arity {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                (0..a).map(move |v| {
                    let mut r = r.clone();
                    r.push(v);
                    r
                })
            })
            .collect();
    }
    CategoricalMatrix::from_rows(arity.to_vec(), &rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn single_tree_forest_is_a_tree((x, y) in random_data(), seed in any::<u64>()) {
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let tree_cfg = TreeConfig { seed, ..TreeConfig::default() };
        let tree = DecisionTree::<f64>::fit(&x, &y, &rows, tree_cfg).unwrap();
        let forest = RandomForest::<f64>::fit(&x, &y, &rows, ForestConfig {
            tree: tree_cfg,
            n_trees: 1,
            candidates: Candidates::All,
            bootstrap: false,
        }).unwrap();
        let grid = all_rows(x.arity());
        for r in grid.rows() {
            prop_assert_eq!(tree.predict_row(r), forest.predict_row(r));
        }
        prop_assert_eq!(&forest.trees[0].root, &tree.root);
    }
}

/// Label = (x0 in A0 and x1 in A1) or x2 in A2 over the full grid of
/// category combinations.
fn planted(arity: [u32; 3], sets: [&[u32]; 3]) -> (CategoricalMatrix, Vec<bool>) {
    let x = all_rows(&arity);
    let y = x
        .rows()
        .map(|r| (sets[0].contains(&r[0]) && sets[1].contains(&r[1])) || sets[2].contains(&r[2]))
        .collect();
    (x, y)
}

#[test]
fn deep_tree_fits_consistent_data() {
    let cases: [([u32; 3], [&[u32]; 3]); 4] = [
        ([2, 2, 2], [&[1], &[1], &[]]),
        ([3, 4, 2], [&[0, 2], &[1, 3], &[1]]),
        ([5, 3, 3], [&[4], &[0, 1], &[2]]),
        ([4, 4, 4], [&[0, 1, 2], &[3], &[0]]),
    ];
    for (arity, sets) in cases {
        let (x, y) = planted(arity, sets);
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let names = (0..3).map(|i| format!("x{i}")).collect();
        let model = learners::fit_tree::<f64>(&x, &y, &rows, names, TreeConfig::default()).unwrap();
        assert_eq!(predict(&model, &x).unwrap(), y, "{arity:?}");
    }
}

// --- sampling

fn fold_data() -> impl Strategy<Value = (Vec<bool>, Vec<bool>, Vec<usize>, u64)> {
    prop::collection::vec((any::<bool>(), prop::bool::weighted(0.3), any::<bool>()), 1..150).prop_flat_map(|v| {
        let y: Vec<bool> = v.iter().map(|t| t.0).collect();
        let s: Vec<bool> = v.iter().map(|t| t.1).collect();
        let fold: Vec<usize> = (0..v.len()).filter(|&i| v[i].2).collect();
        (Just(y), Just(s), Just(fold), any::<u64>())
    })
}

fn check_strategy(
    strategy: SamplingStrategy,
    y: &[bool],
    s: &[bool],
    fold: &[usize],
    seed: u64,
) -> Result<(), TestCaseError> {
    let groups = |i: usize| match strategy {
        SamplingStrategy::WithoutResampling => 0,
        SamplingStrategy::UndersamplingLabel => y[i] as usize,
        SamplingStrategy::UndersamplingProtected => s[i] as usize,
        SamplingStrategy::UndersamplingMultivariate => joint_cell(y[i], s[i]),
    };
    let n_groups = match strategy {
        SamplingStrategy::WithoutResampling => 1,
        SamplingStrategy::UndersamplingMultivariate => 4,
        _ => 2,
    };
    let mut sizes = vec![0usize; n_groups];
    for &i in fold {
        sizes[groups(i)] += 1;
    }
    let out = undersample(fold, y, s, strategy, seed);
    if fold.is_empty() || sizes.contains(&0) {
        prop_assert!(out.is_err());
        return Ok(());
    }
    let out = out.unwrap();
    let min = *sizes.iter().min().unwrap();
    prop_assert_eq!(out.indices.len(), min * n_groups);
    prop_assert!(out.indices.windows(2).all(|w| w[0] < w[1]));
    prop_assert!(out.indices.iter().all(|i| fold.contains(i)));
    let report = verify_balance(&out, y, s);
    prop_assert!(report.contract_holds);
    match strategy {
        SamplingStrategy::UndersamplingLabel => prop_assert!(report.labels_equal),
        SamplingStrategy::UndersamplingProtected => prop_assert!(report.groups_equal),
        SamplingStrategy::UndersamplingMultivariate => prop_assert!(report.cells_equal),
        SamplingStrategy::WithoutResampling => prop_assert_eq!(&out.indices, &fold.to_vec()),
    }
    // a smallest group survives whole
    let smallest = sizes.iter().position(|&c| c == min).unwrap();
    prop_assert!(fold
        .iter()
        .filter(|&&i| groups(i) == smallest)
        .all(|i| out.indices.contains(i)));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sampling_without_resampling((y, s, fold, seed) in fold_data()) {
        check_strategy(SamplingStrategy::WithoutResampling, &y, &s, &fold, seed)?;
    }

    #[test]
    fn sampling_label((y, s, fold, seed) in fold_data()) {
        check_strategy(SamplingStrategy::UndersamplingLabel, &y, &s, &fold, seed)?;
    }

    #[test]
    fn sampling_protected((y, s, fold, seed) in fold_data()) {
        check_strategy(SamplingStrategy::UndersamplingProtected, &y, &s, &fold, seed)?;
    }

    #[test]
    fn sampling_multivariate((y, s, fold, seed) in fold_data()) {
        check_strategy(SamplingStrategy::UndersamplingMultivariate, &y, &s, &fold, seed)?;
    }
}

// --- splits and folds

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn split_is_stratified(
        pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..300),
        fraction in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let (y, s): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let (train, test) = stratified_split_indices(&y, &s, fraction, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        for cell in 0..4 {
            let total = (0..y.len()).filter(|&i| joint_cell(y[i], s[i]) == cell).count();
            let kept = train.iter().filter(|&&i| joint_cell(y[i], s[i]) == cell).count();
            prop_assert!((kept as f64 - total as f64 * fraction).abs() < 1.0 + 1e-9, "cell {} kept {} of {}", cell, kept, total);
        }
        prop_assert_eq!(train.len(), (y.len() as f64 * fraction).round() as usize);
    }

    #[test]
    fn folds_partition_and_stratify(
        y in prop::collection::vec(any::<bool>(), 10..200),
        k in 2usize..8,
        stratified in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let folds = make_folds(&y, CvConfig { k, stratified, seed }).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = vec![0usize; y.len()];
        for f in &folds {
            prop_assert_eq!(f.train.len() + f.validation.len(), y.len());
            for &i in &f.validation {
                seen[i] += 1;
            }
            prop_assert!(f.train.iter().all(|i| !f.validation.contains(i)));
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let sizes: Vec<usize> = folds.iter().map(|f| f.validation.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        if stratified {
            let p = y.iter().filter(|&&b| b).count() as f64 / y.len() as f64;
            for class in [false, true] {
                let counts: Vec<usize> = folds.iter().map(|f| f.validation.iter().filter(|&&i| y[i] == class).count()).collect();
                prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
            }
            for f in &folds {
                let m = f.validation.len() as f64;
                let share = f.validation.iter().filter(|&&i| y[i]).count() as f64 / m;
                prop_assert!((share - p).abs() <= 1.0 / m + 1e-12);
            }
        }
    }
}

// --- order statistics

/// Linear interpolation between closest ranks, written from the rank
/// definition rather than from `quantile`.
fn rank_quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    if below == above {
        v[below]
    } else {
        v[below] * (above as f64 - pos) + v[above] * (pos - below as f64)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quartiles_match_rank_oracle(values in prop::collection::vec(-1e3f64..1e3, 1..200)) {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let got = quantile(&sorted, q).unwrap();
            prop_assert!((got - rank_quantile(&values, q)).abs() <= 1e-9);
        }
    }

    #[test]
    fn boxplot_of_150_values(values in prop::collection::vec(-50f64..50.0, 150)) {
        let b = boxplot(&values).unwrap();
        prop_assert!((b.q1 - rank_quantile(&values, 0.25)).abs() <= 1e-9);
        prop_assert!((b.median - rank_quantile(&values, 0.5)).abs() <= 1e-9);
        prop_assert!((b.q3 - rank_quantile(&values, 0.75)).abs() <= 1e-9);
        let iqr = b.q3 - b.q1;
        let n_out = values.iter().filter(|&&x| x < b.q1 - 1.5 * iqr || x > b.q3 + 1.5 * iqr).count();
        prop_assert_eq!(b.outliers.len(), n_out);
        prop_assert!(b.min <= b.lower_whisker && b.lower_whisker <= b.q1);
        prop_assert!(b.q3 <= b.upper_whisker && b.upper_whisker <= b.max);
    }
}

#[test]
fn f32_and_f64_agree_on_metrics() {
    let (y, s) = vectors([[43, 167], [62, 428]]);
    let a = metrics::fairness_report::<f64>(&y, &s).unwrap();
    let b = metrics::fairness_report::<f32>(&y, &s).unwrap();
    assert!((a.cvs - b.cvs as f64).abs() < 1e-6);
    assert!((a.npi.finite().unwrap() - b.npi.finite().unwrap() as f64).abs() < 1e-6);
    assert_eq!(a.passes_80_rule, b.passes_80_rule);
}
