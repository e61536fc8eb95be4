use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use fairprep::dataset::{self, category_frequencies, Cell, Dataset};
use fairprep::preprocess::{self, EncodingKind, POOL, POOL_THRESHOLD};

fn data(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")).join(name)
}

fn adult() -> Dataset {
    dataset::load_adult(&data("adult.data"), &data("adult.test")).unwrap()
}

fn german() -> Dataset {
    dataset::load_german(&data("german.data")).unwrap()
}

/// Non-empty records of a raw Adult file, split on commas and trimmed.
fn adult_records(name: &str) -> Vec<Vec<String>> {
    fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .filter(|l| l.contains(','))
        .map(|l| l.split(',').map(|f| f.trim().to_owned()).collect())
        .collect()
}

#[test]
fn adult_row_counts_match_raw_text() {
    let raw = adult_records("adult.data");
    assert_eq!(raw.len(), 32_561);
    let with_missing = raw.iter().filter(|r| r.iter().any(|f| f == "?")).count();
    assert_eq!(with_missing, 2_399);

    let d = adult();
    assert_eq!(d.len(), 32_561);
    assert_eq!((0..d.len()).filter(|&i| d.has_missing(i)).count(), 2_399);
    let test = dataset::load_adult_file(&data("adult.test")).unwrap();
    assert_eq!(test.len(), adult_records("adult.test").len());
}

#[test]
fn adult_cells_round_trip_through_canonical_text() {
    let raw = adult_records("adult.data");
    let d = adult();
    let mut buf = Vec::new();
    d.write_canonical(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 15);
    assert_eq!(header[14], "income");
    for (i, line) in lines.enumerate().step_by(97) {
        let fields: Vec<&str> = line.split(',').collect();
        for (j, f) in fields.iter().enumerate() {
            let want = if raw[i][j] == "?" { "" } else { raw[i][j].as_str() };
            if j == 0 || j == 2 || j == 4 || (10..=12).contains(&j) {
                assert_eq!(
                    f.parse::<f64>().unwrap(),
                    want.parse::<f64>().unwrap(),
                    "row {i} col {j}"
                );
            } else {
                assert_eq!(*f, want, "row {i} col {j}");
            }
        }
    }
}

#[test]
fn german_counts_match_raw_text() {
    let text = fs::read_to_string(data("german.data")).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 1_000);
    let young = rows.iter().filter(|r| r[12].parse::<u32>().unwrap() < 25).count();
    assert_eq!(young, 149);
    let good = rows.iter().filter(|r| r[20] == "1").count();
    assert_eq!(good, 700);

    let d = german();
    assert_eq!(d.len(), 1_000);
    assert_eq!(d.label_vector().unwrap().iter().filter(|&&g| g).count(), 700);
    let binarised = preprocess::binarise_age(&dataset::derive_sex(&d).unwrap()).unwrap();
    let privileged = binarised.sensitive_vector().unwrap();
    assert_eq!(privileged.iter().filter(|&&p| !p).count(), 149);
}

#[test]
fn german_split_reproduces_published_cells() {
    for seed in [0, 1, 42] {
        let train = preprocess::german_training_set(&german(), 0.7, seed).unwrap();
        assert_eq!(train.len(), 700);
        let y = train.label_vector().unwrap();
        let s = train.sensitive_vector().unwrap();
        // (unfav,unpriv), (unfav,priv), (fav,unpriv), (fav,priv)
        assert_eq!(dataset::joint_counts(&y, &s), [43, 167, 62, 428], "seed {seed}");
        assert!(train.schema.index_of("personal-status-sex").is_err());
        assert!(train.schema.index_of("sex").is_ok());
    }
}

#[test]
fn adult_age_has_four_occupied_quartile_bins() {
    let d = adult();
    let rule = preprocess::quartile_bins(&d, "age").unwrap();
    assert_eq!(rule.boundaries.len(), 3);
    let binned = rule.apply(&d).unwrap();
    let col = binned.schema.index_of("age").unwrap();
    let freq = category_frequencies(&binned, col);
    assert_eq!(freq.len(), 4);
    assert!(freq.values().all(|&c| c > 0));

    let mut ages: Vec<f64> = d
        .rows
        .iter()
        .map(|r| match r[0] {
            Cell::Num(x) => x,
            _ => panic!("age is numeric"),
        })
        .collect();
    ages.sort_by(f64::total_cmp);
    // sorted-position oracle for linear interpolation
    for (b, q) in rule.boundaries.iter().zip([0.25, 0.5, 0.75]) {
        let h = (ages.len() - 1) as f64 * q;
        let want = ages[h.floor() as usize] + (h - h.floor()) * (ages[h.ceil() as usize] - ages[h.floor() as usize]);
        assert!((b - want).abs() < 1e-9);
    }
}

#[test]
fn native_country_rare_values_pooled() {
    let raw = adult_records("adult.data");
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &raw {
        if r[13] != "?" {
            *freq.entry(r[13].as_str()).or_default() += 1;
        }
    }
    let rare: Vec<&str> = freq.iter().filter(|(_, &c)| c < 50).map(|(k, _)| *k).collect();
    assert!(rare.len() > 1);
    let pooled_total: usize = rare.iter().map(|k| freq[k]).sum();

    let pooled = preprocess::pool_rare_bins(&adult(), POOL_THRESHOLD);
    let col = pooled.schema.index_of("native-country").unwrap();
    let cats = &pooled.schema.columns[col].categories;
    assert!(rare.iter().all(|r| !cats.iter().any(|c| c == r)));
    let pool_code = cats.iter().position(|c| c == POOL).unwrap() as u32;
    assert_eq!(category_frequencies(&pooled, col)[&pool_code], pooled_total);
    assert_eq!(cats.len(), freq.len() - rare.len() + 1);
    // numerical, label and sensitive columns are never pooled
    for name in ["age", "income", "sex"] {
        let j = pooled.schema.index_of(name).unwrap();
        assert_eq!(pooled.schema.columns[j], adult().schema.columns[j]);
    }
}

#[test]
fn adult_versions_have_expected_shape() {
    let d = adult();
    let int = preprocess::adult_version(&d, EncodingKind::Integer).unwrap();
    assert_eq!(int.len(), 30_162);
    assert_eq!(int.features.n_cols(), 14);
    let one_hot = preprocess::adult_version(&d, EncodingKind::OneHot).unwrap();
    assert_eq!(one_hot.len(), 32_561);
    let without = preprocess::remove_sensitive(&one_hot).unwrap();
    assert_eq!(without.features.n_cols(), one_hot.features.n_cols() - 2);
    assert!(!without.sensitive_included);
    assert_eq!(without.sensitive, one_hot.sensitive);
    assert!(preprocess::remove_sensitive(&without).is_err());
}

#[test]
fn one_hot_decodes_to_the_binned_rows() {
    let d = adult();
    let (binned, _) = preprocess::discretise_numerical(&d, &[]).unwrap();
    let enc = preprocess::encode_one_hot(&binned).unwrap();
    let label = binned.schema.label_index();
    for i in (0..binned.len()).step_by(53) {
        let decoded = enc.decode_row(i);
        let want: Vec<(String, Option<String>)> = (0..binned.schema.columns.len())
            .filter(|&j| j != label)
            .map(|j| {
                (
                    binned.schema.columns[j].name.clone(),
                    binned.category(i, j).map(str::to_owned),
                )
            })
            .collect();
        assert_eq!(decoded, want, "row {i}");
    }
    // row-sum property per source attribute
    let sources: Vec<&str> = enc.provenance.iter().map(|p| p.source()).collect();
    for i in 0..enc.len() {
        let mut sums: BTreeMap<&str, u32> = BTreeMap::new();
        for (j, &v) in enc.features.row(i).iter().enumerate() {
            *sums.entry(sources[j]).or_default() += v;
        }
        for (src, s) in sums {
            let j = binned.schema.index_of(src).unwrap();
            let missing = binned.rows[i][j].is_missing();
            assert_eq!(s, u32::from(!missing), "row {i} {src}");
        }
    }
}

#[test]
fn german_integer_feature_bookkeeping() {
    let train = preprocess::german_training_set(&german(), 0.7, 0).unwrap();
    for kind in [EncodingKind::Integer, EncodingKind::OneHot] {
        let v = preprocess::german_version(&train, kind).unwrap();
        assert_eq!(v.len(), 700);
        if kind == EncodingKind::Integer {
            assert_eq!(v.features.n_cols(), 20);
            assert_eq!(preprocess::remove_sensitive(&v).unwrap().features.n_cols(), 19);
        }
    }
    assert!(preprocess::remove_personal_status(&train).is_err());
}

#[test]
fn encoded_text_has_provenance_header() {
    let train = preprocess::german_training_set(&german(), 0.7, 0).unwrap();
    let v = preprocess::german_version(&train, EncodingKind::OneHot).unwrap();
    let mut buf = Vec::new();
    v.write_text(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("age=young") && header.contains("age=aged"));
    assert!(header.ends_with("label,sensitive"));
    assert_eq!(text.lines().count(), 701);
}
