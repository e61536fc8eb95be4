//! Tabular datasets: schema, loaders for the UCI Adult and German Credit
//! files, canonical serialisation and the label/sensitive stratified split.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Numerical,
    Categorical,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Numerical => "numerical",
            AttributeKind::Categorical => "categorical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: AttributeKind,
    /// Vocabulary of a categorical column; `Cell::Cat(i)` refers to `categories[i]`.
    pub categories: Vec<String>,
    /// Set when the column was produced by binning a numerical attribute.
    pub discretised: bool,
}

impl Column {
    pub fn numerical(name: &str) -> Self {
        Column {
            name: name.to_owned(),
            kind: AttributeKind::Numerical,
            categories: Vec::new(),
            discretised: false,
        }
    }

    pub fn categorical<S: AsRef<str>>(name: &str, categories: &[S]) -> Self {
        Column {
            name: name.to_owned(),
            kind: AttributeKind::Categorical,
            categories: categories.iter().map(|c| c.as_ref().to_owned()).collect(),
            discretised: false,
        }
    }

    pub fn code_of(&self, value: &str) -> Option<u32> {
        self.categories.iter().position(|c| c == value).map(|i| i as u32)
    }
}

/// A single table cell. `Missing` is a sentinel distinct from every category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Cat(u32),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub columns: Vec<Column>,
    pub label_column: String,
    pub sensitive_column: String,
    pub favourable_label: String,
    pub unprivileged_value: String,
    /// Whether missing markers may appear in the data.
    pub allows_missing: bool,
}

impl Schema {
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.index_of(name)?])
    }

    pub fn label_index(&self) -> usize {
        self.index_of(&self.label_column)
            .expect("schema validated: label column present")
    }

    pub fn sensitive_index(&self) -> usize {
        self.index_of(&self.sensitive_column)
            .expect("schema validated: sensitive column present")
    }

    /// Checks the structural invariants that hold from load time onwards.
    pub fn validate(&self) -> Result<()> {
        if self.label_column == self.sensitive_column {
            return Err(Error::Schema("label and sensitive columns must differ".into()));
        }
        let label = self.column(&self.label_column)?;
        self.index_of(&self.sensitive_column)?;
        if label.kind != AttributeKind::Categorical || label.categories.len() != 2 {
            return Err(Error::Schema("label must be a binary category".into()));
        }
        if label.code_of(&self.favourable_label).is_none() {
            return Err(Error::Schema(format!(
                "favourable label {:?} is not a label value",
                self.favourable_label
            )));
        }
        Ok(())
    }

    /// Checks that the sensitive attribute is binary and names the unprivileged value.
    pub fn validate_sensitive(&self) -> Result<()> {
        let s = self.column(&self.sensitive_column)?;
        if s.kind != AttributeKind::Categorical {
            return Err(Error::ColumnKind {
                column: s.name.clone(),
                expected: "categorical",
                found: s.kind.as_str(),
            });
        }
        if s.categories.len() != 2 || s.code_of(&self.unprivileged_value).is_none() {
            return Err(Error::Schema(format!(
                "sensitive column {} must be binary with value {:?}",
                s.name, self.unprivileged_value
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: Schema,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Category text of a cell, `None` for missing or numerical cells.
    pub fn category(&self, row: usize, col: usize) -> Option<&str> {
        match self.rows[row][col] {
            Cell::Cat(c) => Some(self.schema.columns[col].categories[c as usize].as_str()),
            _ => None,
        }
    }

    pub fn has_missing(&self, row: usize) -> bool {
        self.rows[row].iter().any(Cell::is_missing)
    }

    /// `true` where the instance carries the favourable label.
    pub fn label_vector(&self) -> Result<Vec<bool>> {
        let col = self.schema.label_index();
        let fav = self.schema.columns[col]
            .code_of(&self.schema.favourable_label)
            .ok_or_else(|| Error::Schema("favourable label not in vocabulary".into()))?;
        self.rows
            .iter()
            .map(|r| match r[col] {
                Cell::Cat(c) => Ok(c == fav),
                _ => Err(Error::Schema("label cells must be categorical".into())),
            })
            .collect()
    }

    /// `true` where the instance belongs to the privileged group.
    pub fn sensitive_vector(&self) -> Result<Vec<bool>> {
        self.schema.validate_sensitive()?;
        let col = self.schema.sensitive_index();
        let unpriv = self.schema.columns[col]
            .code_of(&self.schema.unprivileged_value)
            .expect("validated");
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| match r[col] {
                Cell::Cat(c) => Ok(c != unpriv),
                _ => Err(Error::Schema(format!("row {i}: sensitive cell missing"))),
            })
            .collect()
    }

    /// Keeps the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Canonical text form: comma-separated with a header row, missing cells
    /// as empty fields.
    pub fn write_canonical<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.schema.columns.iter().map(|c| c.name.as_str()))?;
        let mut record = Vec::with_capacity(self.schema.columns.len());
        for row in &self.rows {
            record.clear();
            for (cell, col) in row.iter().zip(&self.schema.columns) {
                record.push(match *cell {
                    Cell::Num(x) => x.to_string(),
                    Cell::Cat(c) => col.categories[c as usize].clone(),
                    Cell::Missing => String::new(),
                });
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<canonical output>", e))?;
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Adult

const ADULT_WORKCLASS: &[&str] = &[
    "Private",
    "Self-emp-not-inc",
    "Self-emp-inc",
    "Federal-gov",
    "Local-gov",
    "State-gov",
    "Without-pay",
    "Never-worked",
];
const ADULT_EDUCATION: &[&str] = &[
    "Bachelors",
    "Some-college",
    "11th",
    "HS-grad",
    "Prof-school",
    "Assoc-acdm",
    "Assoc-voc",
    "9th",
    "7th-8th",
    "12th",
    "Masters",
    "1st-4th",
    "10th",
    "Doctorate",
    "5th-6th",
    "Preschool",
];
const ADULT_MARITAL: &[&str] = &[
    "Married-civ-spouse",
    "Divorced",
    "Never-married",
    "Separated",
    "Widowed",
    "Married-spouse-absent",
    "Married-AF-spouse",
];
const ADULT_OCCUPATION: &[&str] = &[
    "Tech-support",
    "Craft-repair",
    "Other-service",
    "Sales",
    "Exec-managerial",
    "Prof-specialty",
    "Handlers-cleaners",
    "Machine-op-inspct",
    "Adm-clerical",
    "Farming-fishing",
    "Transport-moving",
    "Priv-house-serv",
    "Protective-serv",
    "Armed-Forces",
];
const ADULT_RELATIONSHIP: &[&str] = &[
    "Wife",
    "Own-child",
    "Husband",
    "Not-in-family",
    "Other-relative",
    "Unmarried",
];
const ADULT_RACE: &[&str] = &["White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"];
const ADULT_SEX: &[&str] = &["Female", "Male"];
const ADULT_COUNTRY: &[&str] = &[
    "United-States",
    "Cambodia",
    "England",
    "Puerto-Rico",
    "Canada",
    "Germany",
    "Outlying-US(Guam-USVI-etc)",
    "India",
    "Japan",
    "Greece",
    "South",
    "China",
    "Cuba",
    "Iran",
    "Honduras",
    "Philippines",
    "Italy",
    "Poland",
    "Jamaica",
    "Vietnam",
    "Mexico",
    "Portugal",
    "Ireland",
    "France",
    "Dominican-Republic",
    "Laos",
    "Ecuador",
    "Taiwan",
    "Haiti",
    "Columbia",
    "Hungary",
    "Guatemala",
    "Nicaragua",
    "Scotland",
    "Thailand",
    "Yugoslavia",
    "El-Salvador",
    "Trinadad&Tobago",
    "Peru",
    "Hong",
    "Holand-Netherlands",
];
const ADULT_INCOME: &[&str] = &["<=50K", ">50K"];

pub fn adult_schema() -> Schema {
    Schema {
        columns: vec![
            Column::numerical("age"),
            Column::categorical("workclass", ADULT_WORKCLASS),
            Column::numerical("fnlwgt"),
            Column::categorical("education", ADULT_EDUCATION),
            Column::numerical("education-num"),
            Column::categorical("marital-status", ADULT_MARITAL),
            Column::categorical("occupation", ADULT_OCCUPATION),
            Column::categorical("relationship", ADULT_RELATIONSHIP),
            Column::categorical("race", ADULT_RACE),
            Column::categorical("sex", ADULT_SEX),
            Column::numerical("capital-gain"),
            Column::numerical("capital-loss"),
            Column::numerical("hours-per-week"),
            Column::categorical("native-country", ADULT_COUNTRY),
            Column::categorical("income", ADULT_INCOME),
        ],
        label_column: "income".into(),
        sensitive_column: "sex".into(),
        favourable_label: ">50K".into(),
        unprivileged_value: "Female".into(),
        allows_missing: true,
    }
}

/// Parses one file in the UCI Adult layout. Test-file labels may carry a
/// trailing period and the file may start with a `|`-prefixed header line.
pub fn parse_adult(text: &str, source: &str) -> Result<Dataset> {
    let schema = adult_schema();
    let width = schema.columns.len();
    let label_idx = schema.label_index();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('|') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse_err = |message: String| Error::Parse {
            file: source.to_owned(),
            line: lineno + 1,
            message,
        };
        if fields.len() != width {
            return Err(parse_err(format!("expected {width} fields, got {}", fields.len())));
        }
        let mut row = Vec::with_capacity(width);
        for (i, (raw, col)) in fields.iter().zip(&schema.columns).enumerate() {
            let raw = if i == label_idx {
                raw.strip_suffix('.').unwrap_or(raw)
            } else {
                raw
            };
            let cell = if raw == "?" {
                if i == label_idx {
                    return Err(parse_err("missing label".into()));
                }
                Cell::Missing
            } else {
                match col.kind {
                    AttributeKind::Numerical => Cell::Num(
                        raw.parse()
                            .map_err(|_| parse_err(format!("{}: not a number: {raw:?}", col.name)))?,
                    ),
                    AttributeKind::Categorical => {
                        Cell::Cat(col.code_of(raw).ok_or_else(|| Error::UnknownCategory {
                            column: col.name.clone(),
                            value: raw.to_string(),
                        })?)
                    }
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty(source.to_owned()));
    }
    Ok(Dataset {
        name: "adult".into(),
        schema,
        rows,
    })
}

pub fn load_adult_file(path: &Path) -> Result<Dataset> {
    parse_adult(&read_text(path)?, &path.display().to_string())
}

/// Loads the Adult pre-split and returns the training portion. The test file
/// is parsed and validated but otherwise unused.
pub fn load_adult(train_path: &Path, test_path: &Path) -> Result<Dataset> {
    let train = load_adult_file(train_path)?;
    load_adult_file(test_path)?;
    Ok(train)
}

// ---------------------------------------------------------------------------
// German Credit

fn codes(attr: usize, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("A{attr}{i}")).collect()
}

pub fn german_schema() -> Schema {
    let cat = |name: &str, values: Vec<String>| Column::categorical(name, &values);
    Schema {
        columns: vec![
            cat("checking-status", codes(1, 1..=4)),
            Column::numerical("duration"),
            cat("credit-history", codes(3, 0..=4)),
            cat("purpose", codes(4, 0..=10)),
            Column::numerical("credit-amount"),
            cat("savings", codes(6, 1..=5)),
            cat("employment-since", codes(7, 1..=5)),
            Column::numerical("installment-rate"),
            cat("personal-status-sex", codes(9, 1..=5)),
            cat("other-debtors", codes(10, 1..=3)),
            Column::numerical("residence-since"),
            cat("property", codes(12, 1..=4)),
            Column::numerical("age"),
            cat("other-installment-plans", codes(14, 1..=3)),
            cat("housing", codes(15, 1..=3)),
            Column::numerical("existing-credits"),
            cat("job", codes(17, 1..=4)),
            Column::numerical("people-liable"),
            cat("telephone", codes(19, 1..=2)),
            cat("foreign-worker", codes(20, 1..=2)),
            Column::categorical("credit", &["good", "bad"]),
        ],
        label_column: "credit".into(),
        sensitive_column: "age".into(),
        favourable_label: "good".into(),
        unprivileged_value: "young".into(),
        allows_missing: false,
    }
}

/// Parses the space-separated UCI `german.data` layout (label 1 = good, 2 = bad).
pub fn parse_german(text: &str, source: &str) -> Result<Dataset> {
    let schema = german_schema();
    let width = schema.columns.len();
    let label_idx = schema.label_index();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            file: source.to_owned(),
            line: lineno + 1,
            message,
        };
        if fields.len() != width {
            return Err(parse_err(format!("expected {width} fields, got {}", fields.len())));
        }
        let mut row = Vec::with_capacity(width);
        for (i, (raw, col)) in fields.iter().zip(&schema.columns).enumerate() {
            let cell = if i == label_idx {
                match *raw {
                    "1" => Cell::Cat(0),
                    "2" => Cell::Cat(1),
                    other => return Err(parse_err(format!("label must be 1 or 2, got {other:?}"))),
                }
            } else {
                match col.kind {
                    AttributeKind::Numerical => Cell::Num(
                        raw.parse()
                            .map_err(|_| parse_err(format!("{}: not a number: {raw:?}", col.name)))?,
                    ),
                    AttributeKind::Categorical => {
                        Cell::Cat(col.code_of(raw).ok_or_else(|| Error::UnknownCategory {
                            column: col.name.clone(),
                            value: raw.to_string(),
                        })?)
                    }
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty(source.to_owned()));
    }
    Ok(Dataset {
        name: "german".into(),
        schema,
        rows,
    })
}

pub fn load_german(path: &Path) -> Result<Dataset> {
    parse_german(&read_text(path)?, &path.display().to_string())
}

/// Adds a `sex` column derived from `personal-status-sex` using the UCI
/// codebook: A91, A93, A94 are male; A92, A95 are female.
pub fn derive_sex(dataset: &Dataset) -> Result<Dataset> {
    let src = dataset.schema.index_of("personal-status-sex")?;
    if dataset.schema.index_of("sex").is_ok() {
        return Err(Error::Schema("sex already derived".into()));
    }
    let mut out = dataset.clone();
    let sex = Column::categorical("sex", &["male", "female"]);
    out.schema.columns.insert(src + 1, sex);
    for (i, row) in out.rows.iter_mut().enumerate() {
        let code = dataset.category(i, src).unwrap_or("");
        let value = match code {
            "A91" | "A93" | "A94" => 0,
            "A92" | "A95" => 1,
            other => {
                return Err(Error::UnknownCategory {
                    column: "personal-status-sex".into(),
                    value: other.into(),
                })
            }
        };
        row.insert(src + 1, Cell::Cat(value));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Stratified split

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// Joint (label, sensitive) cell id in canonical order:
/// 0 = (unfavourable, unprivileged), 1 = (unfavourable, privileged),
/// 2 = (favourable, unprivileged), 3 = (favourable, privileged).
#[inline]
pub fn joint_cell(label: bool, privileged: bool) -> usize {
    (label as usize) * 2 + privileged as usize
}

/// Per-cell train quotas: floor of the proportional share plus a
/// largest-remainder correction so the total is `round(n * fraction)`.
/// Ties in the remainder go to the earlier cell.
pub fn allocate_largest_remainder(cells: &[usize], fraction: f64) -> Vec<usize> {
    let n: usize = cells.iter().sum();
    let target = (n as f64 * fraction).round() as usize;
    let exact: Vec<f64> = cells.iter().map(|&c| c as f64 * fraction).collect();
    let mut quota: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut remaining = target.saturating_sub(quota.iter().sum());
    for &i in order.iter().cycle().take(cells.len() * 2) {
        if remaining == 0 {
            break;
        }
        if quota[i] < cells[i] {
            quota[i] += 1;
            remaining -= 1;
        }
    }
    quota
}

/// Index-level stratified split over joint (label, sensitive) cells.
/// Returns `(train, test)` row indices, each ascending.
pub fn stratified_split_indices(
    labels: &[bool],
    sensitive: &[bool],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if labels.len() != sensitive.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: sensitive.len(),
        });
    }
    let mut cells: [Vec<usize>; 4] = Default::default();
    for (i, (&y, &s)) in labels.iter().zip(sensitive).enumerate() {
        cells[joint_cell(y, s)].push(i);
    }
    let sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
    let quota = allocate_largest_remainder(&sizes, train_fraction);
    let mut rng = seed::rng(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (members, &k) in cells.iter_mut().zip(&quota) {
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits so that every joint (label, sensitive) cell keeps its proportion.
pub fn stratified_split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<SplitPair> {
    let labels = dataset.label_vector()?;
    let sensitive = dataset.sensitive_vector()?;
    let (train, test) = stratified_split_indices(&labels, &sensitive, train_fraction, seed)?;
    Ok(SplitPair {
        train: dataset.select(&train),
        test: dataset.select(&test),
    })
}

/// Counts per joint cell, in [`joint_cell`] order.
pub fn joint_counts(labels: &[bool], sensitive: &[bool]) -> [usize; 4] {
    let mut counts = [0; 4];
    for (&y, &s) in labels.iter().zip(sensitive) {
        counts[joint_cell(y, s)] += 1;
    }
    counts
}

/// Frequency of each category of a column, missing cells excluded.
pub fn category_frequencies(dataset: &Dataset, col: usize) -> BTreeMap<u32, usize> {
    let mut freq = BTreeMap::new();
    for row in &dataset.rows {
        if let Cell::Cat(c) = row[col] {
            *freq.entry(c).or_insert(0) += 1;
        }
    }
    freq
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADULT_ROW: &str = "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K";
    const GERMAN_ROW: &str = "A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1";

    #[test]
    fn adult_single_row() {
        let d = parse_adult(ADULT_ROW, "t").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.rows[0][0], Cell::Num(39.0));
        assert_eq!(d.category(0, 9), Some("Male"));
        assert_eq!(d.label_vector().unwrap(), vec![false]);
        assert_eq!(d.sensitive_vector().unwrap(), vec![true]);
    }

    #[test]
    fn adult_test_file_quirks() {
        let text = format!("|1x3 Cross validator\n{}.\n\n", ADULT_ROW.replace("<=50K", ">50K"));
        let d = parse_adult(&text, "t").unwrap();
        assert_eq!(d.label_vector().unwrap(), vec![true]);
    }

    #[test]
    fn adult_missing_marker() {
        let row = ADULT_ROW.replace("State-gov", "?");
        let d = parse_adult(&row, "t").unwrap();
        assert!(d.rows[0][1].is_missing());
        assert!(d.has_missing(0));
    }

    #[test]
    fn adult_errors() {
        assert!(matches!(parse_adult("", "t"), Err(Error::Empty(_))));
        assert!(matches!(parse_adult("1, 2, 3", "t"), Err(Error::Parse { line: 1, .. })));
        let bad = ADULT_ROW.replace("State-gov", "Space-gov");
        assert!(matches!(parse_adult(&bad, "t"), Err(Error::UnknownCategory { .. })));
    }

    #[test]
    fn german_single_row() {
        let d = parse_german(GERMAN_ROW, "t").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.schema.columns.len(), 21);
        assert_eq!(d.label_vector().unwrap(), vec![true]);
    }

    #[test]
    fn german_errors() {
        assert!(matches!(parse_german("\n", "t"), Err(Error::Empty(_))));
        let bad = GERMAN_ROW.replace("A34", "A39");
        assert!(matches!(parse_german(&bad, "t"), Err(Error::UnknownCategory { .. })));
        let bad_label = GERMAN_ROW.replace("A201 1", "A201 3");
        assert!(parse_german(&bad_label, "t").is_err());
    }

    #[test]
    fn sex_from_codebook() {
        let text = [GERMAN_ROW.replace("A93", "A92"), GERMAN_ROW.to_string()].join("\n");
        let d = derive_sex(&parse_german(&text, "t").unwrap()).unwrap();
        let col = d.schema.index_of("sex").unwrap();
        assert_eq!(d.category(0, col), Some("female"));
        assert_eq!(d.category(1, col), Some("male"));
        assert!(d.schema.index_of("personal-status-sex").is_ok());
        assert!(derive_sex(&d).is_err());
    }

    #[test]
    fn sex_requires_source_column() {
        let d = parse_adult(ADULT_ROW, "t").unwrap();
        assert!(matches!(derive_sex(&d), Err(Error::MissingColumn(_))));
    }

    #[test]
    fn largest_remainder_table() {
        assert_eq!(
            allocate_largest_remainder(&[61, 239, 88, 612], 0.7),
            vec![43, 167, 62, 428]
        );
        assert_eq!(allocate_largest_remainder(&[1, 1, 1, 1], 0.5), vec![1, 1, 0, 0]);
    }

    #[test]
    fn split_one_per_cell() {
        let labels = [false, false, true, true];
        let sens = [false, true, false, true];
        let (tr, te) = stratified_split_indices(&labels, &sens, 0.5, 3).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(te.len(), 2);
    }

    #[test]
    fn split_fraction_bounds() {
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(stratified_split_indices(&[true], &[true], f, 0).is_err());
        }
    }

    #[test]
    fn canonical_missing_is_empty_field() {
        let row = ADULT_ROW.replace("State-gov", "?");
        let d = parse_adult(&row, "t").unwrap();
        let mut buf = Vec::new();
        d.write_canonical(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let second = text.lines().nth(1).unwrap();
        assert!(second.starts_with("39,,77516,"));
    }
}
