//! Discretisation, rare-category pooling, integer / one-hot encoding and
//! sensitive-attribute removal.

use std::collections::HashMap;
use std::io::Write;

use crate::dataset::{AttributeKind, Cell, Column, Dataset};
use crate::error::{Error, Result};
use crate::matrix::CategoricalMatrix;
use crate::scalar::Scalar;

/// Category code that replaces rare categories.
pub const POOL: &str = "Pool";
pub const POOL_THRESHOLD: usize = 50;
/// Minimum age of the privileged (`aged`) group in German Credit.
pub const AGE_THRESHOLD: f64 = 25.0;

/// Quantile of an ascending slice, linear interpolation between the closest
/// order statistics (`h = (n - 1) q`).
pub fn quantile<F: Scalar>(sorted: &[F], q: F) -> Option<F> {
    if sorted.is_empty() || q < F::zero() || q > F::one() {
        return None;
    }
    let h = F::from_count(sorted.len() - 1) * q;
    let lo = h.floor();
    let i = lo.to_usize().expect("index");
    if i + 1 >= sorted.len() {
        return Some(sorted[sorted.len() - 1]);
    }
    Some(sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]))
}

/// Maps a numerical column onto ordered bins. Bin `i` holds the values `x`
/// with `boundaries[i - 1] < x <= boundaries[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRule {
    pub column: String,
    pub boundaries: Vec<f64>,
    pub bin_labels: Vec<String>,
}

impl BinRule {
    pub fn new(column: &str, boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.windows(2).any(|w| w[0] >= w[1]) || boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid(format!(
                "bin boundaries for {column} must be finite and strictly increasing"
            )));
        }
        let mut bin_labels = Vec::with_capacity(boundaries.len() + 1);
        let mut lower = "-inf".to_string();
        for b in &boundaries {
            bin_labels.push(format!("({lower},{b}]"));
            lower = b.to_string();
        }
        bin_labels.push(format!("({lower},inf)"));
        Ok(BinRule {
            column: column.to_owned(),
            boundaries,
            bin_labels,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.bin_labels.len()
    }

    pub fn bin_of(&self, x: f64) -> usize {
        self.boundaries.partition_point(|&b| b < x)
    }

    /// Replaces the numerical column with its bin labels.
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        let col = dataset.schema.index_of(&self.column)?;
        require_kind(&dataset.schema.columns[col], AttributeKind::Numerical)?;
        let mut out = dataset.clone();
        out.schema.columns[col] = Column {
            discretised: true,
            ..Column::categorical(&self.column, &self.bin_labels)
        };
        for row in &mut out.rows {
            row[col] = match row[col] {
                Cell::Num(x) => Cell::Cat(self.bin_of(x) as u32),
                other => other,
            };
        }
        Ok(out)
    }
}

fn require_kind(col: &Column, expected: AttributeKind) -> Result<()> {
    if col.kind != expected {
        return Err(Error::ColumnKind {
            column: col.name.clone(),
            expected: expected.as_str(),
            found: col.kind.as_str(),
        });
    }
    Ok(())
}

/// Quartile boundaries of a numerical column. Repeated quartiles collapse,
/// and a boundary at the column maximum is dropped since it would leave the
/// top bin empty, so a constant column yields a single bin.
pub fn quartile_bins(dataset: &Dataset, column: &str) -> Result<BinRule> {
    let col = dataset.schema.index_of(column)?;
    require_kind(&dataset.schema.columns[col], AttributeKind::Numerical)?;
    let mut values: Vec<f64> = dataset
        .rows
        .iter()
        .filter_map(|r| match r[col] {
            Cell::Num(x) => Some(x),
            _ => None,
        })
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let Some(&max) = values.last() else {
        return BinRule::new(column, Vec::new());
    };
    let mut boundaries: Vec<f64> = [0.25, 0.5, 0.75]
        .iter()
        .filter_map(|&q| quantile(&values, q))
        .filter(|&b| b < max)
        .collect();
    boundaries.dedup();
    BinRule::new(column, boundaries)
}

/// Quartile-bins every numerical column except `skip`.
pub fn discretise_numerical(dataset: &Dataset, skip: &[&str]) -> Result<(Dataset, Vec<BinRule>)> {
    let mut out = dataset.clone();
    let mut rules = Vec::new();
    let names: Vec<String> = dataset
        .schema
        .columns
        .iter()
        .filter(|c| c.kind == AttributeKind::Numerical && !skip.contains(&c.name.as_str()))
        .map(|c| c.name.clone())
        .collect();
    for name in names {
        let rule = quartile_bins(&out, &name)?;
        out = rule.apply(&out)?;
        rules.push(rule);
    }
    Ok((out, rules))
}

/// Turns numeric `age` into `{young, aged}`: young below 25, aged from 25 on.
pub fn binarise_age(dataset: &Dataset) -> Result<Dataset> {
    let col = dataset.schema.index_of("age")?;
    require_kind(&dataset.schema.columns[col], AttributeKind::Numerical)?;
    let mut out = dataset.clone();
    out.schema.columns[col] = Column {
        discretised: true,
        ..Column::categorical("age", &["young", "aged"])
    };
    out.schema.sensitive_column = "age".into();
    out.schema.unprivileged_value = "young".into();
    for (i, row) in out.rows.iter_mut().enumerate() {
        row[col] = match row[col] {
            Cell::Num(a) => Cell::Cat(u32::from(a >= AGE_THRESHOLD)),
            _ => return Err(Error::Schema(format!("row {i}: age is missing"))),
        };
    }
    Ok(out)
}

/// Replaces every category seen fewer than `threshold` times by [`POOL`].
/// Only originally categorical feature columns are touched; the label, the
/// sensitive attribute and binned numerical columns are left alone.
pub fn pool_rare_bins(dataset: &Dataset, threshold: usize) -> Dataset {
    let mut out = dataset.clone();
    let label = dataset.schema.label_index();
    let sensitive = dataset.schema.index_of(&dataset.schema.sensitive_column).ok();
    for (j, col) in dataset.schema.columns.iter().enumerate() {
        if col.kind != AttributeKind::Categorical || col.discretised || j == label || Some(j) == sensitive {
            continue;
        }
        let mut freq = vec![0usize; col.categories.len()];
        for row in &dataset.rows {
            if let Cell::Cat(c) = row[j] {
                freq[c as usize] += 1;
            }
        }
        let rare: Vec<bool> = freq.iter().map(|&f| f > 0 && f < threshold).collect();
        if !rare.iter().any(|&r| r) {
            continue;
        }
        let mut vocab = Vec::new();
        let mut remap = vec![0u32; col.categories.len()];
        for (c, name) in col.categories.iter().enumerate() {
            if !rare[c] {
                remap[c] = vocab.len() as u32;
                vocab.push(name.clone());
            }
        }
        let pool = vocab.len() as u32;
        vocab.push(POOL.to_owned());
        for (c, &r) in rare.iter().enumerate() {
            if r {
                remap[c] = pool;
            }
        }
        out.schema.columns[j].categories = vocab;
        for row in &mut out.rows {
            if let Cell::Cat(c) = row[j] {
                row[j] = Cell::Cat(remap[c as usize]);
            }
        }
    }
    out
}

/// Drops `personal-status-sex`; requires `sex` to have been derived first.
pub fn remove_personal_status(dataset: &Dataset) -> Result<Dataset> {
    if dataset.schema.index_of("sex").is_err() {
        return Err(Error::Schema(
            "sex must be derived before removing personal-status-sex".into(),
        ));
    }
    let col = dataset.schema.index_of("personal-status-sex")?;
    let mut out = dataset.clone();
    out.schema.columns.remove(col);
    for row in &mut out.rows {
        row.remove(col);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Encodings

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingKind {
    Integer,
    OneHot,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::Integer => "integer",
            EncodingKind::OneHot => "one-hot",
        }
    }
}

impl std::str::FromStr for EncodingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integer" => Ok(EncodingKind::Integer),
            "one-hot" | "one_hot" | "onehot" => Ok(EncodingKind::OneHot),
            other => Err(Error::Config(format!("unknown encoding {other:?}"))),
        }
    }
}

/// Where an encoded feature column came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Integer code `i` stands for `categories[i]`.
    Integer { source: String, categories: Vec<String> },
    /// Indicator of `source == category`.
    Indicator { source: String, category: String },
}

impl Provenance {
    pub fn source(&self) -> &str {
        match self {
            Provenance::Integer { source, .. } | Provenance::Indicator { source, .. } => source,
        }
    }

    /// Header name, unique within an encoded dataset.
    pub fn header(&self) -> String {
        match self {
            Provenance::Integer { source, .. } => source.clone(),
            Provenance::Indicator { source, category } => format!("{source}={category}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub name: String,
    pub kind: EncodingKind,
    pub features: CategoricalMatrix,
    /// `true` = favourable label.
    pub labels: Vec<bool>,
    /// `true` = privileged group.
    pub sensitive: Vec<bool>,
    pub provenance: Vec<Provenance>,
    pub sensitive_column: String,
    pub sensitive_included: bool,
}

impl EncodedDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn headers(&self) -> Vec<String> {
        self.provenance.iter().map(Provenance::header).collect()
    }

    /// Feature columns derived from the sensitive attribute.
    pub fn sensitive_columns(&self) -> Vec<usize> {
        self.provenance
            .iter()
            .enumerate()
            .filter(|(_, p)| p.source() == self.sensitive_column)
            .map(|(j, _)| j)
            .collect()
    }

    /// Selects feature columns by header name, in the given order.
    pub fn project(&self, headers: &[String]) -> Result<CategoricalMatrix> {
        let own = self.headers();
        let cols = headers
            .iter()
            .map(|h| {
                own.iter()
                    .position(|o| o == h)
                    .ok_or_else(|| Error::MissingColumn(h.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.features.select_columns(&cols))
    }

    /// Copy with the sensitive attribute flipped, both in the sensitive
    /// vector and in every feature column derived from it.
    pub fn with_sensitive_flipped(&self) -> EncodedDataset {
        let mut out = self.clone();
        for s in &mut out.sensitive {
            *s = !*s;
        }
        let cols = self.sensitive_columns();
        for i in 0..out.features.n_rows() {
            match self.kind {
                EncodingKind::Integer => {
                    for &j in &cols {
                        let v = self.features.get(i, j);
                        out.features.set(i, j, 1 - v.min(1));
                    }
                }
                EncodingKind::OneHot => {
                    if let [a, b] = cols[..] {
                        out.features.set(i, a, self.features.get(i, b));
                        out.features.set(i, b, self.features.get(i, a));
                    }
                }
            }
        }
        out
    }

    /// Recovers `(source, category)` per source attribute; `None` marks a
    /// missing cell in the one-hot encoding.
    pub fn decode_row(&self, row: usize) -> Vec<(String, Option<String>)> {
        let values = self.features.row(row);
        let mut out: Vec<(String, Option<String>)> = Vec::new();
        for (p, &v) in self.provenance.iter().zip(values) {
            match p {
                Provenance::Integer { source, categories } => {
                    out.push((source.clone(), Some(categories[v as usize].clone())))
                }
                Provenance::Indicator { source, category } => {
                    if out.last().map(|(s, _)| s != source).unwrap_or(true) {
                        out.push((source.clone(), None));
                    }
                    if v == 1 {
                        out.last_mut().unwrap().1 = Some(category.clone());
                    }
                }
            }
        }
        out
    }

    /// Columnar text form. Header cells carry provenance: `source[c0;c1;..]`
    /// for integer columns (code = position), `source=category` for indicators.
    pub fn write_text<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header: Vec<String> = self
            .provenance
            .iter()
            .map(|p| match p {
                Provenance::Integer { source, categories } => {
                    format!("{source}[{}]", categories.join(";"))
                }
                indicator => indicator.header(),
            })
            .collect();
        header.push("label".into());
        header.push("sensitive".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.features.row(i).iter().map(u32::to_string).collect();
            rec.push(u8::from(self.labels[i]).to_string());
            rec.push(u8::from(self.sensitive[i]).to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<encoded output>", e))?;
        Ok(())
    }
}

fn feature_columns(dataset: &Dataset) -> Result<Vec<usize>> {
    let label = dataset.schema.label_index();
    let mut cols = Vec::new();
    for (j, c) in dataset.schema.columns.iter().enumerate() {
        if j == label {
            continue;
        }
        require_kind(c, AttributeKind::Categorical)?;
        cols.push(j);
    }
    Ok(cols)
}

/// Category codes in first-occurrence order over the given rows.
fn first_occurrence(dataset: &Dataset, rows: &[usize], col: usize) -> (Vec<String>, HashMap<u32, u32>) {
    let mut names = Vec::new();
    let mut map = HashMap::new();
    for &i in rows {
        if let Cell::Cat(c) = dataset.rows[i][col] {
            map.entry(c).or_insert_with(|| {
                names.push(dataset.schema.columns[col].categories[c as usize].clone());
                (names.len() - 1) as u32
            });
        }
    }
    (names, map)
}

/// Integer encoding: one column per attribute, codes by first occurrence.
/// Rows holding any missing cell are dropped.
pub fn encode_integer(dataset: &Dataset) -> Result<EncodedDataset> {
    let cols = feature_columns(dataset)?;
    let rows: Vec<usize> = (0..dataset.len()).filter(|&i| !dataset.has_missing(i)).collect();
    let labels = dataset.select(&rows).label_vector()?;
    let sensitive = dataset.select(&rows).sensitive_vector()?;
    let mut provenance = Vec::with_capacity(cols.len());
    let mut maps = Vec::with_capacity(cols.len());
    for &j in &cols {
        let (categories, map) = first_occurrence(dataset, &rows, j);
        provenance.push(Provenance::Integer {
            source: dataset.schema.columns[j].name.clone(),
            categories,
        });
        maps.push(map);
    }
    let arity = provenance
        .iter()
        .map(|p| match p {
            Provenance::Integer { categories, .. } => categories.len() as u32,
            Provenance::Indicator { .. } => 2,
        })
        .collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for (k, &j) in cols.iter().enumerate() {
            match dataset.rows[i][j] {
                Cell::Cat(c) => data.push(maps[k][&c]),
                _ => unreachable!("missing rows dropped"),
            }
        }
    }
    Ok(EncodedDataset {
        name: dataset.name.clone(),
        kind: EncodingKind::Integer,
        features: CategoricalMatrix::new(arity, data)?,
        labels,
        sensitive,
        provenance,
        sensitive_column: dataset.schema.sensitive_column.clone(),
        sensitive_included: true,
    })
}

/// One-hot encoding: one indicator per observed (attribute, category).
/// Missing cells leave all of the attribute's indicators at zero.
pub fn encode_one_hot(dataset: &Dataset) -> Result<EncodedDataset> {
    let cols = feature_columns(dataset)?;
    let all: Vec<usize> = (0..dataset.len()).collect();
    let labels = dataset.label_vector()?;
    let sensitive = dataset.sensitive_vector()?;
    let mut provenance = Vec::new();
    // (first output column, code map) per source column
    let mut layout = Vec::with_capacity(cols.len());
    for &j in &cols {
        let (categories, map) = first_occurrence(dataset, &all, j);
        let source = &dataset.schema.columns[j].name;
        layout.push((provenance.len(), map));
        provenance.extend(categories.into_iter().map(|category| Provenance::Indicator {
            source: source.clone(),
            category,
        }));
    }
    let width = provenance.len();
    let mut data = vec![0u32; dataset.len() * width];
    for i in 0..dataset.len() {
        for (k, &j) in cols.iter().enumerate() {
            if let Cell::Cat(c) = dataset.rows[i][j] {
                let (start, map) = &layout[k];
                data[i * width + start + map[&c] as usize] = 1;
            }
        }
    }
    Ok(EncodedDataset {
        name: dataset.name.clone(),
        kind: EncodingKind::OneHot,
        features: CategoricalMatrix::new(vec![2; width], data)?,
        labels,
        sensitive,
        provenance,
        sensitive_column: dataset.schema.sensitive_column.clone(),
        sensitive_included: true,
    })
}

pub fn encode(dataset: &Dataset, kind: EncodingKind) -> Result<EncodedDataset> {
    match kind {
        EncodingKind::Integer => encode_integer(dataset),
        EncodingKind::OneHot => encode_one_hot(dataset),
    }
}

/// Drops every feature column derived from the sensitive attribute. The
/// sensitive vector itself is kept for metric computation.
pub fn remove_sensitive(encoded: &EncodedDataset) -> Result<EncodedDataset> {
    if !encoded.sensitive_included {
        return Err(Error::Schema("sensitive attribute already removed".into()));
    }
    let drop = encoded.sensitive_columns();
    let keep: Vec<usize> = (0..encoded.provenance.len()).filter(|j| !drop.contains(j)).collect();
    Ok(EncodedDataset {
        features: encoded.features.select_columns(&keep),
        provenance: keep.iter().map(|&j| encoded.provenance[j].clone()).collect(),
        sensitive_included: false,
        ..encoded.clone()
    })
}

// ---------------------------------------------------------------------------
// Dataset versions

/// Builds an encoded version of the Adult training set: quartile bins for
/// the numerical attributes, rare-category pooling for the integer version,
/// then encoding.
pub fn adult_version(train: &Dataset, kind: EncodingKind) -> Result<EncodedDataset> {
    let (binned, _) = discretise_numerical(train, &[])?;
    match kind {
        EncodingKind::Integer => encode_integer(&pool_rare_bins(&binned, POOL_THRESHOLD)),
        EncodingKind::OneHot => encode_one_hot(&binned),
    }
}

/// German Credit training portion: derive sex, binarise age, split 70/30
/// stratified over (label, age group), drop personal-status-sex.
pub fn german_training_set(raw: &Dataset, train_fraction: f64, split_seed: u64) -> Result<Dataset> {
    let with_sex = crate::dataset::derive_sex(raw)?;
    let binarised = binarise_age(&with_sex)?;
    let split = crate::dataset::stratified_split(&binarised, train_fraction, split_seed)?;
    remove_personal_status(&split.train)
}

/// Encoded German Credit version over an already split training set.
pub fn german_version(train: &Dataset, kind: EncodingKind) -> Result<EncodedDataset> {
    let (binned, _) = discretise_numerical(train, &["age"])?;
    encode(&binned, kind)
}
