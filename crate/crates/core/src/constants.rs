//! Published dataset-level reference values, checked by `verify-datasets`.
//!
//! Counts are ordered (favourable & privileged, favourable & unprivileged,
//! unfavourable & privileged, unfavourable & unprivileged). Shares are
//! fractions; their tolerances are 0.01 percentage points.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub version: &'static str,
    pub counts: [usize; 4],
    pub cvs: f64,
    pub cvs_tol: f64,
    pub npi: f64,
    pub npi_tol: f64,
    pub di: f64,
    pub di_tol: f64,
    pub favourable_share: Option<f64>,
    pub unprivileged_share: Option<f64>,
    pub passes_80_rule: Option<bool>,
}

pub const SHARE_TOL: f64 = 1e-4;

pub const ADULT_ONE_HOT: Reference = Reference {
    version: "adult/one-hot",
    counts: [6_662, 1_179, 15_128, 9_592],
    cvs: 0.1963,
    cvs_tol: 5e-5,
    npi: 4.35e-2,
    npi_tol: 5e-4,
    di: 0.3580,
    di_tol: 5e-4,
    favourable_share: Some(0.2408),
    unprivileged_share: Some(0.3308),
    passes_80_rule: Some(false),
};

pub const ADULT_INTEGER: Reference = Reference {
    version: "adult/integer",
    counts: [6_396, 1_112, 13_984, 8_670],
    cvs: 0.2002,
    cvs_tol: 5e-5,
    npi: 4.36e-2,
    npi_tol: 5e-4,
    di: 0.3622,
    di_tol: 5e-4,
    favourable_share: Some(0.2489),
    unprivileged_share: None,
    passes_80_rule: Some(false),
};

pub const GERMAN: Reference = Reference {
    version: "german",
    counts: [428, 62, 167, 43],
    cvs: 0.1289,
    cvs_tol: 5e-5,
    npi: 9.47e-3,
    npi_tol: 5e-5,
    di: 0.8209,
    di_tol: 5e-4,
    favourable_share: None,
    unprivileged_share: None,
    passes_80_rule: Some(true),
};

/// German training split after multivariate undersampling: every cell
/// holds 43 rows and all three metrics are exact.
pub const GERMAN_MULTIVARIATE: Reference = Reference {
    version: "german/undersampling-multivariate",
    counts: [43, 43, 43, 43],
    cvs: 0.0,
    cvs_tol: 0.0,
    npi: 0.0,
    npi_tol: 0.0,
    di: 1.0,
    di_tol: 0.0,
    favourable_share: Some(0.5),
    unprivileged_share: Some(0.5),
    passes_80_rule: Some(true),
};

pub const GERMAN_TRAIN_ROWS: usize = 700;
pub const ADULT_TRAIN_ROWS: usize = 32_561;
pub const ADULT_COMPLETE_ROWS: usize = 30_162;
pub const GERMAN_ROWS: usize = 1_000;
