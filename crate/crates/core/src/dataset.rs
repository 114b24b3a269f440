//! Tabular sample data: CSV ingestion, design-of-experiments sampling, target
//! scaling and synthetic benchmark functions.

use std::fs::File;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file (no header row)")]
    EmptyFile,
    #[error("header column {0} has an empty name")]
    EmptyName(usize),
    #[error("duplicate column name {0:?}")]
    DuplicateName(String),
    #[error("target column {0:?} not found in header")]
    TargetMissing(String),
    #[error("line {line}, column {column:?}: cannot parse {value:?} as a number")]
    NonNumeric { line: u64, column: String, value: String },
    #[error("line {line}, column {column:?}: value is not finite")]
    NonFinite { line: u64, column: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity { line: u64, expected: usize, found: usize },
    #[error("no data rows")]
    NoRows,
    #[error("no input columns besides the target")]
    NoInputs,
    #[error("sample {index}: target {value} is not positive, cannot log-scale")]
    NonPositiveTarget { index: usize, value: f64 },
    #[error("full factorial needs {count} samples but the budget is {budget}; use a Latin hypercube instead")]
    BudgetExceeded { count: String, budget: usize },
    #[error("invalid design plan: {0}")]
    InvalidPlan(String),
    #[error("unknown synthetic oracle {0:?} (expected pm_like, srp_like or offset_like)")]
    UnknownOracle(String),
    #[error("oracle {name} takes {expected} variables, got {found}")]
    OracleDimension { name: &'static str, expected: usize, found: usize },
    #[error("oracle {name} is not finite at {point:?}")]
    NonFiniteOracle { name: &'static str, point: Vec<f64> },
    #[error("variable {0:?} missing from data")]
    MissingVariable(String),
}

/// `N` samples of `d` design variables with one scalar target each.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub var_names: Vec<String>,
    /// One column of length `N` per design variable.
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub target_name: String,
    pub target_log_scaled: bool,
}

impl Dataset {
    /// Builds a dataset from row-major design points.
    pub fn from_rows(
        var_names: Vec<String>,
        rows: &[Vec<f64>],
        y: Vec<f64>,
        target_name: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        let d = var_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); d];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DatasetError::Arity { line: t as u64 + 2, expected: d, found: row.len() });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Self::from_columns(var_names, columns, y, target_name)
    }

    pub fn from_columns(
        var_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        y: Vec<f64>,
        target_name: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        if y.is_empty() {
            return Err(DatasetError::NoRows);
        }
        if var_names.is_empty() {
            return Err(DatasetError::NoInputs);
        }
        check_names(&var_names)?;
        if columns.len() != var_names.len() {
            return Err(DatasetError::Arity { line: 1, expected: var_names.len(), found: columns.len() });
        }
        let target_name = target_name.into();
        for (name, col) in var_names.iter().zip(&columns) {
            if col.len() != y.len() {
                return Err(DatasetError::Arity { line: 0, expected: y.len(), found: col.len() });
            }
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { line: t as u64 + 2, column: name.clone() });
            }
        }
        if let Some(t) = y.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFinite { line: t as u64 + 2, column: target_name });
        }
        Ok(Self { var_names, columns, y, target_name, target_log_scaled: false })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.var_names.len()
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    /// Largest absolute target value.
    pub fn reference(&self) -> f64 {
        crate::fit::error_reference(&self.y)
    }

    /// Columns reordered to follow `names` (binding by name, not position).
    pub fn columns_for(&self, names: &[String]) -> Result<Vec<Vec<f64>>, DatasetError> {
        names
            .iter()
            .map(|name| {
                self.var_names
                    .iter()
                    .position(|v| v == name)
                    .map(|i| self.columns[i].clone())
                    .ok_or_else(|| DatasetError::MissingVariable(name.clone()))
            })
            .collect()
    }
}

fn check_names(names: &[String]) -> Result<(), DatasetError> {
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(DatasetError::EmptyName(i));
        }
        if names[..i].contains(name) {
            return Err(DatasetError::DuplicateName(name.clone()));
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<File, DatasetError> {
    File::open(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })
}

fn create(path: &Path) -> Result<File, DatasetError> {
    File::create(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })
}

/// Reads a header plus numeric rows.
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(DatasetError::EmptyFile),
    };
    let names: Vec<String> = header.iter().map(|s| s.trim_start_matches('\u{feff}').to_string()).collect();
    if names.len() == 1 && names[0].is_empty() {
        return Err(DatasetError::EmptyFile);
    }
    check_names(&names)?;
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != names.len() {
            return Err(DatasetError::Arity { line, expected: names.len(), found: rec.len() });
        }
        let mut row = Vec::with_capacity(rec.len());
        for (field, name) in rec.iter().zip(&names) {
            let v: f64 = field.parse().map_err(|_| DatasetError::NonNumeric {
                line,
                column: name.clone(),
                value: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonFinite { line, column: name.clone() });
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok((names, rows))
}

/// Loads a CSV file; `target_column` becomes `y`, every other column an input.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset, DatasetError> {
    let (names, rows) = read_table(path.as_ref())?;
    let target = names
        .iter()
        .position(|n| n == target_column)
        .ok_or_else(|| DatasetError::TargetMissing(target_column.to_string()))?;
    let var_names: Vec<String> = names.iter().enumerate().filter(|(i, _)| *i != target).map(|(_, n)| n.clone()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r[target]).collect();
    let xs: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|r| r.into_iter().enumerate().filter(|(i, _)| *i != target).map(|(_, v)| v).collect())
        .collect();
    Dataset::from_rows(var_names, &xs, y, target_column)
}

/// Like [`load_csv`], defaulting the target to the last column.
pub fn load_csv_target_or_last(path: impl AsRef<Path>, target_column: Option<&str>) -> Result<Dataset, DatasetError> {
    match target_column {
        Some(t) => load_csv(path, t),
        None => {
            let (names, _) = read_table(path.as_ref())?;
            if names.len() < 2 {
                return Err(DatasetError::NoInputs);
            }
            load_csv(path, names.last().expect("nonempty header"))
        }
    }
}

/// Loads a CSV of design points only (no target column).
pub fn load_points_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>), DatasetError> {
    read_table(path.as_ref())
}

/// Writes inputs followed by the target column.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(create(path.as_ref())?);
    let mut header = ds.var_names.clone();
    header.push(ds.target_name.clone());
    w.write_record(&header)?;
    for t in 0..ds.n() {
        let mut rec: Vec<String> = ds.columns.iter().map(|c| c[t].to_string()).collect();
        rec.push(ds.y[t].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| DatasetError::Io { path: path.as_ref().to_path_buf(), source })
}

/// Writes design points with a header and no target column.
pub fn write_points_csv(names: &[String], rows: &[Vec<f64>], path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(create(path.as_ref())?);
    w.write_record(names)?;
    for row in rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush().map_err(|source| DatasetError::Io { path: path.as_ref().to_path_buf(), source })
}

/// Three-level sampling around a center point with relative perturbation `dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoePlan {
    pub centers: Vec<f64>,
    pub dx: f64,
    /// Largest sample count a full factorial may produce.
    pub budget: usize,
}

impl DoePlan {
    pub const LEVELS_PER_VAR: usize = 3;
    pub const DEFAULT_BUDGET: usize = 10_000;

    pub fn new(centers: Vec<f64>, dx: f64) -> Self {
        Self { centers, dx, budget: Self::DEFAULT_BUDGET }
    }

    fn check(&self) -> Result<(), DatasetError> {
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(DatasetError::InvalidPlan(format!("dx must be positive, got {}", self.dx)));
        }
        if self.budget == 0 {
            return Err(DatasetError::InvalidPlan("budget must be at least 1".into()));
        }
        if self.centers.is_empty() {
            return Err(DatasetError::InvalidPlan("no center values".into()));
        }
        if self.centers.iter().any(|c| !c.is_finite()) {
            return Err(DatasetError::InvalidPlan("center values must be finite".into()));
        }
        Ok(())
    }

    /// `{c(1-dx), c, c(1+dx)}` for one variable.
    pub fn levels(&self, var: usize) -> [f64; 3] {
        let c = self.centers[var];
        [c * (1.0 - self.dx), c, c * (1.0 + self.dx)]
    }
}

/// All `3^d` level combinations, first variable varying slowest.
pub fn doe_full_factorial(plan: &DoePlan) -> Result<Vec<Vec<f64>>, DatasetError> {
    plan.check()?;
    let d = plan.centers.len();
    let count = u32::try_from(d).ok().and_then(|d| 3usize.checked_pow(d));
    let count = match count {
        Some(c) if c <= plan.budget => c,
        _ => return Err(DatasetError::BudgetExceeded { count: format!("3^{d}"), budget: plan.budget }),
    };
    let levels: Vec<[f64; 3]> = (0..d).map(|i| plan.levels(i)).collect();
    Ok((0..count)
        .map(|mut k| {
            let mut row = vec![0.0; d];
            for i in (0..d).rev() {
                row[i] = levels[i][k % 3];
                k /= 3;
            }
            row
        })
        .collect())
}

/// `n` stratified samples: each variable's range `[c(1-dx), c(1+dx)]` is cut
/// into `n` equal bins holding exactly one sample, bins permuted independently.
pub fn doe_latin_hypercube<R: Rng + ?Sized>(plan: &DoePlan, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>, DatasetError> {
    plan.check()?;
    if n == 0 {
        return Err(DatasetError::InvalidPlan("sample count must be at least 1".into()));
    }
    let d = plan.centers.len();
    let mut rows = vec![vec![0.0; d]; n];
    for i in 0..d {
        let [a, _, b] = plan.levels(i);
        let (lo, hi) = (a.min(b), a.max(b));
        let mut bins: Vec<usize> = (0..n).collect();
        bins.shuffle(rng);
        for (row, bin) in rows.iter_mut().zip(bins) {
            let u: f64 = rng.random();
            row[i] = lo + (hi - lo) * (bin as f64 + u) / n as f64;
        }
    }
    Ok(rows)
}

/// Replaces `y` by `log10(y)` and flags the dataset as log-scaled.
pub fn scale_target_log10(ds: &Dataset) -> Result<Dataset, DatasetError> {
    if let Some((index, &value)) = ds.y.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(DatasetError::NonPositiveTarget { index, value });
    }
    let mut out = ds.clone();
    out.y = ds.y.iter().map(|v| v.log10()).collect();
    out.target_log_scaled = true;
    Ok(out)
}

/// Closed-form stand-ins for simulated circuit performances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticOracle {
    /// `90.5 + 190.6·x1/x2 + 22.2·x3/x4`
    PmLike,
    /// `2.36e7 + 1.95e4·x2/x1 − 104.69/x2 + 2.15e9·x2 + 4.63e8·x1`
    SrpLike,
    /// `−2.00e−3`
    OffsetLike,
}

impl SyntheticOracle {
    pub fn from_name(name: &str) -> Result<Self, DatasetError> {
        match name {
            "pm_like" => Ok(Self::PmLike),
            "srp_like" => Ok(Self::SrpLike),
            "offset_like" => Ok(Self::OffsetLike),
            other => Err(DatasetError::UnknownOracle(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PmLike => "pm_like",
            Self::SrpLike => "srp_like",
            Self::OffsetLike => "offset_like",
        }
    }

    /// Required dimension, or `None` for any.
    pub fn dims(self) -> Option<usize> {
        match self {
            Self::PmLike => Some(4),
            Self::SrpLike => Some(2),
            Self::OffsetLike => None,
        }
    }

    pub fn eval(self, x: &[f64]) -> Result<f64, DatasetError> {
        if let Some(d) = self.dims() {
            if x.len() != d {
                return Err(DatasetError::OracleDimension { name: self.name(), expected: d, found: x.len() });
            }
        }
        let v = match self {
            Self::PmLike => 90.5 + 190.6 * x[0] / x[1] + 22.2 * x[2] / x[3],
            Self::SrpLike => 2.36e7 + 1.95e4 * x[1] / x[0] - 104.69 / x[1] + 2.15e9 * x[1] + 4.63e8 * x[0],
            Self::OffsetLike => -2.00e-3,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DatasetError::NonFiniteOracle { name: self.name(), point: x.to_vec() })
        }
    }

    /// Evaluates the oracle at every design point.
    pub fn dataset(self, var_names: Vec<String>, points: &[Vec<f64>]) -> Result<Dataset, DatasetError> {
        let y = points.iter().map(|p| self.eval(p)).collect::<Result<Vec<_>, _>>()?;
        Dataset::from_rows(var_names, points, y, self.name())
    }
}

/// Evaluates a named synthetic oracle at `x`.
pub fn synthetic_oracle(name: &str, x: &[f64]) -> Result<f64, DatasetError> {
    SyntheticOracle::from_name(name)?.eval(x)
}
