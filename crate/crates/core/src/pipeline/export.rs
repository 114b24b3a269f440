use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{RunConfig, TradeoffSet};
use crate::dataset::{Dataset, DatasetError};
use crate::expr::{to_canonical_text, Model, TextOptions};
use crate::fit::nmse;
use crate::grammar::Grammar;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// A model plus the context needed to evaluate it on new data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub var_names: Vec<String>,
    pub target: String,
    pub target_log_scaled: bool,
    pub weight_bound: f64,
    pub w_b: f64,
    pub w_vc: f64,
    /// Max |y| of the training data.
    pub reference: f64,
    pub model: Model,
}

impl ModelDocument {
    pub fn from_set(ts: &TradeoffSet, i: usize) -> Self {
        Self {
            var_names: ts.var_names.clone(),
            target: ts.target_name.clone(),
            target_log_scaled: ts.target_log_scaled,
            weight_bound: ts.scoring.weight_bound,
            w_b: ts.scoring.w_b,
            w_vc: ts.scoring.w_vc,
            reference: ts.reference,
            model: ts.models[i].clone(),
        }
    }

    /// Predictions on `data` (variables bound by name), in the model's target
    /// scale.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>, DatasetError> {
        let cols = data.columns_for(&self.var_names)?;
        Ok(self.model.predict(&cols, data.n(), self.weight_bound))
    }

    /// Predictions and their error percentage against `data.y`.
    pub fn evaluate(&self, data: &Dataset) -> Result<(Vec<f64>, f64), DatasetError> {
        let pred = self.predict(data)?;
        let err = nmse(&pred, &data.y, self.reference).unwrap_or(f64::INFINITY);
        Ok((pred, err))
    }

    pub fn text(&self, sig_figs: usize) -> String {
        let opts = TextOptions {
            var_names: self.var_names.clone(),
            sig_figs,
            weight_bound: self.weight_bound,
            log_scaled: self.target_log_scaled,
        };
        to_canonical_text(&self.model, &opts)
    }
}

/// Provenance of an exported run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub grammar_sha256: String,
    pub n_models: usize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io { path: path.to_path_buf(), source }
}

fn fmt_err(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "inf".to_string()
    }
}

/// Writes `front.csv`, `model_<id>.txt`, `model_<id>.json` and `run_meta.json`
/// into `dir`, creating it if needed. Model ids follow ascending complexity.
pub fn export(ts: &TradeoffSet, dir: impl AsRef<Path>, cfg: &RunConfig, grammar: &Grammar) -> Result<(), ExportError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let front = dir.join("front.csv");
    let csv_err = |source| ExportError::Csv { path: front.clone(), source };
    let mut w = csv::Writer::from_path(&front).map_err(csv_err)?;
    w.write_record(["model_id", "complexity", "n_bases", "train_error_pct", "test_error_pct"]).map_err(csv_err)?;
    for (id, m) in ts.models.iter().enumerate() {
        let test = m.test_error.map(fmt_err).unwrap_or_default();
        w.write_record([id.to_string(), m.complexity.to_string(), m.n_bases().to_string(), fmt_err(m.train_error), test])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&front))?;

    for (id, text) in ts.texts(cfg.sig_figs).into_iter().enumerate() {
        let p = dir.join(format!("model_{id}.txt"));
        fs::write(&p, text + "\n").map_err(io_err(&p))?;
        let p = dir.join(format!("model_{id}.json"));
        write_json(&p, &ModelDocument::from_set(ts, id))?;
    }

    let meta = RunMeta {
        config: cfg.entries(),
        seed: cfg.seed,
        grammar_sha256: hex::encode(Sha256::digest(grammar.source().as_bytes())),
        n_models: ts.len(),
    };
    write_json(&dir.join("run_meta.json"), &meta)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExportError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| ExportError::Json { path: path.into(), source })?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// Reads a `model_<id>.json` written by [`export`].
pub fn load_model_document(path: impl AsRef<Path>) -> Result<ModelDocument, ExportError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| ExportError::Json { path: path.into(), source })
}
