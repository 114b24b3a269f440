use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evolve::{EvolveSettings, Operator, OperatorTable, Scoring};
use crate::grammar::{Grammar, GrammarError, TreeLimits};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown config key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config key `{key}`: invalid value `{value}`")]
    BadValue { key: String, value: String },
    #[error("grammar {path}: {source}")]
    Grammar { path: String, source: GrammarError },
}

/// Settings for one modeling run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub population: usize,
    pub generations: usize,
    pub max_bases: usize,
    pub max_depth: usize,
    /// Weight-interpretation bound `B`.
    pub weight_bound: f64,
    pub w_b: f64,
    pub w_vc: f64,
    pub exp_cap: i32,
    pub seed: u64,
    /// Grammar file; `None` selects the built-in grammar.
    pub grammar: Option<PathBuf>,
    pub sig_figs: usize,
    /// Evaluation threads; `None` uses all cores.
    pub threads: Option<usize>,
    pub operators: OperatorTable,
    /// Log a progress line every this many generations (0 disables).
    pub log_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            population: 200,
            generations: 5000,
            max_bases: 15,
            max_depth: 8,
            weight_bound: 10.0,
            w_b: 10.0,
            w_vc: 0.25,
            exp_cap: 5,
            seed: 0,
            grammar: None,
            sig_figs: 3,
            threads: None,
            operators: OperatorTable::default(),
            log_every: 100,
        }
    }
}

fn positive_int<T: std::str::FromStr + PartialOrd + Default>(key: &str, value: &str) -> Result<T, ConfigError> {
    match value.parse::<T>() {
        Ok(v) if v > T::default() => Ok(v),
        _ => Err(ConfigError::BadValue { key: key.to_string(), value: value.to_string() }),
    }
}

fn positive_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(ConfigError::BadValue { key: key.to_string(), value: value.to_string() }),
    }
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            cfg.set(key, value).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line: i + 1, key },
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        match key {
            "population" => self.population = positive_int(key, value)?,
            "generations" => self.generations = value.parse().map_err(|_| bad())?,
            "max_bases" => self.max_bases = positive_int(key, value)?,
            "max_depth" => self.max_depth = positive_int(key, value)?,
            "B" => self.weight_bound = positive_real(key, value)?,
            "wb" => self.w_b = positive_real(key, value)?,
            "wvc" => self.w_vc = positive_real(key, value)?,
            "exp_cap" => self.exp_cap = positive_int(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "grammar" => self.grammar = Some(PathBuf::from(value)),
            "sig_figs" => self.sig_figs = positive_int(key, value)?,
            "threads" => self.threads = Some(positive_int(key, value)?),
            _ => {
                let op = key
                    .strip_prefix("operator.")
                    .and_then(|k| k.strip_suffix(".weight"))
                    .and_then(Operator::from_name)
                    .ok_or_else(|| ConfigError::UnknownKey { line: 0, key: key.to_string() })?;
                let w = positive_real(key, value)?;
                self.operators.set_weight(op, w).map_err(|_| bad())?;
            }
        }
        Ok(())
    }

    /// Every key with its current value, in a stable order.
    pub fn entries(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("population".into(), self.population.to_string());
        m.insert("generations".into(), self.generations.to_string());
        m.insert("max_bases".into(), self.max_bases.to_string());
        m.insert("max_depth".into(), self.max_depth.to_string());
        m.insert("B".into(), self.weight_bound.to_string());
        m.insert("wb".into(), self.w_b.to_string());
        m.insert("wvc".into(), self.w_vc.to_string());
        m.insert("exp_cap".into(), self.exp_cap.to_string());
        m.insert("seed".into(), self.seed.to_string());
        if let Some(g) = &self.grammar {
            m.insert("grammar".into(), g.display().to_string());
        }
        m.insert("sig_figs".into(), self.sig_figs.to_string());
        if let Some(t) = self.threads {
            m.insert("threads".into(), t.to_string());
        }
        for (op, w) in self.operators.entries() {
            m.insert(format!("operator.{}.weight", op.name()), w.to_string());
        }
        m
    }

    /// The configured grammar, or the built-in one.
    pub fn load_grammar(&self) -> Result<Grammar, ConfigError> {
        match &self.grammar {
            None => Ok(Grammar::default_grammar()),
            Some(path) => {
                let shown = path.display().to_string();
                let text = std::fs::read_to_string(path)
                    .map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                Grammar::parse(&text).map_err(|source| ConfigError::Grammar { path: shown, source })
            }
        }
    }

    pub fn scoring(&self) -> Scoring {
        Scoring { weight_bound: self.weight_bound, w_b: self.w_b, w_vc: self.w_vc }
    }

    pub fn limits(&self, n_vars: usize) -> TreeLimits {
        TreeLimits { n_vars, max_depth: self.max_depth, weight_bound: self.weight_bound, exp_cap: self.exp_cap }
    }

    pub fn evolve_settings(&self, n_vars: usize) -> EvolveSettings {
        EvolveSettings {
            population: self.population,
            max_bases: self.max_bases,
            limits: self.limits(n_vars),
            scoring: self.scoring(),
            operators: self.operators.clone(),
            cauchy_scale: 1.0,
        }
    }
}
