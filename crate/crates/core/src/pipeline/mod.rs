//! End-to-end modeling flow: evolve, simplify, filter on test data, export.

mod config;
mod export;

pub use config::{ConfigError, RunConfig};
pub use export::{export, load_model_document, ExportError, ModelDocument, RunMeta};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{doe_full_factorial, Dataset, DatasetError, DoePlan, SyntheticOracle};
use crate::evolve::{score_model, Archive, Evolution, Scoring, TrainData};
use crate::expr::{to_canonical_text, Model, TextOptions};
use crate::fit::{forward_regression_press, nmse, press, press_improves, RegressionProblem};
use crate::grammar::Grammar;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DatasetError),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// A nondominated set of models plus what is needed to evaluate and print them.
///
/// Models are sorted by ascending complexity.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffSet {
    pub models: Vec<Model>,
    pub var_names: Vec<String>,
    pub target_name: String,
    pub target_log_scaled: bool,
    /// Max |y| over the training data; normalizes both train and test error.
    pub reference: f64,
    pub scoring: Scoring,
}

impl TradeoffSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn text_options(&self, sig_figs: usize) -> TextOptions {
        TextOptions {
            var_names: self.var_names.clone(),
            sig_figs,
            weight_bound: self.scoring.weight_bound,
            log_scaled: self.target_log_scaled,
        }
    }

    /// Canonical text of every model.
    pub fn texts(&self, sig_figs: usize) -> Vec<String> {
        let opts = self.text_options(sig_figs);
        self.models.iter().map(|m| to_canonical_text(m, &opts)).collect()
    }
}

/// Runs the evolutionary search with the configured grammar.
pub fn run_evolution(cfg: &RunConfig, train: &Dataset) -> Result<TradeoffSet, PipelineError> {
    let grammar = cfg.load_grammar()?;
    run_evolution_with_grammar(cfg, &grammar, train)
}

/// Runs `cfg.generations` NSGA-II generations and returns the run archive.
pub fn run_evolution_with_grammar(
    cfg: &RunConfig,
    grammar: &Grammar,
    train: &Dataset,
) -> Result<TradeoffSet, PipelineError> {
    let go = || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let data = TrainData::from_dataset(train);
        let mut evo = Evolution::new(grammar.clone(), cfg.evolve_settings(train.d()), data, &mut rng);
        for g in 1..=cfg.generations {
            evo.step(&mut rng);
            if cfg.log_every > 0 && g % cfg.log_every == 0 {
                let a = evo.archive();
                log::info!(
                    "generation {g}: front size {}, best train error {:.4}%",
                    a.len(),
                    a.best_error_within(f64::INFINITY)
                );
            }
        }
        evo.into_archive().into_models()
    };
    let models = match cfg.threads {
        None => go(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| PipelineError::Threads(e.to_string()))?
            .install(go),
    };
    Ok(TradeoffSet {
        models,
        var_names: train.var_names.clone(),
        target_name: train.target_name.clone(),
        target_log_scaled: train.target_log_scaled,
        reference: train.reference(),
        scoring: cfg.scoring(),
    })
}

fn nondominated(models: Vec<Model>) -> Vec<Model> {
    let mut archive = Archive::new();
    for m in &models {
        archive.insert(m);
    }
    archive.into_models()
}

/// Prunes one model's bases by PRESS-driven forward regression and refits.
///
/// The original basis set is kept when its PRESS is significantly lower than
/// the forward-selected one.
pub fn simplify_model(m: &Model, data: &TrainData, scoring: &Scoring) -> Model {
    if m.bases.is_empty() || !m.valid {
        return m.clone();
    }
    let cols = m.basis_columns(&data.columns, data.n(), scoring.weight_bound);
    let Ok(sel) = forward_regression_press(&cols, &data.y) else {
        return m.clone();
    };
    let before = RegressionProblem::from_bases(&cols, &data.y).map(|p| press(&p)).unwrap_or(f64::INFINITY);
    if press_improves(before, sel.press, &data.y) || sel.selected.len() == m.bases.len() {
        return m.clone();
    }
    let mut keep = sel.selected.clone();
    keep.sort_unstable();
    let mut out = Model::unfitted(keep.into_iter().map(|i| m.bases[i].clone()).collect());
    score_model(&mut out, data, scoring);
    out
}

/// Simplification after generation: prunes every model, then re-reduces the
/// set to its (train error, complexity) nondominated members.
pub fn simplify_after_generation(ts: &TradeoffSet, train: &Dataset) -> Result<TradeoffSet, PipelineError> {
    let cols = train.columns_for(&ts.var_names)?;
    let data = TrainData { columns: cols, y: train.y.clone(), reference: ts.reference };
    let simplified: Vec<Model> = ts.models.par_iter().map(|m| simplify_model(m, &data, &ts.scoring)).collect();
    Ok(TradeoffSet { models: nondominated(simplified), ..ts.clone() })
}

/// Test error of every model (training reference), keeping only models
/// nondominated in (test error, complexity).
pub fn filter_test_tradeoff(ts: &TradeoffSet, test: &Dataset) -> Result<TradeoffSet, PipelineError> {
    let cols = test.columns_for(&ts.var_names)?;
    let mut scored: Vec<Model> = ts
        .models
        .iter()
        .map(|m| {
            let pred = m.predict(&cols, test.n(), ts.scoring.weight_bound);
            let e = nmse(&pred, &test.y, ts.reference).unwrap_or(f64::INFINITY);
            Model { test_error: Some(if e.is_finite() { e } else { f64::INFINITY }), ..m.clone() }
        })
        .collect();
    scored.sort_by(|a, b| {
        a.complexity.total_cmp(&b.complexity).then(a.test_error.unwrap().total_cmp(&b.test_error.unwrap()))
    });
    let mut best = f64::INFINITY;
    scored.retain(|m| {
        let e = m.test_error.unwrap();
        let keep = e < best;
        if keep {
            best = e;
        }
        keep
    });
    Ok(TradeoffSet { models: scored, ..ts.clone() })
}

/// Result of the full flow on one train/test pair.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    /// Run archive before simplification.
    pub evolved: TradeoffSet,
    /// After simplification and test filtering.
    pub front: TradeoffSet,
}

/// Evolution, simplification after generation, and test filtering.
pub fn run_pipeline(
    cfg: &RunConfig,
    grammar: &Grammar,
    train: &Dataset,
    test: &Dataset,
) -> Result<PipelineOutput, PipelineError> {
    let evolved = run_evolution_with_grammar(cfg, grammar, train)?;
    let simplified = simplify_after_generation(&evolved, train)?;
    let front = filter_test_tradeoff(&simplified, test)?;
    Ok(PipelineOutput { evolved, front })
}

/// Train (`dx = 0.1`) and test (`dx = 0.03`) full factorials around unit
/// centers, labelled by a synthetic oracle. Oracles of any dimension get 4
/// variables.
pub fn benchmark_data(oracle: SyntheticOracle) -> Result<(Dataset, Dataset), DatasetError> {
    let d = oracle.dims().unwrap_or(4);
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let make = |dx: f64| {
        let points = doe_full_factorial(&DoePlan::new(vec![1.0; d], dx))?;
        oracle.dataset(names.clone(), &points)
    };
    Ok((make(BENCH_TRAIN_DX)?, make(BENCH_TEST_DX)?))
}

pub const BENCH_TRAIN_DX: f64 = 0.1;
pub const BENCH_TEST_DX: f64 = 0.03;
/// A benchmark passes when one front model is within this error (percent) on
/// both train and test data.
pub const BENCH_THRESHOLD_PCT: f64 = 5.0;

/// Whether some model meets [`BENCH_THRESHOLD_PCT`] on train and test error.
pub fn benchmark_passes(front: &TradeoffSet) -> bool {
    front.models.iter().any(|m| {
        m.train_error <= BENCH_THRESHOLD_PCT && m.test_error.is_some_and(|e| e <= BENCH_THRESHOLD_PCT)
    })
}
