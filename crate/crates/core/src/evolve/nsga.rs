use rand::Rng;
use rayon::prelude::*;

use super::{crowding_distance, nondominated_sort, Archive, Objectives, OperatorTable, Variation};
use crate::dataset::Dataset;
use crate::expr::{complexity, Model};
use crate::fit::{fit_weights, nmse, RegressionProblem};
use crate::grammar::{random_tree, validate, Grammar, TreeLimits};

/// Complexity weights and the weight-interpretation bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scoring {
    pub weight_bound: f64,
    pub w_b: f64,
    pub w_vc: f64,
}

/// Training samples in column-major form.
#[derive(Clone, Debug)]
pub struct TrainData {
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    /// Error normalizer, max |y|.
    pub reference: f64,
}

impl TrainData {
    pub fn from_dataset(d: &Dataset) -> Self {
        Self { columns: d.columns.clone(), y: d.y.clone(), reference: d.reference() }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Fits a model's linear coefficients and fills in its objectives.
///
/// A model whose bases or coefficients are non-finite anywhere on the
/// training data is marked invalid with error `+inf`.
pub fn score_model(m: &mut Model, data: &TrainData, scoring: &Scoring) {
    let n = data.n();
    m.complexity = complexity(m, scoring.w_b, scoring.w_vc);
    m.test_error = None;
    let cols = m.basis_columns(&data.columns, n, scoring.weight_bound);
    let fitted = RegressionProblem::from_bases(&cols, &data.y).ok().map(|p| fit_weights(&p));
    let Some(coeffs) = fitted.filter(|c| c.iter().all(|v| v.is_finite())) else {
        m.coeffs = vec![0.0; m.bases.len() + 1];
        m.train_error = f64::INFINITY;
        m.valid = false;
        return;
    };
    let mut pred = vec![coeffs[0]; n];
    for (col, &a) in cols.iter().zip(&coeffs[1..]) {
        pred.iter_mut().zip(col).for_each(|(p, v)| *p += a * v);
    }
    let err = nmse(&pred, &data.y, data.reference).unwrap_or(f64::INFINITY);
    m.coeffs = coeffs;
    m.valid = err.is_finite();
    m.train_error = if m.valid { err } else { f64::INFINITY };
}

/// Engine parameters.
#[derive(Clone, Debug)]
pub struct EvolveSettings {
    pub population: usize,
    pub max_bases: usize,
    pub limits: TreeLimits,
    pub scoring: Scoring,
    pub operators: OperatorTable,
    pub cauchy_scale: f64,
}

/// Population, archive, and everything needed to advance a generation.
#[derive(Clone, Debug)]
pub struct Evolution {
    grammar: Grammar,
    settings: EvolveSettings,
    data: TrainData,
    population: Vec<Model>,
    archive: Archive,
    generation: usize,
}

impl Evolution {
    /// Random initial population with basis counts uniform in `[1, max_bases]`.
    ///
    /// The archive starts with the best constant model so the front always
    /// has a complexity-zero member.
    pub fn new<R: Rng + ?Sized>(grammar: Grammar, settings: EvolveSettings, data: TrainData, rng: &mut R) -> Self {
        let mut population: Vec<Model> = (0..settings.population)
            .map(|_| {
                let k = rng.random_range(1..=settings.max_bases.max(1));
                Model::unfitted((0..k).map(|_| random_tree(&grammar, &settings.limits, rng)).collect())
            })
            .collect();
        evaluate_all(&mut population, &data, &settings.scoring);
        let mut constant = Model::unfitted(Vec::new());
        score_model(&mut constant, &data, &settings.scoring);
        let mut archive = Archive::new();
        archive.insert(&constant);
        for m in &population {
            archive.insert(m);
        }
        let evo = Self { grammar, settings, data, population, archive, generation: 0 };
        evo.check_population();
        evo
    }

    pub fn population(&self) -> &[Model] {
        &self.population
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn into_archive(self) -> Archive {
        self.archive
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    /// One NSGA-II generation: tournament, variation, evaluation, elitist
    /// (μ+λ) selection, archive update.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (rank, crowd) = rank_and_crowding(&self.population);
        let variation = Variation {
            grammar: &self.grammar,
            limits: self.settings.limits,
            max_bases: self.settings.max_bases,
            cauchy_scale: self.settings.cauchy_scale,
        };
        let mut offspring: Vec<Model> = (0..self.settings.population)
            .map(|_| {
                let p = tournament(&rank, &crowd, rng);
                let d = tournament(&rank, &crowd, rng);
                variation.vary(&self.settings.operators, &self.population[p], &self.population[d], rng)
            })
            .collect();
        evaluate_all(&mut offspring, &self.data, &self.settings.scoring);
        for m in &offspring {
            self.archive.insert(m);
        }

        let mut combined = std::mem::take(&mut self.population);
        combined.extend(offspring);
        self.population = environmental_selection(combined, self.settings.population);
        self.generation += 1;
        self.check_population();
    }

    fn check_population(&self) {
        if cfg!(debug_assertions) {
            for m in &self.population {
                assert!(m.n_bases() <= self.settings.max_bases, "too many bases");
                for b in &m.bases {
                    let v = validate(b, &self.grammar, &self.settings.limits);
                    assert!(v.is_empty(), "invalid tree in generation {}: {v:?}", self.generation);
                }
            }
        }
    }
}

/// Advances `evo` by one generation.
pub fn nsga2_generation<R: Rng + ?Sized>(evo: &mut Evolution, rng: &mut R) {
    evo.step(rng)
}

fn evaluate_all(models: &mut [Model], data: &TrainData, scoring: &Scoring) {
    models.par_iter_mut().for_each(|m| score_model(m, data, scoring));
}

fn rank_and_crowding(pop: &[Model]) -> (Vec<usize>, Vec<f64>) {
    let objs: Vec<Objectives> = pop.iter().map(Objectives::of).collect();
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in nondominated_sort(&objs).iter().enumerate() {
        let pts: Vec<Objectives> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&pts)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

fn tournament<R: Rng + ?Sized>(rank: &[usize], crowd: &[f64], rng: &mut R) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    if rank[b] < rank[a] || (rank[b] == rank[a] && crowd[b] > crowd[a]) {
        b
    } else {
        a
    }
}

fn environmental_selection(combined: Vec<Model>, size: usize) -> Vec<Model> {
    let objs: Vec<Objectives> = combined.iter().map(Objectives::of).collect();
    let mut keep = Vec::with_capacity(size);
    for front in nondominated_sort(&objs) {
        if keep.len() + front.len() <= size {
            keep.extend(front);
            continue;
        }
        let pts: Vec<Objectives> = front.iter().map(|&i| objs[i]).collect();
        let dist = crowding_distance(&pts);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
        keep.extend(order.into_iter().take(size - keep.len()).map(|k| front[k]));
        break;
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Model>> = combined.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("each index kept once")).collect()
}
