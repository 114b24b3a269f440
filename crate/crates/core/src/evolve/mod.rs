//! NSGA-II over sets of basis trees.
//!
//! Individuals are [`Model`](crate::expr::Model)s scored on two minimized
//! objectives, training error and complexity. Variation operators act on the
//! basis set, on whole subtrees, on weights, or on variable combos; all of
//! them preserve grammar validity.

mod archive;
mod nsga;
mod operators;

pub use archive::Archive;
pub use nsga::{nsga2_generation, score_model, Evolution, EvolveSettings, Scoring, TrainData};
pub use operators::{
    basis_add, basis_copy_in, basis_delete, basis_set_crossover, subtree_crossover, subtree_mutate,
    vc_crossover_at, vc_exponent_mutate, vc_onepoint_crossover, weight_cauchy_mutate, Operator, OperatorTable,
    Variation,
};

use std::cmp::Ordering;

/// Training error (percent) and complexity, both minimized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objectives {
    pub error: f64,
    pub complexity: f64,
}

impl Objectives {
    pub fn new(error: f64, complexity: f64) -> Self {
        Self { error, complexity }
    }

    /// Objectives of a scored model. Invalid models rank behind every valid
    /// one in both objectives, so a cheap but broken model never sits on a front.
    pub fn of(m: &crate::expr::Model) -> Self {
        if m.valid && m.train_error.is_finite() {
            Self::new(m.train_error, m.complexity)
        } else {
            Self::new(f64::INFINITY, f64::INFINITY)
        }
    }

    /// No worse in both objectives and strictly better in at least one.
    pub fn dominates(&self, other: &Objectives) -> bool {
        self.error <= other.error
            && self.complexity <= other.complexity
            && (self.error < other.error || self.complexity < other.complexity)
    }

    fn get(&self, k: usize) -> f64 {
        if k == 0 {
            self.error
        } else {
            self.complexity
        }
    }
}

/// Partitions points into nondominated fronts; indices within a front ascend.
pub fn nondominated_sort(points: &[Objectives]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].dominates(&points[j]) {
                dominates[i].push(j);
                dominated_by_count[j] += 1;
            } else if points[j].dominates(&points[i]) {
                dominates[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Standard NSGA-II crowding distance within one front.
///
/// Per objective, the extreme members get `+inf` and interior members add the
/// gap between their neighbours normalized by the objective's range.
pub fn crowding_distance(front: &[Objectives]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for k in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| front[a].get(k).partial_cmp(&front[b].get(k)).unwrap_or(Ordering::Equal));
        let lo = front[order[0]].get(k);
        let hi = front[order[n - 1]].get(k);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if !(range.is_finite() && range > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            let gap = (front[order[w + 1]].get(k) - front[order[w - 1]].get(k)) / range;
            if gap.is_finite() {
                dist[order[w]] += gap;
            }
        }
    }
    dist
}
