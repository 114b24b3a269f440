use crate::expr::Model;

use super::Objectives;

/// Run-wide set of mutually nondominated valid models.
///
/// Kept sorted by ascending complexity; errors are then strictly decreasing.
/// A newcomer with the same objectives as a member is rejected.
#[derive(Clone, Debug, Default)]
pub struct Archive {
    models: Vec<Model>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers a model; returns whether it was admitted.
    pub fn insert(&mut self, m: &Model) -> bool {
        if !m.valid || !m.train_error.is_finite() || !m.complexity.is_finite() {
            return false;
        }
        let obj = Objectives::of(m);
        if self.models.iter().any(|e| {
            let o = Objectives::of(e);
            o.dominates(&obj) || o == obj
        }) {
            return false;
        }
        self.models.retain(|e| !obj.dominates(&Objectives::of(e)));
        let at = self.models.partition_point(|e| e.complexity < m.complexity);
        self.models.insert(at, m.clone());
        true
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn into_models(self) -> Vec<Model> {
        self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Lowest error among members with complexity ≤ `complexity`.
    pub fn best_error_within(&self, complexity: f64) -> f64 {
        self.models
            .iter()
            .filter(|m| m.complexity <= complexity)
            .map(|m| m.train_error)
            .fold(f64::INFINITY, f64::min)
    }
}
