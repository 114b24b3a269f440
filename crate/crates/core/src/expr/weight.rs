use serde::{Deserialize, Serialize};

/// An evolved real parameter, stored in `[-2B, 2B]`.
///
/// The stored value is a signed log-magnitude: see [`interpret_weight`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub stored: f64,
}

impl Weight {
    pub fn new(stored: f64) -> Self {
        Self { stored }
    }

    pub fn value(&self, bound: f64) -> f64 {
        interpret_weight(self.stored, bound)
    }

    pub fn in_bounds(&self, bound: f64) -> bool {
        self.stored.is_finite() && self.stored.abs() <= 2.0 * bound
    }
}

/// Maps a stored weight onto `[-10^B, -10^-B] ∪ {0} ∪ [10^-B, 10^B]`.
///
/// Zero maps to zero, anything else to `sign(v) * 10^(|v| - B)`.
///
/// # Panics
///
/// If `|stored| > 2B`.
pub fn interpret_weight(stored: f64, bound: f64) -> f64 {
    assert!(
        stored.abs() <= 2.0 * bound,
        "stored weight {stored} outside [-2B, 2B] for B = {bound}"
    );
    if stored == 0.0 {
        0.0
    } else {
        stored.signum() * 10f64.powf(stored.abs() - bound)
    }
}
