use rand::Rng;
use serde::{Deserialize, Serialize};

/// A variable combo: one integer exponent per design variable.
///
/// `[1, 0, -2, 1]` stands for `x1 * x4 / x3^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vc {
    pub exponents: Vec<i32>,
}

impl Vc {
    pub fn new(exponents: Vec<i32>) -> Self {
        Self { exponents }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Sum of absolute exponents.
    pub fn l1(&self) -> u32 {
        self.exponents.iter().map(|e| e.unsigned_abs()).sum()
    }

    pub fn negated(&self) -> Vc {
        Vc::new(self.exponents.iter().map(|e| -e).collect())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        vc_value(self, x)
    }

    /// Re-adds a random ±1 exponent if every exponent is zero.
    pub fn repair<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.is_zero() && !self.exponents.is_empty() {
            let dim = rng.random_range(0..self.exponents.len());
            self.exponents[dim] = if rng.random_bool(0.5) { 1 } else { -1 };
        }
    }

    /// Draws a combo with 1 to 3 nonzero exponents from {-2, -1, 1, 2}.
    pub fn random<R: Rng + ?Sized>(n_vars: usize, exp_cap: i32, rng: &mut R) -> Vc {
        const CHOICES: [i32; 4] = [-2, -1, 1, 2];
        let mut exponents = vec![0; n_vars];
        if n_vars == 0 {
            return Vc::new(exponents);
        }
        let k = rng.random_range(1..=n_vars.min(3));
        let cap = exp_cap.max(1);
        for dim in rand::seq::index::sample(rng, n_vars, k) {
            let e = CHOICES[rng.random_range(0..CHOICES.len())];
            exponents[dim] = e.clamp(-cap, cap);
        }
        Vc::new(exponents)
    }
}

/// `∏ x_i^e_i`; zero to a negative power yields a non-finite value.
pub fn vc_value(vc: &Vc, x: &[f64]) -> f64 {
    vc.exponents
        .iter()
        .zip(x)
        .filter(|(&e, _)| e != 0)
        .map(|(&e, &xi)| xi.powi(e))
        .product()
}
