use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eval::{eval_basis, eval_basis_columns};
use super::tree::BasisTree;

/// An offset plus a linear combination of basis trees.
///
/// `coeffs[0]` is the offset and `coeffs[j + 1]` weights `bases[j]`. Coefficients
/// always come from least squares, never from evolution. An invalid model
/// (non-finite on some training sample) carries `train_error = +inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub bases: Vec<BasisTree>,
    pub coeffs: Vec<f64>,
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub train_error: f64,
    #[serde(default)]
    pub test_error: Option<f64>,
    pub complexity: f64,
    pub valid: bool,
}

fn ser_error<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_error<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Model {
    /// An unfitted model over `bases`.
    pub fn unfitted(bases: Vec<BasisTree>) -> Self {
        let m = bases.len();
        Self {
            bases,
            coeffs: vec![0.0; m + 1],
            train_error: f64::INFINITY,
            test_error: None,
            complexity: 0.0,
            valid: false,
        }
    }

    pub fn constant(offset: f64) -> Self {
        Self {
            bases: Vec::new(),
            coeffs: vec![offset],
            train_error: f64::INFINITY,
            test_error: None,
            complexity: 0.0,
            valid: true,
        }
    }

    pub fn n_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn offset(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Basis values over a dataset, one vector per basis.
    pub fn basis_columns(&self, columns: &[Vec<f64>], n: usize, bound: f64) -> Vec<Vec<f64>> {
        self.bases
            .iter()
            .map(|b| eval_basis_columns(b, columns, n, bound))
            .collect()
    }

    /// Predictions over `n` samples given per-variable columns.
    pub fn predict(&self, columns: &[Vec<f64>], n: usize, bound: f64) -> Vec<f64> {
        let mut out = vec![self.offset(); n];
        for (basis, &a) in self.bases.iter().zip(&self.coeffs[1..]) {
            let vals = eval_basis_columns(basis, columns, n, bound);
            out.iter_mut().zip(vals).for_each(|(o, v)| *o += a * v);
        }
        out
    }
}

/// `a0 + Σ a_j · basis_j(x)`; non-finite basis values propagate.
pub fn eval_model(m: &Model, x: &[f64], bound: f64) -> f64 {
    m.bases
        .iter()
        .zip(&m.coeffs[1..])
        .fold(m.offset(), |acc, (b, &a)| acc + a * eval_basis(b, x, bound))
}

/// Complexity score: per basis, `w_b + nnodes + w_vc · Σ|exponents|` over its combos.
pub fn complexity(m: &Model, w_b: f64, w_vc: f64) -> f64 {
    // + 0.0 turns the empty sum's -0.0 into 0.0
    m.bases.iter().map(|b| basis_complexity(b, w_b, w_vc)).sum::<f64>() + 0.0
}

pub(crate) fn basis_complexity(b: &BasisTree, w_b: f64, w_vc: f64) -> f64 {
    let vc_cost: f64 = b.vcs().iter().map(|vc| w_vc * f64::from(vc.l1())).sum();
    w_b + b.nnodes() as f64 + vc_cost
}
