//! Linear least squares over basis columns, error measures, PRESS, and
//! PRESS-driven forward regression.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("regression problem has no samples")]
    Empty,
    #[error("design matrix has {rows} rows but the target has {len} values")]
    Shape { rows: usize, len: usize },
    #[error("non-finite entry in design matrix or target")]
    NonFinite,
    #[error("prediction and target lengths differ ({pred} vs {target})")]
    Length { pred: usize, target: usize },
    #[error("error reference must be positive, got {0}")]
    Reference(f64),
}

/// `y ≈ Phi · coeffs` with column 0 of `Phi` the all-ones offset column.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionProblem {
    phi: DMatrix<f64>,
    y: DVector<f64>,
}

impl RegressionProblem {
    pub fn new(phi: DMatrix<f64>, y: DVector<f64>) -> Result<Self, FitError> {
        if phi.nrows() == 0 {
            return Err(FitError::Empty);
        }
        if phi.nrows() != y.len() {
            return Err(FitError::Shape { rows: phi.nrows(), len: y.len() });
        }
        if phi.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(Self { phi, y })
    }

    /// Builds `[1 | bases...]` from per-basis value columns.
    pub fn from_bases<C: AsRef<[f64]>>(bases: &[C], y: &[f64]) -> Result<Self, FitError> {
        let n = y.len();
        if let Some(bad) = bases.iter().find(|b| b.as_ref().len() != n) {
            return Err(FitError::Shape { rows: bad.as_ref().len(), len: n });
        }
        let phi = DMatrix::from_fn(n, bases.len() + 1, |t, j| if j == 0 { 1.0 } else { bases[j - 1].as_ref()[t] });
        Self::new(phi, DVector::from_column_slice(y))
    }

    pub fn n_samples(&self) -> usize {
        self.phi.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.phi.ncols()
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }
}

struct Solution {
    coeffs: DVector<f64>,
    /// Diagonal of the hat matrix, present only for full column rank.
    hat: Option<DVector<f64>>,
}

/// Minimum-norm least squares via a column-pivoted QR of the
/// column-equilibrated matrix.
///
/// Columns are scaled by their largest magnitude before factoring so that
/// rank decisions do not depend on units. A basic solution is computed from
/// the leading rank-`r` block; when `r < p` the null space is mapped back to
/// original coordinates and projected out, which yields the minimum-norm
/// minimizer there.
fn solve(phi: &DMatrix<f64>, y: &DVector<f64>) -> Solution {
    let (n, p) = phi.shape();
    let scale: Vec<f64> = (0..p)
        .map(|j| {
            let m = phi.column(j).amax();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    let a = DMatrix::from_fn(n, p, |t, j| phi[(t, j)] / scale[j]);
    let failed = || Solution { coeffs: DVector::from_element(p, f64::NAN), hat: None };

    let qr = a.col_piv_qr();
    let (q, r) = (qr.q(), qr.r());
    let r00 = if r.nrows() > 0 { r[(0, 0)].abs() } else { 0.0 };
    let tol = r00 * n.max(p) as f64 * f64::EPSILON;
    let rank = (0..n.min(p)).take_while(|&i| r[(i, i)].abs() > tol).count();

    // basic solution in pivoted, scaled coordinates
    let r11 = r.view((0, 0), (rank, rank));
    let qty = q.columns(0, rank).transpose() * y;
    let Some(head) = r11.solve_upper_triangular(&qty) else {
        return failed();
    };
    let mut x = DVector::zeros(p);
    x.rows_mut(0, rank).copy_from(&head);
    qr.p().inv_permute_rows(&mut x);
    for j in 0..p {
        x[j] /= scale[j];
    }

    if rank < p {
        // null space of [R11 R12] is spanned by the columns of [-R11⁻¹ R12; I]
        let r12 = r.view((0, rank), (rank, p - rank)).into_owned();
        let Some(top) = r11.solve_upper_triangular(&r12) else {
            return failed();
        };
        let mut null = DMatrix::zeros(p, p - rank);
        null.view_mut((0, 0), (rank, p - rank)).copy_from(&(-top));
        null.view_mut((rank, 0), (p - rank, p - rank)).fill_with_identity();
        qr.p().inv_permute_rows(&mut null);
        for (j, &sj) in scale.iter().enumerate() {
            null.row_mut(j).unscale_mut(sj);
        }
        let basis = null.qr().q();
        let along = basis.transpose() * &x;
        x -= basis * along;
    }

    let hat = (rank == p && n > p).then(|| DVector::from_fn(n, |t, _| (0..p).map(|i| q[(t, i)] * q[(t, i)]).sum()));
    Solution { coeffs: x, hat }
}

/// Least-squares coefficients (offset first). Rank-deficient problems get the
/// minimum-norm minimizer.
pub fn fit_weights(p: &RegressionProblem) -> Vec<f64> {
    solve(&p.phi, &p.y).coeffs.iter().copied().collect()
}

/// Largest absolute target value: the normalizer for error percentages.
pub fn error_reference(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// Normalized RMS error in percent: `100 · sqrt(mean(((pred - y) / reference)²))`.
///
/// Any non-finite prediction makes the error `+inf`.
pub fn nmse(pred: &[f64], y: &[f64], reference: f64) -> Result<f64, FitError> {
    if pred.len() != y.len() {
        return Err(FitError::Length { pred: pred.len(), target: y.len() });
    }
    if !(reference > 0.0 && reference.is_finite()) {
        return Err(FitError::Reference(reference));
    }
    if y.is_empty() {
        return Err(FitError::Empty);
    }
    if pred.iter().any(|v| !v.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let mean_sq = pred
        .iter()
        .zip(y)
        .map(|(p, t)| ((p - t) / reference).powi(2))
        .sum::<f64>()
        / y.len() as f64;
    Ok(100.0 * mean_sq.sqrt())
}

const LEVERAGE_LIMIT: f64 = 1.0 - 1e-12;

/// Predicted residual sum of squares: `Σ (e_t / (1 - h_t))²`.
///
/// Returns `+inf` when the problem is not full column rank, has no spare
/// samples, or some leverage reaches 1.
pub fn press(p: &RegressionProblem) -> f64 {
    let sol = solve(&p.phi, &p.y);
    let Some(hat) = sol.hat else {
        return f64::INFINITY;
    };
    let resid = &p.y - &p.phi * &sol.coeffs;
    let mut total = 0.0;
    for (e, h) in resid.iter().zip(hat.iter()) {
        if *h >= LEVERAGE_LIMIT {
            return f64::INFINITY;
        }
        total += (e / (1.0 - h)).powi(2);
    }
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

/// Result of [`forward_regression_press`].
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardSelection {
    /// Candidate indices in the order they were added.
    pub selected: Vec<usize>,
    /// Offset followed by one coefficient per selected candidate, in `selected` order.
    pub coeffs: Vec<f64>,
    pub press: f64,
}

/// Relative PRESS improvement required to accept another candidate.
pub const FORWARD_TOLERANCE: f64 = 1e-9;

/// PRESS below `PRESS_FLOOR · Σy²` is round-off; improvements under it are ignored.
pub const PRESS_FLOOR: f64 = 1e-20;

/// Whether `candidate` beats `current` PRESS by more than the relative
/// tolerance and the round-off floor for targets `y`.
pub fn press_improves(candidate: f64, current: f64, y: &[f64]) -> bool {
    let floor = PRESS_FLOOR * y.iter().map(|v| v * v).sum::<f64>();
    candidate < current - (FORWARD_TOLERANCE * current.abs()).max(floor)
}

/// Greedy forward selection on PRESS, starting from the offset-only model.
///
/// Each step adds the candidate that minimizes PRESS (lowest index on ties)
/// and stops once no candidate lowers PRESS by more than
/// [`FORWARD_TOLERANCE`] relative (and by more than the round-off level set
/// by [`PRESS_FLOOR`]). Candidates with non-finite values are
/// never selected.
pub fn forward_regression_press<C: AsRef<[f64]>>(candidates: &[C], y: &[f64]) -> Result<ForwardSelection, FitError> {
    let usable: Vec<bool> = candidates
        .iter()
        .map(|c| c.as_ref().len() == y.len() && c.as_ref().iter().all(|v| v.is_finite()))
        .collect();
    let mut selected: Vec<usize> = Vec::new();
    let mut current = press(&RegressionProblem::from_bases::<&[f64]>(&[], y)?);
    loop {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..candidates.len()).filter(|&c| usable[c] && !selected.contains(&c)) {
            let cols: Vec<&[f64]> = selected.iter().chain([&c]).map(|&i| candidates[i].as_ref()).collect();
            let score = press(&RegressionProblem::from_bases(&cols, y)?);
            if score.is_finite() && best.is_none_or(|(_, b)| score < b) {
                best = Some((c, score));
            }
        }
        match best {
            Some((c, score)) if current.is_infinite() || press_improves(score, current, y) => {
                selected.push(c);
                current = score;
            }
            _ => break,
        }
    }
    let cols: Vec<&[f64]> = selected.iter().map(|&i| candidates[i].as_ref()).collect();
    let coeffs = fit_weights(&RegressionProblem::from_bases(&cols, y)?);
    Ok(ForwardSelection { selected, coeffs, press: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_linear_data() {
        let b = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = b.iter().map(|v| 3.0 + 2.0 * v).collect();
        let p = RegressionProblem::from_bases(&[b.to_vec()], &y).unwrap();
        let c = fit_weights(&p);
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn problem_invariants() {
        assert_eq!(RegressionProblem::from_bases::<Vec<f64>>(&[], &[]).unwrap_err(), FitError::Empty);
        assert_eq!(
            RegressionProblem::from_bases(&[vec![f64::NAN]], &[1.0]).unwrap_err(),
            FitError::NonFinite
        );
        assert!(matches!(
            RegressionProblem::from_bases(&[vec![1.0]], &[1.0, 2.0]).unwrap_err(),
            FitError::Shape { .. }
        ));
    }

    #[test]
    fn rank_deficient_solution_is_least_squares() {
        // rank 3: product of a 17x3 and a 3x4 factor
        let b = |t: usize| {
            let t = t as f64;
            [1.0, (0.7 * t).sin(), (1.3 * t + 0.4).cos()]
        };
        let c = [
            [1.0, 0.2195, 0.5051, 0.1482],
            [0.0, 0.9609, 0.2809, 0.2169],
            [0.0, -0.3555, 0.9307, -0.7709],
        ];
        let phi = DMatrix::from_fn(17, 4, |t, j| (0..3).map(|k| b(t)[k] * c[k][j]).sum());
        let y = DVector::from_fn(17, |t, _| ((t * 7919) % 17) as f64 - 8.0);
        let p = RegressionProblem::new(phi.clone(), y.clone()).unwrap();
        let x = DVector::from_vec(fit_weights(&p));
        let grad = phi.transpose() * (&y - &phi * &x);
        assert!(grad.amax() < 1e-10 * y.norm(), "gradient {grad}");
        assert_eq!(press(&p), f64::INFINITY);
    }

    #[test]
    fn nmse_cases() {
        assert_eq!(nmse(&[1.0, 2.0], &[1.0, 2.0], 2.0).unwrap(), 0.0);
        let e = nmse(&[1.0, 2.0, 4.0], &[1.0, 2.0, 3.0], 3.0).unwrap();
        assert!((e - 19.245008972987527).abs() < 1e-9);
        assert_eq!(nmse(&[f64::NAN], &[1.0], 1.0).unwrap(), f64::INFINITY);
        assert_eq!(nmse(&[0.0], &[0.0], 0.0).unwrap_err(), FitError::Reference(0.0));
        assert!(nmse(&[0.0], &[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn press_edge_cases() {
        let x = [0.0, 1.0, 2.0];
        let p = RegressionProblem::from_bases(&[x.to_vec()], &x).unwrap();
        assert!(press(&p) < 1e-20);
        let interp = RegressionProblem::from_bases(&[vec![0.0, 1.0]], &[1.0, 3.0]).unwrap();
        assert_eq!(press(&interp), f64::INFINITY);
        let dup = RegressionProblem::from_bases(&[x.to_vec(), x.to_vec()], &[1.0, 0.0, 2.0]).unwrap();
        assert_eq!(press(&dup), f64::INFINITY);
    }

    #[test]
    fn forward_selection_basics() {
        let y = [1.0, 2.0, 4.0, 3.0];
        let empty = forward_regression_press::<Vec<f64>>(&[], &y).unwrap();
        assert!(empty.selected.is_empty());
        assert!((empty.coeffs[0] - 2.5).abs() < 1e-12);

        let signal: Vec<f64> = (0..10).map(|t| t as f64).collect();
        let target: Vec<f64> = signal.iter().map(|s| 1.0 + 3.0 * s).collect();
        let picked = forward_regression_press(&[signal.clone(), signal.clone()], &target).unwrap();
        assert_eq!(picked.selected, vec![0]);
        assert!((picked.coeffs[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn badly_scaled_columns_still_fit() {
        let b: Vec<f64> = (1..=6).map(|t| 1e12 * t as f64).collect();
        let y: Vec<f64> = b.iter().map(|v| 5.0 + 2e-12 * v).collect();
        let c = fit_weights(&RegressionProblem::from_bases(&[b], &y).unwrap());
        assert!((c[0] - 5.0).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn nmse_scale_invariant(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..20),
            k in 0.01f64..100.0,
        ) {
            let pred: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let r = error_reference(&y).max(1.0);
            let a = nmse(&pred, &y, r).unwrap();
            let ps: Vec<f64> = pred.iter().map(|v| v * k).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * k).collect();
            let b = nmse(&ps, &ys, r * k).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        }
    }
}
