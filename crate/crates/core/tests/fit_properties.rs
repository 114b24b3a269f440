mod common;

use canonreg::fit::{
    error_reference, fit_weights, forward_regression_press, nmse, press, RegressionProblem,
};
use common::*;
use proptest::prelude::*;

fn problem(n_max: usize, m_max: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (0..=m_max).prop_flat_map(move |m| {
        ((m + 3)..=n_max).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), m),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
    })
}

proptest! {
    #[test]
    fn weights_match_normal_equations((bases, y) in problem(25, 4)) {
        let n = y.len();
        let got = fit_weights(&RegressionProblem::from_bases(&bases, &y).unwrap());
        let want = normal_equations(&design(&bases, n), &y).unwrap();
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-7 * w.abs().max(1.0), "{g} vs {w}");
        }
    }

    #[test]
    fn press_matches_leave_one_out((bases, y) in problem(20, 3)) {
        let fast = press(&RegressionProblem::from_bases(&bases, &y).unwrap());
        let slow = loo_press(&design(&bases, y.len()), &y);
        prop_assert!(rel_close(fast, slow, 1e-8), "{fast} vs {slow}");
    }

    #[test]
    fn forward_selection_never_worse_than_offset((bases, y) in problem(20, 4)) {
        let sel = forward_regression_press(&bases, &y).unwrap();
        let offset_only = press(&RegressionProblem::from_bases::<Vec<f64>>(&[], &y).unwrap());
        prop_assert!(sel.press <= offset_only);
        prop_assert_eq!(sel.coeffs.len(), sel.selected.len() + 1);
        let mut seen = sel.selected.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), sel.selected.len());
    }

    #[test]
    fn nmse_is_scale_free(y in prop::collection::vec(0.5f64..5.0, 2..20), k in 0.1f64..100.0) {
        let pred: Vec<f64> = y.iter().map(|v| v * 1.1).collect();
        let e1 = nmse(&pred, &y, error_reference(&y)).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| v * k).collect();
        let ps: Vec<f64> = pred.iter().map(|v| v * k).collect();
        let e2 = nmse(&ps, &ys, error_reference(&ys)).unwrap();
        prop_assert!(rel_close(e1, e2, 1e-10));
    }
}

#[test]
fn duplicated_column_makes_press_infinite() {
    let a: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
    let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let p = RegressionProblem::from_bases(&[a.clone(), a], &y).unwrap();
    assert_eq!(press(&p), f64::INFINITY);
}

#[test]
fn too_few_samples() {
    let y = [1.0, 2.0];
    let p = RegressionProblem::from_bases(&[vec![0.0, 1.0]], &y).unwrap();
    assert_eq!(press(&p), f64::INFINITY);
    assert!(fit_weights(&p).iter().all(|c| c.is_finite()));
}

#[test]
fn forward_selection_ignores_duplicates() {
    let a: Vec<f64> = (1..=12).map(|i| 1.0 / i as f64).collect();
    let y: Vec<f64> = a.iter().map(|v| 2.0 + 5.0 * v).collect();
    let sel = forward_regression_press(&[a.clone(), a], &y).unwrap();
    assert_eq!(sel.selected, vec![0]);
    assert!((sel.coeffs[1] - 5.0).abs() < 1e-9);
}
