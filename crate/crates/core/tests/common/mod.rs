//! Independent reference implementations used to check the library.
//!
//! Everything here is deliberately naive: dense row-major matrices, Gaussian
//! elimination, explicit leave-one-out refits and quadratic dominance scans.

#![allow(dead_code)]

use canonreg::evolve::Objectives;
use rand::Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn transpose(a: &Mat) -> Mat {
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Mat, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col].clone();
        for r in (col + 1)..n {
            let f = a[r][col] / pivot_row[col];
            for (dst, src) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Inverse of a square matrix, column by column.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let cols: Option<Vec<Vec<f64>>> = (0..n)
        .map(|j| gauss_solve(a.clone(), (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()))
        .collect();
    cols.map(|c| transpose(&c))
}

/// Design matrix with a leading ones column, from per-basis columns.
pub fn design(bases: &[Vec<f64>], n: usize) -> Mat {
    (0..n).map(|t| std::iter::once(1.0).chain(bases.iter().map(|b| b[t])).collect()).collect()
}

/// Least squares through the normal equations.
pub fn normal_equations(phi: &Mat, y: &[f64]) -> Option<Vec<f64>> {
    let pt = transpose(phi);
    gauss_solve(matmul(&pt, phi), matvec(&pt, y))
}

/// PRESS by refitting once per held-out sample.
pub fn loo_press(phi: &Mat, y: &[f64]) -> f64 {
    let n = phi.len();
    let mut total = 0.0;
    for t in 0..n {
        let rows: Mat = (0..n).filter(|&i| i != t).map(|i| phi[i].clone()).collect();
        let ys: Vec<f64> = (0..n).filter(|&i| i != t).map(|i| y[i]).collect();
        let coef = normal_equations(&rows, &ys).expect("held-out fit is full rank");
        let pred: f64 = phi[t].iter().zip(&coef).map(|(a, b)| a * b).sum();
        total += (y[t] - pred).powi(2);
    }
    total
}

/// Minimum-norm least squares for `phi = b · c` with `b` full column rank and
/// `c` full row rank: `phi⁺ = c⁺ b⁺`.
pub fn pinv_factored_solution(b: &Mat, c: &Mat, y: &[f64]) -> Vec<f64> {
    let bt = transpose(b);
    let b_pinv = matmul(&inverse(&matmul(&bt, b)).expect("b full column rank"), &bt);
    let ct = transpose(c);
    let c_pinv = matmul(&ct, &inverse(&matmul(c, &ct)).expect("c full row rank"));
    matvec(&matmul(&c_pinv, &b_pinv), y)
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let no_worse = a.error <= b.error && a.complexity <= b.complexity;
    no_worse && (a.error != b.error || a.complexity != b.complexity)
}

/// Fronts by repeatedly peeling off the points no remaining point dominates.
pub fn brute_fronts(points: &[Objectives]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
