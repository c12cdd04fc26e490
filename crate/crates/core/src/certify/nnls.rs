//! Lawson-Hanson active-set nonnegative least squares.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Minimizes `|B x - y|` subject to `x >= 0`.
///
/// The dual vector `w = B^T y - (B^T B) x` is maintained on the Gram
/// system; passive-set subproblems are solved on the columns of `B`
/// directly through an SVD.
pub fn nnls(b: &DMatrix<f64>, y: &DVector<f64>, max_outer: usize) -> DVector<f64> {
    let cols = b.ncols();
    let gram = b.transpose() * b;
    let bty = b.transpose() * y;
    let mut x = DVector::<f64>::zeros(cols);
    let mut passive = vec![false; cols];
    let col_norm = (0..cols).map(|j| b.column(j).norm()).fold(0.0, f64::max);
    let tol = 10.0 * f64::EPSILON * col_norm * y.norm() * b.nrows().max(cols) as f64;

    let dual = |x: &DVector<f64>| &bty - &gram * x;
    let mut w = dual(&x);
    for _ in 0..max_outer {
        let Some((t, wt)) = (0..cols)
            .filter(|&j| !passive[j])
            .map(|j| (j, w[j]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if wt <= tol {
            break;
        }
        passive[t] = true;

        for _ in 0..3 * cols {
            let idx: Vec<usize> = (0..cols).filter(|&j| passive[j]).collect();
            let z = solve_passive(b, y, &idx);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            // step back toward the feasible region until a coordinate hits zero
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] <= f64::EPSILON * col_norm {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = dual(&x);
    }
    x
}

fn solve_passive(b: &DMatrix<f64>, y: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    let sub = DMatrix::from_fn(b.nrows(), idx.len(), |r, c| b[(r, idx[c])]);
    let svd = sub.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max();
    match svd.solve(y, eps) {
        Ok(z) => z.iter().copied().collect(),
        Err(_) => vec![0.0; idx.len()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_nonnegative_combination() {
        let b = DMatrix::from_row_slice(3, 4, &[1.0, 0.0, 0.5, 1.0, 0.0, 1.0, 0.5, -1.0, 1.0, 1.0, 0.0, 0.0]);
        let truth = DVector::from_vec(vec![0.5, 2.0, 0.0, 0.0]);
        let y = &b * &truth;
        let x = nnls(&b, &y, 100);
        assert!((&b * &x - &y).norm() < 1e-12);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn clips_to_boundary() {
        // y points away from the only column: best nonnegative fit is zero
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let y = DVector::from_vec(vec![-1.0, 0.0]);
        assert_eq!(nnls(&b, &y, 10)[0], 0.0);
    }

    #[test]
    fn kkt_conditions_hold() {
        let b = DMatrix::from_fn(5, 8, |r, c| libm::sin((r * 8 + c) as f64 * 0.7));
        let y = DVector::from_fn(5, |r, _| libm::cos(r as f64));
        let x = nnls(&b, &y, 100);
        let w = b.transpose() * (&y - &b * &x);
        for j in 0..8 {
            assert!(x[j] >= 0.0);
            assert!(w[j] <= 1e-10, "dual {j} = {}", w[j]);
            if x[j] > 0.0 {
                assert!(w[j].abs() < 1e-10);
            }
        }
    }
}
