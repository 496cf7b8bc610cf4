//! Thomas algorithm for tridiagonal linear systems.

use alloc::vec;
use alloc::vec::Vec;

/// Solve `lower[i]·x[i−1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n−1]` are ignored. Returns `None` when a pivot
/// degenerates (the calling solvers treat that as non-convergence; it cannot
/// happen for the diagonally dominant systems they assemble).
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0.0; n]; // modified upper
    let mut d = vec![0.0; n]; // modified rhs
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return None;
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return None;
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 10, 9] → x = [0.5, 2, 3.5]
        let x = solve(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 10.0, 9.0])
            .unwrap();
        assert!((x[0] - 0.5).abs() < 1e-14);
        assert!((x[1] - 2.0).abs() < 1e-14);
        assert!((x[2] - 3.5).abs() < 1e-14);
    }

    #[test]
    fn matches_laplacian_inverse() {
        // -u'' = 1 on (0,1), u(0)=u(1)=0, exact u = x(1-x)/2 (FD is exact
        // for quadratics).
        let n = 65;
        let h = 1.0 / (n as f64 - 1.0);
        let m = n - 2;
        let lower = vec![-1.0 / (h * h); m];
        let diag = vec![2.0 / (h * h); m];
        let upper = vec![-1.0 / (h * h); m];
        let rhs = vec![1.0; m];
        let x = solve(&lower, &diag, &upper, &rhs).unwrap();
        for (i, &xi) in x.iter().enumerate() {
            let t = h * (i as f64 + 1.0);
            assert!((xi - 0.5 * t * (1.0 - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_singular_pivot() {
        assert!(solve(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).is_none());
    }
}
