//! LU factorization and solve for general banded linear systems with
//! partial pivoting (the banded analogue of `getrf`/`getrs`).

use alloc::vec;
use alloc::vec::Vec;

/// A square banded matrix with `kl` subdiagonals and `ku` superdiagonals,
/// stored row-major with one padded row per matrix row:
/// `rows[i][kl + (j − i)] = A[i][j]` for `|j − i|` within the band.
#[derive(Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    rows: Vec<Vec<f64>>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded { n, kl, ku, rows: vec![vec![0.0; kl + ku + 1]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Add `value` to `A[i][j]`. Panics (debug) if outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let off = j as isize - i as isize + self.kl as isize;
        debug_assert!(
            off >= 0 && (off as usize) < self.kl + self.ku + 1,
            "entry ({i},{j}) outside band"
        );
        self.rows[i][off as usize] += value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let off = j as isize - i as isize + self.kl as isize;
        debug_assert!(off >= 0 && (off as usize) < self.kl + self.ku + 1);
        self.rows[i][off as usize] = value;
    }

    /// Factor in place and solve `A x = b`. Returns `None` when a pivot
    /// column is exactly zero (singular to working precision).
    ///
    /// Row swaps during partial pivoting widen the upper band to
    /// `ku + kl`, so the factorization works on a padded copy.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        debug_assert_eq!(b.len(), n);
        let width = kl + ku + kl + 1; // fill-in from pivoting
        // work[i][kl + (j − i)] with j − i ∈ [−kl, ku + kl]
        let mut work = vec![vec![0.0f64; width]; n];
        for i in 0..n {
            for (off, &a) in self.rows[i].iter().enumerate() {
                work[i][off] = a;
            }
        }
        let mut x: Vec<f64> = b.to_vec();

        for col in 0..n {
            // pivot search among rows col..=col+kl
            let last = (col + kl).min(n - 1);
            let mut piv = col;
            let mut best = 0.0f64;
            for r in col..=last {
                // A[r][col] sits at offset kl + col − r
                let a = work[r][kl + col - r].abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            if piv != col {
                // swap the overlapping band segments of rows `col` and `piv`
                for j in col..=(col + ku + kl).min(n - 1) {
                    let oc = kl + j - col;
                    let op = (kl as isize + j as isize - piv as isize) as usize;
                    let tmp = work[col][oc];
                    work[col][oc] = work[piv][op];
                    work[piv][op] = tmp;
                }
                x.swap(col, piv);
            }
            let pivot = work[col][kl];
            for r in col + 1..=last {
                let off_r = kl + col - r;
                let factor = work[r][off_r] / pivot;
                if factor != 0.0 {
                    for j in col + 1..=(col + ku + kl).min(n - 1) {
                        let contrib = factor * work[col][kl + j - col];
                        work[r][(kl as isize + j as isize - r as isize) as usize] -= contrib;
                    }
                    x[r] -= factor * x[col];
                }
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in col + 1..=(col + ku + kl).min(n - 1) {
                s -= work[col][kl + j - col] * x[j];
            }
            x[col] = s / work[col][kl];
            if !x[col].is_finite() {
                return None;
            }
        }
        Some(x)
    }
}
