//! Row-style Hermite normal form with unimodular transform.

use num_bigint::BigInt;

use crate::linalg::matrix::SparseMatrix;
use crate::scalar::{Checked, Int};
use crate::IntMatrix;

/// Result of [`hnf`]: `transform * input == form`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm {
    pub form: IntMatrix,
    pub transform: IntMatrix,
    /// Column index of the pivot in each nonzero row of `form`.
    pub pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub(crate) type Dense<T> = Vec<Vec<T>>;

fn row_sub_mul<T: Int>(rows: &mut [Vec<T>], target: usize, q: &T, src: usize) -> Checked<()> {
    if q.is_zero() {
        return Ok(());
    }
    let (t, s) = if target < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x = x.c_sub_mul(q, y)?;
        }
    }
    Ok(())
}

fn negate_row<T: Int>(row: &mut [T]) -> Checked<()> {
    for x in row.iter_mut() {
        *x = x.c_neg()?;
    }
    Ok(())
}

/// Dense row-style HNF kernel. Returns `(H, U, pivot columns)` with `U * A = H`.
pub(crate) fn hnf_dense<T: Int>(a: &Dense<T>, ncols: usize) -> Checked<(Dense<T>, Dense<T>, Vec<usize>)> {
    let n = a.len();
    let mut h = a.clone();
    let mut u: Dense<T> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == n {
            break;
        }
        loop {
            // smallest nonzero magnitude in column c at or below row r
            let mut best: Option<(usize, T)> = None;
            for i in r..n {
                if !h[i][c].is_zero() {
                    let v = h[i][c].c_abs()?;
                    if best.as_ref().is_none_or(|(_, b)| v < *b) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((i, _)) = best else { break };
            h.swap(r, i);
            u.swap(r, i);
            let mut done = true;
            for i in r + 1..n {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_sub_mul(&mut h, i, &q, r)?;
                row_sub_mul(&mut u, i, &q, r)?;
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h[r])?;
            negate_row(&mut u[r])?;
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_sub_mul(&mut h, i, &q, r)?;
            row_sub_mul(&mut u, i, &q, r)?;
        }
        pivots.push(c);
        r += 1;
    }
    Ok((h, u, pivots))
}

/// Hermite normal form of `m` under unimodular row operations.
///
/// Pivots are positive and entries above each pivot lie in `[0, pivot)`;
/// zero rows are moved to the bottom. Runs in machine words first and
/// repeats in arbitrary precision if an intermediate value overflows.
pub fn hnf<T: Int>(m: &SparseMatrix<T>) -> HermiteForm {
    let cols = m.cols();
    if let Some(small) = m.convert::<i64>() {
        if let Ok((h, u, pivots)) = hnf_dense(&small.to_dense(), cols) {
            return HermiteForm { form: to_big(&h, cols), transform: to_big(&u, m.rows()), pivots };
        }
    }
    let big = m.convert::<BigInt>().expect("BigInt holds every scalar");
    let (h, u, pivots) = hnf_dense(&big.to_dense(), cols).expect("arbitrary precision does not overflow");
    HermiteForm { form: to_big(&h, cols), transform: to_big(&u, m.rows()), pivots }
}

pub(crate) fn to_big<T: Int>(d: &Dense<T>, cols: usize) -> IntMatrix {
    let rows: Vec<Vec<(usize, BigInt)>> =
        d.iter().map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.to_bigint())).collect()).collect();
    IntMatrix::from_rows(cols, rows).expect("dense rows fit their width")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::WordMatrix;

    fn check(rows: &[Vec<i64>]) -> HermiteForm {
        let m = WordMatrix::from_i64_rows(rows);
        let h = hnf(&m);
        let big = m.convert::<BigInt>().unwrap();
        assert_eq!(h.transform.checked_mul(&big).unwrap(), h.form);
        h
    }

    #[test]
    fn identity_is_fixed() {
        let h = check(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(h.form, IntMatrix::identity(3));
        assert_eq!(h.transform, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two() {
        // fully reduced: the entry above the second pivot is taken mod 4
        let h = check(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(h.form, IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn sign_normalisation() {
        let h = check(&[vec![-5]]);
        assert_eq!(h.form, IntMatrix::from_i64_rows(&[vec![5]]));
        assert_eq!(h.transform, IntMatrix::from_i64_rows(&[vec![-1]]));
    }

    #[test]
    fn empty_matrix() {
        let h = hnf(&WordMatrix::zeros(0, 3));
        assert_eq!(h.form.rows(), 0);
        assert_eq!(h.rank(), 0);
    }

    #[test]
    fn rank_deficient_rows_sink() {
        let h = check(&[vec![0, 0, 0], vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(h.rank(), 1);
        assert!(h.form.row(1).is_empty() && h.form.row(2).is_empty());
    }

    #[test]
    fn overflow_promotes() {
        let big = i64::MAX / 2;
        let h = check(&[vec![big, 1], vec![big - 1, 1], vec![3, big]]);
        assert_eq!(h.rank(), 2);
    }
}
