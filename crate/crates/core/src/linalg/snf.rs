//! Smith normal form: dense with transforms, sparse for invariant factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::elim::{eliminate_units, ElimLimits, Integers, Row};
use crate::linalg::hnf::{to_big, Dense};
use crate::linalg::matrix::SparseMatrix;
use crate::scalar::{Checked, Int};
use crate::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`, units included.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    /// `(U, V)` with `U * A * V` diagonal, when requested.
    pub transforms: Option<(IntMatrix, IntMatrix)>,
}

impl SmithForm {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Dense SNF kernel; returns the diagonal and optionally `(U, V)`.
#[allow(clippy::type_complexity)]
pub(crate) fn snf_dense<T: Int>(a: &Dense<T>, ncols: usize, transforms: bool) -> Checked<(Vec<T>, Option<(Dense<T>, Dense<T>)>)> {
    let n = a.len();
    let m = ncols;
    let mut a = a.clone();
    let ident = |k: usize| -> Dense<T> { (0..k).map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect() };
    let mut u = if transforms { ident(n) } else { Vec::new() };
    let mut v = if transforms { ident(m) } else { Vec::new() };
    let mut diag = Vec::new();

    let row_op = |mat: &mut Dense<T>, tgt: usize, q: &T, src: usize| -> Checked<()> {
        if q.is_zero() {
            return Ok(());
        }
        for j in 0..mat[src].len() {
            if !mat[src][j].is_zero() {
                let y = mat[src][j].clone();
                mat[tgt][j] = mat[tgt][j].c_sub_mul(q, &y)?;
            }
        }
        Ok(())
    };
    let col_op = |mat: &mut Dense<T>, tgt: usize, q: &T, src: usize| -> Checked<()> {
        if q.is_zero() {
            return Ok(());
        }
        for row in mat.iter_mut() {
            if !row[src].is_zero() {
                let y = row[src].clone();
                row[tgt] = row[tgt].c_sub_mul(q, &y)?;
            }
        }
        Ok(())
    };
    let swap_cols = |mat: &mut Dense<T>, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };

    for t in 0..n.min(m) {
        // pick smallest nonzero in the trailing block
        let mut best: Option<(usize, usize, T)> = None;
        for i in t..n {
            for j in t..m {
                if !a[i][j].is_zero() {
                    let av = a[i][j].c_abs()?;
                    if best.as_ref().is_none_or(|b| av < b.2) {
                        best = Some((i, j, av));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        a.swap(t, bi);
        if transforms {
            u.swap(t, bi);
        }
        swap_cols(&mut a, t, bj);
        if transforms {
            swap_cols(&mut v, t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_op(&mut a, i, &q, t)?;
                if transforms {
                    row_op(&mut u, i, &q, t)?;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..m {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_op(&mut a, j, &q, t)?;
                if transforms {
                    col_op(&mut v, j, &q, t)?;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the trailing block
                let piv = a[t][t].clone();
                let bad = (t + 1..n).find(|&i| (t + 1..m).any(|j| !a[i][j].is_multiple_of(&piv)));
                match bad {
                    None => break,
                    Some(i) => {
                        // add row i to row t, then keep reducing
                        let neg = T::one().c_neg()?;
                        row_op(&mut a, t, &neg, i)?;
                        if transforms {
                            row_op(&mut u, t, &neg, i)?;
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t into the pivot slot
            let mut best: Option<(usize, usize, T)> = None;
            for i in t..n {
                if !a[i][t].is_zero() {
                    let av = a[i][t].c_abs()?;
                    if best.as_ref().is_none_or(|b| av < b.2) {
                        best = Some((i, t, av));
                    }
                }
            }
            for j in t..m {
                if !a[t][j].is_zero() {
                    let av = a[t][j].c_abs()?;
                    if best.as_ref().is_none_or(|b| av < b.2) {
                        best = Some((t, j, av));
                    }
                }
            }
            let (bi, bj, _) = best.expect("pivot row or column is nonzero");
            if bi != t {
                a.swap(t, bi);
                if transforms {
                    u.swap(t, bi);
                }
            }
            if bj != t {
                swap_cols(&mut a, t, bj);
                if transforms {
                    swap_cols(&mut v, t, bj);
                }
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = x.c_neg()?;
            }
            if transforms {
                for x in u[t].iter_mut() {
                    *x = x.c_neg()?;
                }
            }
        }
        diag.push(a[t][t].clone());
    }
    Ok((diag, transforms.then_some((u, v))))
}

/// Turns a list of nonzero diagonal entries into a divisibility chain with the
/// same cokernel (pairwise gcd/lcm exchange).
pub fn diagonal_to_chain(entries: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = entries.iter().map(|x| x.abs()).filter(|x| !x.is_zero()).collect();
    let units = d.iter().filter(|x| x.is_one()).count();
    d.retain(|x| !x.is_one());
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if d[j].is_multiple_of(&d[i]) {
                continue;
            }
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    let mut out = vec![BigInt::one(); units];
    out.extend(d);
    out.sort();
    out
}

fn snf_sparse_in<T: Int>(rows: Vec<Row<T>>, ncols: usize) -> Checked<(usize, Vec<BigInt>)> {
    let out = eliminate_units(&Integers::<T>::new(), rows, ncols, ElimLimits { max_density: 1.1, ..Default::default() })?;
    let mut factors = vec![BigInt::one(); out.pivots];
    if !out.core.is_empty() {
        let mut dense: Dense<T> = vec![vec![T::zero(); out.core_cols]; out.core.len()];
        for (r, row) in out.core.iter().enumerate() {
            for (c, v) in row {
                dense[r][*c] = v.clone();
            }
        }
        let (diag, _) = snf_dense(&dense, out.core_cols, false)?;
        factors.extend(diag.iter().map(Int::to_bigint));
    }
    let chain = diagonal_to_chain(&factors);
    Ok((chain.len(), chain))
}

/// Smith normal form of `m`.
///
/// Without transforms the sparse unit-pivot engine runs first and only the
/// remaining core is densified. With transforms a dense elimination is used.
pub fn snf<T: Int>(m: &SparseMatrix<T>, want_transforms: bool) -> SmithForm {
    if want_transforms {
        let cols = m.cols();
        let rows = m.rows();
        let finish = |diag: Vec<BigInt>, uv: Option<(IntMatrix, IntMatrix)>| SmithForm {
            rank: diag.len(),
            invariant_factors: diag,
            transforms: uv,
        };
        if let Some(small) = m.convert::<i64>() {
            if let Ok((diag, uv)) = snf_dense(&small.to_dense(), cols, true) {
                let (u, v) = uv.expect("requested");
                return finish(diag.iter().map(Int::to_bigint).collect(), Some((to_big(&u, rows), to_big(&v, cols))));
            }
        }
        let big = m.convert::<BigInt>().expect("BigInt holds every scalar");
        let (diag, uv) = snf_dense(&big.to_dense(), cols, true).expect("no overflow in arbitrary precision");
        let (u, v) = uv.expect("requested");
        return finish(diag, Some((to_big(&u, rows), to_big(&v, cols))));
    }
    if let Some(small) = m.convert::<i64>() {
        if let Ok((rank, factors)) = snf_sparse_in(small.into_rows(), m.cols()) {
            return SmithForm { invariant_factors: factors, rank, transforms: None };
        }
    }
    let big = m.convert::<BigInt>().expect("BigInt holds every scalar");
    let (rank, factors) = snf_sparse_in(big.into_rows(), m.cols()).expect("no overflow in arbitrary precision");
    SmithForm { invariant_factors: factors, rank, transforms: None }
}

/// Independent dense oracle used by the test-suite: invariant factors from
/// determinantal divisors `d_k = gcd of all k x k minors`.
pub fn determinantal_divisors(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=n.min(m) {
        let mut g = BigInt::zero();
        for rows in combinations(n, k) {
            for cols in combinations(m, k) {
                let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
                g = g.gcd(&crate::linalg::matrix::determinant(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
