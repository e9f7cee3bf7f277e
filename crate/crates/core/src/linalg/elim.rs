//! Sparse Gaussian elimination on unit pivots, shared by the integer, prime
//! field and local (`Z/p^e`) kernels.
//!
//! The engine repeatedly picks a unit entry in a column of minimal weight
//! (Markowitz-style), clears that column with row operations and drops the
//! pivot row and column. For the cokernel this is exact: a unit pivot
//! contributes a trivial summand. The engine stops when no unit pivot is
//! left, when the active part becomes dense, or when a pivot target is hit,
//! and hands the remaining core back to a dense kernel.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Debug;

use crate::scalar::{Checked, Int};

/// Minimal ring interface the elimination engine needs.
pub trait ElimRing {
    type E: Clone + Debug + Send + Sync;

    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    /// The factor `q` with `a + q * u = 0`, for a unit `u`.
    fn elim_factor(&self, a: &Self::E, u: &Self::E) -> Checked<Self::E>;
    /// `y + q * x`
    fn axpy(&self, y: &Self::E, q: &Self::E, x: &Self::E) -> Checked<Self::E>;
    fn scaled(&self, q: &Self::E, x: &Self::E) -> Checked<Self::E>;
}

/// The integers, with units `±1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers<T>(std::marker::PhantomData<T>);

impl<T> Integers<T> {
    pub fn new() -> Self {
        Self(std::marker::PhantomData)
    }
}

impl<T: Int> ElimRing for Integers<T> {
    type E = T;

    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &T) -> bool {
        a.is_unit()
    }
    fn elim_factor(&self, a: &T, u: &T) -> Checked<T> {
        // u = ±1, so -a/u = -a*u
        a.c_mul(u)?.c_neg()
    }
    fn axpy(&self, y: &T, q: &T, x: &T) -> Checked<T> {
        y.c_add(&q.c_mul(x)?)
    }
    fn scaled(&self, q: &T, x: &T) -> Checked<T> {
        q.c_mul(x)
    }
}

/// `Z/nZ` with every residue stored in `[0, n)`. Covers prime fields and
/// prime-power rings; `unit_prime` is the prime whose multiples are non-units.
#[derive(Debug, Clone, Copy)]
pub struct Residues {
    pub modulus: u64,
    pub unit_prime: u64,
}

impl Residues {
    pub fn field(p: u64) -> Self {
        Self { modulus: p, unit_prime: p }
    }

    pub fn prime_power(p: u64, modulus: u64) -> Self {
        Self { modulus, unit_prime: p }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }

    pub fn from_int<T: Int>(&self, v: &T) -> u64 {
        match v.to_i64() {
            Some(x) => x.rem_euclid(self.modulus as i64) as u64,
            None => {
                let m = num_bigint::BigInt::from(self.modulus);
                let r = num_integer::Integer::mod_floor(&v.to_bigint(), &m);
                num_traits::ToPrimitive::to_u64(&r).expect("residue below modulus")
            }
        }
    }

    /// Inverse of a unit via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> u64 {
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (self.modulus as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        assert_eq!(r, 1, "{a} is not a unit modulo {}", self.modulus);
        t.rem_euclid(self.modulus as i128) as u64
    }
}

impl ElimRing for Residues {
    type E = u64;

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        !(*a).is_multiple_of(self.unit_prime)
    }
    fn elim_factor(&self, a: &u64, u: &u64) -> Checked<u64> {
        Ok(self.neg(self.mul(*a, self.inv(*u))))
    }
    fn axpy(&self, y: &u64, q: &u64, x: &u64) -> Checked<u64> {
        Ok(self.add(*y, self.mul(*q, *x)))
    }
    fn scaled(&self, q: &u64, x: &u64) -> Checked<u64> {
        Ok(self.mul(*q, *x))
    }
}

pub type Row<E> = Vec<(usize, E)>;

#[derive(Debug, Clone, Copy)]
pub struct ElimLimits {
    /// Stop once this many pivots have been found.
    pub pivot_target: Option<usize>,
    /// Stop when the active part has more than this fraction of nonzeros
    /// (only checked once the active part exceeds `dense_floor` cells).
    pub max_density: f64,
    pub dense_floor: usize,
}

impl Default for ElimLimits {
    fn default() -> Self {
        Self { pivot_target: None, max_density: 0.15, dense_floor: 250_000 }
    }
}

#[derive(Debug, Clone)]
pub struct ElimOutcome<E> {
    pub pivots: usize,
    /// Remaining nonzero rows, re-indexed over `core_cols` columns.
    pub core: Vec<Row<E>>,
    pub core_cols: usize,
    pub hit_target: bool,
}

/// `a + q * b` for sparse rows over a ring.
pub fn row_axpy<R: ElimRing>(ring: &R, a: &[(usize, R::E)], q: &R::E, b: &[(usize, R::E)]) -> Checked<Row<R::E>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = ring.scaled(q, &b[j].1)?;
            if !ring.is_zero(&v) {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = ring.axpy(&a[i].1, q, &b[j].1)?;
            if !ring.is_zero(&v) {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

fn lookup<E>(row: &[(usize, E)], c: usize) -> Option<&E> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
}

/// Runs unit-pivot elimination over `rows` (each sorted, zero-free).
pub fn eliminate_units<R: ElimRing>(ring: &R, rows: Vec<Row<R::E>>, ncols: usize, limits: ElimLimits) -> Checked<ElimOutcome<R::E>> {
    let mut rows: Vec<Option<Row<R::E>>> = rows.into_iter().map(|r| if r.is_empty() { None } else { Some(r) }).collect();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut col_count = vec![0usize; ncols];
    let mut active_nnz = 0usize;
    let mut active_rows = 0usize;
    for (r, row) in rows.iter().enumerate() {
        if let Some(row) = row {
            active_rows += 1;
            active_nnz += row.len();
            for (c, _) in row {
                col_rows[*c].push(r as u32);
                col_count[*c] += 1;
            }
        }
    }
    let mut col_dead = vec![false; ncols];
    let mut active_cols = col_count.iter().filter(|&&n| n > 0).count();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..ncols).filter(|&c| col_count[c] > 0).map(|c| Reverse((col_count[c], c))).collect();
    // columns found without a unit entry at their current count
    let mut stuck = vec![usize::MAX; ncols];
    let mut pivots = 0usize;
    let mut hit_target = false;
    let mut stamp = vec![0u32; rows.len()];
    let mut epoch = 0u32;

    'outer: loop {
        if let Some(t) = limits.pivot_target {
            if pivots >= t {
                hit_target = true;
                break;
            }
        }
        let cells = active_rows.saturating_mul(active_cols);
        if cells > limits.dense_floor && (active_nnz as f64) > limits.max_density * cells as f64 {
            break;
        }
        let Some(Reverse((cnt, c))) = heap.pop() else {
            // Columns marked stuck may have gained a unit since; give them one more look.
            let retry: Vec<usize> = (0..ncols).filter(|&c| !col_dead[c] && col_count[c] > 0 && stuck[c] != col_count[c]).collect();
            if retry.is_empty() {
                break;
            }
            for c in retry {
                heap.push(Reverse((col_count[c], c)));
            }
            continue;
        };
        if col_dead[c] || cnt != col_count[c] || cnt == 0 {
            continue;
        }
        // refresh the row list of this column and pick the shortest unit row
        let list = std::mem::take(&mut col_rows[c]);
        epoch += 1;
        let mut live: Vec<u32> = Vec::with_capacity(cnt);
        let mut best: Option<(usize, usize)> = None;
        for &r in &list {
            let r = r as usize;
            if let Some(row) = &rows[r] {
                if let Some(v) = lookup(row, c) {
                    if stamp[r] == epoch {
                        continue;
                    }
                    stamp[r] = epoch;
                    live.push(r as u32);
                    if ring.is_unit(v) && best.is_none_or(|(_, len)| row.len() < len) {
                        best = Some((r, row.len()));
                    }
                }
            }
        }
        col_rows[c] = live;
        let Some((pr, _)) = best else {
            stuck[c] = col_count[c];
            continue 'outer;
        };
        let prow = rows[pr].take().expect("pivot row is alive");
        let u = lookup(&prow, c).expect("pivot entry").clone();
        let targets: Vec<u32> = col_rows[c].iter().copied().filter(|&r| r as usize != pr).collect();
        for r in targets {
            let r = r as usize;
            let Some(row) = rows[r].take() else { continue };
            let a = lookup(&row, c).expect("column list is exact after refresh").clone();
            let q = ring.elim_factor(&a, &u)?;
            let new = row_axpy(ring, &row, &q, &prow)?;
            // diff column supports
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < new.len() {
                let ca = row.get(i).map_or(usize::MAX, |e| e.0);
                let cb = new.get(j).map_or(usize::MAX, |e| e.0);
                if ca == cb {
                    i += 1;
                    j += 1;
                } else if ca < cb {
                    col_count[ca] -= 1;
                    active_nnz -= 1;
                    if col_count[ca] == 0 {
                        active_cols -= 1;
                    } else {
                        heap.push(Reverse((col_count[ca], ca)));
                    }
                    i += 1;
                } else {
                    if col_count[cb] == 0 {
                        active_cols += 1;
                    }
                    col_count[cb] += 1;
                    active_nnz += 1;
                    col_rows[cb].push(r as u32);
                    heap.push(Reverse((col_count[cb], cb)));
                    j += 1;
                }
            }
            if new.is_empty() {
                active_rows -= 1;
            } else {
                rows[r] = Some(new);
            }
        }
        // retire pivot row and column
        for (cc, _) in &prow {
            col_count[*cc] -= 1;
            active_nnz -= 1;
            if col_count[*cc] == 0 {
                active_cols -= 1;
            } else if *cc != c {
                heap.push(Reverse((col_count[*cc], *cc)));
            }
        }
        active_rows -= 1;
        col_dead[c] = true;
        col_rows[c].clear();
        pivots += 1;
    }

    // collect the core
    let mut remap = vec![usize::MAX; ncols];
    let mut core_cols = 0;
    for c in 0..ncols {
        if !col_dead[c] && col_count[c] > 0 {
            remap[c] = core_cols;
            core_cols += 1;
        }
    }
    let core: Vec<Row<R::E>> = rows
        .into_iter()
        .flatten()
        .map(|row| row.into_iter().map(|(c, v)| (remap[c], v)).collect())
        .collect();
    Ok(ElimOutcome { pivots, core, core_cols, hit_target })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_i64(m: &[Vec<i64>]) -> Vec<Row<i64>> {
        m.iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c, *v)).collect())
            .collect()
    }

    #[test]
    fn unit_pivots_leave_nonunit_core() {
        // [[1,1],[1,3]] -> pivot 1, core [[2]]
        let out = eliminate_units(&Integers::<i64>::new(), rows_i64(&[vec![1, 1], vec![1, 3]]), 2, ElimLimits::default()).unwrap();
        assert_eq!(out.pivots, 1);
        assert_eq!(out.core, vec![vec![(0, 2)]]);
        assert_eq!(out.core_cols, 1);
    }

    #[test]
    fn field_eliminates_everything() {
        let f = Residues::field(5);
        let rows: Vec<Row<u64>> = vec![vec![(0, 2), (1, 4)], vec![(0, 1), (1, 2)], vec![(1, 3)]];
        let out = eliminate_units(&f, rows, 2, ElimLimits::default()).unwrap();
        assert_eq!(out.pivots, 2);
        assert!(out.core.is_empty());
    }

    #[test]
    fn pivot_target_stops_early() {
        let f = Residues::field(7);
        let rows: Vec<Row<u64>> = (0..5).map(|i| vec![(i, 1)]).collect();
        let limits = ElimLimits { pivot_target: Some(3), ..Default::default() };
        let out = eliminate_units(&f, rows, 5, limits).unwrap();
        assert!(out.hit_target);
        assert_eq!(out.pivots, 3);
    }

    #[test]
    fn residue_inverse() {
        let r = Residues::prime_power(3, 27);
        assert_eq!(r.mul(r.inv(5), 5), 1);
        assert!(!r.is_unit(&9));
        assert!(r.is_unit(&10));
    }
}
