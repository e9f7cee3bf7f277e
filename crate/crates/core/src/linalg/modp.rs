//! Rank over prime fields.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::elim::{eliminate_units, ElimLimits, ElimRing, Residues, Row};
use crate::linalg::matrix::SparseMatrix;
use crate::scalar::Int;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let r = Residues::field(n);
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = r.mul(acc, b);
            }
            b = r.mul(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = r.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A random prime in `[2^61, 2^62)`.
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Row echelon accumulator over `F_p` with dense pivot rows.
///
/// Incoming rows are reduced against the stored pivots in insertion order;
/// every stored pivot row is zero in the pivot columns of earlier pivots and
/// normalised to 1 at its own pivot, so one pass suffices.
pub struct DenseEchelon {
    field: Residues,
    cols: usize,
    pivots: Vec<(usize, Vec<u32>)>,
    acc: Vec<u64>,
    /// additions of `(p-1)^2` the u64 accumulator absorbs before reduction
    headroom: u64,
}

impl DenseEchelon {
    pub fn new(p: u64, cols: usize) -> Self {
        assert!(p < 1 << 32, "dense echelon stores residues in 32 bits");
        let sq = (p - 1) * (p - 1);
        let headroom = if sq == 0 { u64::MAX } else { (u64::MAX - p) / sq };
        Self { field: Residues::field(p), cols, pivots: Vec::new(), acc: vec![0; cols], headroom: headroom.max(1) }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces a sparse row; stores it as a new pivot when it is independent.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, row: &[(usize, u64)]) -> bool {
        let p = self.field.modulus;
        if row.is_empty() {
            return false;
        }
        let acc = &mut self.acc;
        acc.iter_mut().for_each(|x| *x = 0);
        for &(c, v) in row {
            acc[c] = v % p;
        }
        let mut budget = self.headroom;
        for (pc, prow) in &self.pivots {
            let c = acc[*pc] % p;
            if c == 0 {
                continue;
            }
            if budget == 0 {
                acc.iter_mut().for_each(|x| *x %= p);
                budget = self.headroom;
            }
            budget -= 1;
            let f = p - c;
            for (a, &b) in acc[*pc..].iter_mut().zip(&prow[*pc..]) {
                *a = a.wrapping_add(f.wrapping_mul(b as u64));
            }
        }
        let Some(first) = acc.iter().position(|x| *x % p != 0) else {
            return false;
        };
        let inv = self.field.inv(acc[first] % p);
        let mut stored = vec![0u32; self.cols];
        for j in first..self.cols {
            let v = acc[j] % p;
            if v != 0 {
                stored[j] = self.field.mul(v, inv) as u32;
            }
        }
        self.pivots.push((first, stored));
        true
    }
}

/// Same contract as [`DenseEchelon`] for primes too large for the lazy path.
pub struct WideEchelon {
    field: Residues,
    pivots: Vec<(usize, Vec<u64>)>,
    cols: usize,
}

impl WideEchelon {
    pub fn new(p: u64, cols: usize) -> Self {
        Self { field: Residues::field(p), pivots: Vec::new(), cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn insert(&mut self, row: &[(usize, u64)]) -> bool {
        let mut acc = vec![0u64; self.cols];
        for &(c, v) in row {
            acc[c] = v;
        }
        for (pc, prow) in &self.pivots {
            let c = acc[*pc];
            if c == 0 {
                continue;
            }
            let f = self.field.neg(c);
            for j in *pc..self.cols {
                if prow[j] != 0 {
                    acc[j] = self.field.add(acc[j], self.field.mul(f, prow[j]));
                }
            }
        }
        let Some(first) = acc.iter().position(|x| *x != 0) else {
            return false;
        };
        let inv = self.field.inv(acc[first]);
        for x in acc.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.pivots.push((first, acc));
        true
    }
}

/// Rank of a set of sparse rows over `F_p`, `p` prime.
///
/// `target` is an a-priori upper bound on the rank; elimination stops as soon
/// as it is reached. The sparse engine runs until fill-in makes the active
/// part dense, then the remaining rows stream through a dense echelon.
pub fn rank_rows_mod_p(rows: Vec<Row<u64>>, ncols: usize, p: u64, target: Option<usize>) -> usize {
    let field = Residues::field(p);
    let limits = ElimLimits { pivot_target: target, ..Default::default() };
    let out = eliminate_units(&field, rows, ncols, limits).expect("residue arithmetic is total");
    let mut rank = out.pivots;
    if out.hit_target || out.core.is_empty() {
        return rank;
    }
    let remaining = target.map(|t| t - rank);
    if p < 1 << 32 {
        let mut ech = DenseEchelon::new(p, out.core_cols);
        for row in &out.core {
            if remaining.is_some_and(|t| ech.rank() >= t) {
                break;
            }
            ech.insert(row);
        }
        rank += ech.rank();
    } else {
        let mut ech = WideEchelon::new(p, out.core_cols);
        for row in &out.core {
            if remaining.is_some_and(|t| ech.pivots.len() >= t) {
                break;
            }
            ech.insert(row);
        }
        rank += ech.pivots.len();
    }
    rank
}

pub fn reduce_rows<T: Int>(m: &SparseMatrix<T>, field: &Residues) -> Vec<Row<u64>> {
    m.row_data()
        .iter()
        .map(|row| row.iter().map(|(c, v)| (*c, field.from_int(v))).filter(|(_, v)| !field.is_zero(v)).collect())
        .collect()
}

/// Rank of `m` over the field with `p` elements.
pub fn rank_mod_p<T: Int>(m: &SparseMatrix<T>, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let field = Residues::field(p);
    Ok(rank_rows_mod_p(reduce_rows(m, &field), m.cols(), p, Some(m.rows().min(m.cols()))))
}
