//! Sparse integer matrices in canonical row-major form.

use std::fmt;
use std::io::BufRead;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{convert, Checked, Int, Overflow};

pub type SparseRow<T> = Vec<(usize, T)>;

/// Sparse matrix over a scalar type `T`.
///
/// Each row is a list of `(column, value)` pairs sorted by column with no
/// stored zeros, so two matrices are equal iff their representations are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow<T>>,
}

impl<T: Int> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, T::one())]).collect();
        Self { rows: n, cols: n, data }
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let data = entries
            .iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { Vec::new() } else { vec![(i, v.clone())] })
            .collect();
        Self { rows: n, cols: n, data }
    }

    /// Builds a matrix from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut data: Vec<SparseRow<T>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            data[r].push((c, v));
        }
        for row in &mut data {
            *row = normalize_row(std::mem::take(row)).map_err(|_| Error::InvalidInput("entry overflow".into()))?;
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from canonical rows (sorted, zero-free). Rows are re-normalized.
    pub fn from_rows(cols: usize, rows: Vec<SparseRow<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n);
        for row in rows {
            if let Some(&(c, _)) = row.iter().find(|(c, _)| *c >= cols) {
                return Err(Error::Dimension(format!("column {c} outside width {cols}")));
            }
            data.push(normalize_row(row).map_err(|_| Error::InvalidInput("entry overflow".into()))?);
        }
        Ok(Self { rows: n, cols, data })
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect()
            })
            .collect();
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let conv: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&v| T::of(v)).collect()).collect();
        let mut m = Self::from_dense(&conv);
        if rows.is_empty() {
            m.cols = 0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, T)] {
        &self.data[r]
    }

    pub fn row_data(&self) -> &[SparseRow<T>] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<SparseRow<T>> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        match self.data[r].binary_search_by_key(&c, |(col, _)| *col) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseRow<T>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Checked<Self> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut acc: Vec<(usize, T)> = Vec::new();
            for (k, a) in row {
                for (c, b) in &rhs.data[*k] {
                    acc.push((*c, a.c_mul(b)?));
                }
            }
            data.push(normalize_row(acc)?);
        }
        Ok(Self { rows: self.rows, cols: rhs.cols, data })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack widths {} and {}", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack heights {} and {}", self.rows, other.rows)));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut row = a.clone();
                row.extend(b.iter().map(|(c, v)| (c + self.cols, v.clone())));
                row
            })
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols + other.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn is_diagonal(&self) -> bool {
        self.data.iter().enumerate().all(|(r, row)| row.iter().all(|(c, _)| *c == r))
    }

    pub fn convert<S: Int>(&self) -> Option<SparseMatrix<S>> {
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut out = Vec::with_capacity(row.len());
            for (c, v) in row {
                out.push((*c, convert::<T, S>(v)?));
            }
            data.push(out);
        }
        Some(SparseMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Writes the line-based triple format: a header `rows cols nnz`, then
    /// one `row col value` line per stored entry.
    pub fn write_triples<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                writeln!(w, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }

    pub fn to_triples_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_triples(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("triple format is ASCII")
    }

    pub fn read_triples<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            Ok(s) => Some(Ok((i + 1, s))),
            Err(e) => Some(Err(Error::Parse { line: i + 1, msg: e.to_string() })),
        });
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })??;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: hline, msg: e.to_string() })?;
        let [rows, cols, nnz] = h[..] else {
            return Err(Error::Parse { line: hline, msg: "header must be `rows cols nnz`".into() });
        };
        let mut triplets = Vec::with_capacity(nnz);
        for item in lines {
            let (ln, line) = item?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: ln, msg: "expected `row col value`".into() });
            }
            let bad = |m: String| Error::Parse { line: ln, msg: m };
            let r = parts[0].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let c = parts[1].parse::<usize>().map_err(|e| bad(e.to_string()))?;
            let v: BigInt = parts[2].parse().map_err(|e: num_bigint::ParseBigIntError| bad(e.to_string()))?;
            let v = T::from_bigint(&v).ok_or_else(|| bad("value out of range".into()))?;
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(Error::Parse { line: 1, msg: format!("header announces {nnz} entries, found {}", triplets.len()) });
        }
        Self::from_triplets(rows, cols, triplets)
    }
}

/// Sorts by column, merges duplicates and drops zeros.
pub fn normalize_row<T: Int>(mut row: SparseRow<T>) -> Checked<SparseRow<T>> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: SparseRow<T> = Vec::with_capacity(row.len());
    for (c, v) in row {
        if let Some((lc, lv)) = out.last_mut() {
            if *lc == c {
                *lv = lv.c_add(&v)?;
                continue;
            }
        }
        out.push((c, v));
    }
    out.retain(|(_, v)| !v.is_zero());
    Ok(out)
}

/// `a - q * b` for sparse rows.
pub fn row_sub_mul<T: Int>(a: &[(usize, T)], q: &T, b: &[(usize, T)]) -> Checked<SparseRow<T>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, T::zero().c_sub_mul(q, &b[j].1)?));
            j += 1;
        } else {
            let v = a[i].1.c_sub_mul(q, &b[j].1)?;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

impl<T: Int> fmt::Debug for SparseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix {}x{} ", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            f.debug_list().entries(self.to_dense().iter()).finish()
        } else {
            write!(f, "(nnz {})", self.nnz())
        }
    }
}

/// Determinant of a small dense matrix by fraction-free elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

impl From<Overflow> for Error {
    fn from(_: Overflow) -> Self {
        Error::InvalidInput("machine-word overflow escaped the promotion path".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SparseMatrix<i64>;

    #[test]
    fn canonical_form_drops_zeros_and_merges() {
        let m = M::from_triplets(2, 3, vec![(0, 2, 1), (0, 0, 4), (0, 2, -1), (1, 1, 0)]).unwrap();
        assert_eq!(m.row(0), &[(0, 4)]);
        assert!(m.row(1).is_empty());
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn out_of_range_entry_rejected() {
        assert!(M::from_triplets(1, 1, vec![(0, 1, 1)]).is_err());
    }

    #[test]
    fn degenerate_shapes() {
        let a = M::zeros(0, 4);
        let b = M::zeros(4, 0);
        assert_eq!(a.checked_mul(&M::zeros(4, 2)).unwrap().rows(), 0);
        assert_eq!(b.transpose().rows(), 0);
        assert_eq!(b.transpose().cols(), 4);
    }

    #[test]
    fn triple_format_round_trip() {
        let m = M::from_i64_rows(&[vec![0, -3, 0], vec![7, 0, 12]]);
        let s = m.to_triples_string();
        assert!(s.starts_with("2 3 3\n"));
        let back = M::read_triples(s.as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn triple_format_rejects_bad_count() {
        assert!(M::read_triples("1 1 2\n0 0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn product_and_transpose() {
        let a = M::from_i64_rows(&[vec![1, 2], vec![3, 4]]);
        let b = M::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.checked_mul(&b).unwrap().to_dense(), vec![vec![2, 1], vec![4, 3]]);
        assert_eq!(a.transpose().get(0, 1), 3);
    }

    #[test]
    fn determinant_small() {
        let d = |rows: &[Vec<i64>]| {
            let b: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            determinant(&b)
        };
        assert_eq!(d(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]), BigInt::from(-2));
        assert_eq!(d(&[vec![2, 4], vec![1, 2]]), BigInt::from(0));
        assert_eq!(d(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
    }
}
