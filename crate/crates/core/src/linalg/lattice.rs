//! Sublattices of `Z^r`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::group::FiniteAbelianGroup;
use crate::linalg::hnf::hnf;
use crate::linalg::rank::cokernel;
use crate::IntMatrix;

/// A sublattice of `Z^r`, stored by a canonical basis: the columns of
/// `basis` are the transposed nonzero rows of the Hermite form of the
/// generators, hence linearly independent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// The lattice generated by the given column vectors.
    pub fn from_generators(ambient_rank: usize, gens: &[Vec<BigInt>]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.len() != ambient_rank) {
            return Err(Error::Dimension(format!("generator of length {} in Z^{ambient_rank}", g.len())));
        }
        let rows = IntMatrix::from_dense(gens);
        let rows = if gens.is_empty() { IntMatrix::zeros(0, ambient_rank) } else { rows };
        let h = hnf(&rows);
        let basis_rows: Vec<Vec<(usize, BigInt)>> = (0..h.rank()).map(|i| h.form.row(i).to_vec()).collect();
        let t = IntMatrix::from_rows(ambient_rank, basis_rows).expect("HNF rows fit").transpose();
        Ok(Self { ambient_rank, basis: t })
    }

    pub fn from_i64_columns(ambient_rank: usize, cols: &[Vec<i64>]) -> Result<Self> {
        let gens: Vec<Vec<BigInt>> = cols.iter().map(|c| c.iter().map(|&v| BigInt::from(v)).collect()).collect();
        Self::from_generators(ambient_rank, &gens)
    }

    /// Columns of `m` generate the lattice.
    pub fn from_column_matrix(m: &IntMatrix) -> Result<Self> {
        let t = m.transpose();
        let gens: Vec<Vec<BigInt>> = t.to_dense();
        Self::from_generators(m.rows(), &gens)
    }

    pub fn full(r: usize) -> Self {
        Self { ambient_rank: r, basis: IntMatrix::identity(r) }
    }

    /// `n * Z^r`
    pub fn scaled_full(r: usize, n: i64) -> Self {
        let cols: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| if i == j { n } else { 0 }).collect()).collect();
        Self::from_i64_columns(r, &cols).expect("square")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_rank
    }

    pub fn basis_columns(&self) -> Vec<Vec<BigInt>> {
        self.basis.transpose().to_dense()
    }

    /// Index `[Z^r : L]` for a full-rank lattice.
    pub fn index(&self) -> Option<BigInt> {
        if !self.is_full_rank() {
            return None;
        }
        Some(crate::linalg::matrix::determinant(&self.basis.to_dense()).abs())
    }

    /// `Z^r / L`
    pub fn cokernel(&self) -> FiniteAbelianGroup {
        let (free, torsion) = cokernel(&self.basis.transpose());
        FiniteAbelianGroup { invariant_factors: torsion.invariant_factors, free_rank: free }
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient_rank != other.ambient_rank {
            return Err(Error::Dimension(format!("lattices in Z^{} and Z^{}", self.ambient_rank, other.ambient_rank)));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut gens = self.basis_columns();
        gens.extend(other.basis_columns());
        Self::from_generators(self.ambient_rank, &gens)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let r = self.ambient_rank;
        let (a, b) = (self.basis_columns(), other.basis_columns());
        if a.is_empty() || b.is_empty() {
            return Self::from_generators(r, &[]);
        }
        // kernel of [A | -B]: rows of the HNF transform that kill A^T stacked over -B^T
        let mut stacked: Vec<Vec<BigInt>> = a.clone();
        stacked.extend(b.iter().map(|col| col.iter().map(|v| -v).collect()));
        let h = hnf(&IntMatrix::from_dense(&stacked));
        let mut gens = Vec::new();
        for i in h.rank()..stacked.len() {
            let coeffs = h.transform.row(i);
            let mut v = vec![BigInt::zero(); r];
            for (k, c) in coeffs {
                if *k < a.len() {
                    for (j, x) in a[*k].iter().enumerate() {
                        v[j] += c * x;
                    }
                }
            }
            gens.push(v);
        }
        Self::from_generators(r, &gens)
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        // basis^T is in row echelon form with positive pivots
        let rows = self.basis.transpose().to_dense();
        let mut rest: Vec<BigInt> = v.to_vec();
        let mut coords = Vec::with_capacity(rows.len());
        for row in &rows {
            let pc = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let (q, rem) = rest[pc].div_rem(&row[pc]);
            if !rem.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.basis_columns().iter().all(|c| self.contains_vector(c))
    }

    /// `big / small`, requiring `small ⊆ big`.
    pub fn quotient(big: &Self, small: &Self) -> Result<FiniteAbelianGroup> {
        big.check_ambient(small)?;
        let mut rel = Vec::new();
        for col in small.basis_columns() {
            rel.push(big.coordinates(&col).ok_or(Error::NotContained)?);
        }
        let k = big.rank();
        let m = if rel.is_empty() { IntMatrix::zeros(0, k) } else { IntMatrix::from_dense(&rel) };
        let (free, torsion) = cokernel(&m);
        Ok(FiniteAbelianGroup { invariant_factors: torsion.invariant_factors, free_rank: free })
    }

    /// Largest `n` with `L ⊆ n Z^r` (the gcd of all basis entries; 0 for the zero lattice).
    pub fn max_scale(&self) -> BigInt {
        let mut g = BigInt::zero();
        for row in self.basis.row_data() {
            for (_, v) in row {
                g = g.gcd(v);
            }
        }
        g
    }
}
