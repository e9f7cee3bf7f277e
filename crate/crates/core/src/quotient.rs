//! Finite quotients of the deck group `Γ = Z^3` (generators `t1, t2, t3`,
//! with `t0 = (t1 t2 t3)^-1`) and their combinatorial invariants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::group::{big_list, FiniteAbelianGroup};
use crate::linalg::lattice::Lattice;
use crate::linalg::matrix::determinant;
use crate::linalg::snf::snf;

/// One failed condition on a Delsarte exponent matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum ConditionViolation {
    NegativeEntry { row: usize, col: usize, value: i64 },
    ColumnWithoutZero { col: usize },
    UnequalRowSums { row: usize, sum: i64, expected: i64 },
    Singular,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeEntry { row, col, value } => write!(f, "entry ({row},{col}) = {value} is negative"),
            Self::ColumnWithoutZero { col } => write!(f, "column {col} has no zero entry"),
            Self::UnequalRowSums { row, sum, expected } => {
                write!(f, "row {row} sums to {sum}, row 0 sums to {expected}")
            }
            Self::Singular => write!(f, "the matrix is singular"),
        }
    }
}

/// A 4x4 Delsarte exponent matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMatrix {
    pub a: [[i64; 4]; 4],
}

impl ExponentMatrix {
    pub fn new(a: [[i64; 4]; 4]) -> Self {
        Self { a }
    }

    /// `m` times the identity: the Fermat surface of degree `m`.
    pub fn fermat(m: i64) -> Self {
        let mut a = [[0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = m;
        }
        Self { a }
    }

    pub fn determinant(&self) -> BigInt {
        let rows: Vec<Vec<BigInt>> = self.a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        determinant(&rows)
    }

    /// Common row sum, if the rows agree.
    pub fn degree(&self) -> Option<i64> {
        let s: Vec<i64> = self.a.iter().map(|r| r.iter().sum()).collect();
        s.iter().all(|&x| x == s[0]).then_some(s[0])
    }

    /// Every violated condition, in a fixed order.
    pub fn violations(&self) -> Vec<ConditionViolation> {
        let mut out = Vec::new();
        for (i, row) in self.a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    out.push(ConditionViolation::NegativeEntry { row: i, col: j, value: v });
                }
            }
        }
        for j in 0..4 {
            if self.a.iter().all(|r| r[j] != 0) {
                out.push(ConditionViolation::ColumnWithoutZero { col: j });
            }
        }
        let expected: i64 = self.a[0].iter().sum();
        for (i, row) in self.a.iter().enumerate().skip(1) {
            let sum: i64 = row.iter().sum();
            if sum != expected {
                out.push(ConditionViolation::UnequalRowSums { row: i, sum, expected });
            }
        }
        if self.determinant().is_zero() {
            out.push(ConditionViolation::Singular);
        }
        out
    }
}

/// `α: Γ ↠ G`, stored as the kernel lattice in coordinates `t1, t2, t3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteQuotient {
    kernel: Lattice,
}

/// Result of reading an exponent matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub quotient: FiniteQuotient,
    pub degree: i64,
    pub det: BigInt,
    /// whether `|G| * degree = |det A|`
    pub order_identity: bool,
}

impl FiniteQuotient {
    pub fn new(kernel: Lattice) -> Result<Self> {
        if kernel.ambient_rank() != 3 {
            return Err(Error::Dimension(format!("kernel lattice lives in Z^{}, expected Z^3", kernel.ambient_rank())));
        }
        if !kernel.is_full_rank() {
            return Err(Error::DegenerateCovering);
        }
        Ok(Self { kernel })
    }

    /// Kernel generated by the given columns.
    pub fn from_columns(cols: &[[i64; 3]]) -> Result<Self> {
        let cols: Vec<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
        Self::new(Lattice::from_i64_columns(3, &cols)?)
    }

    /// `Γ / (n1 e1, n2 e2, n3 e3)`
    pub fn diagonal(n1: i64, n2: i64, n3: i64) -> Result<Self> {
        Self::from_columns(&[[n1, 0, 0], [0, n2, 0], [0, 0, n3]])
    }

    /// `Γ / mΓ`
    pub fn fermat(m: i64) -> Result<Self> {
        Self::diagonal(m, m, m)
    }

    /// Reduction on the affine chart `z0 = 1`: the kernel is spanned by
    /// `(a_i1 - a_01, a_i2 - a_02, a_i3 - a_03)` for `i = 1, 2, 3`.
    pub fn from_exponent_matrix(a: &ExponentMatrix) -> Result<Ingested> {
        let violations = a.violations();
        if !violations.is_empty() {
            return Err(Error::ExponentMatrix(violations));
        }
        let rows: Vec<[i64; 3]> = (1..4).map(|i| [1, 2, 3].map(|j| a.a[i][j] - a.a[0][j])).collect();
        let quotient = Self::from_columns(&rows)?;
        let degree = a.degree().expect("validated");
        let det = a.determinant();
        let order_identity = quotient.order() * BigInt::from(degree) == det.abs();
        Ok(Ingested { quotient, degree, det, order_identity })
    }

    pub fn kernel(&self) -> &Lattice {
        &self.kernel
    }

    /// `|G| = |det Ker α|`
    pub fn order(&self) -> BigInt {
        self.kernel.index().expect("full rank")
    }

    pub fn group(&self) -> FiniteAbelianGroup {
        self.kernel.cokernel()
    }

    /// Whether `α(t0) = 1`.
    pub fn unramified_at_infinity(&self) -> bool {
        self.kernel.contains_vector(&[BigInt::one(), BigInt::one(), BigInt::one()])
    }

    /// Whether the kernel is `mΓ` for some `m`.
    pub fn fermat_degree(&self) -> Option<i64> {
        let n = self.kernel.max_scale().to_i64()?;
        (n > 0 && self.kernel == Lattice::scaled_full(3, n)).then_some(n)
    }

    /// Explicit map to `Z/n_1 ⊕ ... ⊕ Z/n_s` (the invariant factors of `G`).
    pub fn group_map(&self) -> GroupMap {
        // rows of B^T generate the kernel; U B^T V = D, so x -> x V mod D
        let rel = self.kernel.basis().transpose();
        let s = snf(&rel, true);
        let (_, v) = s.transforms.expect("requested");
        let v = v.to_dense();
        let mut moduli = Vec::new();
        let mut keep = Vec::new();
        for (j, d) in s.invariant_factors.iter().enumerate() {
            if !d.is_one() {
                moduli.push(d.to_u64().expect("group order fits in u64"));
                keep.push(j);
            }
        }
        let images = [0, 1, 2].map(|i| {
            keep.iter()
                .zip(&moduli)
                .map(|(&j, &n)| v[i][j].mod_floor(&BigInt::from(n)).to_u64().expect("reduced"))
                .collect()
        });
        GroupMap { moduli, images }
    }

    /// `G / α(Γ_*)` has order `|Z^3 / (Γ_* + Ker α)|`.
    fn quotient_order(&self, gens: &[[i64; 3]]) -> BigInt {
        let cols: Vec<Vec<i64>> = gens.iter().map(|g| g.to_vec()).collect();
        let sub = Lattice::from_i64_columns(3, &cols).expect("Z^3");
        self.kernel.sum(&sub).expect("Z^3").index().expect("contains Ker α, so full rank")
    }

    pub fn invariants(&self) -> QuotientInvariants {
        let group = self.group();
        let order = group.order();
        let exponent = group.exponent();
        let n_max = self.kernel.max_scale();
        let height = &exponent / &n_max;
        let pair_orders: Vec<BigInt> = PAIRS.iter().map(|&(i, j)| self.quotient_order(&[basis(i), basis(j)])).collect();
        let single_orders: Vec<BigInt> = (1..4)
            .map(|i| {
                let (j, k) = match i {
                    1 => (2, 3),
                    2 => (1, 3),
                    _ => (1, 2),
                };
                self.quotient_order(&[add(basis(i), basis(j)), add(basis(i), basis(k))])
            })
            .collect();
        let g_eq_order = self.quotient_order(&[[1, 1, 0], [1, 0, 1], [0, 1, 1]]);
        let delta = if g_eq_order.is_one() { 0 } else { 1 };
        let rank_k: BigInt = pair_orders.iter().sum::<BigInt>() + single_orders.iter().sum::<BigInt>() - 3 - delta;
        let exp_t_divisor = exponent.pow(3) / &order;
        QuotientInvariants {
            order,
            exponent,
            n_max,
            height,
            pair_orders,
            single_orders,
            g_eq_order,
            delta,
            rank_k: rank_k.to_u64().expect("rank fits"),
            pi1: self.pi1(),
            exp_t_divisor,
            length_t_bound: 6 + delta,
            group,
        }
    }

    /// `Ker α / Σ_{i<j} (Γ_ij ∩ Ker α)`
    pub fn pi1(&self) -> FiniteAbelianGroup {
        let mut sum = Lattice::from_generators(3, &[]).expect("empty");
        for &(i, j) in &PAIRS {
            let cols = vec![basis(i).to_vec(), basis(j).to_vec()];
            let gamma = Lattice::from_i64_columns(3, &cols).expect("Z^3");
            let cap = gamma.intersection(&self.kernel).expect("Z^3");
            sum = sum.sum(&cap).expect("Z^3");
        }
        Lattice::quotient(&self.kernel, &sum).expect("each intersection lies in the kernel")
    }
}

/// Pairs `0 <= i < j <= 3`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `e_i` in coordinates `t1, t2, t3`, with `e0 = -(e1 + e2 + e3)`.
pub fn basis(i: usize) -> [i64; 3] {
    match i {
        0 => [-1, -1, -1],
        1 => [1, 0, 0],
        2 => [0, 1, 0],
        3 => [0, 0, 1],
        _ => panic!("generator index {i} out of range"),
    }
}

fn add(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// `α` written out: `G = ⊕ Z/moduli[j]` and `α(e_i) = images[i-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    pub moduli: Vec<u64>,
    pub images: [Vec<u64>; 3],
}

impl GroupMap {
    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    /// Elements in lexicographic order of coordinates.
    pub fn index(&self, coords: &[u64]) -> usize {
        coords.iter().zip(&self.moduli).fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn element(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0; self.moduli.len()];
        for (c, &n) in out.iter_mut().zip(&self.moduli).rev() {
            *c = (index % n as usize) as u64;
            index /= n as usize;
        }
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), n)| (x + y) % n).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.moduli).map(|(x, n)| (n - x) % n).collect()
    }

    /// `α(t_i)` for `i = 0..=3`.
    pub fn image(&self, i: usize) -> Vec<u64> {
        match i {
            0 => {
                let s = self.add(&self.add(&self.images[0], &self.images[1]), &self.images[2]);
                self.neg(&s)
            }
            1..=3 => self.images[i - 1].clone(),
            _ => panic!("generator index {i} out of range"),
        }
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.moduli.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientInvariants {
    pub group: FiniteAbelianGroup,
    #[serde(with = "big_list::one")]
    pub order: BigInt,
    #[serde(with = "big_list::one")]
    pub exponent: BigInt,
    /// largest `n` with `Ker α ⊆ nΓ`
    #[serde(with = "big_list::one")]
    pub n_max: BigInt,
    #[serde(with = "big_list::one")]
    pub height: BigInt,
    /// `|G_ij|` for `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`
    #[serde(with = "big_list")]
    pub pair_orders: Vec<BigInt>,
    /// `|G_i|` for `i = 1, 2, 3`
    #[serde(with = "big_list")]
    pub single_orders: Vec<BigInt>,
    #[serde(with = "big_list::one")]
    pub g_eq_order: BigInt,
    pub delta: u8,
    pub rank_k: u64,
    pub pi1: FiniteAbelianGroup,
    #[serde(with = "big_list::one")]
    pub exp_t_divisor: BigInt,
    pub length_t_bound: u8,
}

impl QuotientInvariants {
    pub fn order_usize(&self) -> usize {
        self.order.to_usize().expect("group order fits")
    }
}

/// Canonical kernel basis, one column per entry.
pub fn kernel_matrix(q: &FiniteQuotient) -> Vec<Vec<i64>> {
    let cols = q.kernel.basis_columns();
    cols.iter().map(|c| c.iter().map(|v| v.to_i64().expect("small")).collect()).collect()
}
