//! Ranks and integral torsion of the subgroups of Néron–Severi lattices
//! spanned by linear subspaces of Fermat varieties and by the canonical
//! divisor of Delsarte surfaces.
//!
//! The linear algebra is generic over [`scalar::Int`]: `i64` is the fast
//! path, and every routine falls back to [`num_bigint::BigInt`] when a
//! machine-word operation overflows.

pub mod alexander;
pub mod census;
pub mod characters;
pub mod error;
pub mod fermat;
pub mod linalg;
pub mod quotient;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{FiniteAbelianGroup, Lattice, SmithForm, SparseMatrix};
pub use quotient::{ExponentMatrix, FiniteQuotient, QuotientInvariants};

/// Arbitrary-precision sparse matrix.
pub type IntMatrix = SparseMatrix<num_bigint::BigInt>;
/// Machine-word sparse matrix.
pub type WordMatrix = SparseMatrix<i64>;
