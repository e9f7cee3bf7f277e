//! Exact integer linear algebra.

pub mod elim;
pub mod group;
pub mod hnf;
pub mod lattice;
pub mod local;
pub mod matrix;
pub mod modp;
pub mod rank;
pub mod sketch;
pub mod snf;

pub use group::FiniteAbelianGroup;
pub use hnf::{hnf, HermiteForm};
pub use lattice::Lattice;
pub use matrix::SparseMatrix;
pub use modp::{is_prime, rank_mod_p};
pub use rank::{cokernel, rank_checked, rank_exact, RankOutcome};
pub use snf::{snf, SmithForm};
