//! Subspaces of Fermat varieties as ideals of the group ring `Z[G_m]`.

pub mod partition;
pub mod presentation;
pub mod ring;
pub mod torsion;

pub use partition::{enumerate_partitions, partition_count, Partition};
pub use presentation::{compact_psi_rows, decomposable_count, module_presentation, tau_psi_rho, PartitionPolynomials, Variant};
pub use ring::{phi, phi_at, rho_at, rho_poly, FermatRing, LaurentElement};
pub use torsion::{lines_span_rank, subspace_count, torsion_tk, verify_stabilization, Mode, StabilizationReport, TkOptions, EXACT_BASIS_LIMIT};
