//! Rank over the rationals and cokernels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::elim::{Residues, Row};
use crate::linalg::group::FiniteAbelianGroup;
use crate::linalg::matrix::SparseMatrix;
use crate::linalg::modp::{random_prime, rank_rows_mod_p, reduce_rows};
use crate::linalg::snf::snf;
use crate::scalar::Int;

/// Column count above which [`rank_checked`] switches to Monte-Carlo ranks.
pub const EXACT_RANK_COLUMNS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOutcome {
    pub rank: usize,
    pub certified: bool,
    /// primes used by the Monte-Carlo path
    pub primes: Vec<u64>,
}

/// Rank over Q by exact integer elimination.
pub fn rank_exact<T: Int>(m: &SparseMatrix<T>) -> usize {
    snf(m, false).rank
}

/// Maximum of the ranks modulo `trials` random primes in `[2^61, 2^62)`.
/// Never exceeds the rank over Q, and equals it unless every chosen prime
/// divides a nonzero maximal minor.
pub fn monte_carlo_rank(rows: &[Row<i64>], ncols: usize, trials: usize, seed: u64) -> RankOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = rows.len().min(ncols);
    let mut best = 0;
    let mut primes = Vec::with_capacity(trials);
    for _ in 0..trials {
        let p = random_prime(&mut rng);
        primes.push(p);
        let field = Residues::field(p);
        let reduced: Vec<Row<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|(c, v)| (*c, field.from_i64(*v))).filter(|(_, v)| *v != 0).collect())
            .collect();
        best = best.max(rank_rows_mod_p(reduced, ncols, p, Some(bound)));
        if best == bound {
            break;
        }
    }
    RankOutcome { rank: best, certified: false, primes }
}

/// Exact rank up to `threshold` columns, Monte-Carlo above it.
pub fn rank_checked<T: Int>(m: &SparseMatrix<T>, threshold: usize, seed: u64) -> RankOutcome {
    if m.cols() <= threshold {
        return RankOutcome { rank: rank_exact(m), certified: true, primes: Vec::new() };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = m.rows().min(m.cols());
    let mut best = 0;
    let mut primes = Vec::new();
    for _ in 0..3 {
        let p = random_prime(&mut rng);
        primes.push(p);
        let field = Residues::field(p);
        best = best.max(rank_rows_mod_p(reduce_rows(m, &field), m.cols(), p, Some(bound)));
    }
    RankOutcome { rank: best, certified: false, primes }
}

/// `Z^cols / rowspan(m)` as free rank plus torsion.
pub fn cokernel<T: Int>(m: &SparseMatrix<T>) -> (usize, FiniteAbelianGroup) {
    let s = snf(m, false);
    let torsion = FiniteAbelianGroup::from_orders(&s.torsion(), 0);
    (m.cols() - s.rank, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::modp::rank_mod_p;
    use crate::WordMatrix;
    use num_bigint::BigInt;
    use rand::Rng;

    #[test]
    fn small_ranks() {
        assert_eq!(rank_exact(&WordMatrix::from_i64_rows(&[vec![2, 4], vec![1, 2]])), 1);
        assert_eq!(rank_exact(&WordMatrix::from_i64_rows(&[vec![4, 0], vec![0, 6]])), 2);
        assert_eq!(rank_exact(&WordMatrix::zeros(0, 5)), 0);
        assert_eq!(rank_exact(&WordMatrix::zeros(5, 0)), 0);
    }

    #[test]
    fn product_of_thin_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a: Vec<Vec<i64>> = (0..10).map(|_| (0..7).map(|_| rng.gen_range(-5..6)).collect()).collect();
            let b: Vec<Vec<i64>> = (0..7).map(|_| (0..10).map(|_| rng.gen_range(-5..6)).collect()).collect();
            let a = WordMatrix::from_i64_rows(&a);
            let b = WordMatrix::from_i64_rows(&b);
            let prod = a.checked_mul(&b).unwrap();
            // the factors have full rank 7 with overwhelming probability; check it
            assert_eq!(rank_exact(&a), 7);
            assert_eq!(rank_exact(&b), 7);
            assert_eq!(rank_exact(&prod), 7);
        }
    }

    #[test]
    fn cokernel_examples() {
        let (f, t) = cokernel(&WordMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!((f, t.invariant_factors), (0, vec![BigInt::from(6)]));
        let (f, t) = cokernel(&WordMatrix::from_i64_rows(&[vec![1, 1]]));
        assert_eq!((f, t.is_trivial()), (1, true));
        let (f, t) = cokernel(&WordMatrix::from_i64_rows(&[vec![2, 2], vec![0, 4]]));
        assert_eq!((f, t.invariant_factors), (0, vec![BigInt::from(2), BigInt::from(4)]));
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let m = WordMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let out = rank_checked(&m, 0, 9);
        assert!(!out.certified);
        assert_eq!(out.rank, 2);
        assert_eq!(out.primes.len(), 3);
        assert!(rank_mod_p(&m, 2).unwrap() <= rank_exact(&m));
        let mc = monte_carlo_rank(&m.clone().into_rows(), 3, 3, 1);
        assert_eq!(mc.rank, 2);
    }
}
