//! Seeded random quotients and the per-case census pipeline.
//!
//! Case `i` draws from its own ChaCha stream `(seed, i)`, so the records do
//! not depend on how cases are spread over worker threads; output order is
//! the case index.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alexander::{brieskorn, torsion_t, verify_bounds, BoundsReport, BrieskornReport, TorsionOptions};
use crate::error::Error;
use crate::linalg::group::big_list;
use crate::linalg::hnf::hnf;
use crate::quotient::{kernel_matrix, FiniteQuotient, QuotientInvariants};
use crate::report::TorsionReport;
use crate::WordMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// kernel basis with entries uniform in `[-b, b]`
    General,
    /// kernel of `x ↦ a·x mod n`
    Cyclic,
    /// `(1,1,1)` in the kernel
    Unramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub count: usize,
    pub bound: i64,
    pub max_order: u64,
    pub seed: u64,
    pub family: Family,
    pub torsion: TorsionOptions,
}

fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn order_ok(q: &FiniteQuotient, max_order: u64) -> bool {
    q.order().to_u64().is_some_and(|n| n <= max_order)
}

/// Kernel basis with entries uniform in `[-b, b]`, rejected while singular or
/// of index above `max_order`.
pub fn random_general<R: Rng>(rng: &mut R, bound: i64, max_order: u64) -> FiniteQuotient {
    loop {
        let cols: Vec<[i64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.gen_range(-bound..=bound))).collect();
        if let Ok(q) = FiniteQuotient::from_columns(&cols) {
            if order_ok(&q, max_order) {
                return q;
            }
        }
    }
}

/// Kernel of a surjection `Z^3 → Z/n`, `x ↦ a·x`, with `1 <= n <= max_order`.
pub fn random_cyclic<R: Rng>(rng: &mut R, max_order: u64) -> FiniteQuotient {
    let n = rng.gen_range(1..=max_order as i64);
    let a = loop {
        let a = [0; 3].map(|_| rng.gen_range(0..n));
        if a.iter().fold(n, |g, x| g.gcd(x)) == 1 {
            break a;
        }
    };
    cyclic_kernel(a, n)
}

/// `{x ∈ Z^3 : a·x ≡ 0 mod n}`
pub fn cyclic_kernel(a: [i64; 3], n: i64) -> FiniteQuotient {
    // integer kernel of the row (a1, a2, a3, n), projected to the first three coordinates
    let col = WordMatrix::from_i64_rows(&[vec![a[0]], vec![a[1]], vec![a[2]], vec![n]]);
    let h = hnf(&col);
    let gens: Vec<[i64; 3]> = (h.rank()..4)
        .map(|i| {
            let row = h.transform.row(i);
            let mut v = [0i64; 3];
            for (c, x) in row {
                if *c < 3 {
                    v[*c] = x.to_i64().expect("small");
                }
            }
            v
        })
        .collect();
    FiniteQuotient::from_columns(&gens).expect("index n sublattice")
}

/// Kernel containing `(1,1,1)`: two further columns with entries in `[-b, b]`.
pub fn random_unramified<R: Rng>(rng: &mut R, bound: i64, max_order: u64) -> FiniteQuotient {
    loop {
        let mut cols = vec![[1, 1, 1]];
        cols.extend((0..2).map(|_| [0; 3].map(|_| rng.gen_range(-bound..=bound))));
        if let Ok(q) = FiniteQuotient::from_columns(&cols) {
            if order_ok(&q, max_order) {
                return q;
            }
        }
    }
}

pub fn generate(config: &CensusConfig, index: usize) -> FiniteQuotient {
    let mut rng = case_rng(config.seed, index);
    match config.family {
        Family::General => random_general(&mut rng, config.bound, config.max_order),
        Family::Cyclic => random_cyclic(&mut rng, config.max_order),
        Family::Unramified => random_unramified(&mut rng, config.bound, config.max_order),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub index: usize,
    /// kernel basis, one entry per column
    pub kernel: Vec<Vec<i64>>,
    pub invariants: QuotientInvariants,
    pub torsion: Option<TorsionReport>,
    pub bounds: Option<BoundsReport>,
    /// set when the case could not be completed
    pub error: Option<String>,
    pub theory_violation: bool,
}

pub fn run_case(config: &CensusConfig, index: usize) -> CensusRecord {
    let q = generate(config, index);
    let invariants = q.invariants();
    let kernel = kernel_matrix(&q);
    match torsion_t(&q, config.torsion) {
        Ok(t) => {
            let t = t.without_timing();
            let bounds = verify_bounds(&q, &invariants, &t);
            CensusRecord {
                index,
                kernel,
                theory_violation: !bounds.passed,
                invariants,
                torsion: Some(t),
                bounds: Some(bounds),
                error: None,
            }
        }
        Err(e) => CensusRecord {
            index,
            kernel,
            invariants,
            torsion: None,
            bounds: None,
            theory_violation: matches!(e, Error::TheoryViolation(_)),
            error: Some(e.to_string()),
        },
    }
}

/// All cases, in index order.
pub fn run_census(config: &CensusConfig) -> Vec<CensusRecord> {
    (0..config.count).into_par_iter().map(|i| run_case(config, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub count: usize,
    pub nontrivial: usize,
    pub max_length: usize,
    #[serde(with = "big_list::one")]
    pub max_order: BigInt,
    pub violations: usize,
    pub errors: usize,
    /// cases with `ℓ(T) = 7`, the largest length the bounds allow
    pub length_seven: Vec<usize>,
}

pub fn summarize(records: &[CensusRecord]) -> CensusSummary {
    let mut s = CensusSummary {
        count: records.len(),
        nontrivial: 0,
        max_length: 0,
        max_order: BigInt::one(),
        violations: 0,
        errors: 0,
        length_seven: Vec::new(),
    };
    for r in records {
        s.violations += r.theory_violation as usize;
        s.errors += (r.error.is_some() && !r.theory_violation) as usize;
        if let Some(t) = &r.torsion {
            if !t.is_trivial() {
                s.nontrivial += 1;
            }
            s.max_length = s.max_length.max(t.length());
            if t.length() == 7 {
                s.length_seven.push(r.index);
            }
            let o = t.order();
            if o > s.max_order {
                s.max_order = o;
            }
        }
    }
    s
}

/// `count` triples with entries uniform in `1..=max_exponent`.
pub fn brieskorn_triples(count: usize, max_exponent: u64, seed: u64) -> Vec<[u64; 3]> {
    (0..count)
        .map(|i| {
            let mut rng = case_rng(seed, i);
            [0; 3].map(|_| rng.gen_range(1..=max_exponent))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrieskornRecord {
    pub index: usize,
    pub report: Option<BrieskornReport>,
    pub error: Option<String>,
}

pub fn run_brieskorn_census(count: usize, max_exponent: u64, seed: u64, opts: TorsionOptions) -> Vec<BrieskornRecord> {
    let triples = brieskorn_triples(count, max_exponent, seed);
    triples
        .into_par_iter()
        .enumerate()
        .map(|(index, m)| match brieskorn(m, opts) {
            Ok(mut r) => {
                r.torsion.timing = None;
                BrieskornRecord { index, report: Some(r), error: None }
            }
            Err(e) => BrieskornRecord { index, report: None, error: Some(e.to_string()) },
        })
        .collect()
}
