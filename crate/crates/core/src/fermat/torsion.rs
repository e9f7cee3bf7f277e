//! The torsion `t_K` of `H_d(F) / S_K`.

use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{fold_a, FermatParams, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::fermat::partition::Partition;
use crate::fermat::presentation::{compact_psi_rows, decomposable_count, module_presentation, Variant, DEFAULT_PRESENTATION_BUDGET};
use crate::fermat::ring::FermatRing;
use crate::linalg::elim::{Residues, Row};
use crate::linalg::group::FiniteAbelianGroup;
use crate::linalg::local::p_primary_part;
use crate::linalg::modp::{is_prime, prime_factors, rank_rows_mod_p};
use crate::linalg::sketch::sketched_rank;
use crate::linalg::snf;
use crate::report::{Method, TorsionReport};
use crate::WordMatrix;

/// Default largest ring rank `m^(d+1)` handled in certified mode.
pub const EXACT_BASIS_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Certified,
    Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TkOptions {
    pub mode: Mode,
    /// largest ring rank accepted in certified mode
    pub basis_limit: usize,
    pub presentation_budget: u128,
    pub enumeration_budget: u128,
    pub seed: u64,
}

impl Default for TkOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Certified,
            basis_limit: EXACT_BASIS_LIMIT,
            presentation_budget: DEFAULT_PRESENTATION_BUDGET,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            seed: 0,
        }
    }
}

fn reduce(rows: &[Row<i64>], p: u64) -> Vec<Row<u64>> {
    let f = Residues::field(p);
    rows.iter().map(|r| r.iter().map(|&(c, v)| (c, f.from_i64(v))).filter(|(_, v)| *v != 0).collect()).collect()
}

/// Rank over Q of the relations of a variant, from the character count,
/// where it is known.
fn expected_relation_rank(variant: Variant, ring: FermatRing, k: &[Partition], dec: u64) -> Option<u64> {
    let n = ring.rank() as u64;
    let kk = k.len() as u64;
    let m = ring.m as u64;
    let per_j = k.first().map_or(0, |j| j.k() as u32 + 1);
    match variant {
        Variant::Psi => Some(dec),
        Variant::RhoBar => None,
        Variant::M => Some(n * kk - (kk * m.pow(per_j) - dec)),
        Variant::MBar => Some(n * kk - (kk * m.saturating_sub(1).pow(per_j) - dec)),
    }
}

/// Integral torsion of one of the four modules describing `t_K`.
///
/// The `psi` variant is computed from generators of `Σ_J Λψ_J`: its rank
/// over Q is the number of decomposable characters, the rank is the same
/// modulo every prime not dividing `m`, and each prime `p | m` is settled by
/// comparing the rank modulo `p` with that count. Only a prime that fails
/// goes through a local Smith form. The other variants run a full Smith
/// form of their presentation.
///
/// Ranks modulo `p` are first taken on random column sketches, which can
/// only undercount; an exact elimination runs when no sketch reaches the
/// count. In evidence mode the ring-rank limit is lifted, a sketch that
/// falls short is reported as inconclusive, and the verdict is flagged as
/// not certified.
pub fn torsion_tk(ring: FermatRing, k: &[Partition], variant: Variant, opts: TkOptions) -> Result<TorsionReport> {
    let start = Instant::now();
    let dec = decomposable_count(ring, k, opts.enumeration_budget)?;
    let mut report = match variant {
        Variant::Psi => psi_torsion(ring, k, dec, opts)?,
        _ => {
            let a = module_presentation(variant, ring, k, opts.presentation_budget)?;
            presentation_torsion(&a, expected_relation_rank(variant, ring, k, dec))?
        }
    };
    if !report.torsion().primes_divide(&BigInt::from(ring.m)) {
        return Err(Error::TheoryViolation(format!("t_K = {} has torsion at a prime not dividing m = {}", report.torsion(), ring.m)));
    }
    report.timing = Some(start.elapsed());
    Ok(report)
}

fn presentation_torsion(a: &WordMatrix, expected: Option<u64>) -> Result<TorsionReport> {
    let s = snf(a, false);
    if let Some(expected) = expected.filter(|&e| e != s.rank as u64) {
        return Err(Error::TheoryViolation(format!("relation rank {} differs from the character count {expected}", s.rank)));
    }
    Ok(TorsionReport {
        invariant_factors: s.torsion(),
        free_rank: a.cols() - s.rank,
        certified: true,
        primes_checked: Vec::new(),
        method: Method::ExactSnf,
        relation_rank: s.rank,
        timing: None,
    })
}

/// Partitions ordered by a greedy cover of the decomposable characters, so
/// that the rank over Q grows as fast as possible; partitions adding no new
/// character come last.
fn cover_order(ring: FermatRing, k: &[Partition], budget: u128) -> Result<Vec<usize>> {
    let params = FermatParams::new(ring.m, ring.d)?;
    let lists: Vec<Vec<u32>> = fold_a(
        params,
        budget,
        Vec::new,
        |v: &mut Vec<Vec<u32>>, a| {
            let js: Vec<u32> = k.iter().enumerate().filter(|(_, j)| j.splits(a, ring.m)).map(|(i, _)| i as u32).collect();
            if !js.is_empty() {
                v.push(js);
            }
        },
        |mut x, y| {
            x.extend(y);
            x
        },
    )?;
    let mut per_j: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for (c, js) in lists.iter().enumerate() {
        for &j in js {
            per_j[j as usize].push(c);
        }
    }
    let mut gain: Vec<usize> = per_j.iter().map(Vec::len).collect();
    let mut covered = vec![false; lists.len()];
    let mut used = vec![false; k.len()];
    let mut order = Vec::with_capacity(k.len());
    while let Some(j) = (0..k.len()).filter(|&j| !used[j] && gain[j] > 0).max_by_key(|&j| (gain[j], std::cmp::Reverse(j))) {
        used[j] = true;
        order.push(j);
        for &c in &per_j[j] {
            if !covered[c] {
                covered[c] = true;
                for &j2 in &lists[c] {
                    gain[j2 as usize] -= 1;
                }
            }
        }
    }
    order.extend((0..k.len()).filter(|&j| !used[j]));
    Ok(order)
}

/// Sketch attempts per prime before falling back to a full elimination.
const SKETCH_ATTEMPTS: u64 = 3;
/// Extra sketch columns beyond the target rank.
const SKETCH_SLACK: usize = 16;

fn psi_torsion(ring: FermatRing, k: &[Partition], dec: u64, opts: TkOptions) -> Result<TorsionReport> {
    let n = ring.rank();
    let dec = dec as usize;
    if opts.mode == Mode::Certified && n > opts.basis_limit {
        return Err(Error::Budget { what: "certified ring rank (use evidence mode)", needed: n as u128, limit: opts.basis_limit as u128 });
    }
    let order = cover_order(ring, k, opts.enumeration_budget)?;
    let rows = || order.iter().flat_map(|&j| compact_psi_rows(ring, &k[j]));
    let reaches = |p: u64| {
        (0..SKETCH_ATTEMPTS).any(|a| sketched_rank(rows(), n, p, dec, dec + SKETCH_SLACK, opts.seed ^ (p << 8) ^ a) >= dec)
    };
    let exact_rank = |p: u64| rank_rows_mod_p(reduce(&rows().collect::<Vec<_>>(), p), n, p, Some(dec));
    let primes = prime_factors(ring.m as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    if opts.mode == Mode::Certified {
        // the character count must be met modulo a prime not dividing m
        let q = loop {
            let q = rng.gen_range(1u64 << 30..1 << 31) | 1;
            if is_prime(q) && !(ring.m as u64).is_multiple_of(q) {
                break q;
            }
        };
        if !reaches(q) {
            let r = exact_rank(q);
            if r != dec {
                return Err(Error::TheoryViolation(format!("rank {r} modulo {q} differs from the character count {dec}")));
            }
        }
    }
    let mut factors: Vec<BigInt> = Vec::new();
    let mut method = match opts.mode {
        Mode::Certified => Method::RankComparison,
        Mode::Evidence => Method::MonteCarlo,
    };
    for &p in &primes {
        if reaches(p) {
            continue;
        }
        if opts.mode == Mode::Evidence {
            return Err(Error::Budget { what: "evidence sketches below the rank over Q modulo a prime dividing m", needed: dec as u128, limit: p as u128 });
        }
        let r = exact_rank(p);
        if r > dec {
            return Err(Error::TheoryViolation(format!("rank {r} modulo {p} exceeds the rank {dec} over Q")));
        }
        if r == dec {
            continue;
        }
        method = Method::ExactSnf;
        let all: Vec<Row<i64>> = rows().collect();
        match p_primary_part(&all, n, p, dec) {
            Some(part) => factors.extend(part),
            None => {
                let s = snf(&WordMatrix::from_rows(n, all)?, false);
                let g = FiniteAbelianGroup::from_orders(&s.torsion(), 0);
                return Ok(TorsionReport {
                    invariant_factors: g.invariant_factors,
                    free_rank: n - s.rank,
                    certified: true,
                    primes_checked: primes,
                    method,
                    relation_rank: s.rank,
                    timing: None,
                });
            }
        }
    }
    let g = FiniteAbelianGroup::from_orders(&factors, 0);
    Ok(TorsionReport {
        invariant_factors: g.invariant_factors,
        free_rank: n - dec,
        certified: opts.mode == Mode::Certified,
        primes_checked: primes,
        method,
        relation_rank: dec,
        timing: None,
    })
}

/// Rank of `Σ_{J ∈ K} Z[G_m]ψ_J` over Q, which is `rank S_K - 1`.
pub fn lines_span_rank(ring: FermatRing, k: &[Partition], budget: u128) -> Result<u64> {
    decomposable_count(ring, k, budget)
}

/// `|K| · m^(k+1)` subspaces.
pub fn subspace_count(ring: FermatRing, k: &[Partition]) -> u128 {
    k.len() as u128 * (ring.m as u128).pow(ring.d / 2 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub m: u32,
    pub s: u32,
    pub d: u32,
    pub small: TorsionReport,
    pub large: TorsionReport,
    /// `(m-1)^((d-s)/2)`
    pub copies: u64,
    pub multiplicity_ok: bool,
    pub vanishing_equivalent: bool,
    pub passed: bool,
}

/// Computes `t_K(s)` and `t_K(d)` for `K ⊆ 𝒥(s)` embedded identically and
/// checks that the latter is `(m-1)^((d-s)/2)` copies of the former.
pub fn verify_stabilization(m: u32, s: u32, d: u32, k: &[Partition], opts: TkOptions) -> Result<StabilizationReport> {
    if s > d {
        return Err(Error::InvalidInput(format!("s = {s} exceeds d = {d}")));
    }
    let small_ring = FermatRing::new(m, s)?;
    let large_ring = FermatRing::new(m, d)?;
    let embedded: Vec<Partition> = k.iter().map(|j| j.embed_identically(d)).collect::<Result<_>>()?;
    let small = torsion_tk(small_ring, k, Variant::Psi, opts)?.without_timing();
    let large = torsion_tk(large_ring, &embedded, Variant::Psi, opts)?.without_timing();
    let copies = (m as u64).saturating_sub(1).pow((d - s) / 2);
    let expected = small.torsion().power(copies as usize);
    let multiplicity_ok = large.torsion() == expected;
    let vanishing_equivalent = small.is_trivial() == large.is_trivial();
    Ok(StabilizationReport { m, s, d, passed: multiplicity_ok && vanishing_equivalent, small, large, copies, multiplicity_ok, vanishing_equivalent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::lines_rank_formula;
    use crate::fermat::partition::enumerate_partitions;

    fn full(d: u32) -> Vec<Partition> {
        enumerate_partitions(d).unwrap()
    }

    #[test]
    fn surfaces_have_trivial_torsion() {
        for m in 2..=6 {
            let ring = FermatRing::new(m, 2).unwrap();
            let t = torsion_tk(ring, &full(2), Variant::Psi, TkOptions::default()).unwrap();
            assert!(t.is_trivial() && t.certified, "m = {m}");
        }
    }

    #[test]
    fn span_rank_matches_line_formula() {
        for m in [1, 2, 3, 4, 5, 7] {
            let ring = FermatRing::new(m, 2).unwrap();
            let r = lines_span_rank(ring, &full(2), DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert_eq!(r + 1, lines_rank_formula(m as u64), "m = {m}");
        }
        let r5 = lines_span_rank(FermatRing::new(5, 2).unwrap(), &full(2), DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(r5, 36);
        let r3 = lines_span_rank(FermatRing::new(3, 2).unwrap(), &full(2), DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(r3, 6);
        for d in [0, 2, 4] {
            assert_eq!(lines_span_rank(FermatRing::new(1, d).unwrap(), &full(d), DEFAULT_ENUMERATION_BUDGET).unwrap(), 0);
        }
    }

    #[test]
    fn variants_agree_on_small_cases() {
        for (d, m) in [(2, 2), (2, 3), (2, 4), (4, 2)] {
            let ring = FermatRing::new(m, d).unwrap();
            let base = torsion_tk(ring, &full(d), Variant::Psi, TkOptions::default()).unwrap();
            for v in Variant::ALL {
                let a = module_presentation(v, ring, &full(d), DEFAULT_PRESENTATION_BUDGET).unwrap();
                let t = snf(&a, false).torsion();
                assert_eq!(t, base.invariant_factors, "d={d} m={m} {v:?}");
            }
        }
    }

    #[test]
    fn single_partitions() {
        // a single embedded pair partition always gives a primitive span
        for m in 2..=5 {
            let j = Partition::new(&[(0, 1)], 0).unwrap().embed_identically(4).unwrap();
            let t = torsion_tk(FermatRing::new(m, 4).unwrap(), &[j], Variant::Psi, TkOptions::default()).unwrap();
            assert!(t.is_trivial(), "m = {m}");
        }
    }

    #[test]
    fn stabilization_small() {
        for m in [3, 4] {
            let r = verify_stabilization(m, 2, 4, &full(2), TkOptions::default()).unwrap();
            assert!(r.passed && r.small.is_trivial());
            let r = verify_stabilization(m, 0, 4, &full(0), TkOptions::default()).unwrap();
            assert!(r.passed && r.large.is_trivial());
        }
        let one = &full(2)[..1];
        let r = verify_stabilization(4, 2, 4, one, TkOptions::default()).unwrap();
        assert!(r.vanishing_equivalent && r.passed);
    }

    #[test]
    fn certified_limit() {
        let ring = FermatRing::new(8, 4).unwrap();
        assert!(matches!(torsion_tk(ring, &full(4), Variant::Psi, TkOptions::default()), Err(Error::Budget { .. })));
    }
}
