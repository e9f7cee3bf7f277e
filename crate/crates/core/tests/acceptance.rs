//! End-to-end acceptance run: one line per criterion, nonzero exit on any
//! failure. Every check is an exact comparison.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsl_core::alexander::{self, build_presentation, expected_rank, TorsionOptions};
use nsl_core::census::{self, CensusConfig, CensusRecord, Family};
use nsl_core::characters::{lines_rank_formula, picard_rank, FermatParams, DEFAULT_ENUMERATION_BUDGET};
use nsl_core::fermat::{enumerate_partitions, torsion_tk, verify_stabilization, FermatRing, Mode, TkOptions, Variant};
use nsl_core::linalg::{hnf, rank_exact, rank_mod_p, snf};
use nsl_core::{FiniteQuotient, Lattice, WordMatrix};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    // 3(m-1)(m-2) + δ_m + 1; for m = 11 that is 3·10·9 + 0 + 1 = 271
    let expected = [(3, 7), (4, 20), (5, 37), (7, 91), (11, 271), (13, 397)];
    for (m, want) in expected {
        let got = picard_rank(FermatParams::new(m, 2).unwrap(), DEFAULT_ENUMERATION_BUDGET).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("m = {m}: enumeration gives {got}, expected {want}"))?;
        ensure(lines_rank_formula(m as u64) == want, || format!("m = {m}: formula disagrees"))?;
    }
    for m in [25u32, 35, 49] {
        let got = picard_rank(FermatParams::new(m, 2).unwrap(), DEFAULT_ENUMERATION_BUDGET).map_err(|e| e.to_string())?;
        let f = lines_rank_formula(m as u64);
        ensure(got == f, || format!("m = {m}: enumeration {got}, formula {f}"))?;
    }
    Ok("ranks 7 20 37 91 271 397; m = 25, 35, 49 agree".into())
}

fn full_psi(d: u32, m: u32, opts: TkOptions) -> Result<nsl_core::report::TorsionReport, String> {
    let ring = FermatRing::new(m, d).map_err(|e| e.to_string())?;
    torsion_tk(ring, &enumerate_partitions(d).unwrap(), Variant::Psi, opts).map_err(|e| format!("(d, m) = ({d}, {m}): {e}"))
}

fn criterion_2() -> Check {
    for m in 2..=12 {
        let t = full_psi(2, m, TkOptions::default())?;
        ensure(t.is_trivial() && t.certified, || format!("m = {m}: torsion {:?}, certified {}", t.invariant_factors, t.certified))?;
    }
    Ok("m = 2..12 trivial and certified".into())
}

fn criterion_3() -> Check {
    let certified = [(4, 3), (4, 4), (4, 5), (4, 6), (4, 7), (6, 3), (6, 4), (8, 3)];
    let evidence = [(4, 8), (4, 9), (4, 10), (4, 11), (4, 12), (6, 5)];
    let mut times = Vec::new();
    for (d, m) in certified {
        let start = Instant::now();
        let t = full_psi(d, m, TkOptions::default())?;
        ensure(t.is_trivial() && t.certified, || format!("({d}, {m}): torsion {:?}, certified {}", t.invariant_factors, t.certified))?;
        times.push(format!("({d},{m}) {:.1}s", start.elapsed().as_secs_f64()));
    }
    for (d, m) in evidence {
        let start = Instant::now();
        let t = full_psi(d, m, TkOptions { mode: Mode::Evidence, ..TkOptions::default() })?;
        ensure(t.is_trivial(), || format!("({d}, {m}): evidence torsion {:?}", t.invariant_factors))?;
        times.push(format!("({d},{m}) evidence {:.1}s", start.elapsed().as_secs_f64()));
    }
    Ok(times.join(", "))
}

fn criterion_4() -> Check {
    for (d, m) in [(2, 2), (2, 3), (2, 4), (4, 2), (4, 3)] {
        let ring = FermatRing::new(m, d).unwrap();
        let k = enumerate_partitions(d).unwrap();
        let mut seen = Vec::new();
        for v in Variant::ALL {
            let t = torsion_tk(ring, &k, v, TkOptions::default()).map_err(|e| format!("({d}, {m}) {}: {e}", v.name()))?;
            seen.push((v.name(), t.invariant_factors));
        }
        ensure(seen.iter().all(|(_, f)| *f == seen[0].1), || format!("({d}, {m}): {seen:?}"))?;
    }
    Ok("psi, rho-bar, M, M-bar agree on all five cases".into())
}

const SEED: u64 = 20_240_917;

fn config(family: Family, count: usize, max_order: u64, exact: bool) -> CensusConfig {
    CensusConfig { count, bound: 5, max_order, seed: SEED, family, torsion: TorsionOptions { exact, ..TorsionOptions::default() } }
}

fn vanishing_configs() -> [CensusConfig; 2] {
    [config(Family::Cyclic, 50, 400, false), config(Family::Unramified, 50, 400, false)]
}

fn bounds_config() -> CensusConfig {
    config(Family::General, 200, 500, true)
}

fn jsonl<T: serde::Serialize>(records: &[T]) -> String {
    records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

fn criterion_5() -> Check {
    for cfg in vanishing_configs() {
        for r in census::run_census(&cfg) {
            let t = r.torsion.as_ref().ok_or_else(|| format!("{:?} case {}: {:?}", cfg.family, r.index, r.error))?;
            ensure(r.invariants.order <= BigInt::from(400), || format!("case {} exceeds the order cap", r.index))?;
            ensure(t.is_trivial() && t.certified, || format!("{:?} case {}: torsion {:?}", cfg.family, r.index, t.invariant_factors))?;
            match cfg.family {
                Family::Cyclic => ensure(r.invariants.group.is_cyclic(), || format!("case {} not cyclic", r.index))?,
                _ => {
                    let q = FiniteQuotient::from_columns(&columns(&r)).unwrap();
                    ensure(q.unramified_at_infinity(), || format!("case {} lacks e1+e2+e3 in the kernel", r.index))?;
                }
            }
        }
    }
    Ok("50 cyclic and 50 unramified quotients: certified trivial".into())
}

fn columns(r: &CensusRecord) -> Vec<[i64; 3]> {
    r.kernel.iter().map(|c| [c[0], c[1], c[2]]).collect()
}

/// Large prime: it divides neither `|G|` nor any torsion order, so the rank
/// modulo it is the rank over Q.
const RANK_PRIME: u64 = 1_000_003;

fn criterion_6(records: &[CensusRecord]) -> Check {
    let mut nontrivial = 0;
    let mut max_len = 0;
    for r in records {
        let t = r.torsion.as_ref().ok_or_else(|| format!("case {}: {:?}", r.index, r.error))?;
        ensure(r.invariants.order <= BigInt::from(500), || format!("case {} exceeds the order cap", r.index))?;
        let len = t.length();
        ensure(len <= 6 + r.invariants.delta as usize, || format!("case {}: length {len}", r.index))?;
        ensure((&r.invariants.exp_t_divisor % t.exponent()).is_zero(), || format!("case {}: exponent {}", r.index, t.exponent()))?;
        let q = FiniteQuotient::from_columns(&columns(r)).unwrap();
        let a = build_presentation(&q, usize::MAX).unwrap().matrix;
        let rank = rank_mod_p(&a, RANK_PRIME).unwrap();
        let want = expected_rank(&r.invariants);
        ensure(rank == want && t.relation_rank == want, || format!("case {}: rank {rank} / {}, formula {want}", r.index, t.relation_rank))?;
        nontrivial += !t.is_trivial() as usize;
        max_len = max_len.max(len);
    }
    ensure(nontrivial > 0, || "no case with nontrivial torsion".into())?;
    Ok(format!("{} cases, 0 violations, {nontrivial} with T != 0, max length {max_len}", records.len()))
}

fn criterion_7(records: &[CensusRecord]) -> Check {
    for r in records {
        let inv = &r.invariants;
        ensure(inv.pi1.is_cyclic(), || format!("case {}: π1 = {}", r.index, inv.pi1))?;
        ensure((&inv.height % inv.pi1.order()).is_zero(), || format!("case {}: |π1| = {} does not divide {}", r.index, inv.pi1.order(), inv.height))?;
    }
    Ok(format!("{} cases: π1 cyclic, order divides the height", records.len()))
}

fn brieskorn_run() -> Vec<census::BrieskornRecord> {
    census::run_brieskorn_census(100, 12, SEED, TorsionOptions::default())
}

fn criterion_8() -> Check {
    let mut equal = 0;
    for r in brieskorn_run() {
        let b = r.report.ok_or_else(|| format!("triple {}: {:?}", r.index, r.error))?;
        let order = b.torsion.order();
        ensure(b.torsion.length() <= 1 && (BigInt::from(b.h) % &order).is_zero(), || {
            format!("{:?}: torsion {:?}, h = {}", b.exponents, b.torsion.invariant_factors, b.h)
        })?;
        if b.exponents[0] == b.exponents[1] && b.exponents[1] == b.exponents[2] {
            equal += 1;
            ensure(b.torsion.is_trivial(), || format!("{:?}: torsion {:?}", b.exponents, b.torsion.invariant_factors))?;
        }
    }
    for m in 1..=12 {
        let b = alexander::brieskorn([m; 3], TorsionOptions::default()).map_err(|e| e.to_string())?;
        ensure(b.torsion.is_trivial() && b.h == 1, || format!("({m},{m},{m}): torsion {:?}", b.torsion.invariant_factors))?;
    }
    Ok(format!("100 triples pass ({equal} with equal exponents); (m,m,m) trivial for m = 1..12"))
}

fn criterion_9() -> Check {
    let mut n = 0;
    for s in [0, 2] {
        for m in [3, 4, 5] {
            let k = enumerate_partitions(s).unwrap();
            let r = verify_stabilization(m, s, 4, &k, TkOptions::default()).map_err(|e| e.to_string())?;
            ensure(r.passed, || format!("s = {s}, m = {m}: small {:?}, large {:?}", r.small.invariant_factors, r.large.invariant_factors))?;
            n += 1;
        }
    }
    Ok(format!("{n} cases pass"))
}

/// Textbook Smith form over BigInt: move a smallest nonzero entry to the
/// corner, clear its row and column, repair divisibility, recurse.
fn oracle_invariant_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).filter(|&(i, j)| !a[i][j].is_zero()).min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return out;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&p);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &q * &a[t][j];
                        a[i][j] -= v;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&p);
                if !q.is_zero() {
                    for i in t..rows {
                        let v = &q * &a[i][t];
                        a[i][j] -= v;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p))) {
                for j in t..cols {
                    let v = a[i][j].clone();
                    a[t][j] += v;
                }
                continue;
            }
            out.push(p.abs());
            break;
        }
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let r = rng.gen_range(1..=12);
    let c = rng.gen_range(1..=12);
    // rank at most 2, entries within [-18, 18]
    if rng.gen_bool(0.3) {
        let k = rng.gen_range(1..=2);
        let x: Vec<Vec<i64>> = (0..r).map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let y: Vec<Vec<i64>> = (0..k).map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        return x.iter().map(|xr| (0..c).map(|j| xr.iter().zip(&y).map(|(a, yr)| a * yr[j]).sum::<i64>()).collect()).collect();
    }
    (0..r).map(|_| (0..c).map(|_| rng.gen_range(-20..=20)).collect()).collect()
}

fn big(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let primes = [2u64, 3, 5, 7, 11, 13, 1_000_003];
    for case in 0..1000 {
        let a = random_matrix(&mut rng);
        let m = WordMatrix::from_i64_rows(&a);
        let s = snf(&m, false);
        let oracle = oracle_invariant_factors(big(&a));
        ensure(s.invariant_factors == oracle, || format!("case {case}: snf {:?}, oracle {oracle:?}", s.invariant_factors))?;
        let h = hnf(&m);
        let u = h.transform.to_dense();
        let ba = big(&a);
        let prod: Vec<Vec<BigInt>> = u.iter().map(|ur| (0..ba[0].len()).map(|j| ur.iter().zip(&ba).map(|(x, r)| x * &r[j]).sum()).collect()).collect();
        ensure(prod == h.form.to_dense(), || format!("case {case}: U·M != H"))?;
        let r = rank_exact(&m);
        ensure(r == oracle.len(), || format!("case {case}: rank {r}"))?;
        for p in primes {
            let rp = rank_mod_p(&m, p).unwrap();
            let off = !oracle.iter().any(|d| d.is_multiple_of(&BigInt::from(p)));
            ensure(rp <= r && (!off || rp == r), || format!("case {case}: rank mod {p} = {rp}, rank {r}"))?;
        }
    }
    let mut pairs = 0;
    while pairs < 200 {
        let mut lattice = || {
            let cols: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-8..=8)).collect()).collect();
            Lattice::from_i64_columns(3, &cols).unwrap()
        };
        let (l1, l2) = (lattice(), lattice());
        if !l1.is_full_rank() || !l2.is_full_rank() {
            continue;
        }
        pairs += 1;
        let lhs = l1.intersection(&l2).unwrap().index().unwrap() * l1.sum(&l2).unwrap().index().unwrap();
        let rhs = l1.index().unwrap() * l2.index().unwrap();
        ensure(lhs == rhs, || format!("lattice pair {pairs}: {lhs} != {rhs}"))?;
    }
    Ok("1000 matrices and 200 lattice pairs".into())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn outputs() -> Vec<String> {
    let mut out: Vec<String> = vanishing_configs().iter().map(|c| jsonl(&census::run_census(c))).collect();
    out.push(jsonl(&census::run_census(&bounds_config())));
    out.push(jsonl(&brieskorn_run()));
    out
}

fn criterion_11() -> Check {
    let one = in_pool(1, outputs);
    let many = in_pool(4, outputs);
    let names = ["cyclic", "unramified", "general", "brieskorn"];
    for ((a, b), name) in one.iter().zip(&many).zip(names) {
        ensure(a == b, || format!("{name} census differs between 1 and 4 threads"))?;
        ensure(!a.is_empty(), || format!("{name} census is empty"))?;
    }
    Ok(format!("{} JSONL bytes identical for 1 and 4 threads", one.iter().map(String::len).sum::<usize>()))
}

fn main() -> ExitCode {
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| filter.is_empty() || filter.contains(&n);
    let general = if wanted(6) || wanted(7) { census::run_census(&bounds_config()) } else { Vec::new() };
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Check>)> = vec![
        (1, "Picard ranks of Fermat surfaces", Box::new(criterion_1)),
        (2, "Fermat surface torsion", Box::new(criterion_2)),
        (3, "higher-dimensional Fermat torsion", Box::new(criterion_3)),
        (4, "module variant agreement", Box::new(criterion_4)),
        (5, "Delsarte vanishing families", Box::new(criterion_5)),
        (6, "Delsarte bounds census", Box::new(|| criterion_6(&general))),
        (7, "π1 cyclic and dividing the height", Box::new(|| criterion_7(&general))),
        (8, "Brieskorn surfaces", Box::new(criterion_8)),
        (9, "stabilization", Box::new(criterion_9)),
        (10, "linear algebra properties", Box::new(criterion_10)),
        (11, "determinism across thread counts", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria.iter().filter(|(n, _, _)| wanted(*n)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {n:>2} PASS  {name} [{secs:.1}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name} [{secs:.1}s]: {msg}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
