//! The Alexander module `A[α]` of a Delsarte surface and its integral torsion.
//!
//! `A[α]` is generated over `Z[G]` by `a1, a2, a3, c1, c2, c3` subject to
//!
//! ```text
//! (t2 t3 - 1) c1 = (t1 t3 - 1) c2 = (t1 t2 - 1) c3 = 0
//! (t3 - 1) c1 + (t3 - 1) a2 - (t2 - 1) a3 = 0
//! (t3 - 1) c2 + (t3 - 1) a1 - (t1 - 1) a3 = 0
//! (t1 - 1) c3 + (t1 - 1) a2 - (t2 - 1) a1 = 0
//! ```
//!
//! Expanding every `g`-translate of these relations over the `Z`-basis `G`
//! gives a `6|G| x 6|G|` integer matrix whose cokernel is `A[α]`. The torsion
//! of the surface is the integral torsion of this cokernel.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::group::big_list;
use crate::linalg::modp::{prime_factors, rank_mod_p};
use crate::linalg::snf::snf;
use crate::quotient::{FiniteQuotient, GroupMap, QuotientInvariants};
use crate::report::{Method, TorsionReport};
use crate::WordMatrix;

/// Largest `|G|` accepted by default (matrix of at most 12,000 columns).
pub const DEFAULT_GROUP_BUDGET: usize = 2000;

/// Sparse element of `Z[G]`, keyed by the index of the group element in the
/// lexicographic enumeration of [`GroupMap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement<'a> {
    group: &'a GroupMap,
    coefficients: BTreeMap<usize, i64>,
}

impl<'a> GroupAlgebraElement<'a> {
    pub fn zero(group: &'a GroupMap) -> Self {
        Self { group, coefficients: BTreeMap::new() }
    }

    pub fn monomial(group: &'a GroupMap, element: &[u64], c: i64) -> Self {
        let mut e = Self::zero(group);
        e.add_term(group.index(element), c);
        e
    }

    /// `α(t_i)` for `i = 0..=3`.
    pub fn t(group: &'a GroupMap, i: usize) -> Self {
        Self::monomial(group, &group.image(i), 1)
    }

    pub fn one(group: &'a GroupMap) -> Self {
        Self::monomial(group, &group.identity(), 1)
    }

    fn add_term(&mut self, index: usize, c: i64) {
        let v = self.coefficients.entry(index).or_insert(0);
        *v += c;
        if *v == 0 {
            self.coefficients.remove(&index);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&g, &c)| (g, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.group);
        for (g, a) in self.terms() {
            let ge = self.group.element(g);
            for (h, b) in other.terms() {
                let prod = self.group.add(&ge, &self.group.element(h));
                out.add_term(self.group.index(&prod), a * b);
            }
        }
        out
    }

    /// Image under `g ↦ 1`.
    pub fn augmentation(&self) -> i64 {
        self.coefficients.values().sum()
    }
}

/// Generator order of the presentation.
pub const GENERATORS: [&str; 6] = ["a1", "a2", "a3", "c1", "c2", "c3"];

/// The six base relations as `(generator index, coefficient)` lists.
pub fn base_relations(group: &GroupMap) -> Vec<Vec<(usize, GroupAlgebraElement<'_>)>> {
    let one = GroupAlgebraElement::one(group);
    let t = |i| GroupAlgebraElement::t(group, i);
    let tm1 = |i| t(i).sub(&one);
    let prod_m1 = |i, j| t(i).mul(&t(j)).sub(&one);
    let zero = GroupAlgebraElement::zero(group);
    let neg = |e| zero.sub(&e);
    let (a1, a2, a3, c1, c2, c3) = (0, 1, 2, 3, 4, 5);
    vec![
        vec![(c1, prod_m1(2, 3))],
        vec![(c2, prod_m1(1, 3))],
        vec![(c3, prod_m1(1, 2))],
        vec![(c1, tm1(3)), (a2, tm1(3)), (a3, neg(tm1(2)))],
        vec![(c2, tm1(3)), (a1, tm1(3)), (a3, neg(tm1(1)))],
        vec![(c3, tm1(1)), (a2, tm1(1)), (a1, neg(tm1(2)))],
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexanderPresentation {
    pub group: GroupMap,
    /// row `r |G| + g` is `g` times relation `r`; column `i |G| + h` is `h ⊗` generator `i`
    pub matrix: WordMatrix,
}

pub fn build_presentation(q: &FiniteQuotient, budget: usize) -> Result<AlexanderPresentation> {
    let n = q.order().to_usize().unwrap_or(usize::MAX);
    if n > budget {
        return Err(Error::Budget { what: "group order for the Alexander presentation", needed: n as u128, limit: budget as u128 });
    }
    let group = q.group_map();
    let relations = base_relations(&group);
    let mut rows = Vec::with_capacity(6 * n);
    for rel in &relations {
        for g in 0..n {
            let ge = group.element(g);
            let mut row = Vec::new();
            for (gen, coeff) in rel {
                for (h, c) in coeff.terms() {
                    let gh = group.add(&ge, &group.element(h));
                    row.push((gen * n + group.index(&gh), c));
                }
            }
            row.sort_unstable();
            rows.push(row);
        }
    }
    let matrix = WordMatrix::from_rows(6 * n, rows)?;
    Ok(AlexanderPresentation { group, matrix })
}

/// Rank over Q of the presentation matrix predicted by the rank formula for
/// `K[α]`: `6|G| - (rank K + |G| - 1)`.
pub fn expected_rank(inv: &QuotientInvariants) -> usize {
    let n = inv.order_usize();
    6 * n - (inv.rank_k as usize + n - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionOptions {
    /// always run the full Smith normal form
    pub exact: bool,
    pub group_budget: usize,
}

impl Default for TorsionOptions {
    fn default() -> Self {
        Self { exact: false, group_budget: DEFAULT_GROUP_BUDGET }
    }
}

/// `T[α]`, the torsion of `NS / S[α]`, as the integral torsion of `A[α]`.
///
/// Unless `exact` is set, each prime `p | (exp G)^3 / |G|` is checked by
/// comparing the rank modulo `p` with the predicted rank over Q; a full Smith
/// normal form runs only when some prime fails. A computed rank over Q that
/// differs from the prediction is a [`Error::TheoryViolation`].
pub fn torsion_t(q: &FiniteQuotient, opts: TorsionOptions) -> Result<TorsionReport> {
    let start = Instant::now();
    let inv = q.invariants();
    let n = inv.order_usize();
    let expected = expected_rank(&inv);
    let free_rank = 6 * n - expected;
    let divisor = inv.exp_t_divisor.to_u64().expect("bounded by |G|^2");
    let primes = prime_factors(divisor);
    if !opts.exact && primes.is_empty() {
        return Ok(TorsionReport {
            invariant_factors: Vec::new(),
            free_rank,
            certified: true,
            primes_checked: Vec::new(),
            method: Method::RankComparison,
            relation_rank: expected,
            timing: Some(start.elapsed()),
        });
    }
    let pres = build_presentation(q, opts.group_budget)?;
    if !opts.exact {
        let mut all_pass = true;
        for &p in &primes {
            let r = rank_mod_p(&pres.matrix, p)?;
            if r > expected {
                return Err(Error::TheoryViolation(format!("rank modulo {p} is {r}, above the predicted rank {expected} over Q")));
            }
            if r != expected {
                all_pass = false;
                break;
            }
        }
        if all_pass {
            return Ok(TorsionReport {
                invariant_factors: Vec::new(),
                free_rank,
                certified: true,
                primes_checked: primes,
                method: Method::RankComparison,
                relation_rank: expected,
                timing: Some(start.elapsed()),
            });
        }
    }
    let s = snf(&pres.matrix, false);
    if s.rank != expected {
        return Err(Error::TheoryViolation(format!("presentation rank {} differs from the predicted rank {expected}", s.rank)));
    }
    let invariant_factors = s.torsion();
    if let Some(d) = invariant_factors.iter().find(|d| !d.is_one() && !(&inv.exp_t_divisor % *d).is_zero()) {
        return Err(Error::TheoryViolation(format!("invariant factor {d} does not divide (exp G)^3/|G| = {}", inv.exp_t_divisor)));
    }
    Ok(TorsionReport {
        invariant_factors,
        free_rank,
        certified: true,
        primes_checked: if opts.exact { Vec::new() } else { primes },
        method: Method::ExactSnf,
        relation_rank: s.rank,
        timing: Some(start.elapsed()),
    })
}

/// One of the three families on which `T[α]` must vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VanishingFamily {
    Fermat,
    Cyclic,
    UnramifiedAtInfinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub length: usize,
    pub length_bound: u8,
    pub length_ok: bool,
    #[serde(with = "big_list::one")]
    pub exponent: BigInt,
    #[serde(with = "big_list::one")]
    pub exponent_divisor: BigInt,
    pub exponent_ok: bool,
    /// families the quotient belongs to
    pub vanishing_families: Vec<VanishingFamily>,
    pub vanishing_ok: bool,
    pub pi1_cyclic: bool,
    pub pi1_divides_height: bool,
    pub passed: bool,
}

pub fn vanishing_families(q: &FiniteQuotient) -> Vec<VanishingFamily> {
    let mut out = Vec::new();
    if q.fermat_degree().is_some() {
        out.push(VanishingFamily::Fermat);
    }
    if q.group().is_cyclic() {
        out.push(VanishingFamily::Cyclic);
    }
    if q.unramified_at_infinity() {
        out.push(VanishingFamily::UnramifiedAtInfinity);
    }
    out
}

/// Checks `ℓ(T) <= 6 + δ`, `exp T | (exp G)^3/|G|`, vanishing on the special
/// families, and that `π1` is cyclic of order dividing the height.
pub fn verify_bounds(q: &FiniteQuotient, inv: &QuotientInvariants, t: &TorsionReport) -> BoundsReport {
    let length = t.length();
    let exponent = t.exponent();
    let length_ok = length <= inv.length_t_bound as usize;
    let exponent_ok = (&inv.exp_t_divisor % &exponent).is_zero();
    let vanishing_families = vanishing_families(q);
    let vanishing_ok = vanishing_families.is_empty() || t.is_trivial();
    let pi1_cyclic = inv.pi1.is_cyclic();
    let pi1_divides_height = (&inv.height % inv.pi1.order()).is_zero();
    BoundsReport {
        length,
        length_bound: inv.length_t_bound,
        length_ok,
        exponent,
        exponent_divisor: inv.exp_t_divisor.clone(),
        exponent_ok,
        passed: length_ok && exponent_ok && vanishing_ok && pi1_cyclic && pi1_divides_height,
        vanishing_families,
        vanishing_ok,
        pi1_cyclic,
        pi1_divides_height,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrieskornReport {
    pub exponents: [u64; 3],
    /// `lcm(gcd(m_i, m_j)) / gcd(m1, m2, m3)`
    pub h: u64,
    /// whether `h^2 = m1 m2 m3 / gcd(m1, m2, m3)^3`
    pub radical_form_agrees: bool,
    pub delta: u8,
    pub torsion: TorsionReport,
    pub cyclic: bool,
    pub length_ok: bool,
    pub order_divides_h: bool,
    pub passed: bool,
}

pub fn brieskorn_h(m: [u64; 3]) -> u64 {
    let l = m[0].gcd(&m[1]).lcm(&m[0].gcd(&m[2])).lcm(&m[1].gcd(&m[2]));
    l / m[0].gcd(&m[1]).gcd(&m[2])
}

/// The surface `x^m1 + y^m2 + z^m3 = 1`, i.e. the kernel `diag(m1, m2, m3)`.
pub fn brieskorn(m: [u64; 3], opts: TorsionOptions) -> Result<BrieskornReport> {
    if m.contains(&0) {
        return Err(Error::InvalidInput("Brieskorn exponents must be positive".into()));
    }
    let q = FiniteQuotient::diagonal(m[0] as i64, m[1] as i64, m[2] as i64)?;
    let inv = q.invariants();
    let torsion = torsion_t(&q, opts)?;
    let h = brieskorn_h(m);
    let g = m[0].gcd(&m[1]).gcd(&m[2]) as u128;
    let prod = m.iter().map(|&x| x as u128).product::<u128>();
    let radical_form_agrees = (h as u128).pow(2) * g.pow(3) == prod;
    let cyclic = torsion.length() <= 1;
    let length_ok = torsion.length() <= inv.delta as usize;
    let order_divides_h = (BigInt::from(h) % torsion.order()).is_zero();
    Ok(BrieskornReport {
        exponents: m,
        h,
        radical_form_agrees,
        delta: inv.delta,
        passed: cyclic && length_ok && order_divides_h,
        torsion,
        cyclic,
        length_ok,
        order_divides_h,
    })
}
