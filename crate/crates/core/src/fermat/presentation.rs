//! The polynomials `τ_J`, `ψ_J`, `ρ_J` and relation matrices for the four
//! module descriptions of the torsion `t_K`.

use serde::{Deserialize, Serialize};

use crate::characters::{fold_a, FermatParams};
use crate::error::{Error, Result};
use crate::fermat::partition::Partition;
use crate::fermat::ring::{phi_at, rho_at, FermatRing, LaurentElement};
use crate::linalg::elim::Row;
use crate::WordMatrix;

/// Default cap on `m^(d+1) · (|K| + d + 2)` for full presentations.
pub const DEFAULT_PRESENTATION_BUDGET: u128 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `Λ / Σ Λψ_J`
    Psi,
    /// `Λ̄ / Σ Λ̄ρ_J`, with `Λ̄ = Λ / Σ_{i>=1} Λφ(t_i)` free of rank `(m-1)^(d+1)`
    RhoBar,
    /// `(⊕ Λ_J) / Λτ`
    M,
    /// `(⊕ Λ̄_J) / Λ̄·1`
    MBar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Psi, Variant::RhoBar, Variant::M, Variant::MBar];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Psi => "psi",
            Variant::RhoBar => "rho-bar",
            Variant::M => "M",
            Variant::MBar => "M-bar",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "psi" => Ok(Variant::Psi),
            "rho-bar" => Ok(Variant::RhoBar),
            "M" | "m" => Ok(Variant::M),
            "M-bar" | "m-bar" => Ok(Variant::MBar),
            _ => Err(Error::InvalidInput(format!("unknown variant {s:?}; expected psi, rho-bar, M or M-bar"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPolynomials {
    pub tau: LaurentElement,
    pub psi: LaurentElement,
    pub rho: LaurentElement,
}

/// `τ_J`, `ψ_J`, `ρ_J` for the canonical labeling of `J`.
pub fn tau_psi_rho(j: &Partition, ring: FermatRing) -> Result<PartitionPolynomials> {
    if j.dimension() != ring.d {
        return Err(Error::Dimension(format!("partition of dimension {} in a ring of dimension {}", j.dimension(), ring.d)));
    }
    Ok(tau_psi_rho_labeled(&j.pairs, ring))
}

/// Same as [`tau_psi_rho`] for an arbitrary labeling: pair 0 is the first
/// pair listed and `q` is the second entry of each pair.
pub fn tau_psi_rho_labeled(pairs: &[(usize, usize)], ring: FermatRing) -> PartitionPolynomials {
    let one = LaurentElement::one(ring);
    let mut tau = one.clone();
    for &(_, q) in pairs {
        tau = tau.mul(&LaurentElement::t(ring, q).sub(&one));
    }
    let mut psi = tau.clone();
    let mut rho = one.clone();
    for &(p, q) in &pairs[1..] {
        let (x, y) = (ring.generator(p), ring.generator(q));
        psi = psi.mul(&phi_at(ring, ring.mul_monomials(x, y)));
        rho = rho.mul(&rho_at(ring, x, y));
    }
    PartitionPolynomials { tau, psi, rho }
}

fn check_k(ring: FermatRing, k: &[Partition]) -> Result<()> {
    if k.is_empty() {
        return Err(Error::InvalidInput("the set of partitions K is empty".into()));
    }
    if let Some(j) = k.iter().find(|j| j.dimension() != ring.d) {
        return Err(Error::Dimension(format!("partition {j} does not have dimension {}", ring.d)));
    }
    Ok(())
}

pub fn check_presentation_budget(ring: FermatRing, k: usize, budget: u128) -> Result<()> {
    let needed = ring.rank() as u128 * (k as u128 + ring.d as u128 + 2);
    if needed > budget {
        return Err(Error::Budget { what: "module presentation", needed, limit: budget });
    }
    Ok(())
}

/// Relation matrix of the module of the chosen variant, over the `Z`-basis
/// of the free module `Λ` (or `⊕_J Λ`), closed under multiplication by `G_m`.
pub fn module_presentation(variant: Variant, ring: FermatRing, k: &[Partition], budget: u128) -> Result<WordMatrix> {
    check_k(ring, k)?;
    check_presentation_budget(ring, k.len(), budget)?;
    let n = ring.rank();
    let one = LaurentElement::one(ring);
    let translates = |x: &LaurentElement, offset: usize, rows: &mut Vec<Row<i64>>| {
        for g in ring.monomials() {
            rows.push(x.shift(g).to_row().into_iter().map(|(c, v)| (c + offset, v)).collect());
        }
    };
    let phis: Vec<LaurentElement> = (0..=ring.vars()).map(|i| phi_at(ring, ring.generator(i))).collect();
    let polys: Vec<PartitionPolynomials> = k.iter().map(|j| tau_psi_rho_labeled(&j.pairs, ring)).collect();
    let mut rows: Vec<Row<i64>> = Vec::new();
    let cols = match variant {
        Variant::Psi => {
            for p in &polys {
                translates(&p.psi, 0, &mut rows);
            }
            n
        }
        Variant::RhoBar => {
            // φ(t_0) is left out: with it the quotient picks up torsion that t_K does not have
            for f in &phis[1..] {
                translates(f, 0, &mut rows);
            }
            for p in &polys {
                translates(&p.rho, 0, &mut rows);
            }
            n
        }
        Variant::M | Variant::MBar => {
            for (b, j) in k.iter().enumerate() {
                for &(p, q) in &j.pairs {
                    let x = LaurentElement::monomial(ring, ring.mul_monomials(ring.generator(p), ring.generator(q)), 1).sub(&one);
                    translates(&x, b * n, &mut rows);
                }
                if variant == Variant::MBar {
                    for f in &phis {
                        translates(f, b * n, &mut rows);
                    }
                }
            }
            for g in ring.monomials() {
                let mut row = Vec::new();
                for (b, p) in polys.iter().enumerate() {
                    match variant {
                        Variant::M => row.extend(p.tau.shift(g).to_row().into_iter().map(|(c, v)| (c + b * n, v))),
                        _ => row.push((g + b * n, 1)),
                    }
                }
                rows.push(row);
            }
            n * k.len()
        }
    };
    WordMatrix::from_rows(cols, rows)
}

/// Generators of `Σ_J Λψ_J` as a `Z`-module: `u · ψ_J` with
/// `u = t_{q_0}^{e_0} ... t_{q_k}^{e_k}`, `0 <= e_i <= m - 2`.
///
/// `ψ_J` is fixed by every `t_p t_q` and killed by `φ(t_q)`, so these
/// `(m-1)^(k+1)` translates already span `Λψ_J`.
pub fn compact_psi_rows(ring: FermatRing, j: &Partition) -> Vec<Row<i64>> {
    let psi = tau_psi_rho_labeled(&j.pairs, ring).psi;
    let m = ring.m;
    if m < 2 {
        return Vec::new();
    }
    let qs: Vec<usize> = j.pairs.iter().map(|&(_, q)| ring.generator(q)).collect();
    let mut e = vec![0u32; qs.len()];
    let mut out = Vec::new();
    loop {
        let u = qs.iter().zip(&e).fold(0, |acc, (&q, &x)| ring.mul_monomials(acc, ring.pow_monomial(q, x)));
        out.push(psi.shift(u).to_row());
        let mut i = 0;
        loop {
            if i == e.len() {
                return out;
            }
            e[i] += 1;
            if e[i] <= m - 2 {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Number of characters in `𝔄` that decompose along some `J ∈ K`; this is
/// the rank of `Σ_J Λψ_J` over Q and over every field of characteristic
/// prime to `m`.
pub fn decomposable_count(ring: FermatRing, k: &[Partition], budget: u128) -> Result<u64> {
    check_k(ring, k)?;
    let params = FermatParams::new(ring.m, ring.d)?;
    fold_a(params, budget, || 0u64, |acc, a| *acc += k.iter().any(|j| j.splits(a, ring.m)) as u64, |x, y| x + y)
}
