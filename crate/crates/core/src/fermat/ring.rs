//! The group ring `Λ = Z[G_m]` with `t_0` eliminated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z[G_m]` for `G_m = (Z/m)^(d+2) / diagonal`, with basis the monomials
/// `t_1^e_1 ... t_{d+1}^e_{d+1}`, `0 <= e_i < m`.
///
/// A monomial is indexed in mixed radix with `e_1` most significant;
/// `t_0 = (t_1 ... t_{d+1})^(-1)` is the monomial with all exponents `m - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermatRing {
    pub m: u32,
    pub d: u32,
}

impl FermatRing {
    pub fn new(m: u32, d: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("degree m must be at least 1".into()));
        }
        if !d.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be even")));
        }
        if (m as u128).pow(d + 1) > usize::MAX as u128 / 4 {
            return Err(Error::Budget { what: "group ring rank", needed: (m as u128).pow(d + 1), limit: usize::MAX as u128 / 4 });
        }
        Ok(Self { m, d })
    }

    /// Number of eliminated-basis variables, `d + 1`.
    pub fn vars(&self) -> usize {
        self.d as usize + 1
    }

    /// `m^(d+1)`
    pub fn rank(&self) -> usize {
        (self.m as usize).pow(self.d + 1)
    }

    pub fn encode(&self, exps: &[u32]) -> usize {
        exps.iter().fold(0, |acc, &e| acc * self.m as usize + (e % self.m) as usize)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u32> {
        let m = self.m as usize;
        let mut out = vec![0u32; self.vars()];
        for slot in out.iter_mut().rev() {
            *slot = (idx % m) as u32;
            idx /= m;
        }
        out
    }

    /// Index of the generator `t_i`, `0 <= i <= d + 1`.
    pub fn generator(&self, i: usize) -> usize {
        assert!(i <= self.vars(), "generator t_{i} out of range");
        if i == 0 {
            self.encode(&vec![self.m - 1; self.vars()])
        } else {
            let mut e = vec![0; self.vars()];
            e[i - 1] = 1;
            self.encode(&e)
        }
    }

    /// Product of two monomials given by index.
    pub fn mul_monomials(&self, a: usize, b: usize) -> usize {
        let m = self.m as usize;
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.vars() {
            out += ((a % m + b % m) % m) * place;
            a /= m;
            b /= m;
            place *= m;
        }
        out
    }

    pub fn pow_monomial(&self, a: usize, e: u32) -> usize {
        (0..e).fold(0, |acc, _| self.mul_monomials(acc, a))
    }

    /// Every monomial, in index order.
    pub fn monomials(&self) -> std::ops::Range<usize> {
        0..self.rank()
    }
}

/// A sparse element of a [`FermatRing`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentElement {
    pub ring: FermatRing,
    pub coefficients: BTreeMap<usize, i64>,
}

impl LaurentElement {
    pub fn zero(ring: FermatRing) -> Self {
        Self { ring, coefficients: BTreeMap::new() }
    }

    pub fn monomial(ring: FermatRing, idx: usize, c: i64) -> Self {
        let mut e = Self::zero(ring);
        e.add_term(idx, c);
        e
    }

    pub fn one(ring: FermatRing) -> Self {
        Self::monomial(ring, 0, 1)
    }

    pub fn t(ring: FermatRing, i: usize) -> Self {
        Self::monomial(ring, ring.generator(i), 1)
    }

    fn add_term(&mut self, idx: usize, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.coefficients.entry(idx).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coefficients.remove(&idx);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, &c) in &other.coefficients {
            out.add_term(i, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, &c) in &other.coefficients {
            out.add_term(i, -c);
        }
        out
    }

    /// Product; `None` on coefficient overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (&i, a) in &self.coefficients {
            for (&j, b) in &other.coefficients {
                let slot = acc.entry(self.ring.mul_monomials(i, j)).or_insert(0);
                *slot = slot.checked_add(a.checked_mul(*b)?)?;
            }
        }
        acc.retain(|_, c| *c != 0);
        Some(Self { ring: self.ring, coefficients: acc })
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("coefficient overflow in group ring product")
    }

    /// `g · self` for a monomial `g`.
    pub fn shift(&self, g: usize) -> Self {
        let coefficients = self.coefficients.iter().map(|(&i, &c)| (self.ring.mul_monomials(i, g), c)).collect();
        Self { ring: self.ring, coefficients }
    }

    /// Image under `t_i ↦ 1`.
    pub fn augmentation(&self) -> i64 {
        self.coefficients.values().sum()
    }

    pub fn to_row(&self) -> Vec<(usize, i64)> {
        self.coefficients.iter().map(|(&i, &c)| (i, c)).collect()
    }
}

/// Coefficients of `φ(t) = 1 + t + ... + t^(m-1)`.
pub fn phi(m: u32) -> Vec<i64> {
    vec![1; m as usize]
}

/// Exponent pairs `(j, i)` of the monomials `x^j y^i` of
/// `ρ(x, y) = Σ_{0 <= i <= j <= m-2} x^j y^i`.
pub fn rho_poly(m: u32) -> Vec<(u32, u32)> {
    let top = m as i64 - 2;
    let mut out = Vec::new();
    for j in 0..=top {
        for i in 0..=j {
            out.push((j as u32, i as u32));
        }
    }
    out
}

/// `φ(x)` for a monomial `x` of the ring.
pub fn phi_at(ring: FermatRing, x: usize) -> LaurentElement {
    let mut out = LaurentElement::zero(ring);
    let mut g = 0;
    for c in phi(ring.m) {
        out.add_term(g, c);
        g = ring.mul_monomials(g, x);
    }
    out
}

/// `ρ(x, y)` for monomials `x`, `y` of the ring.
pub fn rho_at(ring: FermatRing, x: usize, y: usize) -> LaurentElement {
    let mut out = LaurentElement::zero(ring);
    for (j, i) in rho_poly(ring.m) {
        out.add_term(ring.mul_monomials(ring.pow_monomial(x, j), ring.pow_monomial(y, i)), 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_shapes() {
        assert_eq!(phi(2), vec![1, 1]);
        assert_eq!(phi(1), vec![1]);
        assert_eq!(rho_poly(2), vec![(0, 0)]);
        assert_eq!(rho_poly(3), vec![(0, 0), (1, 0), (1, 1)]);
        assert!(rho_poly(1).is_empty());
        for m in 1..9 {
            assert_eq!(phi(m).len(), m as usize);
            assert_eq!(rho_poly(m).len(), (m * (m - 1) / 2) as usize);
        }
    }

    #[test]
    fn t0_is_inverse_of_the_rest() {
        for (m, d) in [(2, 2), (3, 2), (5, 4), (1, 2)] {
            let r = FermatRing::new(m, d).unwrap();
            let prod = (0..=r.vars()).fold(0, |acc, i| r.mul_monomials(acc, r.generator(i)));
            assert_eq!(prod, 0);
            for i in 0..=r.vars() {
                assert_eq!(r.pow_monomial(r.generator(i), m), 0);
            }
        }
    }

    #[test]
    fn encode_round_trip() {
        let r = FermatRing::new(3, 2).unwrap();
        assert_eq!(r.rank(), 27);
        for i in r.monomials() {
            assert_eq!(r.encode(&r.decode(i)), i);
        }
        assert_eq!(r.decode(r.generator(1)), vec![1, 0, 0]);
        assert_eq!(r.decode(r.generator(0)), vec![2, 2, 2]);
    }

    #[test]
    fn phi_annihilates_t_minus_one() {
        let r = FermatRing::new(4, 2).unwrap();
        for i in 0..4 {
            let t = LaurentElement::t(r, i);
            let f = phi_at(r, r.generator(i));
            assert!(t.sub(&LaurentElement::one(r)).mul(&f).is_zero());
        }
    }
}
