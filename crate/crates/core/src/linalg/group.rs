//! Finitely generated abelian groups in invariant-factor form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::snf::diagonal_to_chain;

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_s` with `2 <= d_1 | d_2 | ... | d_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    #[serde(with = "big_list")]
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self { invariant_factors: Vec::new(), free_rank: 0 }
    }

    /// Group `Z^free ⊕ ⊕ Z/e_i` for arbitrary nonzero `e_i`; units are dropped
    /// and the rest normalised to a divisibility chain.
    pub fn from_orders(orders: &[BigInt], free_rank: usize) -> Self {
        let chain = diagonal_to_chain(orders);
        Self { invariant_factors: chain.into_iter().filter(|d| !d.is_one()).collect(), free_rank }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[BigInt::from(n)], 0)
    }

    /// Order of the torsion part.
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Exponent of the torsion part (1 when trivial).
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Minimal number of generators of the torsion part.
    pub fn length(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn torsion_is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.free_rank + self.invariant_factors.len() <= 1
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn exponent_u64(&self) -> Option<u64> {
        self.exponent().to_u64()
    }

    pub fn torsion_part(&self) -> Self {
        Self { invariant_factors: self.invariant_factors.clone(), free_rank: 0 }
    }

    /// Direct sum of `copies` copies of this group.
    pub fn power(&self, copies: usize) -> Self {
        let mut orders = Vec::new();
        for _ in 0..copies {
            orders.extend(self.invariant_factors.iter().cloned());
        }
        Self::from_orders(&orders, self.free_rank * copies)
    }

    /// Whether every prime divisor of the torsion order divides `n`.
    pub fn primes_divide(&self, n: &BigInt) -> bool {
        self.invariant_factors.iter().all(|d| {
            let mut d = d.clone();
            loop {
                let g = d.gcd(n);
                if g.is_one() {
                    return d.is_one();
                }
                while (&d % &g).is_zero() {
                    d /= &g;
                }
            }
        })
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Serializes integers as JSON numbers when they fit in `u64`/`i64`, as
/// decimal strings otherwise.
pub mod big_list {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Small(i64),
        Text(String),
    }

    fn to_repr(v: &BigInt) -> Repr {
        match v.to_i64() {
            Some(x) => Repr::Small(x),
            None => Repr::Text(v.to_string()),
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<BigInt, E> {
        match r {
            Repr::Small(x) => Ok(BigInt::from(x)),
            Repr::Text(s) => s.parse().map_err(E::custom),
        }
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
            to_repr(v).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
            from_repr(Repr::deserialize(d)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn normalises_orders() {
        let g = FiniteAbelianGroup::from_orders(&b(&[2, 3, 1, 5]), 0);
        assert_eq!(g.invariant_factors, b(&[30]));
        assert!(g.is_cyclic());
        assert_eq!(g.order(), BigInt::from(30));
        let h = FiniteAbelianGroup::from_orders(&b(&[4, 6]), 1);
        assert_eq!(h.invariant_factors, b(&[2, 12]));
        assert_eq!(h.exponent(), BigInt::from(12));
        assert_eq!(h.to_string(), "Z + Z/2 + Z/12");
    }

    #[test]
    fn trivial_group() {
        let t = FiniteAbelianGroup::trivial();
        assert_eq!(t.order(), BigInt::one());
        assert_eq!(t.exponent(), BigInt::one());
        assert_eq!(t.to_string(), "0");
    }

    #[test]
    fn prime_support() {
        let g = FiniteAbelianGroup::from_orders(&b(&[4, 12]), 0);
        assert!(g.primes_divide(&BigInt::from(6)));
        assert!(!g.primes_divide(&BigInt::from(2)));
    }

    #[test]
    fn json_round_trip() {
        let g = FiniteAbelianGroup::from_orders(&[BigInt::from(2), BigInt::from(10).pow(30)], 2);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains(&format!("[2,\"1{}\"]", "0".repeat(30))));
        let back: FiniteAbelianGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
