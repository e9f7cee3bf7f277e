//! Pairings of `{0, ..., d+1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `{0, ..., d+1}` into `k + 1` pairs, stored canonically:
/// `p < q` within each pair and pairs sorted by `p`, so pair 0 contains 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    pub pairs: Vec<(usize, usize)>,
}

impl Partition {
    /// Canonicalizes any labeling of a pairing of `{0, ..., d+1}`.
    pub fn new(pairs: &[(usize, usize)], d: u32) -> Result<Self> {
        let n = d as usize + 2;
        if !d.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be even")));
        }
        let mut seen = vec![false; n];
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n || seen[x] {
                    return Err(Error::InvalidInput(format!("pairs do not partition 0..={}", n - 1)));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput(format!("pairs do not partition 0..={}", n - 1)));
        }
        let mut pairs: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort();
        Ok(Self { pairs })
    }

    /// `d`, recovered from the number of pairs.
    pub fn dimension(&self) -> u32 {
        2 * self.pairs.len() as u32 - 2
    }

    pub fn k(&self) -> usize {
        self.pairs.len() - 1
    }

    /// Appends `{s+2, s+3}, ..., {d, d+1}`.
    pub fn embed_identically(&self, d: u32) -> Result<Self> {
        let s = self.dimension();
        if d < s || !d.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("cannot embed from dimension {s} into {d}")));
        }
        let mut pairs = self.pairs.clone();
        pairs.extend((s as usize + 2..d as usize + 2).step_by(2).map(|a| (a, a + 1)));
        Ok(Self { pairs })
    }

    /// Whether a character with the given exponents decomposes along the
    /// partition, i.e. `a_p + a_q ≡ 0 (mod m)` on every pair.
    pub fn splits(&self, exponents: &[u32], m: u32) -> bool {
        self.pairs.iter().all(|&(p, q)| (exponents[p] + exponents[q]).is_multiple_of(m))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(p, q)| format!("{{{p},{q}}}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All `(d+1)!!` partitions in lexicographic order.
pub fn enumerate_partitions(d: u32) -> Result<Vec<Partition>> {
    if !d.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("dimension d = {d} must be even")));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    let remaining: Vec<usize> = (0..d as usize + 2).collect();
    extend(&remaining, &mut current, &mut out);
    Ok(out)
}

fn extend(remaining: &[usize], current: &mut Vec<(usize, usize)>, out: &mut Vec<Partition>) {
    let Some((&first, rest)) = remaining.split_first() else {
        out.push(Partition { pairs: current.clone() });
        return;
    };
    for (i, &partner) in rest.iter().enumerate() {
        let left: Vec<usize> = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        current.push((first, partner));
        extend(&left, current, out);
        current.pop();
    }
}

/// `(2k+1)!!` for `d = 2k`.
pub fn partition_count(d: u32) -> u64 {
    (1..=d as u64 + 1).step_by(2).product()
}
