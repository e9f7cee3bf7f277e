//! Rank lower bounds over `F_p` from random column sketches.
//!
//! For any matrix `S`, `rank(A·S) <= rank(A)`, so a sketch reaching a known
//! upper bound proves the rank. A random sparse `S` with a few more columns
//! than the expected rank reaches it with high probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::elim::Residues;
use crate::linalg::modp::{DenseEchelon, WideEchelon};

/// Nonzeros per original column.
const SPREAD: usize = 4;

pub struct ColumnSketch {
    p: u64,
    width: usize,
    spread: Vec<[(u32, u32); SPREAD]>,
}

impl ColumnSketch {
    pub fn new(ncols: usize, width: usize, p: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spread = (0..ncols).map(|_| [(); SPREAD].map(|_| (rng.gen_range(0..width as u32), rng.gen_range(1..p) as u32))).collect();
        Self { p, width, spread }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `row · S`, residues modulo `p`.
    pub fn apply(&self, row: &[(usize, i64)]) -> Vec<u64> {
        let f = Residues::field(self.p);
        let mut out = vec![0u64; self.width];
        for &(c, v) in row {
            let v = f.from_i64(v);
            if v == 0 {
                continue;
            }
            for &(s, w) in &self.spread[c] {
                out[s as usize] = f.add(out[s as usize], f.mul(v, w as u64));
            }
        }
        out
    }
}

/// Echelon over `F_p`, `p < 256`, with 16-bit lanes and lazy reduction.
pub struct SmallEchelon {
    p: u16,
    width: usize,
    pivots: Vec<(usize, Vec<u16>)>,
    headroom: u32,
    field: Residues,
}

impl SmallEchelon {
    pub fn new(p: u64, width: usize) -> Self {
        assert!(p < 256, "small echelon needs p < 256");
        let sq = ((p - 1) * (p - 1)) as u32;
        let headroom = if sq == 0 { u32::MAX } else { ((u16::MAX as u32 - p as u32) / sq).max(1) };
        Self { p: p as u16, width, pivots: Vec::new(), headroom, field: Residues::field(p) }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Entries of `row` must be reduced. Returns whether the rank grew.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let p = self.p;
        let mut acc: Vec<u16> = row.iter().map(|&x| x as u16).collect();
        let mut budget = self.headroom;
        for (pc, prow) in &self.pivots {
            let c = acc[*pc] % p;
            if c == 0 {
                continue;
            }
            if budget == 0 {
                acc.iter_mut().for_each(|x| *x %= p);
                budget = self.headroom;
            }
            budget -= 1;
            let f = p - c;
            // the budget above keeps these sums below 2^16
            for (a, &b) in acc[*pc..].iter_mut().zip(&prow[*pc..]) {
                *a = a.wrapping_add(f.wrapping_mul(b));
            }
        }
        acc.iter_mut().for_each(|x| *x %= p);
        let Some(first) = acc.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(acc[first] as u64) as u16;
        for x in acc[first..].iter_mut() {
            *x = (*x as u32 * inv as u32 % p as u32) as u16;
        }
        debug_assert_eq!(acc.len(), self.width);
        self.pivots.push((first, acc));
        true
    }
}

/// Echelon over `F_2` on packed 64-bit words.
pub struct BitEchelon {
    words: usize,
    pivots: Vec<(usize, Vec<u64>)>,
}

impl BitEchelon {
    pub fn new(width: usize) -> Self {
        Self { words: width.div_ceil(64), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut bits = vec![0u64; self.words];
        for (i, &x) in row.iter().enumerate() {
            if x & 1 == 1 {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        for (pc, prow) in &self.pivots {
            if bits[pc / 64] >> (pc % 64) & 1 == 1 {
                let w = pc / 64;
                for (a, b) in bits[w..].iter_mut().zip(&prow[w..]) {
                    *a ^= b;
                }
            }
        }
        let Some(w) = bits.iter().position(|&x| x != 0) else {
            return false;
        };
        let first = w * 64 + bits[w].trailing_zeros() as usize;
        self.pivots.push((first, bits));
        true
    }
}

enum Engine {
    Bits(BitEchelon),
    Small(SmallEchelon),
    Dense(DenseEchelon),
    Wide(WideEchelon),
}

impl Engine {
    fn new(p: u64, width: usize) -> Self {
        if p == 2 {
            Engine::Bits(BitEchelon::new(width))
        } else if p < 256 {
            Engine::Small(SmallEchelon::new(p, width))
        } else if p < 1 << 32 {
            Engine::Dense(DenseEchelon::new(p, width))
        } else {
            Engine::Wide(WideEchelon::new(p, width))
        }
    }

    fn rank(&self) -> usize {
        match self {
            Engine::Bits(e) => e.rank(),
            Engine::Small(e) => e.rank(),
            Engine::Dense(e) => e.rank(),
            Engine::Wide(e) => e.rank(),
        }
    }

    fn insert(&mut self, row: &[u64]) -> bool {
        match self {
            Engine::Bits(e) => e.insert(row),
            Engine::Small(e) => e.insert(row),
            Engine::Dense(e) => e.insert(&sparse(row)),
            Engine::Wide(e) => e.insert(&sparse(row)),
        }
    }
}

fn sparse(row: &[u64]) -> Vec<(usize, u64)> {
    row.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, *v)).collect()
}

/// Rank over `F_p` of the rows pushed through a sketch of `width` columns,
/// stopping once `target` is reached. The result is a lower bound for the
/// rank of the rows themselves.
pub fn sketched_rank<I>(rows: I, ncols: usize, p: u64, target: usize, width: usize, seed: u64) -> usize
where
    I: IntoIterator<Item = Vec<(usize, i64)>>,
{
    if target == 0 {
        return 0;
    }
    let sketch = ColumnSketch::new(ncols, width.max(1), p, seed);
    let mut engine = Engine::new(p, sketch.width());
    for row in rows {
        engine.insert(&sketch.apply(&row));
        if engine.rank() >= target {
            break;
        }
    }
    engine.rank()
}
