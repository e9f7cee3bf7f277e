//! Characters of the Fermat group `G_m` and Picard ranks of Fermat varieties.
//!
//! A character is stored by its exponents `(a_0, ..., a_{d+1})` with each
//! `a_i` in `0..m` and `Σ a_i ≡ 0 (mod m)`; `Log` is `Σ a_i / m`.

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of candidate characters `m^(d+1)`.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermatParams {
    pub m: u32,
    pub d: u32,
}

impl FermatParams {
    pub fn new(m: u32, d: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("degree m must be at least 1".into()));
        }
        if !d.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("dimension d = {d} must be even")));
        }
        Ok(Self { m, d })
    }

    pub fn k(&self) -> u32 {
        self.d / 2
    }

    /// Number of homogeneous coordinates, `d + 2`.
    pub fn arity(&self) -> usize {
        self.d as usize + 2
    }

    /// `m^(d+1)`, the number of characters.
    pub fn candidates(&self) -> u128 {
        (self.m as u128).pow(self.d + 1)
    }

    pub fn units(&self) -> Vec<u32> {
        if self.m == 1 {
            return vec![1];
        }
        (1..self.m).filter(|u| u.gcd(&self.m) == 1).collect()
    }

    fn check_budget(&self, budget: u128) -> Result<()> {
        let needed = self.candidates();
        if needed > budget {
            return Err(Error::Budget { what: "character enumeration", needed, limit: budget });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub exponents: Vec<u32>,
}

impl Character {
    pub fn new(params: FermatParams, exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() != params.arity() {
            return Err(Error::Dimension(format!("{} exponents for d = {}", exponents.len(), params.d)));
        }
        if let Some(a) = exponents.iter().find(|&&a| a >= params.m) {
            return Err(Error::InvalidInput(format!("exponent {a} outside 0..{}", params.m)));
        }
        let sum: u64 = exponents.iter().map(|&a| a as u64).sum();
        if !sum.is_multiple_of(params.m as u64) {
            return Err(Error::InvalidInput(format!("exponent sum {sum} is not divisible by m = {}", params.m)));
        }
        Ok(Self { exponents })
    }

    /// `Σ a_i / m`
    pub fn log_value(&self, m: u32) -> u32 {
        (self.exponents.iter().map(|&a| a as u64).sum::<u64>() / m as u64) as u32
    }

    /// Membership in `𝔄`: no trivial component.
    pub fn in_a(&self) -> bool {
        self.exponents.iter().all(|&a| a != 0)
    }

    /// Membership in `𝔅`: `Log(χ^u) = k + 1` for every unit `u`.
    pub fn in_b(&self, params: FermatParams) -> Result<bool> {
        if !self.in_a() {
            return Err(Error::InvalidInput("character has a trivial component".into()));
        }
        Ok(in_b_raw(&self.exponents, params))
    }

    pub fn power(&self, u: u32, m: u32) -> Self {
        Self { exponents: self.exponents.iter().map(|&a| ((a as u64 * u as u64) % m as u64) as u32).collect() }
    }
}

fn in_b_raw(a: &[u32], params: FermatParams) -> bool {
    let (m, target) = (params.m as u64, params.k() as u64 + 1);
    params.units().iter().all(|&u| {
        let s: u64 = a.iter().map(|&x| (x as u64 * u as u64) % m).sum();
        s / m == target
    })
}

/// Calls `f` on every character in `𝔄`, grouped by the leading exponent so the
/// blocks can run in parallel; results are folded in block order.
pub(crate) fn fold_a<T, F>(params: FermatParams, budget: u128, init: impl Fn() -> T + Sync + Send, f: F, merge: impl Fn(T, T) -> T + Sync + Send) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, &[u32]) + Sync + Send,
{
    params.check_budget(budget)?;
    let m = params.m;
    let n = params.arity();
    let blocks: Vec<T> = (1..m)
        .into_par_iter()
        .map(|a0| {
            let mut acc = init();
            let mut a = vec![1u32; n];
            a[0] = a0;
            // odometer over a_1..a_d in 1..m, last coordinate determined
            loop {
                let s: u64 = a[..n - 1].iter().map(|&x| x as u64).sum();
                let last = ((m as u64 - s % m as u64) % m as u64) as u32;
                if last != 0 {
                    a[n - 1] = last;
                    f(&mut acc, &a);
                }
                let mut i = n - 2;
                loop {
                    if i == 0 {
                        return acc;
                    }
                    if a[i] + 1 < m {
                        a[i] += 1;
                        break;
                    }
                    a[i] = 1;
                    i -= 1;
                }
            }
        })
        .collect();
    Ok(blocks.into_iter().fold(init(), merge))
}

/// Every character in `𝔄`, in lexicographic order.
pub fn characters_a(params: FermatParams, budget: u128) -> Result<Vec<Character>> {
    fold_a(params, budget, Vec::new, |v, a| v.push(Character { exponents: a.to_vec() }), |mut x, y| {
        x.extend(y);
        x
    })
}

/// `|𝔄|`
pub fn count_a(params: FermatParams, budget: u128) -> Result<u64> {
    fold_a(params, budget, || 0u64, |c, _| *c += 1, |x, y| x + y)
}

/// `|𝔅|`
pub fn count_b(params: FermatParams, budget: u128) -> Result<u64> {
    fold_a(params, budget, || 0u64, |c, a| *c += in_b_raw(a, params) as u64, |x, y| x + y)
}

/// `dim NS(F; Q) = |𝔅| + 1`
pub fn picard_rank(params: FermatParams, budget: u128) -> Result<u64> {
    Ok(count_b(params, budget)? + 1)
}

/// Number of characters in `𝔄` with each value of `Log`, indexed `0..=d+2`.
/// Entries at index `d + 1` are characters whose `Log` exceeds `d`.
pub fn log_histogram(params: FermatParams, budget: u128) -> Result<Vec<u64>> {
    let len = params.d as usize + 3;
    let m = params.m as u64;
    fold_a(
        params,
        budget,
        || vec![0u64; len],
        |h, a| h[(a.iter().map(|&x| x as u64).sum::<u64>() / m) as usize] += 1,
        |x, y| x.iter().zip(&y).map(|(a, b)| a + b).collect(),
    )
}

/// `δ_m = 1 - (m mod 2)`
pub fn delta(m: u64) -> u64 {
    1 - (m % 2)
}

/// `3(m-1)(m-2) + δ_m + 1`
pub fn lines_rank_formula(m: u64) -> u64 {
    if m == 1 {
        // 3·0·(-1) + 0 + 1
        return 1;
    }
    3 * (m - 1) * (m - 2) + delta(m) + 1
}

/// Whether the surface formula is known to agree with the Picard rank
/// (`m <= 5` or `gcd(m, 6) = 1`).
pub fn formula_applies(m: u64) -> bool {
    m <= 5 || m.gcd(&6) == 1
}

/// `(picard_rank(m, 2) - 3(m-1)(m-2) - δ_m - 1 - 24 (m/3)^* - 48 (m/2)^*) / 24`
pub fn epsilon_residual(m: u32, budget: u128) -> Result<Ratio<i64>> {
    let rank = picard_rank(FermatParams::new(m, 2)?, budget)? as i64;
    let m = m as i64;
    let star = |q: i64| if m % q == 0 { m / q } else { 0 };
    let base = if m == 1 { 1 } else { 3 * (m - 1) * (m - 2) + delta(m as u64) as i64 + 1 };
    Ok(Ratio::new(rank - base - 24 * star(3) - 48 * star(2), 24))
}
