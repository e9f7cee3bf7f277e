//! Elementary divisors localized at a prime, computed modulo a prime power.

use num_bigint::BigInt;
use num_traits::Pow;

use crate::linalg::elim::{eliminate_units, ElimLimits, ElimRing, Residues, Row};

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Largest exponent `e` with `p^e < 2^62`.
pub fn max_exponent(p: u64) -> u32 {
    let mut e = 0;
    let mut q: u128 = 1;
    while q * (p as u128) < (1u128 << 62) {
        q *= p as u128;
        e += 1;
    }
    e
}

/// Valuations of the nonzero elementary divisors of a matrix over `Z/p^e`.
///
/// Rows hold residues modulo `p^e`. An elementary divisor with valuation
/// `>= e` is invisible at this precision, so callers compare the number of
/// returned valuations with the rank over the rationals.
pub fn local_valuations(rows: Vec<Row<u64>>, ncols: usize, p: u64, e: u32) -> Vec<u32> {
    let modulus = p.pow(e);
    let ring = Residues::prime_power(p, modulus);
    let out = eliminate_units(&ring, rows, ncols, ElimLimits { max_density: 1.1, ..Default::default() })
        .expect("residue arithmetic is total");
    let mut vals = vec![0u32; out.pivots];
    let n = out.core.len();
    let m = out.core_cols;
    if n == 0 {
        return vals;
    }
    let mut a = vec![vec![0u64; m]; n];
    for (r, row) in out.core.iter().enumerate() {
        for (c, v) in row {
            a[r][*c] = *v;
        }
    }
    let mut t = 0;
    while t < n.min(m) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = valuation(x, p);
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let pv = p.pow(v);
        let unit_inv = ring.inv(a[t][t] / pv);
        let pivot_row = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            let x = row[t];
            if x == 0 {
                continue;
            }
            let q = ring.neg(ring.mul(x / pv, unit_inv));
            for j in t..m {
                if pivot_row[j] != 0 {
                    row[j] = ring.add(row[j], ring.mul(q, pivot_row[j]));
                }
            }
        }
        vals.push(v);
        t += 1;
    }
    vals
}

/// `p`-primary invariant factors (`p^v`, `v >= 1`) of the cokernel, provided
/// the local computation sees exactly `rank_q` nonzero elementary divisors.
/// Returns `None` when some divisor exceeds the working precision.
pub fn p_primary_part(rows: &[Row<i64>], ncols: usize, p: u64, rank_q: usize) -> Option<Vec<BigInt>> {
    let e = max_exponent(p);
    let ring = Residues::prime_power(p, p.pow(e));
    let reduced: Vec<Row<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|(c, v)| (*c, ring.from_i64(*v))).filter(|(_, v)| !ring.is_zero(v)).collect())
        .collect();
    let vals = local_valuations(reduced, ncols, p, e);
    if vals.len() != rank_q {
        return None;
    }
    let mut out: Vec<BigInt> = vals.into_iter().filter(|&v| v > 0).map(|v| BigInt::from(p).pow(v)).collect();
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_local_parts() {
        // diag(4, 6, 9): 2-part {2, 4}, 3-part {3, 9}
        let rows: Vec<Row<i64>> = vec![vec![(0, 4)], vec![(1, 6)], vec![(2, 9)]];
        assert_eq!(p_primary_part(&rows, 3, 2, 3).unwrap(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(p_primary_part(&rows, 3, 3, 3).unwrap(), vec![BigInt::from(3), BigInt::from(9)]);
        assert_eq!(p_primary_part(&rows, 3, 5, 3).unwrap(), Vec::<BigInt>::new());
    }

    #[test]
    fn hidden_divisor_detected() {
        let huge = 1i64 << 62;
        let rows: Vec<Row<i64>> = vec![vec![(0, huge)]];
        assert_eq!(p_primary_part(&rows, 1, 2, 1), None);
    }

    #[test]
    fn exponent_bound() {
        assert_eq!(max_exponent(2), 61);
        assert!(3u128.pow(max_exponent(3)) < 1 << 62);
    }
}
