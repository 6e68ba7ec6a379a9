//! Rank of sparse row sets by incremental echelon reduction.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `2^62 - 57`, the prime used by the fast rank path.
pub const RANK_PRIME: u64 = 4_611_686_018_427_387_847;

/// Scalar arithmetic needed by the elimination.
pub trait RankArith {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

/// Arithmetic modulo a prime below `2^63`.
pub struct ModArith(pub u64);

impl RankArith for ModArith {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.0 - b) % self.0
    }

    fn inv(&self, a: &u64) -> u64 {
        let (mut base, mut exp, mut acc) = (*a as u128, self.0 - 2, 1u128);
        let m = self.0 as u128;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as u64
    }
}

pub struct RationalArith;

impl RankArith for RationalArith {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
}

/// Reduces a rational modulo `p`; `None` if the denominator vanishes mod `p`.
pub fn rational_mod_p(r: &BigRational, p: u64) -> Option<u64> {
    let modulus = BigInt::from(p);
    let num = r.numer().mod_floor(&modulus).to_u64()?;
    let den = r.denom().mod_floor(&modulus).to_u64()?;
    if den == 0 {
        return None;
    }
    let ar = ModArith(p);
    Some(ar.mul(&num, &ar.inv(&den)))
}

/// Rank of the row space. Each row is a list of `(column, value)` pairs
/// sorted by column with no zero values and no repeated columns.
pub fn sparse_rank<A: RankArith>(arith: &A, rows: impl IntoIterator<Item = Vec<(u64, A::Elem)>>) -> usize {
    // Pivot rows keyed by leading column, normalized to a leading 1.
    let mut pivots: HashMap<u64, Vec<(u64, A::Elem)>> = HashMap::new();
    for mut row in rows {
        loop {
            let Some((lead, lead_val)) = row.first().cloned() else {
                break;
            };
            match pivots.get(&lead) {
                Some(pivot) => row = axpy(arith, &row, &lead_val, pivot),
                None => {
                    let inv = arith.inv(&lead_val);
                    let normalized = row.iter().map(|(c, v)| (*c, arith.mul(v, &inv))).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `row - factor * pivot`, merged by column.
fn axpy<A: RankArith>(
    arith: &A,
    row: &[(u64, A::Elem)],
    factor: &A::Elem,
    pivot: &[(u64, A::Elem)],
) -> Vec<(u64, A::Elem)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_pivot = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_pivot {
            let v = arith.sub(&arith.zero(), &arith.mul(factor, &pivot[j].1));
            if !arith.is_zero(&v) {
                out.push((pivot[j].0, v));
            }
            j += 1;
        } else {
            let v = arith.sub(&row[i].1, &arith.mul(factor, &pivot[j].1));
            if !arith.is_zero(&v) {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank of small dense integer matrices over the rationals, kept for
/// cross-checks.
#[doc(hidden)]
pub fn dense_rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = BigRational::one() / &m[rank][c];
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] * &inv;
                for cc in c..cols {
                    let delta = &f * &m[rank][cc];
                    m[r][cc] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}
