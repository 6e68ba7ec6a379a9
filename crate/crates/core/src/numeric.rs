//! Big-integer helpers shared by the parameter derivations.

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Natural logarithm of a big integer, accurate to `f64` precision.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(f) = n.to_f64() {
            return f.ln();
        }
    }
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `floor(x)` for a finite non-negative float, as a big integer.
pub fn floor_big(x: f64) -> BigUint {
    assert!(
        x.is_finite() && x >= 0.0,
        "floor_big needs a finite non-negative value, got {x}"
    );
    BigUint::from_f64(x.floor()).expect("finite")
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    let k_big = BigUint::from(k);
    if &k_big > n {
        return BigUint::zero();
    }
    let k = {
        let rest = n - &k_big;
        match rest.to_u64() {
            Some(r) if r < k => r,
            _ => k,
        }
    };
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `ln C(n, k)` from the exact value (for moderate `n`).
pub fn ln_binomial_exact(n: &BigUint, k: u64) -> f64 {
    ln_big(&binomial(n, k))
}
