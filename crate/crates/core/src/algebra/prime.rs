//! Deterministic primality testing and Bertrand-window prime search.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::field::pow_mod;
use super::AlgebraError;

/// Witnesses that make Miller-Rabin deterministic for every `u64`.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// The first 13 primes are a deterministic witness set below 3.3 * 10^24;
/// the remaining ones only strengthen the test for larger inputs.
const BIG_WITNESSES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &U64_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &U64_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin on arbitrary-size integers.
///
/// Exact for `n < 3.3 * 10^24`; above that a composite passing all 25 prime
/// bases is not known, but the answer is a strong-probable-prime verdict.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &BIG_WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let r = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> r;
    'witness: for &a in &BIG_WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p` with `lo < p <= hi`.
pub fn bertrand_prime(lo: u64, hi: u64) -> Result<u64, AlgebraError> {
    let mut candidate = lo.checked_add(1).ok_or(AlgebraError::NoPrimeInRange {
        lo: lo.to_string(),
        hi: hi.to_string(),
    })?;
    while candidate <= hi {
        if is_prime_u64(candidate) {
            return Ok(candidate);
        }
        candidate += 1;
    }
    Err(AlgebraError::NoPrimeInRange {
        lo: lo.to_string(),
        hi: hi.to_string(),
    })
}

/// Big-integer form of [`bertrand_prime`].
pub fn bertrand_prime_big(lo: &BigUint, hi: &BigUint) -> Result<BigUint, AlgebraError> {
    if let (Some(l), Some(h)) = (lo.to_u64(), hi.to_u64()) {
        return bertrand_prime(l, h).map(BigUint::from);
    }
    let mut candidate = lo + 1u32;
    while &candidate <= hi {
        if is_prime_big(&candidate) {
            return Ok(candidate);
        }
        candidate += 1u32;
    }
    Err(AlgebraError::NoPrimeInRange {
        lo: lo.to_string(),
        hi: hi.to_string(),
    })
}

/// Smallest prime `>= n`.
pub fn next_prime_at_least(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn matches_trial_division_below_ten_thousand() {
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_are_rejected() {
        // Strong pseudoprimes to small bases.
        for n in [
            2047u64,
            1_373_653,
            25_326_001,
            3_215_031_751,
            3_825_123_056_546_413_051,
        ] {
            assert!(!is_prime_u64(n), "n = {n}");
        }
        assert!(is_prime_u64(4_611_686_018_427_387_847)); // 2^62 - 57
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
    }

    #[test]
    fn bertrand_examples() {
        assert_eq!(bertrand_prime(1, 2).unwrap(), 2);
        assert_eq!(bertrand_prime(32, 64).unwrap(), 37);
        assert_eq!(bertrand_prime(100, 200).unwrap(), 101);
        assert!(bertrand_prime(24, 28).is_err());
    }

    #[test]
    fn big_primes() {
        // 2^89 - 1 is a Mersenne prime, 2^67 - 1 is not.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let m67 = (BigUint::one() << 67u32) - 1u32;
        assert!(is_prime_big(&m89));
        assert!(!is_prime_big(&m67));
        let lo = BigUint::from(10u32).pow(20);
        let hi = &lo * 2u32;
        let p = bertrand_prime_big(&lo, &hi).unwrap();
        assert!(p > lo);
        // Every integer strictly between lo and p is composite.
        let mut c = &lo + 1u32;
        while c < p {
            assert!(!is_prime_big(&c));
            c += 1u32;
        }
    }
}
