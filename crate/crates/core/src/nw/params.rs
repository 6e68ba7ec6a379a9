use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::NwError;
use crate::algebra::bertrand_prime_big;
use crate::numeric::{floor_big, ln_big};

/// Parameters of the hard polynomial for a given `mu` and degree `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NWParams {
    pub mu: f64,
    pub n: u64,
    pub delta: f64,
    pub gamma: f64,
    /// Smallest prime in `(n^{1+gamma}, 2 n^{1+gamma}]`.
    pub psi: BigUint,
    /// Number of variables, `n * psi`.
    pub big_n: BigUint,
    pub rho: f64,
    /// Real-valued degree bound before rounding.
    pub d_raw: f64,
    /// `max(1, ceil(d_raw))`; univariates have degree at most `d - 1`.
    pub d: u64,
}

/// `delta = (1 - mu) / 2` and `gamma = (2 (mu + delta) + 1) / (1 - mu - delta)`.
pub fn delta_gamma(mu: f64) -> (f64, f64) {
    let delta = (1.0 - mu) / 2.0;
    let gamma = (2.0 * (mu + delta) + 1.0) / (1.0 - mu - delta);
    (delta, gamma)
}

/// `x^e` as a big integer, exact when `e` is (numerically) an integer.
fn real_power_floor(x: u64, e: f64) -> BigUint {
    let rounded = e.round();
    if (e - rounded).abs() < 1e-9 && rounded >= 0.0 {
        BigUint::from(x).pow(rounded as u32)
    } else {
        floor_big((x as f64).powf(e))
    }
}

pub fn derive_nw_params(mu: f64, n: u64) -> Result<NWParams, NwError> {
    if !(0.0..1.0).contains(&mu) {
        return Err(NwError::Precondition(format!(
            "mu = {mu} is outside [0, 1)"
        )));
    }
    if n < 2 {
        return Err(NwError::Precondition(format!("n = {n} is below 2")));
    }
    let (delta, gamma) = delta_gamma(mu);
    // A prime p > x is the same as p > floor(x); p <= 2x the same as p <= floor(2x).
    let lo = real_power_floor(n, 1.0 + gamma);
    let exact = ((1.0 + gamma) - (1.0 + gamma).round()).abs() < 1e-9;
    let hi = if exact {
        &lo * 2u32
    } else {
        floor_big(2.0 * (n as f64).powf(1.0 + gamma))
    };
    let psi = bertrand_prime_big(&lo, &hi)?;
    let big_n = &psi * n;
    let rho = (mu + delta) * ln_big(&big_n) / (n as f64).ln();
    let d_raw = (gamma + rho) / (2.0 * (1.0 + gamma)) * n as f64;
    let d = (d_raw.ceil() as u64).max(1);
    Ok(NWParams {
        mu,
        n,
        delta,
        gamma,
        psi,
        big_n,
        rho,
        d_raw,
        d,
    })
}

impl NWParams {
    /// `psi` as a machine integer, when it fits.
    pub fn psi_u64(&self) -> Option<u64> {
        self.psi.to_u64()
    }

    /// `psi^D`, the number of monomials.
    pub fn monomial_count(&self) -> BigUint {
        num_traits::pow(self.psi.clone(), self.d as usize)
    }

    /// `key=value` lines in a fixed order.
    pub fn to_report(&self) -> String {
        format!(
            "mu={}\nn={}\ndelta={}\ngamma={}\npsi={}\nN={}\nrho={:.6}\nD_raw={:.6}\nD={}\n",
            self.mu,
            self.n,
            self.delta,
            self.gamma,
            self.psi,
            self.big_n,
            self.rho,
            self.d_raw,
            self.d
        )
    }
}
