//! The two binomial ratios that drive the lower bound, and the factorial
//! approximation used to estimate them.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::params::{floor_eps_sqrt, shift_degree, DEFAULT_EPS};
use super::MeasureError;
use crate::numeric::{binomial, ln_big};
use crate::nw::derive_nw_params;

/// Largest `N` for which the ratios are evaluated from exact binomials.
pub const EXACT_RATIO_LIMIT: u64 = 1_000_000;

/// Longest telescoped sum accepted by the log path.
const MAX_TELESCOPE: u64 = 1 << 40;

/// Replaces individual derived parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RatioOverrides {
    pub eps: Option<(f64, f64)>,
    pub r: Option<u64>,
    pub s: Option<u64>,
    pub m: Option<BigUint>,
    pub method: Option<RatioMethod>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioMethod {
    /// Logarithms of exact big-integer binomials.
    Exact,
    /// Telescoped sums of `ln((N - j)/(j + 1))`.
    LogSum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixRatios {
    pub n: u64,
    pub mu: f64,
    pub big_n: BigUint,
    pub r: u64,
    pub s: u64,
    pub m: BigUint,
    pub ln_p: f64,
    pub method: RatioMethod,
    /// `ln [C(N, m+n-r) / (C(N, m+rs) C(n+r, r))]`.
    pub log_ratio_1: f64,
    /// `ln [(p/4)^r C(N, r) C(N, m) / (C(N, m+rs) C(n+r, r))]`.
    pub log_ratio_2: f64,
    /// `r ln n ((n - r - rs)/n - 1/2)`.
    pub closed_form_1: f64,
}

impl AppendixRatios {
    /// `|log_ratio_1 / closed_form_1 - 1|`.
    pub fn closed_form_rel_error(&self) -> f64 {
        (self.log_ratio_1 / self.closed_form_1 - 1.0).abs()
    }

    pub fn to_report(&self) -> String {
        format!(
            "n={}\nmu={}\nN={}\nr={}\ns={}\nm={}\nln_p={}\nmethod={:?}\nlog_ratio_1={}\nlog_ratio_2={}\nclosed_form_1={}\n",
            self.n,
            self.mu,
            self.big_n,
            self.r,
            self.s,
            self.m,
            self.ln_p,
            self.method,
            self.log_ratio_1,
            self.log_ratio_2,
            self.closed_form_1
        )
    }
}

/// `ln C(N, b) - ln C(N, a)` for `a, b <= N`, as a telescoped sum.
pub(crate) fn ln_binomial_step(big_n: &BigUint, a: &BigUint, b: &BigUint) -> Result<f64, MeasureError> {
    if a > b {
        return ln_binomial_step(big_n, b, a).map(|v| -v);
    }
    if b > big_n {
        return Err(MeasureError::OutOfRegime(format!("{b} exceeds N = {big_n}")));
    }
    let len = (b - a)
        .to_u64()
        .filter(|&l| l <= MAX_TELESCOPE)
        .ok_or_else(|| MeasureError::OutOfRegime(format!("telescoped sum from {a} to {b} is too long")))?;
    // Term j is ln(1 + x_j) with x_j = (N - 2j - 1)/(j + 1). Both parts
    // move by small integers, so f64 copies of the starting values keep full
    // relative precision unless the numerator is small, where it is exact.
    let big_n = BigInt::from(big_n.clone());
    let a = BigInt::from(a.clone());
    let diff0 = (&big_n - &a * 2u32 - 1u32).to_f64().expect("finite");
    let den0 = (&a + 1u32).to_f64().expect("finite");
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in 0..len {
        let t = t as f64;
        let term = ((diff0 - 2.0 * t) / (den0 + t)).ln_1p();
        // Neumaier summation.
        let next = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - next) + term;
        } else {
            comp += (term - next) + sum;
        }
        sum = next;
    }
    Ok(sum + comp)
}

fn ln_binomial_diff(method: RatioMethod, big_n: &BigUint, a: &BigUint, b: &BigUint) -> Result<f64, MeasureError> {
    match method {
        RatioMethod::LogSum => ln_binomial_step(big_n, a, b),
        RatioMethod::Exact => {
            if a > big_n || b > big_n {
                return Err(MeasureError::OutOfRegime(format!("binomial index exceeds N = {big_n}")));
            }
            let a = a.to_u64().expect("bounded by N");
            let b = b.to_u64().expect("bounded by N");
            Ok(ln_big(&binomial(big_n, b)) - ln_big(&binomial(big_n, a)))
        }
    }
}

/// Evaluates both ratios at the derived parameters for `NW_{n, mu}`.
pub fn appendix_ratios(n: u64, mu: f64, overrides: &RatioOverrides) -> Result<AppendixRatios, MeasureError> {
    let nw = derive_nw_params(mu, n).map_err(|e| MeasureError::Invalid(e.to_string()))?;
    let (eps1, eps2) = overrides.eps.unwrap_or((DEFAULT_EPS, DEFAULT_EPS));
    let r = floor_eps_sqrt(eps1, n);
    let s = floor_eps_sqrt(eps2, n);
    let ln_p = -(nw.mu + nw.delta) * ln_big(&nw.big_n);
    let r = overrides.r.unwrap_or(r);
    let s = overrides.s.unwrap_or(s);
    let big_n = nw.big_n.clone();
    let m = match &overrides.m {
        Some(m) => m.clone(),
        None => shift_degree(&big_n, n, r)?,
    };
    if r > n {
        return Err(MeasureError::OutOfRegime(format!("r = {r} exceeds n = {n}")));
    }
    let m_rs = &m + BigUint::from(r * s);
    let m_top = &m + BigUint::from(n - r);
    if m_rs > big_n || m_top > big_n {
        return Err(MeasureError::OutOfRegime(format!(
            "m + rs = {m_rs} or m + n - r = {m_top} exceeds N = {big_n}"
        )));
    }
    let method = overrides.method.unwrap_or(if big_n <= BigUint::from(EXACT_RATIO_LIMIT) {
        RatioMethod::Exact
    } else {
        RatioMethod::LogSum
    });

    let ln_small = ln_big(&binomial(&BigUint::from(n + r), r));
    let log_ratio_1 = ln_binomial_diff(method, &big_n, &m_rs, &m_top)? - ln_small;
    let ln_c_n_r = ln_binomial_diff(method, &big_n, &BigUint::zero(), &BigUint::from(r))?;
    let log_ratio_2 = r as f64 * (ln_p - 4f64.ln()) + ln_c_n_r - ln_binomial_diff(method, &big_n, &m, &m_rs)? - ln_small;
    let closed_form_1 = r as f64 * (n as f64).ln() * ((n as f64 - r as f64 - (r * s) as f64) / n as f64 - 0.5);

    Ok(AppendixRatios {
        n,
        mu,
        big_n,
        r,
        s,
        m,
        ln_p,
        method,
        log_ratio_1,
        log_ratio_2,
        closed_form_1,
    })
}

/// Calibrated constant in the error term of [`approx_check`].
pub const APPROX_K: f64 = 2.0;
/// Regime constant: `(f + g)^2 <= APPROX_C * a`.
pub const APPROX_C: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxReport {
    /// `ln((a + f)! / (a - g)!)`.
    pub exact: f64,
    /// `(f + g) ln a`.
    pub estimate: f64,
    pub error: f64,
    /// `K (f + g)^2 / a`.
    pub bound: f64,
    pub holds: bool,
}

/// Compares `ln((a+f)!/(a-g)!)` with `(f+g) ln a`.
pub fn approx_check(a: u64, f: u64, g: u64) -> Result<ApproxReport, MeasureError> {
    if a == 0 || g > a || f + g > a {
        return Err(MeasureError::OutOfRegime(format!("need f + g <= a, got a={a} f={f} g={g}")));
    }
    let spread = (f + g) as f64;
    if spread * spread > APPROX_C * a as f64 {
        return Err(MeasureError::OutOfRegime(format!(
            "(f + g)^2 = {} exceeds {APPROX_C} a",
            spread * spread
        )));
    }
    let product: BigUint = ((a - g + 1)..=(a + f)).map(BigUint::from).product();
    let exact = ln_big(&product);
    let estimate = spread * (a as f64).ln();
    let error = (exact - estimate).abs();
    let bound = APPROX_K * spread * spread / a as f64;
    Ok(ApproxReport {
        exact,
        estimate,
        error,
        bound,
        holds: error <= bound,
    })
}
