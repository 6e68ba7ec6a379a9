use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use super::MeasureError;
use crate::numeric::ln_big;
use crate::nw::{derive_nw_params, NWParams};

/// `sqrt(0.001)`, so that `eps1 * eps2 = 0.001` and `r s / n <= 0.001`.
pub const DEFAULT_EPS: f64 = 0.031_622_776_601_683_79;

/// Parameters of the lower-bound argument for `NW_{n, mu}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedMeasureParams {
    pub nw: NWParams,
    pub eps1: f64,
    pub eps2: f64,
    /// Derivative order.
    pub r: u64,
    /// Support bound after restriction.
    pub s: u64,
    /// Shift degree.
    pub m: BigUint,
    /// `ln p` where `p = N^{-(mu + delta)}` is the survival probability.
    pub ln_p: f64,
}

impl DerivedMeasureParams {
    pub fn big_n(&self) -> &BigUint {
        &self.nw.big_n
    }

    pub fn n(&self) -> u64 {
        self.nw.n
    }

    /// The survival probability as a float; underflows to 0 for huge `N`.
    pub fn p(&self) -> f64 {
        self.ln_p.exp()
    }

    pub fn to_report(&self) -> String {
        format!(
            "{}eps1={}\neps2={}\nr={}\ns={}\nm={}\nln_p={}\np={:e}\n",
            self.nw.to_report(),
            self.eps1,
            self.eps2,
            self.r,
            self.s,
            self.m,
            self.ln_p,
            self.p()
        )
    }
}

/// `floor(eps sqrt(n))`, clamped at zero.
pub(crate) fn floor_eps_sqrt(eps: f64, n: u64) -> u64 {
    (eps * (n as f64).sqrt()).floor().max(0.0) as u64
}

/// `floor(N/2 * (1 - r ln n / n))`, exact in `N`.
pub(crate) fn shift_degree(big_n: &BigUint, n: u64, r: u64) -> Result<BigUint, MeasureError> {
    let factor = 1.0 - r as f64 * (n as f64).ln() / n as f64;
    if !(0.0..=1.0).contains(&factor) {
        return Err(MeasureError::OutOfRegime(format!(
            "r ln n / n = {} must lie in [0, 1]",
            1.0 - factor
        )));
    }
    let factor = BigRational::from_float(factor).expect("finite");
    let half_n = BigRational::new(big_n.clone().into(), 2.into());
    let m = (half_n * factor).floor().to_integer();
    Ok(m.to_biguint().unwrap_or_else(BigUint::zero))
}

/// Derives `r`, `s`, `m` and `p` for `NW_{n, mu}`; `eps` overrides
/// `(eps1, eps2)`, which default to [`DEFAULT_EPS`].
pub fn derive_measure_params(
    mu: f64,
    n: u64,
    eps: Option<(f64, f64)>,
) -> Result<DerivedMeasureParams, MeasureError> {
    let (eps1, eps2) = eps.unwrap_or((DEFAULT_EPS, DEFAULT_EPS));
    if !(eps1 >= 0.0 && eps2 >= 0.0 && eps1.is_finite() && eps2.is_finite()) {
        return Err(MeasureError::Invalid(format!("eps = ({eps1}, {eps2})")));
    }
    let nw = derive_nw_params(mu, n).map_err(|e| MeasureError::Invalid(e.to_string()))?;
    let r = floor_eps_sqrt(eps1, n);
    let s = floor_eps_sqrt(eps2, n);
    let m = shift_degree(&nw.big_n, n, r)?;
    assert!(&m * 2u32 <= nw.big_n, "m exceeds N/2");
    let ln_p = -(nw.mu + nw.delta) * ln_big(&nw.big_n);
    Ok(DerivedMeasureParams {
        nw,
        eps1,
        eps2,
        r,
        s,
        m,
        ln_p,
    })
}
