//! Elementary symmetric polynomials, root multiplicities and power-series
//! roots.

use super::field::FieldElem;
use super::poly::{HomMode, SparsePolynomial};
use super::AlgebraError;

/// `ESYM_l` of polynomial inputs.
///
/// Coefficient extraction of `prod_i (1 + Y_i t)` by the prefix-by-degree
/// dynamic program; no subset is ever enumerated. `l > inputs.len()` gives
/// zero. With no inputs the result lives in `num_vars` variables over
/// `field`, otherwise in the inputs' ring.
pub fn esym(
    inputs: &[SparsePolynomial],
    l: usize,
    num_vars: usize,
    field: super::Field,
) -> Result<SparsePolynomial, AlgebraError> {
    let all = esym_upto(inputs, l, None, num_vars, field)?;
    Ok(all.into_iter().nth(l).expect("table has l + 1 entries"))
}

/// `[ESYM_0, ..., ESYM_max_l]`, optionally dropping terms above
/// `max_degree` during the products.
pub fn esym_upto(
    inputs: &[SparsePolynomial],
    max_l: usize,
    max_degree: Option<u32>,
    num_vars: usize,
    field: super::Field,
) -> Result<Vec<SparsePolynomial>, AlgebraError> {
    let (num_vars, field) = match inputs.first() {
        Some(p) => (p.num_vars(), p.field()),
        None => (num_vars, field),
    };
    let mut table = vec![SparsePolynomial::zero(num_vars, field); max_l + 1];
    table[0] = SparsePolynomial::one(num_vars, field);
    for (i, y) in inputs.iter().enumerate() {
        let top = (i + 1).min(max_l);
        for l in (1..=top).rev() {
            let prod = table[l - 1].mul_truncated(y, max_degree)?;
            table[l] = table[l].try_add(&prod)?;
        }
    }
    Ok(table)
}

/// For a univariate `R` (variable 0) with `R(a) = 0`, the smallest `j` such
/// that `R^(j)(a) = 0` and `R^(j+1)(a) != 0`.
pub fn deriv_order_at_root(r: &SparsePolynomial, a: &FieldElem) -> Result<u32, AlgebraError> {
    if r.num_vars() != 1 {
        return Err(AlgebraError::DimensionMismatch {
            expected: 1,
            found: r.num_vars(),
        });
    }
    if r.is_zero() {
        return Err(AlgebraError::Degenerate("R is identically zero".into()));
    }
    let point = [a.clone()];
    if !r.eval(&point)?.is_zero() {
        return Err(AlgebraError::PreconditionViolated(format!(
            "R({a}) is not zero"
        )));
    }
    let deg = r.degree().unwrap_or(0);
    let mut current = r.clone();
    for j in 0..deg {
        let next = current.derivative(0, 1)?;
        if !next.eval(&point)?.is_zero() {
            return Ok(j);
        }
        current = next;
    }
    // A nonzero polynomial of degree `deg` has a nonzero `deg`-th derivative.
    unreachable!("nonzero top derivative")
}

/// Truncated power-series root of `P(X, Y) = 0` through `Y(0) = y0`.
///
/// `Y` is the last variable of `p`. Returns `Hom^{<=t}[f]` where `f` is the
/// unique series with `f(0) = y0` and `P(X, f) = 0`, computed by Newton
/// iteration with degree-truncated arithmetic. The result lives in the same
/// ring as `p` and does not involve `Y`.
pub fn root_lift(
    p: &SparsePolynomial,
    y0: &FieldElem,
    t: u32,
) -> Result<SparsePolynomial, AlgebraError> {
    let n = p.num_vars();
    if n == 0 {
        return Err(AlgebraError::PreconditionViolated(
            "P has no Y variable".into(),
        ));
    }
    let y = n - 1;
    let field = p.field();
    let origin: Vec<FieldElem> = (0..n)
        .map(|v| if v == y { y0.clone() } else { field.zero() })
        .collect();
    if !p.eval(&origin)?.is_zero() {
        return Err(AlgebraError::PreconditionViolated(format!(
            "P(0, {y0}) is not zero"
        )));
    }
    let dp = p.derivative(y, 1)?;
    let slope = dp.eval(&origin)?;
    if slope.is_zero() {
        return Err(AlgebraError::NonSimpleRoot);
    }

    let mut f = SparsePolynomial::constant(n, y0.clone());
    let mut precision = 1u32; // f is exact modulo degree >= precision
    let mut rounds = 0;
    while precision <= t {
        precision = (2 * precision).min(t + 1);
        let cap = Some(precision - 1);
        let residual = p.substitute_truncated(y, &f, cap)?;
        if residual.is_zero() {
            continue;
        }
        let slope_series = dp.substitute_truncated(y, &f, cap)?;
        let inv = series_inverse(&slope_series, precision - 1)?;
        let step = residual.mul_truncated(&inv, cap)?;
        f = f.try_sub(&step)?;
        rounds += 1;
        debug_assert!(rounds < 64);
    }
    Ok(f.hom_component(t, HomMode::Le))
}

/// Inverse of a power series with nonzero constant term, modulo degree
/// `> t`.
pub fn series_inverse(u: &SparsePolynomial, t: u32) -> Result<SparsePolynomial, AlgebraError> {
    let c = u.constant_term();
    let c_inv = c.inv()?;
    let n = u.num_vars();
    // u = c (1 + w) with w free of constants; 1/(1+w) = sum_k (-w)^k.
    let w = u
        .scale(&c_inv)?
        .try_sub(&SparsePolynomial::one(n, u.field()))?;
    let neg_w = -&w;
    let mut acc = SparsePolynomial::one(n, u.field());
    let mut power = SparsePolynomial::one(n, u.field());
    for _ in 0..t {
        power = power.mul_truncated(&neg_w, Some(t))?;
        if power.is_zero() {
            break;
        }
        acc = acc.try_add(&power)?;
    }
    acc.scale(&c_inv)
}

/// Brute-force `ESYM_l` by subset enumeration; kept for cross-checks.
#[doc(hidden)]
pub fn esym_by_subsets(
    inputs: &[SparsePolynomial],
    l: usize,
    num_vars: usize,
    field: super::Field,
) -> SparsePolynomial {
    let k = inputs.len();
    let mut acc = SparsePolynomial::zero(num_vars, field);
    if l > k {
        return acc;
    }
    for mask in 0u64..(1u64 << k) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let mut prod = SparsePolynomial::one(num_vars, field);
        for (i, y) in inputs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod = &prod * y;
            }
        }
        acc = &acc + &prod;
    }
    acc
}
