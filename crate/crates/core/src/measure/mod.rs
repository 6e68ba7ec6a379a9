//! Projected shifted partial derivatives, random restrictions and the
//! numeric side of the lower-bound calculation.
//!
//! `Phi_{M,m}(P)` is the dimension of the span of
//! `sigma(x^S * d_gamma P)` over `gamma` in `M` and multilinear shifts `x^S`
//! of degree `m` over all `N` variables, where `sigma` keeps multilinear
//! terms only. Monomials are encoded as `u64` bitmasks, so `N <= 64`.

mod params;
mod rank;
mod ratios;
mod restriction;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, FieldElem, Monomial, SparsePolynomial};
use crate::circuit::CircuitError;
use crate::numeric::binomial;

pub use params::{derive_measure_params, DerivedMeasureParams, DEFAULT_EPS};
pub use rank::{dense_rational_rank, rational_mod_p, sparse_rank, ModArith, RankArith, RationalArith, RANK_PRIME};
pub use ratios::{appendix_ratios, approx_check, ApproxReport, AppendixRatios, RatioMethod, RatioOverrides};
pub use restriction::{
    bad_support_monomials, restriction_rng, sample_restriction, survival_experiment, BadMonomials, SurvivalReport,
    TrialRecord,
};

/// Default limit on `|M| * C(N, m)`, the number of generated rows.
pub const DEFAULT_ROW_CAP: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{rows} rows exceed the cap {cap}")]
    CapExceeded { rows: String, cap: u64 },
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Which derivatives form the set `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivativeSet {
    /// Every multilinear monomial of degree `r`.
    AllMultilinear,
    Explicit(Vec<Monomial>),
}

/// How the rank is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMode {
    /// Modulo a fixed 62-bit prime: a lower bound on the rational rank.
    Prime,
    /// Exact rational elimination.
    Exact,
    /// Both; the report is exact and keeps the modular rank in
    /// `modular_phi` for comparison.
    CrossCheck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureParams {
    pub r: u32,
    pub m: u32,
    pub derivatives: DerivativeSet,
    pub rank: RankMode,
    pub row_cap: u64,
}

impl MeasureParams {
    pub fn new(r: u32, m: u32) -> Self {
        MeasureParams {
            r,
            m,
            derivatives: DerivativeSet::AllMultilinear,
            rank: RankMode::Exact,
            row_cap: DEFAULT_ROW_CAP,
        }
    }

    pub fn with_derivatives(mut self, derivatives: Vec<Monomial>) -> Self {
        self.derivatives = DerivativeSet::Explicit(derivatives);
        self
    }

    pub fn with_rank(mut self, rank: RankMode) -> Self {
        self.rank = rank;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureReport {
    pub phi: usize,
    /// `|M| * C(N, m)`, counting rows that vanish.
    pub rows: u64,
    /// Distinct multilinear monomials occurring in some row.
    pub cols: usize,
    /// False when only the modular rank (a lower bound) was computed.
    pub exact: bool,
    pub num_vars: usize,
    pub r: u32,
    pub m: u32,
    pub derivative_count: usize,
    /// The modular rank, when a cross-check computed both.
    pub modular_phi: Option<usize>,
    pub bound: Option<BigUint>,
}

impl fmt::Display for MeasureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = self.bound.as_ref().map_or_else(|| "none".to_string(), |b| b.to_string());
        write!(
            f,
            "phi={} rows={} cols={} bound={} params=N:{},r:{},m:{},M:{},exact:{}",
            self.phi, self.rows, self.cols, bound, self.num_vars, self.r, self.m, self.derivative_count, self.exact
        )
    }
}

fn mask_of(m: &Monomial) -> u64 {
    m.support().fold(0u64, |acc, v| acc | 1 << v)
}

/// All `k`-subsets of `0..n` as bitmasks, in increasing numeric order.
pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    if k == 64 {
        return vec![u64::MAX];
    }
    let mut x: u64 = (1u64 << k) - 1;
    loop {
        out.push(x);
        // Gosper's hack.
        let c = x & x.wrapping_neg();
        let r = x.wrapping_add(c);
        if r == 0 || r > limit {
            break;
        }
        x = (((r ^ x) >> 2) / c) | r;
        if x > limit {
            break;
        }
    }
    out
}

enum Coeffs {
    Rational(Vec<Vec<(u64, BigRational)>>),
    Residue(Vec<Vec<(u64, u64)>>, u64),
}

/// `Phi_{M,m}(P)`.
pub fn psd_dimension(p: &SparsePolynomial, params: &MeasureParams) -> Result<MeasureReport, MeasureError> {
    let n = p.num_vars();
    if n > 64 {
        return Err(MeasureError::Invalid(format!("{n} variables; at most 64 supported")));
    }
    let derivatives: Vec<Monomial> = match &params.derivatives {
        DerivativeSet::AllMultilinear => subsets_of_size(n, params.r as usize)
            .into_iter()
            .map(|mask| Monomial::multilinear((0..n).filter(|v| mask >> v & 1 == 1)))
            .collect(),
        DerivativeSet::Explicit(list) => {
            for g in list {
                if !g.is_multilinear() || g.degree() != params.r || g.max_var().is_some_and(|v| v >= n) {
                    return Err(MeasureError::Invalid(format!(
                        "derivative {g} is not a multilinear degree-{} monomial in {n} variables",
                        params.r
                    )));
                }
            }
            list.clone()
        }
    };
    let shift_count = binomial(&BigUint::from(n), params.m as u64);
    let rows_big = &shift_count * derivatives.len();
    if rows_big > BigUint::from(params.row_cap) {
        return Err(MeasureError::CapExceeded {
            rows: rows_big.to_string(),
            cap: params.row_cap,
        });
    }
    let rows_total = u64::try_from(&rows_big).expect("below cap");
    let shifts = subsets_of_size(n, params.m as usize);

    // Multilinear part of each derivative, as (mask, coefficient).
    let mut parts: Vec<Vec<(u64, FieldElem)>> = Vec::new();
    for g in &derivatives {
        let d = p.derivative_monomial(g)?;
        let part: Vec<(u64, FieldElem)> = d
            .terms()
            .filter(|(m, _)| m.is_multilinear())
            .map(|(m, c)| (mask_of(m), c.clone()))
            .collect();
        if !part.is_empty() {
            parts.push(part);
        }
    }

    let mut columns = BTreeSet::new();
    let mut rows: Vec<Vec<(u64, FieldElem)>> = Vec::new();
    for part in &parts {
        for &s in &shifts {
            let mut row: Vec<(u64, FieldElem)> = part
                .iter()
                .filter(|(t, _)| t & s == 0)
                .map(|(t, c)| (t | s, c.clone()))
                .collect();
            if row.is_empty() {
                continue;
            }
            row.sort_by_key(|(c, _)| *c);
            columns.extend(row.iter().map(|(c, _)| *c));
            rows.push(row);
        }
    }

    let coeffs = to_rank_rows(&rows, p.field(), params.rank)?;
    let mut modular_phi = None;
    let (phi, exact) = match coeffs {
        Coeffs::Residue(res, modulus) => {
            let modular = sparse_rank(&ModArith(modulus), res);
            match (p.field(), params.rank) {
                (Field::Prime(_), _) => (modular, true),
                (_, RankMode::Prime) => (modular, false),
                (_, _) => {
                    let exact_rows = rational_rows(&rows);
                    let exact = sparse_rank(&RationalArith, exact_rows);
                    debug_assert!(modular <= exact, "modular rank exceeds rational rank");
                    modular_phi = Some(modular);
                    (exact, true)
                }
            }
        }
        Coeffs::Rational(rat) => (sparse_rank(&RationalArith, rat), true),
    };
    Ok(MeasureReport {
        phi,
        rows: rows_total,
        cols: columns.len(),
        exact,
        num_vars: n,
        r: params.r,
        m: params.m,
        derivative_count: derivatives.len(),
        modular_phi,
        bound: None,
    })
}

fn rational_rows(rows: &[Vec<(u64, FieldElem)>]) -> Vec<Vec<(u64, BigRational)>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|(c, v)| (*c, v.as_rational().expect("rational field").clone()))
                .collect()
        })
        .collect()
}

fn to_rank_rows(rows: &[Vec<(u64, FieldElem)>], field: Field, mode: RankMode) -> Result<Coeffs, MeasureError> {
    if let Field::Prime(q) = field {
        let res = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, v)| match v {
                        FieldElem::Residue { value, .. } => (*c, *value),
                        FieldElem::Rational(_) => unreachable!("field checked"),
                    })
                    .collect()
            })
            .collect();
        return Ok(Coeffs::Residue(res, q));
    }
    if mode == RankMode::Exact {
        return Ok(Coeffs::Rational(rational_rows(rows)));
    }
    let mut res = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for (c, v) in row {
            match rational_mod_p(v.as_rational().expect("rational field"), RANK_PRIME) {
                // A zero residue only lowers the modular rank; keep the row sparse.
                Some(0) => {}
                Some(x) => out.push((*c, x)),
                // A denominator divisible by the prime: fall back to exact rank.
                None => return Ok(Coeffs::Rational(rational_rows(rows))),
            }
        }
        res.push(out);
    }
    Ok(Coeffs::Residue(res, RANK_PRIME))
}

/// Outcome of comparing `Phi(alpha P + beta Q)` with `Phi(P) + Phi(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubadditivityReport {
    pub phi_combination: usize,
    pub phi_p: usize,
    pub phi_q: usize,
    pub holds: bool,
}

pub fn subadditivity_check(
    p: &SparsePolynomial,
    q: &SparsePolynomial,
    alpha: &FieldElem,
    beta: &FieldElem,
    params: &MeasureParams,
) -> Result<SubadditivityReport, MeasureError> {
    let combo = p.scale(alpha)?.try_add(&q.scale(beta)?)?;
    let phi_combination = psd_dimension(&combo, params)?.phi;
    let phi_p = psd_dimension(p, params)?.phi;
    let phi_q = psd_dimension(q, params)?.phi;
    Ok(SubadditivityReport {
        phi_combination,
        phi_p,
        phi_q,
        holds: phi_combination <= phi_p + phi_q,
    })
}

/// `top_fanin * C(n + r, r) * C(N, m + r s)`, valid when `2 (m + r s) <= N`.
pub fn depth4_upper_bound(
    top_fanin: u64,
    n: u64,
    r: u64,
    s: u64,
    big_n: &BigUint,
    m: &BigUint,
) -> Result<BigUint, MeasureError> {
    let shifted = m + BigUint::from(r * s);
    if &shifted * 2u32 > *big_n {
        return Err(MeasureError::OutOfRegime(format!(
            "m + r s = {shifted} exceeds N/2 for N = {big_n}"
        )));
    }
    let shifted = u64::try_from(&shifted)
        .map_err(|_| MeasureError::OutOfRegime("m + r s does not fit in 64 bits".into()))?;
    Ok(BigUint::from(top_fanin) * binomial(&BigUint::from(n + r), r) * binomial(big_n, shifted))
}
