//! Sums of products of few-variable polynomials.
//!
//! A [`FewVarCircuit`] computes `sum_i alpha_i prod_j Q_ij` where every
//! factor `Q_ij` depends on at most `s` of the `N` variables. Factors store
//! their polynomial over local indices `0..support.len()`; `support[v]` is
//! the global variable behind local variable `v`.

mod audit;
mod homog;
mod io;
mod random;
mod transform;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{AlgebraError, Field, FieldElem, SparsePolynomial};

pub use audit::{audit_transforms, TransformAudit};
pub use homog::{HomogDecomposition, HomogTerm};
pub use random::{random_circuit, RandomCircuitConfig};
pub use transform::{lagrange_basis, RestrictionMask};

/// Default bound on the estimated number of terms produced by [`FewVarCircuit::expand`].
pub const DEFAULT_EXPAND_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("circuit too large to expand: estimated {estimate} terms, cap {cap}")]
    TooLarge { estimate: u128, cap: usize },
    #[error("missing metadata: {0}")]
    MissingMetadata(&'static str),
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl CircuitError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        CircuitError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// One factor `Q_ij`: a polynomial in the variables listed in `support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPoly {
    support: Vec<usize>,
    poly: SparsePolynomial,
}

impl FactorPoly {
    /// `poly` must have exactly `support.len()` variables; support entries
    /// must be distinct.
    pub fn new(support: Vec<usize>, poly: SparsePolynomial) -> Result<Self, CircuitError> {
        if poly.num_vars() != support.len() {
            return Err(CircuitError::InvalidFactor(format!(
                "polynomial has {} variables but support lists {}",
                poly.num_vars(),
                support.len()
            )));
        }
        let distinct: BTreeSet<_> = support.iter().collect();
        if distinct.len() != support.len() {
            return Err(CircuitError::InvalidFactor(format!(
                "repeated variable in support {support:?}"
            )));
        }
        Ok(FactorPoly { support, poly })
    }

    /// Builds a factor from a polynomial in the global ring, using the
    /// variables it actually mentions as the support.
    pub fn from_global(p: &SparsePolynomial) -> Self {
        let support: Vec<usize> = p.vars_used().into_iter().collect();
        let poly = p
            .remap_vars(support.len(), |v| support.iter().position(|&g| g == v))
            .expect("support covers every used variable");
        FactorPoly { support, poly }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn poly(&self) -> &SparsePolynomial {
        &self.poly
    }

    pub fn field(&self) -> Field {
        self.poly.field()
    }

    /// The factor as a polynomial over all `num_vars` variables.
    pub fn to_global(&self, num_vars: usize) -> Result<SparsePolynomial, AlgebraError> {
        self.poly
            .remap_vars(num_vars, |v| self.support.get(v).copied())
    }

    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, AlgebraError> {
        let local: Vec<FieldElem> = self.support.iter().map(|&g| point[g].clone()).collect();
        self.poly.eval(&local)
    }

    pub(crate) fn local_index(&self, global: usize) -> Option<usize> {
        self.support.iter().position(|&g| g == global)
    }

    pub(crate) fn with_poly(&self, poly: SparsePolynomial) -> Self {
        debug_assert_eq!(poly.num_vars(), self.support.len());
        FactorPoly {
            support: self.support.clone(),
            poly,
        }
    }
}

/// `alpha * prod_j Q_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitTerm {
    pub scale: FieldElem,
    pub factors: Vec<FactorPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FewVarCircuit {
    num_vars: usize,
    field: Field,
    declared_s: usize,
    k: Option<u32>,
    terms: Vec<CircuitTerm>,
}

/// Outcome of checking a circuit against the size constraints of the class
/// handled by the hitting-set construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub top_fanin: usize,
    pub k: Option<u32>,
    pub max_fanin: usize,
    pub max_support: usize,
    pub top_fanin_ok: bool,
    pub k_ok: bool,
    pub fanin_ok: bool,
    pub support_ok: bool,
}

impl ClassReport {
    pub fn all_ok(&self) -> bool {
        self.top_fanin_ok && self.k_ok && self.fanin_ok && self.support_ok
    }
}

impl FewVarCircuit {
    pub fn new(
        num_vars: usize,
        field: Field,
        declared_s: usize,
        k: Option<u32>,
        terms: Vec<CircuitTerm>,
    ) -> Result<Self, CircuitError> {
        for term in &terms {
            if term.scale.field() != field {
                return Err(AlgebraError::FieldMismatch {
                    left: field,
                    right: term.scale.field(),
                }
                .into());
            }
            for f in &term.factors {
                if f.field() != field {
                    return Err(AlgebraError::FieldMismatch {
                        left: field,
                        right: f.field(),
                    }
                    .into());
                }
                if f.support.len() > declared_s {
                    return Err(CircuitError::InvalidFactor(format!(
                        "support {:?} exceeds s = {declared_s}",
                        f.support
                    )));
                }
                if let Some(&v) = f.support.iter().find(|&&v| v >= num_vars) {
                    return Err(AlgebraError::VariableOutOfRange { var: v, num_vars }.into());
                }
            }
        }
        Ok(FewVarCircuit {
            num_vars,
            field,
            declared_s,
            k,
            terms,
        })
    }

    pub fn zero(num_vars: usize, field: Field, declared_s: usize, k: Option<u32>) -> Self {
        FewVarCircuit {
            num_vars,
            field,
            declared_s,
            k,
            terms: Vec::new(),
        }
    }

    /// Internal constructor for transforms that preserve the invariants.
    pub(crate) fn with_terms(&self, terms: Vec<CircuitTerm>) -> Self {
        FewVarCircuit {
            terms,
            ..self.clone_header()
        }
    }

    fn clone_header(&self) -> Self {
        FewVarCircuit {
            num_vars: self.num_vars,
            field: self.field,
            declared_s: self.declared_s,
            k: self.k,
            terms: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn declared_s(&self) -> usize {
        self.declared_s
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn set_k(&mut self, k: Option<u32>) {
        self.k = k;
    }

    pub fn terms(&self) -> &[CircuitTerm] {
        &self.terms
    }

    /// Top fan-in `T`.
    pub fn top_fanin(&self) -> usize {
        self.terms.len()
    }

    /// Product fan-in `d`; with ragged products this is the maximum.
    pub fn max_fanin(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.factors.len())
            .max()
            .unwrap_or(0)
    }

    pub fn max_support(&self) -> usize {
        self.factors().map(|f| f.support.len()).max().unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = &FactorPoly> {
        self.terms.iter().flat_map(|t| t.factors.iter())
    }

    /// Upper bound on the total degree of the computed polynomial.
    pub fn formal_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .map(|f| f.poly.degree().unwrap_or(0))
                    .sum::<u32>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Pulls nonzero constant terms out of the factors so that every factor
    /// has constant term 0 or 1. Constant factors disappear into the scale.
    pub fn normalize_constants(&self) -> Result<Self, CircuitError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let mut scale = term.scale.clone();
            let mut factors = Vec::with_capacity(term.factors.len());
            for f in &term.factors {
                let c = f.poly.constant_term();
                if f.poly.is_constant() {
                    scale = scale.try_mul(&c)?;
                } else if c.is_zero() || c.is_one() {
                    factors.push(f.clone());
                } else {
                    factors.push(f.with_poly(f.poly.scale(&c.inv()?)?));
                    scale = scale.try_mul(&c)?;
                }
            }
            if scale.is_zero() {
                factors.clear();
            }
            terms.push(CircuitTerm { scale, factors });
        }
        Ok(self.with_terms(terms))
    }

    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, CircuitError> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: point.len(),
            }
            .into());
        }
        let mut acc = self.field.zero();
        for term in &self.terms {
            if term.scale.is_zero() {
                continue;
            }
            let mut prod = term.scale.clone();
            for f in &term.factors {
                prod = prod.try_mul(&f.eval(point)?)?;
                if prod.is_zero() {
                    break;
                }
            }
            acc = acc.try_add(&prod)?;
        }
        Ok(acc)
    }

    /// Number of terms the naive expansion could produce.
    pub fn expansion_estimate(&self) -> u128 {
        self.terms
            .iter()
            .map(|t| {
                t.factors.iter().fold(1u128, |acc, f| {
                    acc.saturating_mul(f.poly.len().max(1) as u128)
                })
            })
            .fold(0u128, u128::saturating_add)
    }

    pub fn expand(&self) -> Result<SparsePolynomial, CircuitError> {
        self.expand_with_cap(DEFAULT_EXPAND_CAP)
    }

    pub fn expand_with_cap(&self, cap: usize) -> Result<SparsePolynomial, CircuitError> {
        let estimate = self.expansion_estimate();
        if estimate > cap as u128 {
            return Err(CircuitError::TooLarge { estimate, cap });
        }
        let mut acc = SparsePolynomial::zero(self.num_vars, self.field);
        for term in &self.terms {
            if term.scale.is_zero() {
                continue;
            }
            let mut prod = SparsePolynomial::constant(self.num_vars, term.scale.clone());
            for f in &term.factors {
                prod = prod.try_mul(&f.to_global(self.num_vars)?)?;
                if prod.is_zero() {
                    break;
                }
            }
            acc = acc.try_add(&prod)?;
        }
        Ok(acc)
    }

    /// Checks `T < log2(N)^c`, `k < log2(N)^c`, `d < N^c` and every factor
    /// support `<= N^mu`. An undeclared `k` fails its check.
    pub fn class_check(&self, c: f64, mu: f64) -> ClassReport {
        let n = self.num_vars.max(1) as f64;
        let log_bound = n.log2().powf(c);
        let top_fanin = self.top_fanin();
        let max_fanin = self.max_fanin();
        let max_support = self.max_support();
        ClassReport {
            top_fanin,
            k: self.k,
            max_fanin,
            max_support,
            top_fanin_ok: (top_fanin as f64) < log_bound,
            k_ok: self.k.is_some_and(|k| (k as f64) < log_bound),
            fanin_ok: (max_fanin as f64) < n.powf(c),
            support_ok: (max_support as f64) <= n.powf(mu) * (1.0 + 1e-12),
        }
    }
}
