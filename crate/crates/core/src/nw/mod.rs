//! Nisan-Wigderson polynomials.
//!
//! Variables form an `n x psi` matrix. For each univariate `f` over
//! `GF(psi)` of degree at most `D - 1`, row `i` (0-based) picks the column
//! `f(i + 1 mod psi)`, and the polynomial is the sum of the resulting
//! products. Coefficient vectors `(c_0, ..., c_{D-1})` of `f` are enumerated
//! lexicographically with `c_0` varying slowest.

mod params;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use thiserror::Error;

use crate::algebra::{is_prime_u64, AlgebraError, Field, FieldElem, Monomial, SparsePolynomial};

pub use params::{delta_gamma, derive_nw_params, NWParams};

/// Default limit on the number of univariates enumerated by one call.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NwError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration of {count} univariates exceeds cap {cap}")]
    CapExceeded { count: String, cap: u64 },
}

/// Rows, modulus and degree bound: the part shared by every NW layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Shape {
    rows: usize,
    modulus: u64,
    d: u32,
}

impl Shape {
    fn new(rows: usize, modulus: u64, d: u32) -> Result<Self, NwError> {
        if !is_prime_u64(modulus) {
            return Err(NwError::Precondition(format!("{modulus} is not prime")));
        }
        if d < 1 || d as u64 > modulus {
            return Err(NwError::Precondition(format!(
                "need 1 <= D <= {modulus}, got D = {d}"
            )));
        }
        if rows as u64 > modulus {
            return Err(NwError::Precondition(format!(
                "{rows} rows need {rows} distinct evaluation points but the field has {modulus}"
            )));
        }
        Ok(Shape { rows, modulus, d })
    }

    fn count(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.modulus), self.d as usize)
    }

    fn check_cap(&self, cap: u64) -> Result<(), NwError> {
        let count = self.count();
        if count > BigUint::from(cap) {
            return Err(NwError::CapExceeded {
                count: count.to_string(),
                cap,
            });
        }
        Ok(())
    }

    /// Calls `visit` with the column chosen in each row, once per univariate.
    fn for_each_univariate(&self, mut visit: impl FnMut(&[u64])) {
        let q = self.modulus;
        let d = self.d as usize;
        let points: Vec<u64> = (0..self.rows).map(|i| (i as u64 + 1) % q).collect();
        let mut coeffs = vec![0u64; d];
        let mut cols = vec![0u64; self.rows];
        loop {
            for (col, &z) in cols.iter_mut().zip(&points) {
                // Horner in u128 to stay exact for 64-bit moduli.
                *col = coeffs
                    .iter()
                    .rev()
                    .fold(0u128, |acc, &c| (acc * z as u128 + c as u128) % q as u128)
                    as u64;
            }
            visit(&cols);
            // Odometer with c_{D-1} fastest.
            let mut pos = d;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                coeffs[pos] += 1;
                if coeffs[pos] < q {
                    break;
                }
                coeffs[pos] = 0;
            }
        }
    }
}

/// An NW polynomial on the standard `n x psi` variable matrix, with global
/// index `i * psi + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NWInstance {
    shape: Shape,
    params: Option<NWParams>,
}

/// Aggregate outcome of [`NWInstance::check_properties`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NWPropertyReport {
    pub monomial_count: u64,
    pub expected_count: u64,
    pub distinct: bool,
    pub all_multilinear: bool,
    pub all_degree_n: bool,
    pub one_per_row: bool,
    pub max_pair_intersection: usize,
    pub intersection_bound: usize,
    /// First pair of monomial positions exceeding the intersection bound.
    pub violating_pair: Option<(usize, usize)>,
}

impl NWPropertyReport {
    pub fn passed(&self) -> bool {
        self.monomial_count == self.expected_count
            && self.distinct
            && self.all_multilinear
            && self.all_degree_n
            && self.one_per_row
            && self.violating_pair.is_none()
    }
}

impl NWInstance {
    /// Generalized mode: free `n`, prime `psi` and degree bound `d`.
    pub fn new(n: usize, psi: u64, d: u32) -> Result<Self, NwError> {
        Ok(NWInstance {
            shape: Shape::new(n, psi, d)?,
            params: None,
        })
    }

    /// The instance described by derived parameters; `psi` must fit in 64 bits.
    pub fn from_params(params: &NWParams) -> Result<Self, NwError> {
        let psi = params.psi_u64().ok_or_else(|| {
            NwError::Precondition(format!("psi = {} does not fit in 64 bits", params.psi))
        })?;
        let d = u32::try_from(params.d).map_err(|_| NwError::Precondition("D too large".into()))?;
        Ok(NWInstance {
            shape: Shape::new(params.n as usize, psi, d)?,
            params: Some(params.clone()),
        })
    }

    pub fn n(&self) -> usize {
        self.shape.rows
    }

    pub fn psi(&self) -> u64 {
        self.shape.modulus
    }

    pub fn d(&self) -> u32 {
        self.shape.d
    }

    pub fn params(&self) -> Option<&NWParams> {
        self.params.as_ref()
    }

    pub fn num_vars(&self) -> usize {
        self.shape.rows * self.shape.modulus as usize
    }

    pub fn var_index(&self, row: usize, col: u64) -> usize {
        row * self.shape.modulus as usize + col as usize
    }

    /// `psi^D`.
    pub fn monomial_count(&self) -> BigUint {
        self.shape.count()
    }

    /// Column chosen in each row, one vector per univariate, in enumeration order.
    pub fn column_vectors(&self, cap: u64) -> Result<Vec<Vec<u64>>, NwError> {
        self.shape.check_cap(cap)?;
        let mut out = Vec::new();
        self.shape
            .for_each_univariate(|cols| out.push(cols.to_vec()));
        Ok(out)
    }

    pub fn monomials(&self, cap: u64) -> Result<Vec<Monomial>, NwError> {
        Ok(self
            .column_vectors(cap)?
            .into_iter()
            .map(|cols| {
                Monomial::multilinear(cols.iter().enumerate().map(|(i, &c)| self.var_index(i, c)))
            })
            .collect())
    }

    pub fn to_polynomial(&self, field: Field, cap: u64) -> Result<SparsePolynomial, NwError> {
        let terms = self.monomials(cap)?.into_iter().map(|m| (m, field.one()));
        Ok(SparsePolynomial::from_terms(self.num_vars(), field, terms)?)
    }

    /// Evaluates by walking the univariates directly.
    pub fn eval(&self, point: &[FieldElem], cap: u64) -> Result<FieldElem, NwError> {
        if point.len() != self.num_vars() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars(),
                found: point.len(),
            }
            .into());
        }
        let psi = self.shape.modulus as usize;
        eval_shape(&self.shape, point, |row, col| row * psi + col as usize, cap)
    }

    /// Exhaustive check of count, multilinearity, degree and pairwise
    /// support intersections.
    pub fn check_properties(&self, cap: u64) -> Result<NWPropertyReport, NwError> {
        let monomials = self.monomials(cap)?;
        let n = self.shape.rows;
        let psi = self.shape.modulus as usize;
        let distinct = monomials.iter().collect::<BTreeSet<_>>().len() == monomials.len();
        let all_multilinear = monomials.iter().all(Monomial::is_multilinear);
        let all_degree_n = monomials.iter().all(|m| m.degree() as usize == n);
        let one_per_row = monomials.iter().all(|m| {
            let rows: BTreeSet<usize> = m.support().map(|v| v / psi).collect();
            rows.len() == n && rows.iter().all(|&r| r < n)
        });
        let supports: Vec<BTreeSet<usize>> =
            monomials.iter().map(|m| m.support().collect()).collect();
        let bound = self.shape.d as usize - 1;
        let mut max_pair_intersection = 0;
        let mut violating_pair = None;
        for i in 0..supports.len() {
            for j in i + 1..supports.len() {
                let common = supports[i].intersection(&supports[j]).count();
                max_pair_intersection = max_pair_intersection.max(common);
                if common > bound && violating_pair.is_none() {
                    violating_pair = Some((i, j));
                }
            }
        }
        let expected = self.shape.count();
        Ok(NWPropertyReport {
            monomial_count: monomials.len() as u64,
            expected_count: u64::try_from(expected).unwrap_or(u64::MAX),
            distinct,
            all_multilinear,
            all_degree_n,
            one_per_row,
            max_pair_intersection,
            intersection_bound: bound,
            violating_pair,
        })
    }
}

/// An NW polynomial over an arbitrary ordered variable set arranged as an
/// `a' x q` matrix, row-major: entry `(r, c)` is `set[r * q + c]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NWOnSet {
    shape: Shape,
    set: Vec<usize>,
}

impl NWOnSet {
    pub fn new(set: Vec<usize>, rows: usize, q: u64, d: u32) -> Result<Self, NwError> {
        if set.len() as u64 != rows as u64 * q {
            return Err(NwError::Precondition(format!(
                "set has {} variables, expected {rows} x {q}",
                set.len()
            )));
        }
        Ok(NWOnSet {
            shape: Shape::new(rows, q, d)?,
            set,
        })
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn rows(&self) -> usize {
        self.shape.rows
    }

    pub fn q(&self) -> u64 {
        self.shape.modulus
    }

    pub fn d(&self) -> u32 {
        self.shape.d
    }

    pub fn monomial_count(&self) -> BigUint {
        self.shape.count()
    }

    /// Monomials over the ambient variables named by `set`.
    pub fn monomials(&self, cap: u64) -> Result<Vec<Monomial>, NwError> {
        self.shape.check_cap(cap)?;
        let q = self.shape.modulus as usize;
        let mut out = Vec::new();
        self.shape.for_each_univariate(|cols| {
            out.push(Monomial::multilinear(
                cols.iter()
                    .enumerate()
                    .map(|(r, &c)| self.set[r * q + c as usize]),
            ))
        });
        Ok(out)
    }

    pub fn to_polynomial(
        &self,
        num_vars: usize,
        field: Field,
        cap: u64,
    ) -> Result<SparsePolynomial, NwError> {
        let terms = self.monomials(cap)?.into_iter().map(|m| (m, field.one()));
        Ok(SparsePolynomial::from_terms(num_vars, field, terms)?)
    }

    /// Evaluates at a point of the ambient space containing `set`.
    pub fn eval(&self, point: &[FieldElem], cap: u64) -> Result<FieldElem, NwError> {
        if let Some(&v) = self.set.iter().find(|&&v| v >= point.len()) {
            return Err(AlgebraError::VariableOutOfRange {
                var: v,
                num_vars: point.len(),
            }
            .into());
        }
        let q = self.shape.modulus as usize;
        eval_shape(&self.shape, point, |r, c| self.set[r * q + c as usize], cap)
    }
}

fn eval_shape(
    shape: &Shape,
    point: &[FieldElem],
    index: impl Fn(usize, u64) -> usize,
    cap: u64,
) -> Result<FieldElem, NwError> {
    shape.check_cap(cap)?;
    let field = point.first().map_or(Field::Rational, FieldElem::field);
    let mut acc = field.zero();
    let mut failure = None;
    shape.for_each_univariate(|cols| {
        if failure.is_some() {
            return;
        }
        let mut prod = field.one();
        for (row, &col) in cols.iter().enumerate() {
            match prod.try_mul(&point[index(row, col)]) {
                Ok(p) => prod = p,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
            if prod.is_zero() {
                return;
            }
        }
        match acc.try_add(&prod) {
            Ok(a) => acc = a,
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(acc),
    }
}
