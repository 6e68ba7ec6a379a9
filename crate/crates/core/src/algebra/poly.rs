use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, FieldElem};
use super::monomial::Monomial;
use super::AlgebraError;

/// Which part of a polynomial [`SparsePolynomial::hom_component`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomMode {
    /// Exactly degree `i`.
    Eq,
    /// Degree at most `i`.
    Le,
    /// Degree at least `i`.
    Ge,
}

/// A multivariate polynomial with exact coefficients.
///
/// Terms are kept in a graded-lex ordered map with no zero coefficients, so
/// structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePolynomial {
    num_vars: usize,
    field: Field,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl SparsePolynomial {
    pub fn zero(num_vars: usize, field: Field) -> Self {
        SparsePolynomial {
            num_vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: FieldElem) -> Self {
        let mut p = Self::zero(num_vars, c.field());
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(num_vars: usize, field: Field) -> Self {
        Self::constant(num_vars, field.one())
    }

    /// The polynomial `x_v`.
    pub fn var(num_vars: usize, field: Field, v: usize) -> Result<Self, AlgebraError> {
        Self::monomial(num_vars, Monomial::var(v), field.one())
    }

    pub fn monomial(num_vars: usize, m: Monomial, c: FieldElem) -> Result<Self, AlgebraError> {
        Self::from_terms(num_vars, c.field(), [(m, c)])
    }

    /// Collects terms, merging repeated monomials and dropping zeros.
    pub fn from_terms<I>(num_vars: usize, field: Field, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        let mut p = Self::zero(num_vars, field);
        for (m, c) in terms {
            if let Some(v) = m.max_var() {
                if v >= num_vars {
                    return Err(AlgebraError::VariableOutOfRange { var: v, num_vars });
                }
            }
            if c.field() != field {
                return Err(AlgebraError::FieldMismatch {
                    left: field,
                    right: c.field(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Integer-coefficient convenience constructor over the rationals.
    pub fn from_int_terms(num_vars: usize, terms: &[(i64, &[(usize, u32)])]) -> Self {
        Self::from_terms(
            num_vars,
            Field::Rational,
            terms.iter().map(|(c, exps)| {
                (
                    Monomial::from_pairs(exps.iter().copied()),
                    Field::Rational.from_i64(*c),
                )
            }),
        )
        .expect("valid integer polynomial")
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(
        &self,
    ) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElem)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Monomial::one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn individual_degree(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.exponents().iter().map(|&(_, e)| e))
            .max()
            .unwrap_or(0)
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(Monomial::is_multilinear)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Variables that occur in some term.
    pub fn vars_used(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.support().collect::<Vec<_>>())
            .collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        if self.num_vars != other.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.mul_truncated(other, None)
    }

    /// Product keeping only terms of degree `<= max_degree` (all terms when
    /// `None`).
    pub fn mul_truncated(
        &self,
        other: &Self,
        max_degree: Option<u32>,
    ) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.num_vars, self.field);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if let Some(t) = max_degree {
                    if da + mb.degree() > t {
                        continue;
                    }
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Self, AlgebraError> {
        if c.field() != self.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: c.field(),
            });
        }
        if c.is_zero() {
            return Ok(Self::zero(self.num_vars, self.field));
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Ok(SparsePolynomial {
            num_vars: self.num_vars,
            field: self.field,
            terms,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        self.pow_truncated(e, None)
    }

    pub fn pow_truncated(&self, mut e: u32, max_degree: Option<u32>) -> Self {
        let mut acc = Self::one(self.num_vars, self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_truncated(&base, max_degree).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_truncated(&base, max_degree).expect("same ring");
            }
        }
        acc
    }

    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, AlgebraError> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: point.len(),
            });
        }
        if let Some(bad) = point.iter().find(|x| x.field() != self.field) {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: bad.field(),
            });
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.exponents() {
                t = &t * &point[v].pow(e);
                if t.is_zero() {
                    break;
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `Hom^i`, `Hom^{<=i}` or `Hom^{>=i}` depending on `mode`.
    pub fn hom_component(&self, i: u32, mode: HomMode) -> Self {
        self.filter_terms(|m| {
            let d = m.degree();
            match mode {
                HomMode::Eq => d == i,
                HomMode::Le => d <= i,
                HomMode::Ge => d >= i,
            }
        })
    }

    fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        SparsePolynomial {
            num_vars: self.num_vars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The projection `sigma` onto multilinear monomials.
    pub fn multilinear_project(&self) -> Self {
        self.filter_terms(Monomial::is_multilinear)
    }

    /// Formal `order`-th partial derivative in `var`.
    pub fn derivative(&self, var: usize, order: u32) -> Result<Self, AlgebraError> {
        if var >= self.num_vars {
            return Err(AlgebraError::VariableOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        if let Field::Prime(p) = self.field {
            if p <= order as u64 {
                return Err(AlgebraError::UnsupportedCharacteristic { p, order });
            }
        }
        if order == 0 {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.num_vars, self.field);
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(var);
            if e < order {
                continue;
            }
            let falling: u64 = ((e - order + 1)..=e).map(u64::from).product();
            let coeff = c * &self.field.from_u64(falling);
            out.add_term(rest.mul(&Monomial::var_pow(var, e - order)), coeff);
        }
        Ok(out)
    }

    /// Derivative with respect to a monomial: one partial per unit of
    /// exponent.
    pub fn derivative_monomial(&self, gamma: &Monomial) -> Result<Self, AlgebraError> {
        let mut out = self.clone();
        for &(v, e) in gamma.exponents() {
            out = out.derivative(v, e)?;
        }
        Ok(out)
    }

    /// Substitutes `x_var := value` for a polynomial `value` in the same ring.
    pub fn substitute(&self, var: usize, value: &Self) -> Result<Self, AlgebraError> {
        self.substitute_truncated(var, value, None)
    }

    pub fn substitute_truncated(
        &self,
        var: usize,
        value: &Self,
        max_degree: Option<u32>,
    ) -> Result<Self, AlgebraError> {
        self.check_compatible(value)?;
        if var >= self.num_vars {
            return Err(AlgebraError::VariableOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        // Group by the exponent of `var` so each power is built once.
        let mut by_power: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(var);
            by_power
                .entry(e)
                .or_insert_with(|| Self::zero(self.num_vars, self.field))
                .add_term(rest, c.clone());
        }
        let mut out = Self::zero(self.num_vars, self.field);
        let mut power = Self::one(self.num_vars, self.field);
        let mut current = 0u32;
        for (e, coeff) in by_power {
            while current < e {
                power = power.mul_truncated(value, max_degree)?;
                current += 1;
            }
            out = out.try_add(&coeff.mul_truncated(&power, max_degree)?)?;
        }
        Ok(out)
    }

    /// Substitutes a scalar for one variable.
    pub fn substitute_const(&self, var: usize, value: &FieldElem) -> Result<Self, AlgebraError> {
        if value.field() != self.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: value.field(),
            });
        }
        let mut out = Self::zero(self.num_vars, self.field);
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(var);
            out.add_term(rest, c * &value.pow(e));
        }
        Ok(out)
    }

    /// Sets every variable outside `alive` to zero.
    pub fn zero_vars_outside(&self, alive: &BTreeSet<usize>) -> Self {
        self.filter_terms(|m| m.support().all(|v| alive.contains(&v)))
    }

    /// `P(X + a)`.
    pub fn translate(&self, shift: &[FieldElem]) -> Result<Self, AlgebraError> {
        if shift.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: shift.len(),
            });
        }
        if let Some(bad) = shift.iter().find(|x| x.field() != self.field) {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: bad.field(),
            });
        }
        let mut out = Self::zero(self.num_vars, self.field);
        // (x_v + a_v)^e expansions, cached per (v, e).
        let mut cache: BTreeMap<(usize, u32), Vec<(u32, FieldElem)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut partial: Vec<(Monomial, FieldElem)> = vec![(Monomial::one(), c.clone())];
            for &(v, e) in m.exponents() {
                let expansion = cache
                    .entry((v, e))
                    .or_insert_with(|| binomial_expansion(&shift[v], e));
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (pm, pc) in &partial {
                    for (k, bc) in expansion.iter() {
                        if bc.is_zero() {
                            continue;
                        }
                        next.push((pm.mul(&Monomial::var_pow(v, *k)), pc * bc));
                    }
                }
                partial = next;
            }
            for (pm, pc) in partial {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    /// `P(c * X)`: each term of degree `e` is multiplied by `c^e`.
    pub fn scale_variables(&self, c: &FieldElem) -> Result<Self, AlgebraError> {
        if c.field() != self.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: c.field(),
            });
        }
        let mut out = Self::zero(self.num_vars, self.field);
        for (m, coeff) in &self.terms {
            out.add_term(m.clone(), coeff * &c.pow(m.degree()));
        }
        Ok(out)
    }

    /// Moves the polynomial into a ring with `num_vars` variables, renaming
    /// each variable through `map`. Fails if an occurring variable is
    /// dropped or lands out of range.
    pub fn remap_vars<F>(&self, num_vars: usize, map: F) -> Result<Self, AlgebraError>
    where
        F: Fn(usize) -> Option<usize>,
    {
        let mut out = Self::zero(num_vars, self.field);
        for (m, c) in &self.terms {
            let renamed = m.remap(&map).ok_or_else(|| {
                AlgebraError::PreconditionViolated(format!("monomial {m} uses a dropped variable"))
            })?;
            if let Some(v) = renamed.max_var() {
                if v >= num_vars {
                    return Err(AlgebraError::VariableOutOfRange { var: v, num_vars });
                }
            }
            out.add_term(renamed, c.clone());
        }
        Ok(out)
    }

    /// Views the polynomial as univariate in `var`: entry `i` is the
    /// coefficient of `var^i` (a polynomial free of `var`).
    pub fn coefficients_in(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var) as usize;
        let mut out =
            vec![Self::zero(self.num_vars, self.field); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(var);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }
}

fn binomial_expansion(a: &FieldElem, e: u32) -> Vec<(u32, FieldElem)> {
    // (x + a)^e = sum_k C(e, k) x^k a^(e-k), binomials in exact integers.
    let field = a.field();
    let mut binom = num_bigint::BigInt::from(1);
    let mut out = Vec::with_capacity(e as usize + 1);
    for k in 0..=e {
        if k > 0 {
            binom = binom * (e - k + 1) / k;
        }
        out.push((k, &field.from_bigint(&binom) * &a.pow(e - k)));
    }
    out
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn neg(self) -> SparsePolynomial {
        SparsePolynomial {
            num_vars: self.num_vars,
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for SparsePolynomial {
    type Output = SparsePolynomial;

    fn neg(self) -> SparsePolynomial {
        -&self
    }
}

macro_rules! forward_poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&SparsePolynomial> for &SparsePolynomial {
            type Output = SparsePolynomial;
            fn $method(self, rhs: &SparsePolynomial) -> SparsePolynomial {
                self.$checked(rhs)
                    .expect("incompatible polynomial operands")
            }
        }
    };
}

forward_poly_binop!(Add, add, try_add);
forward_poly_binop!(Sub, sub, try_sub);
forward_poly_binop!(Mul, mul, try_mul);

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}
