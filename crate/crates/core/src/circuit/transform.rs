//! Closure transforms: each returns a circuit of the same shape class whose
//! expansion is the corresponding polynomial-level operation.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::{CircuitError, CircuitTerm, FactorPoly, FewVarCircuit};
use crate::algebra::{AlgebraError, Field, FieldElem, Monomial, SparsePolynomial};

/// Coefficients of the Lagrange basis at nodes `0..=k`: entry `[t][i]` is
/// the coefficient of `y^i` in `L_t(y) = prod_{u != t} (y - u) / (t - u)`.
pub fn lagrange_basis(field: Field, k: u32) -> Result<Vec<Vec<FieldElem>>, AlgebraError> {
    let p = field.characteristic();
    if p != 0 && p <= k as u64 {
        return Err(AlgebraError::PreconditionViolated(format!(
            "{field} has fewer than {} interpolation nodes",
            k + 1
        )));
    }
    let nodes: Vec<FieldElem> = (0..=k).map(|u| field.from_u64(u as u64)).collect();
    let mut basis = Vec::with_capacity(nodes.len());
    for (t, node_t) in nodes.iter().enumerate() {
        let mut coeffs = vec![field.one()];
        let mut denom = field.one();
        for (u, node_u) in nodes.iter().enumerate() {
            if u == t {
                continue;
            }
            // coeffs *= (y - u)
            let mut next = vec![field.zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * node_u);
            }
            coeffs = next;
            denom = &denom * &(node_t - node_u);
        }
        let inv = denom.inv()?;
        basis.push(coeffs.iter().map(|c| c * &inv).collect());
    }
    Ok(basis)
}

impl FewVarCircuit {
    /// Substitutes the scalar `value` for global variable `y` inside every
    /// factor. Supports are left as they are.
    fn substitute_var(
        &self,
        y: usize,
        value: &FieldElem,
    ) -> Result<Vec<CircuitTerm>, CircuitError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let mut factors = Vec::with_capacity(term.factors.len());
            for f in &term.factors {
                match f.local_index(y) {
                    Some(lv) => factors.push(f.with_poly(f.poly.substitute_const(lv, value)?)),
                    None => factors.push(f.clone()),
                }
            }
            terms.push(CircuitTerm {
                scale: term.scale.clone(),
                factors,
            });
        }
        Ok(terms)
    }

    fn mentions(&self, y: usize) -> bool {
        self.factors().any(|f| f.local_index(y).is_some())
    }

    /// Circuits `C_0..C_k` where `C_i` computes the coefficient of `y^i` in
    /// the expansion, assuming the degree in `y` is at most `k`.
    ///
    /// Built from the `k + 1` restrictions `y := 0..k` combined with Lagrange
    /// weights, so each output has top fan-in at most `T (k + 1)`.
    pub fn coeff_circuits(&self, y: usize, k: u32) -> Result<Vec<FewVarCircuit>, CircuitError> {
        if y >= self.num_vars {
            return Err(AlgebraError::VariableOutOfRange {
                var: y,
                num_vars: self.num_vars,
            }
            .into());
        }
        if !self.mentions(y) {
            let mut out = vec![self.clone()];
            out.extend((0..k).map(|_| self.with_terms(Vec::new())));
            return Ok(out);
        }
        let basis = lagrange_basis(self.field, k)?;
        let restricted: Vec<Vec<CircuitTerm>> = (0..=k)
            .map(|t| self.substitute_var(y, &self.field.from_u64(t as u64)))
            .collect::<Result<_, _>>()?;
        let mut out = Vec::with_capacity(k as usize + 1);
        for i in 0..=k as usize {
            let mut terms = Vec::new();
            for (t, restricted_terms) in restricted.iter().enumerate() {
                let weight = &basis[t][i];
                if weight.is_zero() {
                    continue;
                }
                for term in restricted_terms {
                    terms.push(CircuitTerm {
                        scale: &term.scale * weight,
                        factors: term.factors.clone(),
                    });
                }
            }
            out.push(self.with_terms(terms));
        }
        Ok(out)
    }

    /// A circuit computing the `j`-th partial derivative in `y`.
    ///
    /// Uses the declared individual degree `k`: the expansion is
    /// `sum_i C_i y^i`, so the derivative is
    /// `sum_{i >= j} i!/(i-j)! C_i y^(i-j)` with `y^(i-j)` appended as an
    /// extra single-variable factor. Top fan-in is at most `T (k + 1)^2`.
    pub fn derivative_circuit(&self, y: usize, j: u32) -> Result<FewVarCircuit, CircuitError> {
        let k = self
            .k
            .ok_or(CircuitError::MissingMetadata("individual degree k"))?;
        if j == 0 {
            return self.normalize_constants();
        }
        let p = self.field.characteristic();
        if p != 0 && p <= j as u64 {
            return Err(AlgebraError::UnsupportedCharacteristic { p, order: j }.into());
        }
        if j > k || !self.mentions(y) {
            return Ok(self.with_terms(Vec::new()));
        }
        let coeffs = self.coeff_circuits(y, k)?;
        let mut terms = Vec::new();
        for (i, ci) in coeffs.iter().enumerate().skip(j as usize) {
            let shift = i as u32 - j;
            let falling = falling_factorial(i as u64, j);
            let factor_scale = self.field.from_bigint(&falling);
            let y_factor = (shift > 0).then(|| {
                let local =
                    SparsePolynomial::monomial(1, Monomial::var_pow(0, shift), self.field.one())
                        .expect("one variable");
                FactorPoly::new(vec![y], local).expect("one-variable factor")
            });
            for term in &ci.terms {
                let mut factors = term.factors.clone();
                factors.extend(y_factor.clone());
                terms.push(CircuitTerm {
                    scale: &term.scale * &factor_scale,
                    factors,
                });
            }
        }
        Ok(self.with_terms(terms))
    }

    /// A circuit computing `Hom^i` of the expansion, given that the total
    /// degree is at most `d_tot`.
    ///
    /// Substitutes `X -> u X` for `u = 0..d_tot` factor by factor and
    /// extracts the coefficient of `u^i` by interpolation; top fan-in is at
    /// most `T (d_tot + 1)`.
    pub fn hom_component_circuit(&self, i: u32, d_tot: u32) -> Result<FewVarCircuit, CircuitError> {
        if i > d_tot {
            return Ok(self.with_terms(Vec::new()));
        }
        let basis = lagrange_basis(self.field, d_tot)?;
        let mut terms = Vec::new();
        for (u, row) in basis.iter().enumerate() {
            let weight = &row[i as usize];
            if weight.is_zero() {
                continue;
            }
            let node = self.field.from_u64(u as u64);
            for term in &self.terms {
                let factors = term
                    .factors
                    .iter()
                    .map(|f| Ok(f.with_poly(f.poly.scale_variables(&node)?)))
                    .collect::<Result<Vec<_>, AlgebraError>>()?;
                terms.push(CircuitTerm {
                    scale: &term.scale * weight,
                    factors,
                });
            }
        }
        Ok(self.with_terms(terms))
    }

    /// `C(X + a)`, translating each factor on its own support.
    pub fn translate(&self, shift: &[FieldElem]) -> Result<FewVarCircuit, CircuitError> {
        if shift.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: shift.len(),
            }
            .into());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let factors = term
                .factors
                .iter()
                .map(|f| {
                    let local: Vec<FieldElem> =
                        f.support.iter().map(|&g| shift[g].clone()).collect();
                    Ok(f.with_poly(f.poly.translate(&local)?))
                })
                .collect::<Result<Vec<_>, AlgebraError>>()?;
            terms.push(CircuitTerm {
                scale: term.scale.clone(),
                factors,
            });
        }
        Ok(self.with_terms(terms))
    }

    /// Sets every variable outside `alive` to zero; supports shrink to their
    /// surviving variables.
    pub fn restrict(&self, mask: &RestrictionMask) -> Result<FewVarCircuit, CircuitError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let mut factors = Vec::with_capacity(term.factors.len());
            for f in &term.factors {
                let kept_local: BTreeSet<usize> = f
                    .support
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| mask.is_alive(**g))
                    .map(|(lv, _)| lv)
                    .collect();
                let zeroed = f.poly.zero_vars_outside(&kept_local);
                let kept: Vec<usize> = kept_local.iter().copied().collect();
                let poly =
                    zeroed.remap_vars(kept.len(), |lv| kept.iter().position(|&x| x == lv))?;
                let support = kept.iter().map(|&lv| f.support[lv]).collect();
                factors.push(FactorPoly { support, poly });
            }
            terms.push(CircuitTerm {
                scale: term.scale.clone(),
                factors,
            });
        }
        Ok(self.with_terms(terms))
    }
}

/// The set `V` of variables kept alive by a restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionMask {
    num_vars: usize,
    alive: BTreeSet<usize>,
}

impl RestrictionMask {
    pub fn new(
        num_vars: usize,
        alive: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AlgebraError> {
        let alive: BTreeSet<usize> = alive.into_iter().collect();
        if let Some(&v) = alive.iter().find(|&&v| v >= num_vars) {
            return Err(AlgebraError::VariableOutOfRange { var: v, num_vars });
        }
        Ok(RestrictionMask { num_vars, alive })
    }

    pub fn all(num_vars: usize) -> Self {
        RestrictionMask {
            num_vars,
            alive: (0..num_vars).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn alive(&self) -> &BTreeSet<usize> {
        &self.alive
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }
}

fn falling_factorial(i: u64, j: u32) -> BigInt {
    (0..j as u64).fold(BigInt::from(1), |acc, t| acc * (i - t))
}
