//! Degree-`n` part of a circuit via elementary symmetric polynomials.
//!
//! For a normalized term `alpha prod_j Q_j`, let `S` be the factors with
//! constant term 1 and write `Q_j = 1 + Q'_j` for `j` in `S`. Then
//! `prod_{j in S} Q_j = sum_l ESYM_l(Q'_j : j in S)`, and since the factors
//! outside `S` have no constant term, only `l <= n - (d - |S|)` can reach
//! degree `n`.

use super::{CircuitError, FactorPoly, FewVarCircuit};
use crate::algebra::{esym_upto, Field, FieldElem, HomMode, SparsePolynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogTerm {
    pub scale: FieldElem,
    /// Positions `j` (into the normalized term's factor list) forming `S_i`.
    pub s_indices: Vec<usize>,
    /// Factors outside `S_i`.
    pub outside: Vec<FactorPoly>,
    /// `Hom^{>=1}[Q_j]` for `j` in `S_i`, over all variables.
    pub esym_inputs: Vec<SparsePolynomial>,
    /// Largest `l` whose `ESYM_l` can contribute to degree `n`.
    pub max_l: usize,
}

/// `P = sum_i alpha_i Hom^n[prod_{j not in S_i} Q_ij * sum_{l <= max_l} ESYM_l(...)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogDecomposition {
    pub n: u32,
    pub num_vars: usize,
    pub field: Field,
    pub terms: Vec<HomogTerm>,
    /// Terms dropped because more than `n` factors lack a constant term.
    pub discarded: usize,
}

impl FewVarCircuit {
    pub fn homogenize(&self, n: u32) -> Result<HomogDecomposition, CircuitError> {
        let normalized = self.normalize_constants()?;
        let mut terms = Vec::new();
        let mut discarded = 0;
        for term in normalized.terms() {
            if term.scale.is_zero() {
                continue;
            }
            let (inside, outside): (Vec<_>, Vec<_>) = term
                .factors
                .iter()
                .enumerate()
                .partition(|(_, f)| f.poly().constant_term().is_one());
            let out_len = outside.len();
            if out_len > n as usize {
                discarded += 1;
                continue;
            }
            let esym_inputs = inside
                .iter()
                .map(|(_, f)| {
                    f.to_global(self.num_vars())
                        .map(|g| g.hom_component(1, HomMode::Ge))
                })
                .collect::<Result<Vec<_>, _>>()?;
            terms.push(HomogTerm {
                scale: term.scale.clone(),
                s_indices: inside.iter().map(|(j, _)| *j).collect(),
                outside: outside.into_iter().map(|(_, f)| f.clone()).collect(),
                esym_inputs,
                max_l: n as usize - out_len,
            });
        }
        Ok(HomogDecomposition {
            n,
            num_vars: self.num_vars(),
            field: self.field(),
            terms,
            discarded,
        })
    }
}

impl HomogDecomposition {
    /// Evaluates the decomposition to a polynomial; all products are
    /// truncated at degree `n`.
    pub fn to_polynomial(&self) -> Result<SparsePolynomial, CircuitError> {
        let field = self.field;
        let cap = Some(self.n);
        let mut acc = SparsePolynomial::zero(self.num_vars, field);
        for term in &self.terms {
            let sums = esym_upto(&term.esym_inputs, term.max_l, cap, self.num_vars, field)?;
            let mut inner = SparsePolynomial::zero(self.num_vars, field);
            for e in &sums {
                inner = inner.try_add(e)?;
            }
            let mut prod = SparsePolynomial::constant(self.num_vars, term.scale.clone());
            for f in &term.outside {
                prod = prod.mul_truncated(&f.to_global(self.num_vars)?, cap)?;
            }
            prod = prod.mul_truncated(&inner, cap)?;
            acc = acc.try_add(&prod.hom_component(self.n, HomMode::Eq))?;
        }
        Ok(acc)
    }
}
