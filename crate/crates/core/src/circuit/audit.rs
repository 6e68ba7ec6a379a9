//! Compares every circuit transform with the same operation on the expansion.

use rand::Rng;

use super::{CircuitError, FewVarCircuit, RestrictionMask};
use crate::algebra::{FieldElem, HomMode, SparsePolynomial};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformAudit {
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest derivative-circuit top fan-in, next to its allowance
    /// `T (k + 1)^2`.
    pub max_derivative_fanin: usize,
    pub derivative_fanin_allowance: usize,
    pub max_coeff_fanin: usize,
    pub coeff_fanin_allowance: usize,
}

impl TransformAudit {
    pub fn fanins_ok(&self) -> bool {
        self.max_derivative_fanin <= self.derivative_fanin_allowance && self.max_coeff_fanin <= self.coeff_fanin_allowance
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.fanins_ok()
    }
}

/// Runs derivatives and coefficient extraction in every variable,
/// every homogeneous component, one random translation and one random
/// restriction. `c` must declare its individual degree.
pub fn audit_transforms<R: Rng + ?Sized>(
    c: &FewVarCircuit,
    rng: &mut R,
    expand_cap: usize,
) -> Result<TransformAudit, CircuitError> {
    let k = c.k().ok_or(CircuitError::MissingMetadata("individual degree k"))?;
    let field = c.field();
    let n = c.num_vars();
    let p = c.expand_with_cap(expand_cap)?;
    let t = c.top_fanin();
    let mut audit = TransformAudit {
        derivative_fanin_allowance: t * (k as usize + 1).pow(2),
        coeff_fanin_allowance: t * (k as usize + 1),
        ..Default::default()
    };
    let mut check = |label: String, got: &FewVarCircuit, want: &SparsePolynomial| -> Result<(), CircuitError> {
        audit.checks += 1;
        if got.expand_with_cap(expand_cap)? != *want {
            audit.failures.push(label);
        }
        Ok(())
    };

    let mut derivative_fanin = 0;
    let mut coeff_fanin = 0;
    for y in 0..n {
        for j in 0..=k {
            let d = c.derivative_circuit(y, j)?;
            derivative_fanin = derivative_fanin.max(d.top_fanin());
            check(format!("derivative y={y} j={j}"), &d, &p.derivative(y, j)?)?;
        }
        let coeffs = p.coefficients_in(y);
        for (i, ci) in c.coeff_circuits(y, k)?.iter().enumerate() {
            coeff_fanin = coeff_fanin.max(ci.top_fanin());
            let want = coeffs.get(i).cloned().unwrap_or_else(|| SparsePolynomial::zero(n, field));
            check(format!("coefficient y={y} i={i}"), ci, &want)?;
        }
    }
    let d_tot = c.formal_degree();
    for i in 0..=d_tot + 1 {
        let h = c.hom_component_circuit(i, d_tot)?;
        check(format!("hom i={i}"), &h, &p.hom_component(i, HomMode::Eq))?;
    }
    let shift: Vec<FieldElem> = (0..n).map(|_| field.from_i64(rng.gen_range(-3..=3))).collect();
    check("translate".into(), &c.translate(&shift)?, &p.translate(&shift)?)?;
    let mask = RestrictionMask::new(n, (0..n).filter(|_| rng.gen_bool(0.5)))?;
    check("restrict".into(), &c.restrict(&mask)?, &p.zero_vars_outside(mask.alive()))?;
    audit.max_derivative_fanin = derivative_fanin;
    audit.max_coeff_fanin = coeff_fanin;
    Ok(audit)
}
