//! Blackbox identity testing for sums of products of few-variable
//! polynomials.
//!
//! A Reed-Solomon design `S_1, ..., S_N` over `[l]` and an NW polynomial on
//! each set map every point of a grid `G^l` to a point of the `N`-variate
//! space. [`pit_run`] evaluates the blackbox on that image until it finds a
//! nonzero value. [`schwartz_zippel`] and [`combnulls_grid`] are the random
//! and brute-force baselines.

mod design;
mod hitset;
mod params;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, FieldElem, SparsePolynomial};
use crate::circuit::{CircuitError, ClassReport, FewVarCircuit};
use crate::nw::NwError;

pub use design::{rs_design, verify_design, Design, DesignReport};
pub use hitset::{hitting_set_size, hitting_set_stream, HitPoint, HittingSetStream};
pub use params::{derive_pit_params, PitOverrides, PitParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PitError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Nw(#[from] NwError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("blackbox failure: {0}")]
    Blackbox(String),
    #[error("blackbox is not deterministic at {point}: {first} then {second}")]
    Unsound {
        point: String,
        first: String,
        second: String,
    },
}

/// Evaluation access to a polynomial over the rationals.
pub trait Blackbox {
    fn num_vars(&self) -> usize;
    fn evaluate(&mut self, point: &[FieldElem]) -> Result<FieldElem, PitError>;
}

impl Blackbox for FewVarCircuit {
    fn num_vars(&self) -> usize {
        FewVarCircuit::num_vars(self)
    }

    fn evaluate(&mut self, point: &[FieldElem]) -> Result<FieldElem, PitError> {
        Ok(self.eval(point)?)
    }
}

impl Blackbox for SparsePolynomial {
    fn num_vars(&self) -> usize {
        SparsePolynomial::num_vars(self)
    }

    fn evaluate(&mut self, point: &[FieldElem]) -> Result<FieldElem, PitError> {
        Ok(self.eval(point)?)
    }
}

/// A closure as a blackbox.
pub struct FnBlackbox<F> {
    num_vars: usize,
    f: F,
}

impl<F: FnMut(&[FieldElem]) -> FieldElem> FnBlackbox<F> {
    pub fn new(num_vars: usize, f: F) -> Self {
        FnBlackbox { num_vars, f }
    }
}

impl<F: FnMut(&[FieldElem]) -> FieldElem> Blackbox for FnBlackbox<F> {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn evaluate(&mut self, point: &[FieldElem]) -> Result<FieldElem, PitError> {
        Ok((self.f)(point))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PitOutcome {
    /// A point with a nonzero value, confirmed by a second evaluation.
    Witness {
        point: Vec<FieldElem>,
        value: FieldElem,
        /// Number of points evaluated, the witness included.
        tested: u64,
    },
    /// Zero on every point that was enumerated, which is all of them.
    Zero { tested: u64 },
    /// The budget ran out first.
    Inconclusive { tested: u64 },
}

impl PitOutcome {
    pub fn tested(&self) -> u64 {
        match self {
            PitOutcome::Witness { tested, .. } | PitOutcome::Zero { tested } | PitOutcome::Inconclusive { tested } => {
                *tested
            }
        }
    }

    pub fn witness(&self) -> Option<&[FieldElem]> {
        match self {
            PitOutcome::Witness { point, .. } => Some(point),
            _ => None,
        }
    }

    /// 0 for a witness, 1 for zero and 2 for an exhausted budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            PitOutcome::Witness { .. } => 0,
            PitOutcome::Zero { .. } => 1,
            PitOutcome::Inconclusive { .. } => 2,
        }
    }
}

/// Returns the first point of `points` where `bb` is nonzero. Every witness
/// is evaluated twice and must give the same nonzero value both times.
pub fn search<B: Blackbox + ?Sized>(
    bb: &mut B,
    points: impl IntoIterator<Item = Vec<FieldElem>>,
    budget: Option<u64>,
) -> Result<PitOutcome, PitError> {
    let mut tested = 0u64;
    for point in points {
        if budget.is_some_and(|b| tested >= b) {
            return Ok(PitOutcome::Inconclusive { tested });
        }
        if point.len() != bb.num_vars() {
            return Err(PitError::Precondition(format!(
                "point has {} coordinates, the blackbox {}",
                point.len(),
                bb.num_vars()
            )));
        }
        tested += 1;
        let value = bb.evaluate(&point)?;
        if !value.is_zero() {
            let again = bb.evaluate(&point)?;
            if again != value {
                return Err(PitError::Unsound {
                    point: render(&point),
                    first: value.to_canonical_string(),
                    second: again.to_canonical_string(),
                });
            }
            return Ok(PitOutcome::Witness { point, value, tested });
        }
    }
    Ok(PitOutcome::Zero { tested })
}

fn render(point: &[FieldElem]) -> String {
    point.iter().map(FieldElem::to_canonical_string).collect::<Vec<_>>().join(" ")
}

/// Runs the blackbox over the hitting set of `params`.
pub fn pit_run<B: Blackbox + ?Sized>(bb: &mut B, params: &PitParams, budget: Option<u64>) -> Result<PitOutcome, PitError> {
    if bb.num_vars() != params.n {
        return Err(PitError::Precondition(format!(
            "the blackbox has {} variables, the parameters N = {}",
            bb.num_vars(),
            params.n
        )));
    }
    let stream = hitting_set_stream(params)?;
    search(bb, stream.map(|h| h.tuple), budget)
}

/// [`pit_run`] for an open circuit, also reporting its class membership.
pub fn pit_run_circuit(
    c: &FewVarCircuit,
    params: &PitParams,
    budget: Option<u64>,
) -> Result<(PitOutcome, ClassReport), PitError> {
    let report = c.class_check(params.c, params.mu);
    let mut bb = c.clone();
    Ok((pit_run(&mut bb, params, budget)?, report))
}

/// Evaluates at `trials` uniform points of `{0, ..., domain_size - 1}^N`.
/// A zero result means "probably zero".
pub fn schwartz_zippel<B: Blackbox + ?Sized>(
    bb: &mut B,
    trials: u64,
    domain_size: u64,
    seed: u64,
) -> Result<PitOutcome, PitError> {
    if domain_size == 0 {
        return Err(PitError::Precondition("empty domain".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = bb.num_vars();
    let points = (0..trials).map(move |_| {
        (0..n)
            .map(|_| Field::Rational.from_u64(rng.gen_range(0..domain_size)))
            .collect::<Vec<_>>()
    });
    search(bb, points, None)
}

/// `{0, ..., d}^N` in lexicographic order (first coordinate slowest). A
/// nonzero polynomial of individual degree at most `d` is nonzero somewhere
/// on it.
pub fn combnulls_grid(num_vars: usize, d: u32) -> impl Iterator<Item = Vec<FieldElem>> {
    let mut digits = Some(vec![0u32; num_vars]);
    std::iter::from_fn(move || {
        let current = digits.clone()?;
        let next = &mut digits;
        let mut pos = num_vars;
        loop {
            if pos == 0 {
                *next = None;
                break;
            }
            pos -= 1;
            let slot = &mut next.as_mut().expect("present")[pos];
            if *slot < d {
                *slot += 1;
                break;
            }
            *slot = 0;
        }
        Some(current.into_iter().map(|v| Field::Rational.from_u64(v as u64)).collect())
    })
}

/// `(d + 1)^N`.
pub fn combnulls_size(num_vars: usize, d: u32) -> BigUint {
    num_traits::pow(BigUint::from(d + 1), num_vars)
}
