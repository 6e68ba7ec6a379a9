//! Sums of products of polynomials in few variables.
//!
//! The crate covers exact polynomial arithmetic ([`algebra`]), the
//! `sum prod (sum prod)^[s]` circuit model and its closure transforms
//! ([`circuit`]), Nisan-Wigderson polynomials ([`nw`]), the projected
//! shifted partial derivative measure ([`measure`]) and the blackbox
//! hitting-set construction built from designs ([`pit`]).

pub mod algebra;
pub mod circuit;
pub mod measure;
pub mod numeric;
pub mod nw;
pub mod pit;

pub use algebra::{Field, FieldElem, HomMode, Monomial, SparsePolynomial};
pub use circuit::{FactorPoly, FewVarCircuit, RestrictionMask};
pub use nw::{NWInstance, NWOnSet, NWParams};
pub use measure::{MeasureParams, MeasureReport};
pub use pit::{Blackbox, Design, PitParams};
