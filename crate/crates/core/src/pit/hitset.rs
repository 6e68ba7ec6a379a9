use num_bigint::BigUint;

use super::{PitError, PitParams};
use crate::algebra::FieldElem;
use crate::nw::{NWOnSet, DEFAULT_ENUM_CAP};

/// One element of the hitting set with the grid point that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HitPoint {
    /// Position in the stream.
    pub index: u64,
    /// The point of `G^l`.
    pub seed: Vec<FieldElem>,
    /// `(NW(S_1)|p, ..., NW(S_N)|p)`.
    pub tuple: Vec<FieldElem>,
}

/// Lazily walks `G^l` in lexicographic order (first coordinate slowest).
#[derive(Clone, Debug)]
pub struct HittingSetStream {
    nw: Vec<NWOnSet>,
    grid: Vec<FieldElem>,
    digits: Vec<usize>,
    index: u64,
    done: bool,
}

impl HittingSetStream {
    pub fn len_big(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.grid.len()), self.digits.len())
    }
}

pub fn hitting_set_stream(params: &PitParams) -> Result<HittingSetStream, PitError> {
    let nw = params.nw_sets()?;
    if let Some(first) = nw.first() {
        if first.monomial_count() > BigUint::from(DEFAULT_ENUM_CAP) {
            return Err(PitError::Precondition(format!(
                "each tuple entry sums {} products",
                first.monomial_count()
            )));
        }
    }
    Ok(HittingSetStream {
        nw,
        grid: params.grid_elems(),
        digits: vec![0; params.l],
        index: 0,
        done: params.grid.is_empty(),
    })
}

/// `|G|^l` for the given parameters.
pub fn hitting_set_size(params: &PitParams) -> BigUint {
    num_traits::pow(BigUint::from(params.grid.len()), params.l)
}

impl Iterator for HittingSetStream {
    type Item = HitPoint;

    fn next(&mut self) -> Option<HitPoint> {
        if self.done {
            return None;
        }
        let seed: Vec<FieldElem> = self.digits.iter().map(|&d| self.grid[d].clone()).collect();
        let tuple = self
            .nw
            .iter()
            .map(|nw| nw.eval(&seed, DEFAULT_ENUM_CAP).expect("checked at construction"))
            .collect();
        let point = HitPoint {
            index: self.index,
            seed,
            tuple,
        };
        self.index += 1;
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.grid.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(point)
    }
}
