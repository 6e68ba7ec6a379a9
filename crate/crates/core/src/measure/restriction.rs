//! Random restrictions and the monomials of large support they must kill.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{subsets_of_size, MeasureError};
use crate::circuit::{FewVarCircuit, RestrictionMask};
use crate::numeric::binomial;

/// Largest `|B|` that [`bad_support_monomials`] will materialize.
pub const BAD_MONOMIAL_CAP: usize = 1_000_000;

/// The generator for trial `trial` of an experiment seeded with `seed`.
/// Trials draw from independent ChaCha20 streams of the same key.
pub fn restriction_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn draw_mask(num_vars: usize, p: f64, rng: &mut ChaCha20Rng) -> RestrictionMask {
    let alive: Vec<usize> = (0..num_vars).filter(|_| rng.gen::<f64>() < p).collect();
    RestrictionMask::new(num_vars, alive).expect("indices below num_vars")
}

/// Keeps each of `num_vars` variables alive independently with probability `p`.
pub fn sample_restriction(num_vars: usize, p: f64, seed: u64) -> Result<RestrictionMask, MeasureError> {
    check_probability(p)?;
    Ok(draw_mask(num_vars, p, &mut restriction_rng(seed, 0)))
}

fn check_probability(p: f64) -> Result<(), MeasureError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(MeasureError::Invalid(format!("probability {p} is outside [0, 1]")))
    }
}

/// Multilinear monomials of support exactly `s` lying inside some factor's
/// support, as sorted variable lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadMonomials {
    pub s: usize,
    pub monomials: BTreeSet<Vec<usize>>,
    /// `T * d * C(max support, s)`.
    pub bound: BigUint,
}

impl BadMonomials {
    pub fn count(&self) -> usize {
        self.monomials.len()
    }

    pub fn within_bound(&self) -> bool {
        BigUint::from(self.count()) <= self.bound
    }

    /// Number of monomials all of whose variables are alive.
    pub fn surviving(&self, mask: &RestrictionMask) -> usize {
        self.monomials
            .iter()
            .filter(|m| m.iter().all(|&v| mask.is_alive(v)))
            .count()
    }
}

pub fn bad_support_monomials(c: &FewVarCircuit, s: usize) -> Result<BadMonomials, MeasureError> {
    let bound = BigUint::from(c.top_fanin() * c.max_fanin()) * binomial(&BigUint::from(c.max_support()), s as u64);
    let mut monomials = BTreeSet::new();
    for factor in c.factors() {
        let support = factor.support();
        if s > support.len() {
            continue;
        }
        let count = binomial(&BigUint::from(support.len()), s as u64);
        if count > BigUint::from(BAD_MONOMIAL_CAP) || support.len() > 64 {
            return Err(MeasureError::CapExceeded {
                rows: count.to_string(),
                cap: BAD_MONOMIAL_CAP as u64,
            });
        }
        for mask in subsets_of_size(support.len(), s) {
            let mut vars: Vec<usize> = (0..support.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| support[i])
                .collect();
            vars.sort_unstable();
            monomials.insert(vars);
            if monomials.len() > BAD_MONOMIAL_CAP {
                return Err(MeasureError::CapExceeded {
                    rows: monomials.len().to_string(),
                    cap: BAD_MONOMIAL_CAP as u64,
                });
            }
        }
    }
    Ok(BadMonomials { s, monomials, bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub mask: RestrictionMask,
    pub surviving_bad: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalReport {
    pub seed: u64,
    pub trials: u64,
    pub bad_count: usize,
    /// Trials in which some bad monomial survived.
    pub survived: u64,
    pub empirical_rate: f64,
    /// `E[|B_V|] = |B| p^s`, exact in the binary value of `p`.
    pub expected_bad_exact: BigRational,
    pub expected_bad: f64,
    /// `min(1, E[|B_V|])`, Markov's bound on the survival probability.
    pub markov_bound: f64,
    pub mean_surviving: f64,
    /// Standard error of `mean_surviving`.
    pub mean_sigma: f64,
    /// Binomial standard error of a rate equal to `markov_bound`.
    pub rate_sigma: f64,
    pub records: Vec<TrialRecord>,
}

impl SurvivalReport {
    /// The sample mean of `|B_V|` lies within three standard errors of the
    /// exact expectation. The error uses the larger of the sample deviation and
    /// the deviation of a sum of independent indicators.
    pub fn mean_within_3_sigma(&self) -> bool {
        (self.mean_surviving - self.expected_bad).abs() <= 3.0 * self.mean_sigma + 1e-12
    }

    pub fn rate_within_markov(&self) -> bool {
        self.empirical_rate <= self.markov_bound + 3.0 * self.rate_sigma + 1e-12
    }
}

/// Samples `trials` restrictions and counts the surviving bad monomials.
pub fn survival_experiment(
    c: &FewVarCircuit,
    s: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SurvivalReport, MeasureError> {
    check_probability(p)?;
    if trials == 0 {
        return Err(MeasureError::Invalid("at least one trial is needed".into()));
    }
    let bad = bad_support_monomials(c, s)?;
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mask = draw_mask(c.num_vars(), p, &mut restriction_rng(seed, trial));
        let surviving_bad = bad.surviving(&mask);
        records.push(TrialRecord {
            trial,
            mask,
            surviving_bad,
        });
    }
    let t = trials as f64;
    let survived = records.iter().filter(|r| r.surviving_bad > 0).count() as u64;
    let mean = records.iter().map(|r| r.surviving_bad as f64).sum::<f64>() / t;
    let var = records
        .iter()
        .map(|r| (r.surviving_bad as f64 - mean).powi(2))
        .sum::<f64>()
        / (t - 1.0).max(1.0);

    let p_exact = BigRational::from_float(p).unwrap_or_else(BigRational::zero);
    let expected_bad_exact = BigRational::from_integer(bad.count().into()) * pow(&p_exact, s);
    let expected_bad = expected_bad_exact.to_f64().unwrap_or(f64::INFINITY);
    // Each monomial is an indicator with variance q(1-q), q = p^s.
    let q = p.powi(s as i32);
    let indicator_var = bad.count() as f64 * q * (1.0 - q);
    let markov_bound = expected_bad.min(1.0);
    Ok(SurvivalReport {
        seed,
        trials,
        bad_count: bad.count(),
        survived,
        empirical_rate: survived as f64 / t,
        expected_bad_exact,
        expected_bad,
        markov_bound,
        mean_surviving: mean,
        mean_sigma: (var.max(indicator_var) / t).sqrt(),
        rate_sigma: (markov_bound * (1.0 - markov_bound) / t).sqrt(),
        records,
    })
}

fn pow(base: &BigRational, exp: usize) -> BigRational {
    (0..exp).fold(BigRational::from_integer(1.into()), |acc, _| acc * base)
}
