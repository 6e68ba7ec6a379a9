use std::fmt::Write as _;

use super::design::{ceil_log2, rs_design, verify_design, Design};
use super::PitError;
use crate::algebra::prime::{is_prime_u64, next_prime_at_least};
use crate::algebra::{bertrand_prime, Field, FieldElem};
use crate::nw::NWOnSet;

/// Replacements for derived quantities, for instances small enough to
/// enumerate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PitOverrides {
    /// Universe size. Without `sets`, the sets become the first `N`
    /// `(a' q)`-subsets of `[l]` in lexicographic order, repeated cyclically
    /// if there are fewer than `N`.
    pub l: Option<usize>,
    pub a: Option<usize>,
    pub q: Option<u64>,
    pub a_prime: Option<usize>,
    pub d: Option<u32>,
    /// Grid size; the grid is `{0, ..., g - 1}`.
    pub grid: Option<usize>,
    /// Already trimmed sets, each of size `a' q`.
    pub sets: Option<Vec<Vec<usize>>>,
}

impl PitOverrides {
    pub fn is_empty(&self) -> bool {
        *self == PitOverrides::default()
    }
}

/// Hitting-set parameters for `N`-variate circuits of individual degree `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PitParams {
    pub mu: f64,
    pub mu_prime: f64,
    pub c: f64,
    pub n: usize,
    pub k: u32,
    pub a: usize,
    pub l: usize,
    pub delta_prime: f64,
    pub gamma_prime: f64,
    pub q: u64,
    pub a_prime: usize,
    pub d: u32,
    /// The untrimmed design, absent when the sets were overridden.
    pub design: Option<Design>,
    /// Trimmed sets, each of size `a' q`, laid out row-major as `a' x q`.
    pub sets: Vec<Vec<usize>>,
    pub grid: Vec<i64>,
    pub overridden: bool,
}

impl PitParams {
    pub fn grid_elems(&self) -> Vec<FieldElem> {
        self.grid.iter().map(|&g| Field::Rational.from_i64(g)).collect()
    }

    /// The NW polynomial on each trimmed set.
    pub fn nw_sets(&self) -> Result<Vec<NWOnSet>, PitError> {
        self.sets
            .iter()
            .map(|s| NWOnSet::new(s.clone(), self.a_prime, self.q, self.d).map_err(PitError::from))
            .collect()
    }

    /// `a/2 <= a' q <= a`.
    pub fn trim_ok(&self) -> bool {
        let aq = self.a_prime as u64 * self.q;
        2 * aq >= self.a as u64 && aq <= self.a as u64
    }

    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mu={}", self.mu);
        let _ = writeln!(out, "mu_prime={}", self.mu_prime);
        let _ = writeln!(out, "c={}", self.c);
        let _ = writeln!(out, "N={}", self.n);
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "a={}", self.a);
        let _ = writeln!(out, "l={}", self.l);
        let _ = writeln!(out, "delta_prime={}", self.delta_prime);
        let _ = writeln!(out, "gamma_prime={}", self.gamma_prime);
        let _ = writeln!(out, "q={}", self.q);
        let _ = writeln!(out, "a_prime={}", self.a_prime);
        let _ = writeln!(out, "D={}", self.d);
        let _ = writeln!(out, "grid_size={}", self.grid.len());
        let _ = writeln!(out, "trim_ok={}", self.trim_ok());
        let _ = writeln!(out, "overridden={}", self.overridden);
        out
    }
}

/// Derives the parameters for `mu`, applying `overrides` on top.
pub fn derive_pit_params(mu: f64, c: f64, n: usize, k: u32, overrides: &PitOverrides) -> Result<PitParams, PitError> {
    if !(0.0..0.5).contains(&mu) {
        return Err(PitError::Precondition(format!("mu = {mu} is outside [0, 1/2)")));
    }
    if n < 2 || (n < 4 && overrides.is_empty()) {
        return Err(PitError::Precondition(format!("N = {n} is too small")));
    }
    if k == 0 {
        return Err(PitError::Precondition("k must be at least 1".into()));
    }
    let mu_prime = (2.0 * mu + 1.0) / 2.0;
    let delta_prime = (1.0 - mu_prime) / 2.0;
    let gamma_prime = (2.0 * (mu_prime + delta_prime) + 1.0) / (1.0 - (mu_prime + delta_prime));
    let log_n = (n as f64).log2();
    let a = match overrides.a {
        Some(a) => a,
        None => ((n as f64).powf(mu / mu_prime) * log_n.powf(1.0 / mu_prime) - 1e-9).ceil() as usize,
    };
    let half = a as f64 / 2.0;
    let a_prime = overrides
        .a_prime
        .unwrap_or_else(|| ((half.powf(1.0 / (2.0 + gamma_prime)) + 1e-9).floor() as usize).max(1));
    let q = match overrides.q {
        Some(q) => {
            if !is_prime_u64(q) {
                return Err(PitError::Precondition(format!("q = {q} is not prime")));
            }
            q
        }
        None => choose_q(a, a_prime, half.powf((1.0 + gamma_prime) / (2.0 + gamma_prime)))?,
    };
    let d = match overrides.d {
        Some(d) => d,
        None if a_prime <= 1 => 1,
        None => {
            let rho = (mu_prime + delta_prime) * ((a_prime as f64) * q as f64).ln() / (a_prime as f64).ln();
            ((gamma_prime + rho) / (2.0 * (1.0 + gamma_prime)) * a_prime as f64).ceil() as u32
        }
    }
    .clamp(1, q.min(u32::MAX as u64) as u32);
    let width = a_prime * q as usize;

    let (design, l, sets) = match (&overrides.sets, overrides.l) {
        (Some(sets), l) => {
            let l = l.unwrap_or_else(|| sets.iter().flatten().max().map_or(0, |m| m + 1));
            (None, l, sets.clone())
        }
        (None, Some(l)) => (None, l, lex_subsets(l, width, n)?),
        (None, None) => {
            let design = rs_design(n, a, ceil_log2(n))?;
            debug_assert!(verify_design(&design).passed());
            if width > design.a {
                return Err(PitError::Precondition(format!("a' q = {width} exceeds a = {}", design.a)));
            }
            let sets = design.sets.iter().map(|s| s[..width].to_vec()).collect();
            (Some(design.clone()), design.l, sets)
        }
    };
    if sets.len() != n {
        return Err(PitError::Precondition(format!("{} sets given for N = {n}", sets.len())));
    }
    if let Some(bad) = sets.iter().find(|s| s.len() != width || s.iter().any(|&v| v >= l)) {
        return Err(PitError::Precondition(format!(
            "set {bad:?} must have {width} elements below l = {l}"
        )));
    }
    let grid_size = match overrides.grid {
        Some(g) => g,
        None => n * k as usize * a_prime + 1,
    };
    if grid_size == 0 {
        return Err(PitError::Precondition("the grid is empty".into()));
    }
    let params = PitParams {
        mu,
        mu_prime,
        c,
        n,
        k,
        a,
        l,
        delta_prime,
        gamma_prime,
        q,
        a_prime,
        d,
        design,
        sets,
        grid: (0..grid_size as i64).collect(),
        overridden: !overrides.is_empty(),
    };
    params.nw_sets()?;
    Ok(params)
}

/// The least prime `q` in the window `(x, 2x]`, moved if needed so that
/// `a/2 <= a' q <= a`.
fn choose_q(a: usize, a_prime: usize, x: f64) -> Result<u64, PitError> {
    let lo = x.floor() as u64;
    let hi = (2.0 * x).floor() as u64;
    let mut q = bertrand_prime(lo, hi).unwrap_or_else(|_| next_prime_at_least(lo + 1));
    let a = a as u64;
    let a_prime = a_prime as u64;
    if a_prime * q > a {
        // Step down through smaller primes.
        q = (1..q)
            .rev()
            .find(|&p| is_prime_u64(p) && a_prime * p <= a)
            .ok_or_else(|| PitError::Precondition(format!("no prime q with a' q <= a = {a}")))?;
    }
    if 2 * a_prime * q < a {
        q = next_prime_at_least(a.div_ceil(2 * a_prime));
    }
    if a_prime * q > a || 2 * a_prime * q < a {
        return Err(PitError::Precondition(format!(
            "no prime q with a/2 <= a' q <= a for a = {a}, a' = {a_prime}"
        )));
    }
    Ok(q)
}

/// The first `count` `size`-subsets of `[l]` in lexicographic order, cycled.
fn lex_subsets(l: usize, size: usize, count: usize) -> Result<Vec<Vec<usize>>, PitError> {
    if size > l {
        return Err(PitError::Precondition(format!("sets of size {size} do not fit in l = {l}")));
    }
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(count);
    let mut current: Vec<usize> = (0..size).collect();
    while out.len() < count {
        out.push(current.clone());
        // Advance to the next combination, wrapping to the first.
        let mut i = size;
        loop {
            if i == 0 {
                current = (0..size).collect();
                break;
            }
            i -= 1;
            if current[i] < l - size + i {
                current[i] += 1;
                for j in i + 1..size {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
    Ok(out)
}
