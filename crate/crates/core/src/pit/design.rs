//! Combinatorial designs from Reed-Solomon codes.

use std::fmt;

use super::PitError;
use crate::algebra::prime::next_prime_at_least;

/// `b` subsets of `[l]`, each of size `a`, with small pairwise intersections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    pub l: usize,
    pub a: usize,
    pub sets: Vec<Vec<usize>>,
}

impl Design {
    pub fn b(&self) -> usize {
        self.sets.len()
    }

    /// `ceil(log2 b)`, the intersection bound designs must meet.
    pub fn intersection_bound(&self) -> usize {
        ceil_log2(self.b())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("l={} a={} b={}\n", self.l, self.a, self.b());
        for set in &self.sets {
            let items: Vec<String> = set.iter().map(usize::to_string).collect();
            out.push_str("set=");
            out.push_str(&items.join(","));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn ceil_log2(b: usize) -> usize {
    if b <= 1 {
        0
    } else {
        (usize::BITS - (b - 1).leading_zeros()) as usize
    }
}

/// The graphs `{(x, f(x)) : x < a}` of the first `b` univariates over
/// `GF(q0)` of degree at most `c0`, with `(x, y)` encoded as `x * q0 + y`.
///
/// `q0` is the least prime `>= a` and `c0` the least degree with
/// `q0^(c0 + 1) >= b`. Univariate number `t` has the base-`q0` digits of `t`
/// as coefficients, constant term first.
pub fn rs_design(b: usize, a: usize, intersection_cap: usize) -> Result<Design, PitError> {
    if b == 0 || a == 0 {
        return Err(PitError::Precondition(format!("design needs a, b >= 1, got a={a} b={b}")));
    }
    let mut q0 = next_prime_at_least(a as u64);
    let mut c0 = min_degree(q0, b);
    while c0 >= q0 {
        q0 = next_prime_at_least(q0 + 1);
        c0 = min_degree(q0, b);
    }
    if c0 as usize > intersection_cap {
        return Err(PitError::Precondition(format!(
            "Reed-Solomon degree {c0} over GF({q0}) exceeds the intersection cap {intersection_cap}"
        )));
    }
    let q = q0 as usize;
    let mut sets = Vec::with_capacity(b);
    for t in 0..b {
        let mut coeffs = Vec::with_capacity(c0 as usize + 1);
        let mut rest = t;
        for _ in 0..=c0 {
            coeffs.push((rest % q) as u64);
            rest /= q;
        }
        assert_eq!(rest, 0, "b exceeds q0^(c0 + 1)");
        let set = (0..a as u64)
            .map(|x| {
                let y = coeffs.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % q0);
                (x * q0 + y) as usize
            })
            .collect();
        sets.push(set);
    }
    Ok(Design { l: q * q, a, sets })
}

fn min_degree(q0: u64, b: usize) -> u64 {
    let mut c = 0;
    let mut reach = q0 as u128;
    while reach < b as u128 {
        reach *= q0 as u128;
        c += 1;
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignReport {
    pub sizes_ok: bool,
    pub indices_ok: bool,
    pub max_intersection: usize,
    pub intersection_bound: usize,
    /// First pair (with its intersection size) over the bound.
    pub violating_pair: Option<(usize, usize, usize)>,
    /// First set with the wrong size, a repeated element or an index `>= l`.
    pub bad_set: Option<usize>,
}

impl DesignReport {
    pub fn passed(&self) -> bool {
        self.sizes_ok && self.indices_ok && self.violating_pair.is_none()
    }
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verify={} sizes_ok={} indices_ok={} max_intersection={} bound={}",
            if self.passed() { "pass" } else { "fail" },
            self.sizes_ok,
            self.indices_ok,
            self.max_intersection,
            self.intersection_bound
        )?;
        if let Some((i, j, k)) = self.violating_pair {
            write!(f, " violating_pair={i},{j} intersection={k}")?;
        }
        Ok(())
    }
}

/// Checks every set size, every index and every pairwise intersection.
pub fn verify_design(d: &Design) -> DesignReport {
    let bound = d.intersection_bound();
    let mut bad_set = None;
    let mut sizes_ok = true;
    let mut indices_ok = true;
    let mut masks = Vec::with_capacity(d.b());
    for (i, set) in d.sets.iter().enumerate() {
        let mut mask = vec![false; d.l];
        let mut repeated = false;
        for &v in set {
            if v >= d.l {
                indices_ok = false;
                bad_set.get_or_insert(i);
            } else if mask[v] {
                repeated = true;
            } else {
                mask[v] = true;
            }
        }
        if set.len() != d.a || repeated {
            sizes_ok = false;
            bad_set.get_or_insert(i);
        }
        masks.push(mask);
    }
    let mut max_intersection = 0;
    let mut violating_pair = None;
    for i in 0..d.b() {
        for j in i + 1..d.b() {
            let k = d.sets[j].iter().filter(|&&v| v < d.l && masks[i][v]).count();
            max_intersection = max_intersection.max(k);
            if k > bound && violating_pair.is_none() {
                violating_pair = Some((i, j, k));
            }
        }
    }
    DesignReport {
        sizes_ok,
        indices_ok,
        max_intersection,
        intersection_bound: bound,
        violating_pair,
        bad_set,
    }
}
