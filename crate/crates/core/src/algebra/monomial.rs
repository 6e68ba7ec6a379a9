use std::cmp::Ordering;
use std::fmt;

/// A monomial stored as a sparse exponent map, sorted by variable index.
///
/// Zero exponents are never stored, so the support is exactly the key set.
/// Ordering is graded lexicographic: total degree first, then the exponent
/// of the lowest-indexed variable where the two differ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: usize) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    pub fn var_pow(v: usize, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { exps: vec![(v, e)] }
        }
    }

    /// Builds a monomial from `(var, exp)` pairs in any order; repeated
    /// variables are merged and zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut exps: Vec<(usize, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        exps.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { exps: merged }
    }

    /// The multilinear monomial over the given variables.
    pub fn multilinear<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: usize) -> u32 {
        match self.exps.binary_search_by_key(&v, |&(var, _)| var) {
            Ok(i) => self.exps[i].1,
            Err(_) => 0,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().map(|&(v, _)| v)
    }

    pub fn support_size(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_multilinear(&self) -> bool {
        self.exps.iter().all(|&(_, e)| e == 1)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.exps.last().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, b) = (self.exps[i], other.exps[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// Removes variable `v`, returning the remaining monomial and the
    /// exponent that was stripped.
    pub fn split_var(&self, v: usize) -> (Monomial, u32) {
        let e = self.exponent(v);
        if e == 0 {
            return (self.clone(), 0);
        }
        let exps = self
            .exps
            .iter()
            .copied()
            .filter(|&(var, _)| var != v)
            .collect();
        (Monomial { exps }, e)
    }

    pub fn with_exponent(&self, v: usize, e: u32) -> Monomial {
        let (rest, _) = self.split_var(v);
        rest.mul(&Monomial::var_pow(v, e))
    }

    /// Renames variables; returns `None` if `map` drops a variable that
    /// occurs in the monomial.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, map: F) -> Option<Monomial> {
        let mut pairs = Vec::with_capacity(self.exps.len());
        for &(v, e) in &self.exps {
            pairs.push((map(v)?, e));
        }
        Some(Monomial::from_pairs(pairs))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            if a.0 != b.0 {
                // The lower-indexed variable is present only on one side.
                return if a.0 < b.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.exps.len().cmp(&other.exps.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (i, &(v, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{e}")?;
            }
        }
        Ok(())
    }
}
