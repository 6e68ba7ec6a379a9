use rand::Rng;

use super::{CircuitTerm, FactorPoly, FewVarCircuit};
use crate::algebra::{Field, FieldElem, Monomial, SparsePolynomial};

/// Shape limits for [`random_circuit`].
#[derive(Clone, Debug)]
pub struct RandomCircuitConfig {
    pub num_vars: usize,
    pub max_terms: usize,
    pub max_fanin: usize,
    pub s: usize,
    /// Individual degree bound of the computed polynomial.
    pub k: u32,
    /// Integer coefficients are drawn from `-coeff_range..=coeff_range`.
    pub coeff_range: i64,
    /// Maximum number of monomials per factor.
    pub max_factor_terms: usize,
}

impl Default for RandomCircuitConfig {
    fn default() -> Self {
        RandomCircuitConfig {
            num_vars: 6,
            max_terms: 3,
            max_fanin: 3,
            s: 2,
            k: 2,
            coeff_range: 3,
            max_factor_terms: 3,
        }
    }
}

/// A random circuit whose expansion has individual degree at most `cfg.k`.
///
/// Each product tracks a per-variable degree budget of `k`, so the bound
/// holds for every product and hence for the sum. The declared `k` is set.
pub fn random_circuit<R: Rng + ?Sized>(cfg: &RandomCircuitConfig, rng: &mut R) -> FewVarCircuit {
    let field = Field::Rational;
    let terms_count = rng.gen_range(1..=cfg.max_terms.max(1));
    let s = cfg.s.min(cfg.num_vars);
    let mut terms = Vec::with_capacity(terms_count);
    for _ in 0..terms_count {
        let mut budget = vec![cfg.k; cfg.num_vars];
        let fanin = rng.gen_range(1..=cfg.max_fanin.max(1));
        let mut factors = Vec::with_capacity(fanin);
        for _ in 0..fanin {
            let width = rng.gen_range(0..=s);
            let support = rand::seq::index::sample(rng, cfg.num_vars, width).into_vec();
            let poly = random_local_poly(cfg, &support, &budget, rng);
            for (lv, &g) in support.iter().enumerate() {
                budget[g] -= poly.degree_in(lv);
            }
            factors.push(FactorPoly::new(support, poly).expect("distinct support"));
        }
        terms.push(CircuitTerm {
            scale: nonzero(cfg.coeff_range, field, rng),
            factors,
        });
    }
    FewVarCircuit::new(cfg.num_vars, field, cfg.s, Some(cfg.k), terms)
        .expect("generator respects the shape")
}

fn random_local_poly<R: Rng + ?Sized>(
    cfg: &RandomCircuitConfig,
    support: &[usize],
    budget: &[u32],
    rng: &mut R,
) -> SparsePolynomial {
    let field = Field::Rational;
    let count = rng.gen_range(1..=cfg.max_factor_terms.max(1));
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let pairs = support
            .iter()
            .enumerate()
            .map(|(lv, &g)| (lv, rng.gen_range(0..=budget[g])));
        let m = Monomial::from_pairs(pairs.collect::<Vec<_>>());
        terms.push((m, nonzero(cfg.coeff_range, field, rng)));
    }
    let p =
        SparsePolynomial::from_terms(support.len(), field, terms).expect("local indices in range");
    if p.is_zero() {
        SparsePolynomial::one(support.len(), field)
    } else {
        p
    }
}

fn nonzero<R: Rng + ?Sized>(range: i64, field: Field, rng: &mut R) -> FieldElem {
    let range = range.max(1);
    loop {
        let v = rng.gen_range(-range..=range);
        if v != 0 {
            return field.from_i64(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn respects_shape_and_degree() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let cfg = RandomCircuitConfig::default();
        for _ in 0..50 {
            let c = random_circuit(&cfg, &mut rng);
            assert!(c.top_fanin() <= cfg.max_terms);
            assert!(c.max_fanin() <= cfg.max_fanin);
            assert!(c.max_support() <= cfg.s);
            assert!(c.expand().unwrap().individual_degree() <= cfg.k);
        }
    }
}
