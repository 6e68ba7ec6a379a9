//! Reference implementations used by the integration tests. Polynomials are
//! maps from dense exponent vectors to rationals, built without the library's
//! arithmetic.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fewvar_core::{FewVarCircuit, FieldElem, SparsePolynomial};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Poly = BTreeMap<Vec<u32>, BigRational>;

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn elem(e: &FieldElem) -> BigRational {
    e.as_rational().expect("rational field").clone()
}

fn insert(p: &mut Poly, e: Vec<u32>, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(e.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&e);
    }
}

pub fn from_lib(p: &SparsePolynomial) -> Poly {
    let n = p.num_vars();
    let mut out = Poly::new();
    for (m, c) in p.terms() {
        let mut e = vec![0u32; n];
        for &(v, k) in m.exponents() {
            e[v] += k;
        }
        insert(&mut out, e, elem(c));
    }
    out
}

pub fn constant(n: usize, c: BigRational) -> Poly {
    let mut p = Poly::new();
    insert(&mut p, vec![0; n], c);
    p
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (e, c) in b {
        insert(&mut out, e.clone(), c.clone());
    }
    out
}

pub fn scale(a: &Poly, c: &BigRational) -> Poly {
    let mut out = Poly::new();
    for (e, v) in a {
        insert(&mut out, e.clone(), v * c);
    }
    out
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            insert(&mut out, e, ca * cb);
        }
    }
    out
}

/// Expands the circuit term by term, mapping each factor's local variables
/// through its support.
pub fn expand(c: &FewVarCircuit) -> Poly {
    let n = c.num_vars();
    let mut total = Poly::new();
    for term in c.terms() {
        let mut prod = constant(n, elem(&term.scale));
        for f in &term.factors {
            let mut g = Poly::new();
            for (m, coeff) in f.poly().terms() {
                let mut e = vec![0u32; n];
                for &(local, k) in m.exponents() {
                    e[f.support()[local]] += k;
                }
                insert(&mut g, e, elem(coeff));
            }
            prod = mul(&prod, &g);
        }
        total = add(&total, &prod);
    }
    total
}

pub fn derivative(p: &Poly, v: usize, j: u32) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        if e[v] < j {
            continue;
        }
        let falling: i64 = (0..j).map(|t| (e[v] - t) as i64).product();
        let mut e2 = e.clone();
        e2[v] -= j;
        insert(&mut out, e2, c * rat(falling));
    }
    out
}

/// Coefficient of `x_v^i`, as a polynomial free of `x_v`.
pub fn coefficient(p: &Poly, v: usize, i: u32) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        if e[v] == i {
            let mut e2 = e.clone();
            e2[v] = 0;
            insert(&mut out, e2, c.clone());
        }
    }
    out
}

pub fn hom(p: &Poly, i: u32) -> Poly {
    p.iter()
        .filter(|(e, _)| e.iter().sum::<u32>() == i)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

fn binom_i64(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * (n - t) as i64 / (t + 1) as i64)
}

/// `P(x + a)` by the binomial theorem in every variable.
pub fn translate(p: &Poly, a: &[BigRational]) -> Poly {
    let n = a.len();
    let mut out = Poly::new();
    for (e, c) in p {
        // Expand prod_v (x_v + a_v)^{e_v} one variable at a time.
        let mut partial = constant(n, c.clone());
        for v in 0..n {
            if e[v] == 0 {
                continue;
            }
            let mut factor = Poly::new();
            for t in 0..=e[v] {
                let mut ex = vec![0u32; n];
                ex[v] = t;
                let coeff = rat(binom_i64(e[v], t)) * pow(&a[v], e[v] - t);
                insert(&mut factor, ex, coeff);
            }
            partial = mul(&partial, &factor);
        }
        out = add(&out, &partial);
    }
    out
}

pub fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

pub fn restrict(p: &Poly, alive: &BTreeSet<usize>) -> Poly {
    p.iter()
        .filter(|(e, _)| e.iter().enumerate().all(|(v, &k)| k == 0 || alive.contains(&v)))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

pub fn eval(p: &Poly, point: &[BigRational]) -> BigRational {
    p.iter()
        .map(|(e, c)| e.iter().zip(point).fold(c.clone(), |acc, (&k, x)| acc * pow(x, k)))
        .fold(BigRational::zero(), |a, b| a + b)
}

pub fn individual_degree(p: &Poly) -> u32 {
    p.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
}

/// Rank of sparse rational rows by elimination against normalized pivots.
pub fn rank<K: Ord + Clone>(rows: Vec<BTreeMap<K, BigRational>>) -> usize {
    let mut pivots: BTreeMap<K, BTreeMap<K, BigRational>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let hit = row.keys().find(|k| pivots.contains_key(*k)).cloned();
            let Some(col) = hit else { break };
            let factor = row[&col].clone();
            for (k, v) in &pivots[&col] {
                let entry = row.entry(k.clone()).or_insert_with(BigRational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(k);
                }
            }
        }
        if let Some((col, lead)) = row.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
            let normalized = row.into_iter().map(|(k, v)| (k, v / &lead)).collect();
            pivots.insert(col, normalized);
        }
    }
    pivots.len()
}

/// Projected shifted partial derivative dimension, built row by row:
/// `sigma(x^S d_gamma P)` for every `gamma` in `derivs` (multilinear variable
/// lists) and every `m`-subset `S`.
pub fn psd_dimension(p: &Poly, n: usize, derivs: &[Vec<usize>], m: usize) -> usize {
    let mut rows = Vec::new();
    for gamma in derivs {
        let mut d = p.clone();
        for &v in gamma {
            d = derivative(&d, v, 1);
        }
        for shift in subsets(n, m) {
            let mut row: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
            for (e, c) in &d {
                let mut e2 = e.clone();
                for &v in &shift {
                    e2[v] += 1;
                }
                if e2.iter().all(|&k| k <= 1) {
                    insert(&mut row, e2, c.clone());
                }
            }
            rows.push(row);
        }
    }
    rank(rows)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for t in 0..k {
        acc = acc * (n - BigUint::from(t)) / BigUint::from(t + 1);
    }
    acc
}

/// Natural log of a positive big integer through its top 64 bits.
pub fn ln_uint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(num / den)` for a ratio near 1, through `ln_1p` of the exact
/// difference.
pub fn ln_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let diff = BigRational::new(num - den, den.clone());
    if diff.abs() < rat(1) / rat(2) {
        diff.to_f64().unwrap().ln_1p()
    } else {
        ln_uint(&num.to_biguint().unwrap()) - ln_uint(&den.to_biguint().unwrap())
    }
}

/// `ln C(N, a + len) - ln C(N, a)`, multiplying the ratios
/// `(N - j) / (j + 1)` exactly in chunks.
pub fn ln_binomial_step(big_n: &BigUint, a: &BigUint, len: u64) -> f64 {
    const CHUNK: u64 = 64;
    let n = BigInt::from(big_n.clone());
    let a = BigInt::from(a.clone());
    let mut total = 0.0;
    let mut done = 0;
    while done < len {
        let end = (done + CHUNK).min(len);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for t in done..end {
            let j = &a + BigInt::from(t);
            num *= &n - &j;
            den *= j + 1;
        }
        total += ln_ratio(&num, &den);
        done = end;
    }
    total
}
