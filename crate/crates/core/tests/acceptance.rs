//! Acceptance criteria 1 to 10. Each prints one PASS or FAIL line; the test
//! fails when the set of red criteria differs from `EXPECTED_RED`.

mod oracle;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fewvar_core::circuit::{audit_transforms, random_circuit, RandomCircuitConfig};
use fewvar_core::measure::{
    appendix_ratios, approx_check, depth4_upper_bound, psd_dimension, sample_restriction, subadditivity_check,
    survival_experiment, RatioOverrides,
};
use fewvar_core::nw::derive_nw_params;
use fewvar_core::pit::{
    combnulls_grid, derive_pit_params, hitting_set_size, pit_run, pit_run_circuit, rs_design, schwartz_zippel, search,
    verify_design, FnBlackbox, PitOutcome, PitOverrides,
};
use fewvar_core::{
    Field, FieldElem, FewVarCircuit, MeasureParams, Monomial, NWInstance, RestrictionMask, SparsePolynomial,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use oracle::{rat, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Criteria expected to be red. The closed-form estimate for the first ratio
/// is off by far more than 10% at n = 10^6 (see the README).
const EXPECTED_RED: &[u32] = &[10];

const TRANSFORM_CIRCUITS: u64 = 200;
const TRANSFORM_TIME: Duration = Duration::from_secs(60);
const HOMOG_INSTANCES: u64 = 50;
const NW_POINTS: usize = 50;
const DESIGN_TIME: Duration = Duration::from_secs(5);
const SUBADD_PAIRS: u64 = 100;
const SUBADD_ORACLE_PAIRS: u64 = 20;
const BOUND_INSTANCES: u64 = 50;
const MEASURE_TIME: Duration = Duration::from_secs(300);
const RESTRICT_TRIALS: u64 = 1000;
const SIGMAS: f64 = 3.0;
const PIT_CIRCUITS: usize = 100;
const LOG_REL_TOL: f64 = 1e-6;
const CLOSED_FORM_REL_TOL: f64 = 0.10;
const APPROX_INSTANCES: [(u64, u64, u64); 3] = [(10_000, 0, 0), (10_000, 10, 10), (1_000_000, 50, 50)];
const RATIO_TIME: Duration = Duration::from_secs(10);

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn q(v: i64) -> FieldElem {
    Field::Rational.from_i64(v)
}

fn to_lib(p: &Poly, n: usize) -> SparsePolynomial {
    let terms = p.iter().map(|(e, c)| {
        let m = Monomial::from_pairs(e.iter().enumerate().map(|(v, &k)| (v, k)).collect::<Vec<_>>());
        (m, Field::Rational.from_rational(c).unwrap())
    });
    SparsePolynomial::from_terms(n, Field::Rational, terms).unwrap()
}

fn rationals(point: &[FieldElem]) -> Vec<BigRational> {
    point.iter().map(oracle::elem).collect()
}

fn transform_config(rng: &mut ChaCha20Rng) -> RandomCircuitConfig {
    RandomCircuitConfig {
        num_vars: rng.gen_range(1..=10),
        max_terms: rng.gen_range(1..=4),
        max_fanin: rng.gen_range(1..=4),
        s: rng.gen_range(1..=3),
        k: rng.gen_range(1..=3),
        coeff_range: 3,
        max_factor_terms: 3,
    }
}

/// Criteria 1 and 2 share the circuit suite.
fn transforms() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checks = 0usize;
    let mut fanin_violations = 0usize;
    let mut audit_failures = 0usize;
    let (mut worst_deriv, mut worst_coeff) = (0.0f64, 0.0f64);
    for seed in 0..TRANSFORM_CIRCUITS {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let cfg = transform_config(&mut rng);
        let c = random_circuit(&cfg, &mut rng);
        let n = c.num_vars();
        let k = c.k().unwrap();
        let t = c.top_fanin();
        let p = oracle::expand(&c);
        let mut check = |label: String, got: &FewVarCircuit, want: Poly| {
            checks += 1;
            if oracle::expand(got) != want {
                mismatches.push(format!("seed {seed}: {label}"));
            }
        };
        for y in 0..n {
            for j in 0..=k {
                let d = c.derivative_circuit(y, j).unwrap();
                let allowance = t * (k as usize + 1).pow(2);
                worst_deriv = worst_deriv.max(d.top_fanin() as f64 / allowance as f64);
                fanin_violations += usize::from(d.top_fanin() > allowance);
                check(format!("derivative y={y} j={j}"), &d, oracle::derivative(&p, y, j));
            }
            for (i, ci) in c.coeff_circuits(y, k).unwrap().iter().enumerate() {
                let allowance = t * (k as usize + 1);
                worst_coeff = worst_coeff.max(ci.top_fanin() as f64 / allowance as f64);
                fanin_violations += usize::from(ci.top_fanin() > allowance);
                check(format!("coefficient y={y} i={i}"), ci, oracle::coefficient(&p, y, i as u32));
            }
        }
        let d_tot = c.formal_degree();
        for i in 0..=d_tot + 1 {
            check(format!("hom i={i}"), &c.hom_component_circuit(i, d_tot).unwrap(), oracle::hom(&p, i));
        }
        let shift: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let shift_elems: Vec<FieldElem> = shift.iter().map(|&v| q(v)).collect();
        let shift_rats: Vec<BigRational> = shift.iter().map(|&v| rat(v)).collect();
        check("translate".into(), &c.translate(&shift_elems).unwrap(), oracle::translate(&p, &shift_rats));
        let alive: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let mask = RestrictionMask::new(n, alive.iter().copied()).unwrap();
        check("restrict".into(), &c.restrict(&mask).unwrap(), oracle::restrict(&p, &alive));

        let audit = audit_transforms(&c, &mut rng, 1 << 20).unwrap();
        audit_failures += usize::from(!audit.passed());
    }
    let elapsed = start.elapsed();
    let c1 = outcome(
        1,
        mismatches.is_empty() && audit_failures == 0 && elapsed < TRANSFORM_TIME,
        format!(
            "{TRANSFORM_CIRCUITS} circuits, {checks} exact comparisons, {} mismatches {:?}, {audit_failures} audit failures, {:.1?}",
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>(),
            elapsed
        ),
    );
    let c2 = outcome(
        2,
        fanin_violations == 0,
        format!(
            "{fanin_violations} violations; largest fan-in over allowance: derivatives {worst_deriv:.3}, coefficients {worst_coeff:.3}"
        ),
    );
    (c1, c2)
}

fn homogenization() -> Outcome {
    let mut failures = Vec::new();
    let mut nonzero = 0;
    for seed in 0..HOMOG_INSTANCES {
        let mut rng = ChaCha20Rng::seed_from_u64(10_000 + seed);
        let cfg = RandomCircuitConfig {
            num_vars: rng.gen_range(1..=5),
            max_terms: 3,
            max_fanin: 3,
            s: 2,
            k: 2,
            coeff_range: 3,
            max_factor_terms: 3,
        };
        let mut c = random_circuit(&cfg, &mut rng);
        // Translating gives most factors a constant term, which exercises the
        // elementary symmetric part of the decomposition.
        if seed % 2 == 0 {
            let shift: Vec<FieldElem> = (0..c.num_vars()).map(|_| q(rng.gen_range(1..=2))).collect();
            c = c.translate(&shift).unwrap();
        }
        let n = rng.gen_range(0..=4);
        let want = oracle::hom(&oracle::expand(&c), n);
        nonzero += usize::from(!want.is_empty());
        let got = c.homogenize(n).unwrap().to_polynomial().unwrap();
        if oracle::from_lib(&got) != want {
            failures.push(seed);
        }
    }
    outcome(
        3,
        failures.is_empty(),
        format!("{HOMOG_INSTANCES} instances ({nonzero} with nonzero target), failing seeds {failures:?}"),
    )
}

/// Monomials of the NW polynomial as variable sets, from a direct
/// enumeration of all univariates of degree below `d`.
fn nw_oracle(psi: u64, d: u32, n: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    let total = psi.pow(d);
    for code in 0..total {
        // Digit t of `code` in base psi is the coefficient of z^t.
        let coeffs: Vec<u64> = (0..d).map(|t| code / psi.pow(t) % psi).collect();
        let set = (0..n)
            .map(|row| {
                let z = (row as u64 + 1) % psi;
                let value = coeffs.iter().rev().fold(0, |acc, &c| (acc * z + c) % psi);
                row * psi as usize + value as usize
            })
            .collect();
        out.push(set);
    }
    out
}

fn nw_properties() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for (psi, d, n) in [(3u64, 1u32, 2usize), (3, 2, 3), (5, 2, 3)] {
        let nw = NWInstance::new(n, psi, d).unwrap();
        let expected = oracle_sets_sorted(nw_oracle(psi, d, n));
        let lib: Vec<Monomial> = nw.monomials(1 << 20).unwrap();
        let lib_sets = oracle_sets_sorted(lib.iter().map(|m| m.support().collect()).collect());
        let count_ok = lib.len() as u64 == psi.pow(d) && expected.len() as u64 == psi.pow(d);
        let shape_ok = lib.iter().all(|m| m.is_multilinear() && m.degree() == n as u32);
        let mut max_inter = 0;
        for (i, a) in expected.iter().enumerate() {
            for b in &expected[i + 1..] {
                max_inter = max_inter.max(a.intersection(b).count());
            }
        }
        let inter_ok = max_inter < d as usize;
        let report_ok = nw.check_properties(1 << 20).unwrap().passed();

        let poly: Poly = expected
            .iter()
            .map(|set| {
                let mut e = vec![0u32; nw.num_vars()];
                set.iter().for_each(|&v| e[v] = 1);
                (e, rat(1))
            })
            .collect();
        let mut eval_mismatch = 0;
        for _ in 0..NW_POINTS {
            let point: Vec<BigRational> = (0..nw.num_vars())
                .map(|_| BigRational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into()))
                .collect();
            let elems: Vec<FieldElem> = point.iter().map(|r| Field::Rational.from_rational(r).unwrap()).collect();
            let got = oracle::elem(&nw.eval(&elems, 1 << 20).unwrap());
            eval_mismatch += usize::from(got != oracle::eval(&poly, &point));
        }
        let ok = count_ok && shape_ok && inter_ok && report_ok && lib_sets == expected && eval_mismatch == 0;
        pass &= ok;
        notes.push(format!(
            "(psi={psi},D={d},n={n}) count={} max_intersection={max_inter} eval_mismatches={eval_mismatch}{}",
            lib.len(),
            if ok { "" } else { " BAD" }
        ));
    }
    outcome(4, pass, notes.join("; "))
}

fn oracle_sets_sorted(mut sets: Vec<BTreeSet<usize>>) -> Vec<BTreeSet<usize>> {
    sets.sort();
    sets
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn parameters() -> Outcome {
    // Independent derivation at mu = 0, n = 2.
    let (mu, n) = (0.0f64, 2u64);
    let delta = (1.0 - mu) / 2.0;
    let gamma = (2.0 * (mu + delta) + 1.0) / (1.0 - mu - delta);
    let lo = (n as f64).powf(1.0 + gamma);
    let psi = (lo.ceil() as u64..=(2.0 * lo) as u64).find(|&p| is_prime(p)).unwrap();
    let big_n = psi * n;
    let rho = (mu + delta) * (big_n as f64).ln() / (n as f64).ln();
    let d = ((gamma + rho) / (2.0 * (1.0 + gamma)) * n as f64).ceil() as u64;
    let nw = derive_nw_params(mu, n).unwrap();
    let nw_ok = (psi, big_n, d) == (37, 74, 2)
        && nw.psi == BigUint::from(psi)
        && nw.big_n == BigUint::from(big_n)
        && nw.d == d;
    let mut notes = vec![format!("NW: psi={} N={} D={}", nw.psi, nw.big_n, nw.d)];

    let mut pit_ok = true;
    for big_n in [16usize, 64, 256] {
        for k in [1u32, 2] {
            let p = derive_pit_params(0.0, 1.0, big_n, k, &PitOverrides::default()).unwrap();
            let aq = p.a_prime as u64 * p.q;
            let trim = 2 * aq >= p.a as u64 && aq <= p.a as u64;
            let g = big_n as u64 * k as u64 * p.a_prime as u64 + 1;
            let grid = p.grid.len() as u64 == g && p.grid.iter().enumerate().all(|(i, &v)| v == i as i64);
            let size = hitting_set_size(&p) == num_traits::pow(BigUint::from(g), p.l);
            let ok = trim && grid && size && p.trim_ok();
            pit_ok &= ok;
            notes.push(format!(
                "PIT N={big_n} k={k}: a={} a'={} q={} |G|={} l={}{}",
                p.a,
                p.a_prime,
                p.q,
                p.grid.len(),
                p.l,
                if ok { "" } else { " BAD" }
            ));
        }
    }
    outcome(5, nw_ok && pit_ok, notes.join("; "))
}

fn designs() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (b, a) in [(4usize, 2usize), (9, 3), (16, 4)] {
        let bound = (b as f64).log2().ceil() as usize;
        let d = rs_design(b, a, bound).unwrap();
        let sizes = d.sets.len() == b
            && d.sets.iter().all(|s| {
                let set: BTreeSet<_> = s.iter().collect();
                set.len() == a && s.iter().all(|&x| x < d.l)
            });
        let mut max_inter = 0;
        for i in 0..b {
            for j in i + 1..b {
                let si: BTreeSet<_> = d.sets[i].iter().collect();
                max_inter = max_inter.max(d.sets[j].iter().filter(|x| si.contains(x)).count());
            }
        }
        let ok = sizes && max_inter <= bound && verify_design(&d).passed();
        pass &= ok;
        notes.push(format!("(b={b},a={a}) l={} max_intersection={max_inter} bound={bound}", d.l));
    }
    let elapsed = start.elapsed();
    outcome(6, pass && elapsed < DESIGN_TIME, format!("{}; {elapsed:.1?}", notes.join("; ")))
}

fn random_sparse(rng: &mut ChaCha20Rng, n: usize) -> Poly {
    let mut p = Poly::new();
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u32; n];
        for _ in 0..rng.gen_range(1..=3) {
            e[rng.gen_range(0..n)] += 1;
        }
        p = oracle::add(&p, &[(e, rat(rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }))].into());
    }
    p
}

/// A sum of `c` products of at most `fanin` polynomials whose monomials have
/// support at most `s`.
fn bounded_support(rng: &mut ChaCha20Rng, n: usize, c: usize, fanin: usize, s: usize) -> Poly {
    let mut total = Poly::new();
    for _ in 0..c {
        let mut prod = oracle::constant(n, rat(1));
        for _ in 0..rng.gen_range(1..=fanin) {
            let mut factor = Poly::new();
            for _ in 0..rng.gen_range(1..=3) {
                let mut e = vec![0u32; n];
                let width = rng.gen_range(0..=s);
                for v in rand::seq::index::sample(rng, n, width) {
                    e[v] = rng.gen_range(1..=2);
                }
                factor = oracle::add(&factor, &[(e, rat(rng.gen_range(1..=3)))].into());
            }
            prod = oracle::mul(&prod, &factor);
        }
        total = oracle::add(&total, &prod);
    }
    total
}

fn measure() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();

    // Hand-checked examples.
    let x1x2 = to_lib(&[(vec![1, 1, 0], rat(1))].into(), 3);
    let two: Poly = [(vec![1, 1, 0, 0], rat(1)), (vec![0, 0, 1, 1], rat(1))].into();
    let examples = [
        psd_dimension(&x1x2, &MeasureParams::new(1, 1).with_derivatives(vec![Monomial::var(0)])).unwrap().phi,
        psd_dimension(&SparsePolynomial::zero(3, Field::Rational), &MeasureParams::new(1, 1)).unwrap().phi,
        psd_dimension(
            &to_lib(&two, 4),
            &MeasureParams::new(1, 0).with_derivatives(vec![Monomial::var(0), Monomial::var(2)]),
        )
        .unwrap()
        .phi,
    ];
    let oracle_examples = [
        oracle::psd_dimension(&oracle::from_lib(&x1x2), 3, &[vec![0]], 1),
        0,
        oracle::psd_dimension(&two, 4, &[vec![0], vec![2]], 0),
    ];
    let examples_ok = examples == [2, 0, 2] && oracle_examples == [2, 0, 2];
    notes.push(format!("examples {examples:?}"));

    let mut subadd_fail = 0;
    let mut oracle_mismatch = 0;
    for seed in 0..SUBADD_PAIRS {
        let mut rng = ChaCha20Rng::seed_from_u64(70_000 + seed);
        let n = rng.gen_range(2..=8);
        let r = rng.gen_range(0..=2.min(n as u32));
        let m = rng.gen_range(0..=2);
        let (p, qq) = (random_sparse(&mut rng, n), random_sparse(&mut rng, n));
        let (alpha, beta) = (rng.gen_range(1..=3), -rng.gen_range(1..=3));
        let params = MeasureParams::new(r, m);
        let rep = subadditivity_check(&to_lib(&p, n), &to_lib(&qq, n), &q(alpha), &q(beta), &params).unwrap();
        subadd_fail += usize::from(!(rep.holds && rep.phi_combination <= rep.phi_p + rep.phi_q));
        if seed < SUBADD_ORACLE_PAIRS {
            let derivs = oracle::subsets(n, r as usize);
            let combo = oracle::add(&oracle::scale(&p, &rat(alpha)), &oracle::scale(&qq, &rat(beta)));
            let want = [&combo, &p, &qq].map(|x| oracle::psd_dimension(x, n, &derivs, m as usize));
            oracle_mismatch += usize::from(want != [rep.phi_combination, rep.phi_p, rep.phi_q]);
        }
    }
    notes.push(format!(
        "sub-additivity {subadd_fail}/{SUBADD_PAIRS} violations, {oracle_mismatch}/{SUBADD_ORACLE_PAIRS} rank mismatches"
    ));

    let mut bound_fail = Vec::new();
    let mut generated = 0;
    let mut seed = 0;
    while generated < BOUND_INSTANCES {
        seed += 1;
        let mut rng = ChaCha20Rng::seed_from_u64(80_000 + seed);
        let n = rng.gen_range(4..=10);
        let (r, s, m) = (rng.gen_range(1..=2u64), rng.gen_range(1..=2u64), rng.gen_range(0..=3u64));
        if 2 * (m + r * s) > n as u64 {
            continue;
        }
        generated += 1;
        let (c, fanin) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let p = bounded_support(&mut rng, n, c, fanin, s as usize);
        let phi = psd_dimension(&to_lib(&p, n), &MeasureParams::new(r as u32, m as u32)).unwrap().phi;
        let bound = depth4_upper_bound(
            c as u64,
            fanin as u64,
            r,
            s,
            &BigUint::from(n),
            &BigUint::from(m),
        )
        .unwrap();
        let want = BigUint::from(c)
            * oracle::binomial(&BigUint::from(fanin as u64 + r), r)
            * oracle::binomial(&BigUint::from(n), m + r * s);
        if bound != want || BigUint::from(phi) > bound {
            bound_fail.push(format!("seed {seed}: phi={phi} bound={bound}"));
        }
    }
    notes.push(format!("bound {}/{BOUND_INSTANCES} violations {:?}", bound_fail.len(), bound_fail));
    let elapsed = start.elapsed();
    notes.push(format!("{elapsed:.1?}"));
    outcome(
        7,
        examples_ok && subadd_fail == 0 && oracle_mismatch == 0 && bound_fail.is_empty() && elapsed < MEASURE_TIME,
        notes.join("; "),
    )
}

fn restrictions() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let cfg = RandomCircuitConfig {
        num_vars: 12,
        max_terms: 3,
        max_fanin: 3,
        s: 4,
        k: 2,
        coeff_range: 3,
        max_factor_terms: 2,
    };
    let c = random_circuit(&cfg, &mut rng);
    let (s, p) = (3usize, 0.25f64);
    let report = survival_experiment(&c, s, p, RESTRICT_TRIALS, 8).unwrap();

    // Bad monomials: s-subsets of some factor's support.
    let mut bad: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in c.factors() {
        for sub in oracle::subsets(f.support().len(), s) {
            let mut vars: Vec<usize> = sub.iter().map(|&i| f.support()[i]).collect();
            vars.sort_unstable();
            bad.insert(vars);
        }
    }
    let p_exact = BigRational::new(1.into(), 4.into());
    let expected = rat(bad.len() as i64) * oracle::pow(&p_exact, s as u32);
    // Var |B_V| = sum over ordered pairs of p^{|A u B|} - p^{2s}.
    let pf = |k: usize| p.powi(k as i32);
    let variance: f64 = bad
        .iter()
        .flat_map(|a| bad.iter().map(move |b| (a, b)))
        .map(|(a, b)| pf(a.iter().chain(b).collect::<BTreeSet<_>>().len()) - pf(2 * s))
        .sum();
    let trials = RESTRICT_TRIALS as f64;
    let counts: Vec<usize> = report
        .records
        .iter()
        .map(|rec| bad.iter().filter(|m| m.iter().all(|&v| rec.mask.is_alive(v))).count())
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / trials;
    let rate = counts.iter().filter(|&&k| k > 0).count() as f64 / trials;
    let e = expected.to_f64().unwrap();
    let mean_ok = (mean - e).abs() <= SIGMAS * (variance / trials).sqrt();
    let markov = e.min(1.0);
    let rate_ok = rate <= markov + SIGMAS * (markov * (1.0 - markov) / trials).sqrt();
    let agrees = report.bad_count == bad.len() && report.expected_bad_exact == expected && report.mean_surviving == mean;

    // Size of a p = 1/2 restriction on 10^4 variables over 100 seeds.
    let sizes: Vec<f64> = (0..100).map(|seed| sample_restriction(10_000, 0.5, seed).unwrap().len() as f64).collect();
    let size_mean = sizes.iter().sum::<f64>() / 100.0;
    let size_ok = (size_mean - 5000.0).abs() <= SIGMAS * 50.0 / 10.0;
    let reproducible = sample_restriction(10_000, 0.5, 3).unwrap() == sample_restriction(10_000, 0.5, 3).unwrap();

    outcome(
        8,
        mean_ok && rate_ok && agrees && size_ok && reproducible && !bad.is_empty() && markov < 1.0,
        format!(
            "|B|={} E={expected}={e:.4} mean={mean:.4} sigma={:.4} rate={rate:.3} markov={markov:.4}; |V| mean {size_mean:.1}",
            bad.len(),
            (variance / trials).sqrt()
        ),
    )
}

fn toy_overrides(n: usize, k: u32) -> PitOverrides {
    PitOverrides {
        l: Some(4),
        a: Some(2),
        q: Some(2),
        a_prime: Some(1),
        d: Some(1),
        grid: Some((n * k as usize + 1).min(9)),
        sets: None,
    }
}

fn pit() -> Outcome {
    let params = derive_pit_params(0.0, 1.0, 4, 1, &toy_overrides(4, 1)).unwrap();
    let mut zero = FnBlackbox::new(4, |_: &[FieldElem]| Field::Rational.zero());
    let zero_out = pit_run(&mut zero, &params, None).unwrap();
    let zero_ok = zero_out == PitOutcome::Zero { tested: 625 };

    let (mut found, mut unsound, mut sz_only, mut grid_miss) = (0, 0, 0, 0);
    let mut circuits = 0;
    let mut seed = 0;
    while circuits < PIT_CIRCUITS {
        seed += 1;
        let mut rng = ChaCha20Rng::seed_from_u64(90_000 + seed);
        let cfg = RandomCircuitConfig {
            num_vars: rng.gen_range(2..=6),
            max_terms: 3,
            max_fanin: 3,
            s: 2,
            k: rng.gen_range(1..=2),
            coeff_range: 3,
            max_factor_terms: 3,
        };
        let c = random_circuit(&cfg, &mut rng);
        let p = oracle::expand(&c);
        if p.is_empty() {
            continue;
        }
        circuits += 1;
        let n = c.num_vars();
        let k = c.k().unwrap();
        let params = derive_pit_params(0.0, 1.0, n, k, &toy_overrides(n, k)).unwrap();
        let (out, _) = pit_run_circuit(&c, &params, None).unwrap();
        if let Some(w) = out.witness() {
            found += 1;
            unsound += usize::from(oracle::eval(&p, &rationals(w)).is_zero());
        }
        let sz = schwartz_zippel(&mut c.clone(), 50, 10, seed).unwrap();
        sz_only += usize::from(sz.witness().is_some() && out.witness().is_none());

        let d = oracle::individual_degree(&p);
        match search(&mut c.clone(), combnulls_grid(n, d), None).unwrap() {
            PitOutcome::Witness { point, .. } if !oracle::eval(&p, &rationals(&point)).is_zero() => {}
            _ => grid_miss += 1,
        }
    }
    outcome(
        9,
        zero_ok && unsound == 0 && grid_miss == 0,
        format!(
            "zero box: {zero_out:?}; {PIT_CIRCUITS} nonzero circuits: hitting set found {found}, unsound {unsound}, \
             missed where random search succeeded {sz_only} (logged); grid misses {grid_miss}"
        ),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ratios() -> Outcome {
    // Only library calls count against the time limit.
    let mut elapsed = Duration::ZERO;
    let mut notes = Vec::new();
    let mut positive = true;
    let mut oracle_ok = true;
    let mut closed_ok = true;
    for n in [10_000u64, 1_000_000] {
        let start = Instant::now();
        let rep = appendix_ratios(n, 0.0, &RatioOverrides::default()).unwrap();
        elapsed += start.elapsed();
        let r = (0.001 * n as f64).sqrt().floor() as u64;
        let big_n = &rep.big_n;
        let ln_n = (n as f64).ln();
        let factor = 1.0 - r as f64 * ln_n / n as f64;
        let m_ratio = BigRational::new(rep.m.clone().into(), big_n.clone().into()).to_f64().unwrap();
        let params_ok = rep.r == r && rep.s == r && (m_ratio - factor / 2.0).abs() < 1e-12;

        let ln_binom_small = oracle::ln_uint(&oracle::binomial(&BigUint::from(n + r), r));
        let rs = BigUint::from(r * r);
        let want_1 = oracle::ln_binomial_step(big_n, &(&rep.m + &rs), n - r - r * r) - ln_binom_small;
        let ln_big_n = oracle::ln_uint(big_n);
        let want_2 = r as f64 * (-0.5 * ln_big_n - 4f64.ln()) + oracle::ln_uint(&oracle::binomial(big_n, r))
            - oracle::ln_binomial_step(big_n, &rep.m, r * r)
            - ln_binom_small;
        let closed = r as f64 * ln_n * ((n - r - r * r) as f64 / n as f64 - 0.5);
        let agree = params_ok && rel(rep.log_ratio_1, want_1) < LOG_REL_TOL && rel(rep.log_ratio_2, want_2) < LOG_REL_TOL;
        oracle_ok &= agree;
        positive &= rep.log_ratio_1 > 0.0 && rep.log_ratio_2 > 0.0;
        let closed_err = rel(rep.log_ratio_1, closed);
        if n == 1_000_000 {
            closed_ok = closed_err <= CLOSED_FORM_REL_TOL;
        }
        notes.push(format!(
            "n={n}: r=s={r} log_ratio_1={:.4} (oracle {want_1:.4}) log_ratio_2={:.4} (oracle {want_2:.4}) closed_form={closed:.4} rel_error={closed_err:.3}",
            rep.log_ratio_1, rep.log_ratio_2
        ));
    }

    let mut approx_ok = true;
    for (a, f, g) in APPROX_INSTANCES {
        let start = Instant::now();
        let rep = approx_check(a, f, g).unwrap();
        elapsed += start.elapsed();
        let product = ((a - g + 1)..=(a + f)).fold(BigUint::from(1u32), |acc, j| acc * j);
        let exact = oracle::ln_uint(&product);
        let gamma = statrs::function::gamma::ln_gamma((a + f + 1) as f64)
            - statrs::function::gamma::ln_gamma((a - g + 1) as f64);
        let estimate = (f + g) as f64 * (a as f64).ln();
        let limit = 2.0 * ((f + g) as f64).powi(2) / a as f64;
        let close = |x: f64, y: f64| (x - y).abs() <= LOG_REL_TOL * y.abs().max(1.0);
        let ok = close(rep.exact, exact) && close(gamma, exact) && (exact - estimate).abs() <= limit && rep.holds;
        approx_ok &= ok;
        notes.push(format!("approx(a={a},f={f},g={g}) error={:.6} limit={limit:.4}", (exact - estimate).abs()));
    }
    notes.push(format!("{elapsed:.1?}"));
    let pass = positive && oracle_ok && closed_ok && approx_ok && elapsed < RATIO_TIME;
    if !closed_ok {
        notes.push("closed-form estimate outside 10%".into());
    }
    outcome(10, pass, notes.join("; "))
}

#[test]
fn acceptance_criteria() {
    let (c1, c2) = transforms();
    let results = vec![
        c1,
        c2,
        homogenization(),
        nw_properties(),
        parameters(),
        designs(),
        measure(),
        restrictions(),
        pit(),
        ratios(),
    ];
    let mut red = Vec::new();
    for r in &results {
        println!("{} criterion {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.detail);
        if !r.pass {
            red.push(r.id);
        }
    }
    assert_eq!(red, EXPECTED_RED, "red criteria changed");
}
