//! `fewvar`: command-line access to circuits, NW polynomials, designs,
//! hitting sets and the shifted-partial-derivative measure.

mod subprocess;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fewvar_core::algebra::{Field, FieldElem, HomMode, Monomial, SparsePolynomial};
use fewvar_core::circuit::{audit_transforms, random_circuit, FewVarCircuit, RandomCircuitConfig, DEFAULT_EXPAND_CAP};
use fewvar_core::measure::{
    appendix_ratios, approx_check, depth4_upper_bound, psd_dimension, survival_experiment, MeasureParams,
    RankMode, RatioMethod, RatioOverrides,
};
use fewvar_core::nw::{derive_nw_params, NWInstance, DEFAULT_ENUM_CAP};
use fewvar_core::pit::{
    derive_pit_params, hitting_set_size, hitting_set_stream, pit_run, rs_design, schwartz_zippel,
    verify_design, Blackbox, PitOutcome, PitOverrides,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use subprocess::Subprocess;

const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "fewvar", version, about = "Few-variable circuits, NW polynomials and hitting sets")]
struct Cli {
    /// Seed for every random choice; echoed in each report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on estimated expansion size (default: $FEWVAR_EXPAND_CAP or 1000000).
    #[arg(long, global = true)]
    expand_cap: Option<usize>,
    /// Also write the report to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived NW parameters for (mu, n).
    NwParams {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        n: u64,
    },
    /// Exhaustive NW property check plus blackbox evaluation at random points.
    NwCheck {
        #[arg(long)]
        psi: u64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Reed-Solomon design of b sets of size a.
    Design {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        a: usize,
        /// Intersection cap (default ceil(log2 b)).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Dump hitting-set tuples as CSV.
    Hitset {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Maximum number of tuples printed.
        #[arg(long, default_value_t = 10_000)]
        limit: u64,
    },
    /// Deterministic blackbox identity test over the hitting set.
    Pit {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Maximum number of points evaluated.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Randomized identity test at uniform points of {0..domain-1}^N.
    Sz {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1000)]
        domain: u64,
    },
    /// Projected shifted partial derivative dimension.
    Measure {
        /// Polynomial file.
        #[arg(long, conflicts_with = "circuit")]
        poly: Option<PathBuf>,
        /// Circuit file; enables the depth-4 bound.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
        /// Explicit derivative monomials, e.g. "0,1;2" for {x0 x1, x2}.
        #[arg(long)]
        derivs: Option<String>,
        #[arg(long, value_enum, default_value_t = RankArg::Exact)]
        rank: RankArg,
        /// Bottom support bound used in the depth-4 bound (default: measured).
        #[arg(long)]
        bound_s: Option<u64>,
    },
    /// Degree-n decomposition of a circuit, checked against the expansion.
    Homogenize {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        n: u32,
        /// Write Hom^n of the decomposition here.
        #[arg(long)]
        poly_out: Option<PathBuf>,
    },
    /// Random restrictions against the large-support monomials of a circuit.
    RestrictExperiment {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// With --m, also measure each restricted expansion.
        #[arg(long, requires = "m")]
        r: Option<u32>,
        #[arg(long, requires = "r")]
        m: Option<u32>,
    },
    /// Log-ratios of the lower-bound calculation and the factorial approximation.
    Ratios {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        m: Option<BigUint>,
        #[arg(long, requires = "eps2")]
        eps1: Option<f64>,
        #[arg(long, requires = "eps1")]
        eps2: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Factorial approximation checks as "a,f,g"; repeatable.
        #[arg(long)]
        approx: Vec<String>,
    },
    /// Every circuit transform against the polynomial-level operation.
    TransformAudit {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_terms: usize,
        #[arg(long, default_value_t = 4)]
        max_fanin: usize,
        #[arg(long, default_value_t = 3)]
        max_k: u32,
        #[arg(long, default_value_t = 3)]
        max_s: usize,
    },
}

#[derive(Args, Debug)]
struct SourceArgs {
    /// Circuit file.
    #[arg(long, conflicts_with = "blackbox", required_unless_present = "blackbox")]
    circuit: Option<PathBuf>,
    /// Shell command speaking the line protocol.
    #[arg(long)]
    blackbox: Option<String>,
    /// Number of variables of the blackbox.
    #[arg(long, required_unless_present = "circuit")]
    n: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct OverrideArgs {
    #[arg(long)]
    override_l: Option<usize>,
    #[arg(long)]
    override_a: Option<usize>,
    #[arg(long)]
    override_q: Option<u64>,
    #[arg(long)]
    override_a_prime: Option<usize>,
    #[arg(long)]
    override_d: Option<u32>,
    /// Grid size; the grid is {0..g-1}.
    #[arg(long)]
    override_grid: Option<usize>,
}

impl OverrideArgs {
    fn to_overrides(&self) -> PitOverrides {
        PitOverrides {
            l: self.override_l,
            a: self.override_a,
            q: self.override_q,
            a_prime: self.override_a_prime,
            d: self.override_d,
            grid: self.override_grid,
            sets: None,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RankArg {
    Exact,
    Prime,
    Cross,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Exact,
    Logsum,
}

struct Outcome {
    report: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.report);
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &out.report) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(EXIT_ERROR);
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn expand_cap(cli: &Cli) -> Result<usize> {
    if let Some(cap) = cli.expand_cap {
        return Ok(cap);
    }
    match std::env::var("FEWVAR_EXPAND_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("FEWVAR_EXPAND_CAP=`{v}`")),
        Err(_) => Ok(DEFAULT_EXPAND_CAP),
    }
}

fn read_circuit(path: &Path) -> Result<FewVarCircuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FewVarCircuit::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_poly(path: &Path) -> Result<SparsePolynomial> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SparsePolynomial::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut out = format!("seed={}\n", cli.seed);
    let code = match &cli.command {
        Command::NwParams { mu, n } => {
            out.push_str(&derive_nw_params(*mu, *n)?.to_report());
            0
        }
        Command::NwCheck { psi, d, n, points } => nw_check(cli, &mut out, *psi, *d, *n, *points)?,
        Command::Design { b, a, cap } => {
            let cap = cap.unwrap_or_else(|| (usize::BITS - b.saturating_sub(1).leading_zeros()) as usize);
            let design = rs_design(*b, *a, cap)?;
            out.push_str(&design.to_text());
            let _ = writeln!(out, "{}", verify_design(&design));
            0
        }
        Command::Hitset {
            n,
            k,
            mu,
            c,
            overrides,
            limit,
        } => {
            let params = derive_pit_params(*mu, *c, *n, *k, &overrides.to_overrides())?;
            out.push_str(&params.to_report());
            let _ = writeln!(out, "size={}", hitting_set_size(&params));
            let header = (0..params.l)
                .map(|i| format!("p{i}"))
                .chain((0..params.n).map(|i| format!("x{i}")));
            let _ = writeln!(out, "index,{}", join(header, ","));
            for h in hitting_set_stream(&params)?.take(*limit as usize) {
                let cells = h.seed.iter().chain(&h.tuple).map(FieldElem::to_canonical_string);
                let _ = writeln!(out, "{},{}", h.index, join(cells, ","));
            }
            0
        }
        Command::Pit {
            source,
            k,
            mu,
            c,
            overrides,
            budget,
        } => {
            let (mut bb, declared_k) = open_blackbox(source, &mut out, *c, *mu)?;
            let k = k.or(declared_k).context("--k is required unless the circuit declares k")?;
            let params = derive_pit_params(*mu, *c, bb.num_vars(), k, &overrides.to_overrides())?;
            out.push_str(&params.to_report());
            let _ = writeln!(out, "size={}", hitting_set_size(&params));
            let outcome = pit_run(bb.as_mut(), &params, *budget)?;
            report_outcome(&mut out, &outcome, "zero-on-H");
            outcome.exit_code() as u8
        }
        Command::Sz { source, trials, domain } => {
            let (mut bb, _) = open_blackbox(source, &mut out, 1.0, 0.0)?;
            let _ = writeln!(out, "trials={trials} domain={domain}");
            let outcome = schwartz_zippel(bb.as_mut(), *trials, *domain, cli.seed)?;
            report_outcome(&mut out, &outcome, "probably-zero");
            outcome.exit_code() as u8
        }
        Command::Measure {
            poly,
            circuit,
            r,
            m,
            derivs,
            rank,
            bound_s,
        } => {
            let mut params = MeasureParams::new(*r, *m).with_rank(match rank {
                RankArg::Exact => RankMode::Exact,
                RankArg::Prime => RankMode::Prime,
                RankArg::Cross => RankMode::CrossCheck,
            });
            if let Some(spec) = derivs {
                params = params.with_derivatives(parse_derivs(spec)?);
            }
            let (p, circuit) = match (poly, circuit) {
                (Some(path), _) => (read_poly(path)?, None),
                (None, Some(path)) => {
                    let c = read_circuit(path)?;
                    (c.expand_with_cap(expand_cap(cli)?)?, Some(c))
                }
                (None, None) => bail!("one of --poly or --circuit is required"),
            };
            let mut report = psd_dimension(&p, &params)?;
            if let Some(c) = circuit {
                let s = bound_s.unwrap_or_else(|| bottom_support(&c));
                let bound = depth4_upper_bound(
                    c.top_fanin() as u64,
                    c.max_fanin() as u64,
                    *r as u64,
                    s,
                    &BigUint::from(c.num_vars()),
                    &BigUint::from(*m),
                );
                match bound {
                    Ok(b) => report.bound = Some(b),
                    Err(e) => {
                        let _ = writeln!(out, "bound_note={}", e.to_string().replace(' ', "_"));
                    }
                }
            }
            let _ = writeln!(out, "{report}");
            0
        }
        Command::Homogenize { circuit, n, poly_out } => {
            let c = read_circuit(Path::new(circuit))?;
            let decomposition = c.homogenize(*n)?;
            let from_decomposition = decomposition.to_polynomial()?;
            let expected = c.expand_with_cap(expand_cap(cli)?)?.hom_component(*n, HomMode::Eq);
            let _ = writeln!(out, "n={n}");
            let _ = writeln!(out, "terms={}", decomposition.terms.len());
            let _ = writeln!(out, "discarded={}", decomposition.discarded);
            let max_l = decomposition.terms.iter().map(|t| t.max_l).max().unwrap_or(0);
            let _ = writeln!(out, "max_l={max_l}");
            let _ = writeln!(out, "monomials={}", from_decomposition.len());
            let identity = from_decomposition == expected;
            let _ = writeln!(out, "identity={identity}");
            if let Some(path) = poly_out {
                fs::write(path, from_decomposition.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            if identity {
                0
            } else {
                1
            }
        }
        Command::RestrictExperiment {
            circuit,
            s,
            p,
            trials,
            r,
            m,
        } => restrict_experiment(cli, &mut out, circuit, *s, *p, *trials, r.zip(*m))?,
        Command::Ratios {
            n,
            mu,
            r,
            s,
            m,
            eps1,
            eps2,
            method,
            approx,
        } => {
            let overrides = RatioOverrides {
                eps: eps1.zip(*eps2),
                r: *r,
                s: *s,
                m: m.clone(),
                method: method.map(|m| match m {
                    MethodArg::Exact => RatioMethod::Exact,
                    MethodArg::Logsum => RatioMethod::LogSum,
                }),
            };
            let ratios = appendix_ratios(*n, *mu, &overrides)?;
            out.push_str(&ratios.to_report());
            let _ = writeln!(out, "closed_form_rel_error={}", ratios.closed_form_rel_error());
            for spec in approx {
                let parts: Vec<u64> = spec
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("--approx `{spec}` is not a,f,g"))?;
                let [a, f, g] = parts[..] else {
                    bail!("--approx `{spec}` is not a,f,g");
                };
                let rep = approx_check(a, f, g)?;
                let _ = writeln!(
                    out,
                    "approx a={a} f={f} g={g} exact={} estimate={} error={} bound={} holds={}",
                    rep.exact, rep.estimate, rep.error, rep.bound, rep.holds
                );
            }
            0
        }
        Command::TransformAudit {
            count,
            max_vars,
            max_terms,
            max_fanin,
            max_k,
            max_s,
        } => {
            let cap = expand_cap(cli)?;
            let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
            let (mut checks, mut failures, mut fanin_failures) = (0, 0, 0);
            for i in 0..*count {
                let cfg = RandomCircuitConfig {
                    num_vars: rng.gen_range(1..=*max_vars),
                    max_terms: *max_terms,
                    max_fanin: *max_fanin,
                    s: *max_s,
                    k: rng.gen_range(1..=*max_k),
                    coeff_range: 3,
                    max_factor_terms: 3,
                };
                let c = random_circuit(&cfg, &mut rng);
                let audit = audit_transforms(&c, &mut rng, cap)?;
                checks += audit.checks;
                failures += audit.failures.len();
                for f in &audit.failures {
                    let _ = writeln!(out, "failure circuit={i} check={}", f.replace(' ', "_"));
                }
                if !audit.fanins_ok() {
                    fanin_failures += 1;
                    let _ = writeln!(
                        out,
                        "fanin_failure circuit={i} derivative={}/{} coeff={}/{}",
                        audit.max_derivative_fanin,
                        audit.derivative_fanin_allowance,
                        audit.max_coeff_fanin,
                        audit.coeff_fanin_allowance
                    );
                }
            }
            let _ = writeln!(out, "circuits={count}");
            let _ = writeln!(out, "checks={checks}");
            let _ = writeln!(out, "failures={failures}");
            let _ = writeln!(out, "fanin_failures={fanin_failures}");
            if failures + fanin_failures == 0 {
                0
            } else {
                1
            }
        }
    };
    Ok(Outcome { report: out, code })
}

fn nw_check(cli: &Cli, out: &mut String, psi: u64, d: u32, n: usize, points: usize) -> Result<u8> {
    let nw = NWInstance::new(n, psi, d)?;
    let report = nw.check_properties(DEFAULT_ENUM_CAP)?;
    let _ = writeln!(out, "n={n} psi={psi} D={d}");
    let _ = writeln!(out, "monomial_count={}", report.monomial_count);
    let _ = writeln!(out, "expected_count={}", report.expected_count);
    let _ = writeln!(out, "distinct={}", report.distinct);
    let _ = writeln!(out, "all_multilinear={}", report.all_multilinear);
    let _ = writeln!(out, "all_degree_n={}", report.all_degree_n);
    let _ = writeln!(out, "one_per_row={}", report.one_per_row);
    let _ = writeln!(out, "max_pair_intersection={}", report.max_pair_intersection);
    let _ = writeln!(out, "intersection_bound={}", report.intersection_bound);
    let poly = nw.to_polynomial(Field::Rational, DEFAULT_ENUM_CAP)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    let mut agree = 0;
    for _ in 0..points {
        let point: Vec<FieldElem> = (0..nw.num_vars())
            .map(|_| Field::Rational.from_i64(rng.gen_range(-5..=5)))
            .collect();
        if nw.eval(&point, DEFAULT_ENUM_CAP)? == poly.eval(&point)? {
            agree += 1;
        }
    }
    let _ = writeln!(out, "eval_points={points}");
    let _ = writeln!(out, "eval_agree={agree}");
    let passed = report.passed() && agree == points;
    let _ = writeln!(out, "verify={}", if passed { "pass" } else { "fail" });
    Ok(if passed { 0 } else { 1 })
}

fn open_blackbox(source: &SourceArgs, out: &mut String, c: f64, mu: f64) -> Result<(Box<dyn Blackbox>, Option<u32>)> {
    match (&source.circuit, &source.blackbox) {
        (Some(path), _) => {
            let circuit = read_circuit(path)?;
            let class = circuit.class_check(c, mu);
            let _ = writeln!(
                out,
                "class top_fanin={} k={} max_fanin={} max_support={} in_class={}",
                class.top_fanin,
                class.k.map_or_else(|| "unknown".into(), |k| k.to_string()),
                class.max_fanin,
                class.max_support,
                class.all_ok()
            );
            let k = circuit.k();
            Ok((Box::new(circuit), k))
        }
        (None, Some(cmd)) => {
            let n = source.n.context("--n is required with --blackbox")?;
            Ok((Box::new(Subprocess::spawn(cmd, n)?), None))
        }
        (None, None) => bail!("one of --circuit or --blackbox is required"),
    }
}

fn report_outcome(out: &mut String, outcome: &PitOutcome, zero_label: &str) {
    match outcome {
        PitOutcome::Witness { point, value, tested } => {
            let _ = writeln!(out, "result=witness");
            let _ = writeln!(out, "tested={tested}");
            let _ = writeln!(out, "value={}", value.to_canonical_string());
            let _ = writeln!(out, "witness={}", join(point.iter().map(FieldElem::to_canonical_string), ","));
        }
        PitOutcome::Zero { tested } => {
            let _ = writeln!(out, "result={zero_label}");
            let _ = writeln!(out, "tested={tested}");
        }
        PitOutcome::Inconclusive { tested } => {
            let _ = writeln!(out, "result=inconclusive");
            let _ = writeln!(out, "tested={tested}");
        }
    }
}

fn parse_derivs(spec: &str) -> Result<Vec<Monomial>> {
    spec.split(';')
        .map(|group| {
            let vars: Vec<usize> = group
                .split(',')
                .filter(|v| !v.trim().is_empty())
                .map(|v| v.trim().parse())
                .collect::<Result<_, _>>()
                .with_context(|| format!("bad derivative monomial `{group}`"))?;
            Ok(Monomial::multilinear(vars))
        })
        .collect()
}

/// Largest number of variables in a monomial of any factor.
fn bottom_support(c: &FewVarCircuit) -> u64 {
    c.factors()
        .flat_map(|f| f.poly().terms().map(|(m, _)| m.support_size()))
        .max()
        .unwrap_or(0) as u64
}

fn restrict_experiment(
    cli: &Cli,
    out: &mut String,
    circuit: &Path,
    s: usize,
    p: f64,
    trials: u64,
    measure: Option<(u32, u32)>,
) -> Result<u8> {
    let c = read_circuit(circuit)?;
    let report = survival_experiment(&c, s, p, trials, cli.seed)?;
    let _ = writeln!(out, "N={} s={s} p={p} trials={trials}", c.num_vars());
    let _ = writeln!(out, "bad_count={}", report.bad_count);
    let _ = writeln!(out, "expected_bad={}", report.expected_bad);
    let _ = writeln!(out, "markov_bound={}", report.markov_bound);
    let _ = writeln!(out, "survived={}", report.survived);
    let _ = writeln!(out, "empirical_rate={}", report.empirical_rate);
    let _ = writeln!(out, "mean_surviving={}", report.mean_surviving);
    let _ = writeln!(out, "mean_within_3_sigma={}", report.mean_within_3_sigma());
    let _ = writeln!(out, "rate_within_markov={}", report.rate_within_markov());
    let expanded = match measure {
        Some(_) => Some(c.expand_with_cap(expand_cap(cli)?)?),
        None => None,
    };
    let _ = writeln!(out, "seed,trial,alive,surviving_bad,phi");
    for rec in &report.records {
        let phi = match (&expanded, measure) {
            (Some(poly), Some((r, m))) => {
                let restricted = poly.zero_vars_outside(rec.mask.alive());
                psd_dimension(&restricted, &MeasureParams::new(r, m))?.phi.to_string()
            }
            _ => String::new(),
        };
        let _ = writeln!(out, "{},{},{},{},{}", cli.seed, rec.trial, rec.mask.len(), rec.surviving_bad, phi);
    }
    Ok(0)
}
