use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_PRODUCTS: &str = "fewvar-circuit v1
vars=4 field=Q s=2 k=1
term scale=1
factor support=0,1
coeff 1 ; 0:1 1:1
term scale=1
factor support=2,3
coeff 1 ; 0:1 1:1
";

const ONE_PLUS: &str = "fewvar-circuit v1
vars=2 field=Q s=1 k=1
term scale=1
factor support=0
coeff 1 ;
coeff 1 ; 0:1
factor support=1
coeff 1 ;
coeff 1 ; 0:1
";

const TOY: [&str; 12] = [
    "--override-l",
    "2",
    "--override-a",
    "2",
    "--override-q",
    "2",
    "--override-a-prime",
    "1",
    "--override-d",
    "1",
    "--override-grid",
    "3",
];

fn fewvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fewvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}=` in\n{report}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn nw_params_example() {
    let o = fewvar(&["nw-params", "--mu", "0", "--n", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!((value(&out, "psi"), value(&out, "N"), value(&out, "D")), ("37", "74", "2"));
    assert_eq!(value(&out, "seed"), "0");
}

#[test]
fn design_example_and_bad_usage() {
    let out = stdout(&fewvar(&["design", "--b", "4", "--a", "2"]));
    assert_eq!(out.lines().filter(|l| l.starts_with("set=")).count(), 4);
    assert!(out.contains("verify=pass"));

    let o = fewvar(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn nw_check_passes() {
    let o = fewvar(&["nw-check", "--psi", "5", "--d", "2", "--n", "3", "--points", "10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "monomial_count"), "25");
    assert_eq!(value(&out, "verify"), "pass");
}

#[test]
fn pit_exit_codes_with_subprocess_blackbox() {
    let mut zero = vec!["pit", "--blackbox", "while read l; do echo 0; done", "--n", "2", "--k", "1"];
    zero.extend(TOY);
    let o = fewvar(&zero);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert_eq!(value(&stdout(&o), "tested"), "9");

    let mut first = vec!["pit", "--blackbox", "while read a b; do echo $a; done", "--n", "2", "--k", "1"];
    first.extend(TOY);
    let o = fewvar(&first);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "result"), "witness");
    assert_eq!(value(&out, "witness"), "1/1,1/1");

    let mut budget = zero.clone();
    budget.extend(["--budget", "4"]);
    let o = fewvar(&budget);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(value(&stdout(&o), "result"), "inconclusive");
}

#[test]
fn pit_on_circuit_file() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", ONE_PLUS);
    let mut args = vec!["pit", "--circuit", path_str(&c)];
    args.extend(TOY);
    let o = fewvar(&args);
    assert_eq!(o.status.code(), Some(0));
    // (1 + x0)(1 + x1) is 1 at the origin.
    assert_eq!(value(&stdout(&o), "witness"), "0/1,0/1");
    assert_eq!(fewvar(&["pit", "--circuit", "/nonexistent"]).status.code(), Some(3));
}

#[test]
fn sz_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", TWO_PRODUCTS);
    let args = ["sz", "--circuit", path_str(&c), "--trials", "20", "--domain", "10", "--seed", "11"];
    let a = fewvar(&args);
    let b = fewvar(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(value(&stdout(&a), "seed"), "11");
}

#[test]
fn measure_report_line() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.txt", "vars=4 field=Q\ncoeff 1/1 ; 0:1 1:1\ncoeff 1/1 ; 2:1 3:1\n");
    let o = fewvar(&["measure", "--poly", path_str(&p), "--r", "1", "--m", "0", "--derivs", "0;2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("phi=")).unwrap();
    assert!(line.starts_with("phi=2 rows=2 "), "{line}");
    assert!(line.contains("bound=none"));

    let c = write(&dir, "c.txt", TWO_PRODUCTS);
    let out = stdout(&fewvar(&["measure", "--circuit", path_str(&c), "--r", "1", "--m", "0"]));
    // 2 * C(1 + 1, 1) * C(4, 2) = 24.
    assert!(out.contains("bound=24 "), "{out}");
}

#[test]
fn homogenize_matches_expansion() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", ONE_PLUS);
    let poly = dir.path().join("h.txt");
    let o = fewvar(&["homogenize", "--circuit", path_str(&c), "--n", "1", "--poly-out", path_str(&poly)]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "identity"), "true");
    assert_eq!(fs::read_to_string(poly).unwrap().lines().count(), 3);
}

#[test]
fn restrict_experiment_csv() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", TWO_PRODUCTS);
    let args = [
        "restrict-experiment",
        "--circuit",
        path_str(&c),
        "--s",
        "2",
        "--p",
        "0.5",
        "--trials",
        "30",
        "--r",
        "1",
        "--m",
        "1",
        "--seed",
        "4",
    ];
    let o = fewvar(&args);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "bad_count"), "2");
    let rows: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("seed,trial")).skip(1).collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r.starts_with("4,") && r.split(',').count() == 5));
    assert_eq!(fewvar(&args).stdout, o.stdout);
}

#[test]
fn ratios_and_audit() {
    let out = stdout(&fewvar(&["ratios", "--n", "10000", "--approx", "10000,10,10"]));
    assert_eq!(value(&out, "r"), "3");
    assert!(value(&out, "log_ratio_1").parse::<f64>().unwrap() > 0.0);
    assert!(out.contains("holds=true"));

    let o = fewvar(&["transform-audit", "--count", "5", "--max-vars", "4", "--seed", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(value(&stdout(&o), "failures"), "0");
}

#[test]
fn expand_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", TWO_PRODUCTS);
    let o = Command::new(env!("CARGO_BIN_EXE_fewvar"))
        .args(["measure", "--circuit", path_str(&c), "--r", "1", "--m", "0"])
        .env("FEWVAR_EXPAND_CAP", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn hitset_dump() {
    let mut args = vec!["hitset", "--n", "2"];
    args.extend(TOY);
    let out = stdout(&fewvar(&args));
    assert_eq!(value(&out, "size"), "9");
    assert!(out.contains("index,p0,p1,x0,x1\n0,0/1,0/1,0/1,0/1\n"));
    assert_eq!(out.lines().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).count(), 9);
}
