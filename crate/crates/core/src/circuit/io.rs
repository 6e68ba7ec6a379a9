//! `fewvar-circuit v1` text format.
//!
//! ```text
//! fewvar-circuit v1
//! vars=3 field=Q s=2 k=2
//! term scale=3/1
//! factor support=0,2
//! coeff 1/1 ; 0:1 1:1
//! coeff 1/1 ;
//! ```
//!
//! Factor polynomials use local indices `0..|support|`.

use std::fmt::Write as _;

use super::{CircuitError, CircuitTerm, FactorPoly, FewVarCircuit};
use crate::algebra::text::{parse_kv, parse_term_line, strip_comment, write_terms};
use crate::algebra::{AlgebraError, Field, FieldElem, SparsePolynomial};

const MAGIC: &str = "fewvar-circuit v1";

impl FewVarCircuit {
    pub fn to_text(&self) -> String {
        let k = self
            .k
            .map_or_else(|| "unknown".to_string(), |k| k.to_string());
        let mut out = format!(
            "{MAGIC}\nvars={} field={} s={} k={k}\n",
            self.num_vars, self.field, self.declared_s
        );
        for term in &self.terms {
            let _ = writeln!(out, "term scale={}", term.scale.to_canonical_string());
            for f in &term.factors {
                let support: Vec<String> = f.support.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "factor support={}", support.join(","));
                write_terms(&mut out, &f.poly);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        parse_document(text).map_err(|e| match e {
            CircuitError::Algebra(AlgebraError::Parse { line, message }) => {
                CircuitError::Parse { line, message }
            }
            other => other,
        })
    }
}

fn parse_document(text: &str) -> Result<FewVarCircuit, CircuitError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, strip_comment(raw)))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((n, l)) => {
            return Err(CircuitError::parse(
                n,
                format!("expected `{MAGIC}`, found `{l}`"),
            ))
        }
        None => return Err(CircuitError::parse(0, "empty document")),
    }
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| CircuitError::parse(0, "missing `vars=... field=... s=... k=...` header"))?;
    let (num_vars, field, s, k) = parse_header(header, header_line)?;

    let mut terms: Vec<CircuitTerm> = Vec::new();
    // Factor under construction: (line, support, terms).
    let mut open: Option<(usize, Vec<usize>, Vec<_>)> = None;

    let close = |open: &mut Option<(usize, Vec<usize>, Vec<_>)>, terms: &mut Vec<CircuitTerm>| {
        if let Some((line, support, poly_terms)) = open.take() {
            let poly = SparsePolynomial::from_terms(support.len(), field, poly_terms)
                .map_err(|e| AlgebraError::at_line(e, line))?;
            let f = FactorPoly::new(support, poly)
                .map_err(|e| CircuitError::parse(line, e.to_string()))?;
            terms
                .last_mut()
                .expect("factor follows a term")
                .factors
                .push(f);
        }
        Ok::<(), CircuitError>(())
    };

    for (line_no, line) in lines {
        if let Some(rest) = line.strip_prefix("term") {
            close(&mut open, &mut terms)?;
            let scale = parse_scale(rest.trim(), line_no, field)?;
            terms.push(CircuitTerm {
                scale,
                factors: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("factor") {
            close(&mut open, &mut terms)?;
            if terms.is_empty() {
                return Err(CircuitError::parse(line_no, "factor before any term"));
            }
            let support = parse_support(rest.trim(), line_no)?;
            open = Some((line_no, support, Vec::new()));
        } else {
            let (_, support, poly_terms) = open.as_mut().ok_or_else(|| {
                CircuitError::parse(line_no, "polynomial line outside a factor block")
            })?;
            poly_terms.push(parse_term_line(line, line_no, support.len(), field)?);
        }
    }
    close(&mut open, &mut terms)?;
    FewVarCircuit::new(num_vars, field, s, k, terms).map_err(|e| match e {
        CircuitError::Parse { .. } => e,
        other => CircuitError::parse(0, other.to_string()),
    })
}

fn parse_header(
    line: &str,
    line_no: usize,
) -> Result<(usize, Field, usize, Option<u32>), CircuitError> {
    let (mut vars, mut field, mut s, mut k) = (None, None, None, None);
    for (key, value) in parse_kv(line, line_no)? {
        let bad = || CircuitError::parse(line_no, format!("bad value `{value}` for `{key}`"));
        match key {
            "vars" => vars = Some(value.parse::<usize>().map_err(|_| bad())?),
            "field" => field = Some(value.parse::<Field>().map_err(|e| e.at_line(line_no))?),
            "s" => s = Some(value.parse::<usize>().map_err(|_| bad())?),
            "k" => {
                k = Some(match value {
                    "unknown" => None,
                    v => Some(v.parse::<u32>().map_err(|_| bad())?),
                })
            }
            other => {
                return Err(CircuitError::parse(
                    line_no,
                    format!("unknown header key `{other}`"),
                ))
            }
        }
    }
    match (vars, field, s, k) {
        (Some(v), Some(f), Some(s), Some(k)) => Ok((v, f, s, k)),
        _ => Err(CircuitError::parse(
            line_no,
            "header needs vars=, field=, s= and k=",
        )),
    }
}

fn parse_scale(rest: &str, line_no: usize, field: Field) -> Result<FieldElem, CircuitError> {
    let value = rest
        .strip_prefix("scale=")
        .ok_or_else(|| CircuitError::parse(line_no, "expected `term scale=<num/den>`"))?;
    Ok(FieldElem::parse_in(field, value).map_err(|e| e.at_line(line_no))?)
}

fn parse_support(rest: &str, line_no: usize) -> Result<Vec<usize>, CircuitError> {
    let value = rest
        .strip_prefix("support=")
        .ok_or_else(|| CircuitError::parse(line_no, "expected `factor support=<i,j,...>`"))?;
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| CircuitError::parse(line_no, format!("bad support index `{v}`")))
        })
        .collect()
}
