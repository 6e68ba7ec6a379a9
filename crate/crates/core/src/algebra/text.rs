//! Line-oriented polynomial text format.
//!
//! ```text
//! # comment
//! vars=3 field=Q
//! coeff 3/2 ; 0:1 2:3
//! coeff -1/1 ;
//! ```
//!
//! Terms are written in descending graded-lex order, one per line.

use std::fmt::Write as _;

use super::field::{Field, FieldElem};
use super::monomial::Monomial;
use super::poly::SparsePolynomial;
use super::AlgebraError;

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Parses `key=value` pairs separated by whitespace.
pub(crate) fn parse_kv(line: &str, line_no: usize) -> Result<Vec<(&str, &str)>, AlgebraError> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=').ok_or_else(|| {
                AlgebraError::parse(line_no, format!("expected key=value, found `{tok}`"))
            })
        })
        .collect()
}

pub(crate) fn parse_header(line: &str, line_no: usize) -> Result<(usize, Field), AlgebraError> {
    let mut num_vars = None;
    let mut field = None;
    for (k, v) in parse_kv(line, line_no)? {
        match k {
            "vars" => {
                num_vars =
                    Some(v.parse::<usize>().map_err(|_| {
                        AlgebraError::parse(line_no, format!("bad vars value `{v}`"))
                    })?)
            }
            "field" => field = Some(v.parse::<Field>().map_err(|e| e.at_line(line_no))?),
            other => {
                return Err(AlgebraError::parse(
                    line_no,
                    format!("unknown header key `{other}`"),
                ))
            }
        }
    }
    match (num_vars, field) {
        (Some(n), Some(f)) => Ok((n, f)),
        _ => Err(AlgebraError::parse(
            line_no,
            "header needs vars= and field=",
        )),
    }
}

/// Parses one `coeff num/den ; var:exp ...` line.
pub(crate) fn parse_term_line(
    line: &str,
    line_no: usize,
    num_vars: usize,
    field: Field,
) -> Result<(Monomial, FieldElem), AlgebraError> {
    let body = line.strip_prefix("coeff").map(str::trim).unwrap_or(line);
    let (coeff, mono) = body.split_once(';').ok_or_else(|| {
        AlgebraError::parse(
            line_no,
            "term line needs `;` between coefficient and monomial",
        )
    })?;
    let c = FieldElem::parse_in(field, coeff).map_err(|e| e.at_line(line_no))?;
    let mut pairs = Vec::new();
    for tok in mono.split_whitespace() {
        let (v, e) = tok.split_once(':').ok_or_else(|| {
            AlgebraError::parse(line_no, format!("expected var:exp, found `{tok}`"))
        })?;
        let v: usize = v
            .parse()
            .map_err(|_| AlgebraError::parse(line_no, format!("bad variable index `{v}`")))?;
        let e: u32 = e
            .parse()
            .map_err(|_| AlgebraError::parse(line_no, format!("bad exponent `{e}`")))?;
        if v >= num_vars {
            return Err(AlgebraError::parse(
                line_no,
                format!("variable {v} out of range for {num_vars} variables"),
            ));
        }
        pairs.push((v, e));
    }
    Ok((Monomial::from_pairs(pairs), c))
}

pub(crate) fn write_terms(out: &mut String, p: &SparsePolynomial) {
    for (m, c) in p.terms().rev() {
        let _ = write!(out, "coeff {} ;", c.to_canonical_string());
        for &(v, e) in m.exponents() {
            let _ = write!(out, " {v}:{e}");
        }
        out.push('\n');
    }
}

impl SparsePolynomial {
    /// Canonical text serialization (header plus one line per term).
    pub fn to_text(&self) -> String {
        let mut out = format!("vars={} field={}\n", self.num_vars(), self.field());
        write_terms(&mut out, self);
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AlgebraError> {
        let mut header = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            match header {
                None => header = Some(parse_header(line, line_no)?),
                Some((n, f)) => terms.push(parse_term_line(line, line_no, n, f)?),
            }
        }
        let (n, f) =
            header.ok_or_else(|| AlgebraError::parse(0, "missing `vars=N field=F` header"))?;
        SparsePolynomial::from_terms(n, f, terms)
    }
}
