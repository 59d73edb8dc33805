//! Text and JSON interchange formats for [`QuboProblem`].
//!
//! Text layout:
//!
//! ```text
//! qubo <n> <num_linear> <num_quadratic> <alpha> <offset>
//! <i> <c_i>              (num_linear lines)
//! <i> <j> <coef>         (num_quadratic lines, i <= j; i == j is Q_ii)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored when parsing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::QuboProblem;
use crate::{Error, Result};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn serialize_qubo(q: &QuboProblem) -> Vec<u8> {
    let linear: Vec<(usize, f64)> = q
        .linear
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, *c))
        .collect();
    let mut quad: Vec<(usize, usize, f64)> = q
        .diagonal
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, i, *c))
        .collect();
    quad.extend(q.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)));
    quad.sort_by_key(|&(i, j, _)| (i, j));

    let mut out = format!(
        "qubo {} {} {} {} {}\n",
        q.n,
        linear.len(),
        quad.len(),
        num(q.alpha),
        num(q.offset)
    );
    for (i, c) in linear {
        out.push_str(&format!("{i} {}\n", num(c)));
    }
    for (i, j, c) in quad {
        out.push_str(&format!("{i} {j} {}\n", num(c)));
    }
    out.into_bytes()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn finite(v: f64, line: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("non-finite coefficient {v}")))
    }
}

pub fn parse_qubo(bytes: &[u8]) -> Result<QuboProblem> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err(1, format!("not UTF-8: {e}")))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("qubo") {
        return Err(parse_err(hline, "header must start with 'qubo'"));
    }
    let n: usize = field(tok.next(), hline, "variable count")?;
    let num_linear: usize = field(tok.next(), hline, "linear count")?;
    let num_quadratic: usize = field(tok.next(), hline, "quadratic count")?;
    let alpha: f64 = field(tok.next(), hline, "alpha")?;
    let offset: f64 = finite(field(tok.next(), hline, "offset")?, hline)?;
    if tok.next().is_some() {
        return Err(parse_err(hline, "trailing tokens in header"));
    }

    let mut q = QuboProblem::empty(n);
    q.alpha = alpha;
    q.offset = offset;
    let mut seen_linear = vec![false; n];
    let mut seen_diag = vec![false; n];
    let mut off: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut last_line = hline;

    for _ in 0..num_linear {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, "missing linear entry"))?;
        last_line = ln;
        let mut t = l.split_whitespace();
        let i: usize = field(t.next(), ln, "index")?;
        let c: f64 = finite(field(t.next(), ln, "coefficient")?, ln)?;
        if t.next().is_some() {
            return Err(parse_err(ln, "expected '<i> <c_i>'"));
        }
        if i >= n {
            return Err(parse_err(ln, format!("index {i} out of range for n = {n}")));
        }
        if std::mem::replace(&mut seen_linear[i], true) {
            return Err(parse_err(ln, format!("duplicate linear entry for {i}")));
        }
        q.linear[i] = c;
    }
    for _ in 0..num_quadratic {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, "missing quadratic entry"))?;
        last_line = ln;
        let mut t = l.split_whitespace();
        let i: usize = field(t.next(), ln, "row index")?;
        let j: usize = field(t.next(), ln, "column index")?;
        let c: f64 = finite(field(t.next(), ln, "coefficient")?, ln)?;
        if t.next().is_some() {
            return Err(parse_err(ln, "expected '<i> <j> <coef>'"));
        }
        if i >= n || j >= n {
            return Err(parse_err(
                ln,
                format!("index ({i}, {j}) out of range for n = {n}"),
            ));
        }
        if i > j {
            return Err(parse_err(
                ln,
                format!("entry ({i}, {j}) must satisfy i <= j"),
            ));
        }
        if i == j {
            if std::mem::replace(&mut seen_diag[i], true) {
                return Err(parse_err(
                    ln,
                    format!("duplicate quadratic entry ({i}, {j})"),
                ));
            }
            q.diagonal[i] = c;
        } else if off.insert((i, j), c).is_some() {
            return Err(parse_err(
                ln,
                format!("duplicate quadratic entry ({i}, {j})"),
            ));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected content after declared entries"));
    }
    q.quadratic = off;
    Ok(q)
}

#[derive(Serialize, Deserialize)]
struct QuboDocument {
    n: usize,
    alpha: f64,
    offset: f64,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
}

pub fn serialize_qubo_json(q: &QuboProblem) -> Vec<u8> {
    let doc = QuboDocument {
        n: q.n,
        alpha: q.alpha,
        offset: q.offset,
        linear: q.linear.iter().copied().enumerate().collect(),
        quadratic: q
            .diagonal
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, i, c))
            .chain(q.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)))
            .collect(),
    };
    serde_json::to_vec_pretty(&doc).expect("QUBO document serializes")
}

pub fn parse_qubo_json(bytes: &[u8]) -> Result<QuboProblem> {
    let doc: QuboDocument = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut q = QuboProblem::empty(doc.n);
    q.alpha = doc.alpha;
    q.offset = doc.offset;
    for (i, c) in doc.linear {
        if i >= doc.n {
            return Err(parse_err(0, format!("linear index {i} out of range")));
        }
        q.linear[i] = c;
    }
    for (i, j, c) in doc.quadratic {
        if i >= doc.n || j >= doc.n {
            return Err(parse_err(
                0,
                format!("quadratic index ({i}, {j}) out of range"),
            ));
        }
        q.add_quadratic(i, j, c);
    }
    Ok(q)
}
