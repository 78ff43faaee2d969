//! Line-oriented text formats for polynomials, polytopes, period sequences,
//! operators, toric data and quantum matrices. `#` starts a comment; blank
//! lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arith::{format_rational, parse_rational, Rational};
use crate::laurent::{LaurentPolynomial, PeriodSequence};
use crate::pf::DifferentialOperator;
use crate::polytope::lattice::IVec;
use crate::polytope::LatticePolytope;
use crate::quantum::{BundleData, QuantumMatrix, ToricData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 for errors about the file as a whole.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn ints(line: usize, s: &str) -> Result<IVec, ParseError> {
    s.split_whitespace()
        .map(|w| w.parse::<i64>().or_else(|_| err(line, format!("expected an integer, found {w:?}"))))
        .collect()
}

fn rational(line: usize, s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    parse_rational(s).map_or_else(|| err(line, format!("expected a rational, found {s:?}")), Ok)
}

/// `lhs : rhs`.
fn split_colon(line: usize, s: &str) -> Result<(&str, &str), ParseError> {
    s.split_once(':').map_or_else(|| err(line, "expected `exponents : coefficient`"), Ok)
}

/// `keyword value` header, e.g. `dim 3`.
fn header<'a>(line: usize, s: &'a str, keyword: &str) -> Result<&'a str, ParseError> {
    match s.split_once(char::is_whitespace) {
        Some((k, rest)) if k == keyword => Ok(rest.trim()),
        _ => err(line, format!("expected `{keyword} …`")),
    }
}

fn usize_value(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().or_else(|_| err(line, format!("expected a nonnegative integer, found {s:?}")))
}

/// ```text
/// dim 2
/// 1 0 : 1
/// -1 -1 : 1/2
/// ```
pub fn parse_polynomial(text: &str) -> Result<LaurentPolynomial, ParseError> {
    let mut it = lines(text);
    let Some((l0, first)) = it.next() else {
        return err(0, "empty polynomial file");
    };
    let dim = usize_value(l0, header(l0, first, "dim")?)?;
    let mut terms = Vec::new();
    for (ln, s) in it {
        let (lhs, rhs) = split_colon(ln, s)?;
        let e = ints(ln, lhs)?;
        if e.len() != dim {
            return err(ln, format!("expected {dim} exponents, found {}", e.len()));
        }
        terms.push((e, rational(ln, rhs)?));
    }
    let f = LaurentPolynomial::from_terms(dim, terms).expect("lengths checked");
    if f.is_zero() {
        return err(0, "the polynomial is zero");
    }
    Ok(f)
}

/// Inverse of [`parse_polynomial`]; terms in graded-lex order.
pub fn write_polynomial(f: &LaurentPolynomial) -> String {
    let mut out = format!("dim {}\n", f.dim());
    for (m, c) in f.terms() {
        let e: Vec<String> = m.exponents().iter().map(i64::to_string).collect();
        writeln!(out, "{} : {}", e.join(" "), format_rational(c)).unwrap();
    }
    out
}

/// ```text
/// dim 3
/// id 519664
/// 1 0 0
/// …
/// ```
pub fn parse_polytope(text: &str) -> Result<LatticePolytope, ParseError> {
    let mut it = lines(text).peekable();
    let Some((l0, first)) = it.next() else {
        return err(0, "empty polytope file");
    };
    let dim = usize_value(l0, header(l0, first, "dim")?)?;
    let mut id = None;
    if let Some((ln, s)) = it.peek().copied() {
        if s.starts_with("id") {
            id = Some(header(ln, s, "id")?.to_string());
            it.next();
        }
    }
    let mut pts = Vec::new();
    for (ln, s) in it {
        let v = ints(ln, s)?;
        if v.len() != dim {
            return err(ln, format!("expected {dim} coordinates, found {}", v.len()));
        }
        pts.push(v);
    }
    let p = LatticePolytope::from_points(dim, &pts).or_else(|e| err(0, e.to_string()))?;
    Ok(match id {
        Some(id) => p.with_id(id),
        None => p,
    })
}

pub fn write_polytope(p: &LatticePolytope) -> String {
    let mut out = format!("dim {}\n", p.ambient_dim());
    if let Some(id) = p.id() {
        writeln!(out, "id {id}").unwrap();
    }
    for v in p.vertices() {
        let v: Vec<String> = v.iter().map(i64::to_string).collect();
        writeln!(out, "{}", v.join(" ")).unwrap();
    }
    out
}

/// One coefficient per line, optionally prefixed by its index as `m : c`.
pub fn parse_period(text: &str) -> Result<PeriodSequence, ParseError> {
    let mut coeffs = Vec::new();
    for (ln, s) in lines(text) {
        let value = match s.split_once(':') {
            Some((idx, v)) => {
                let m = usize_value(ln, idx.trim())?;
                if m != coeffs.len() {
                    return err(ln, format!("expected index {}, found {m}", coeffs.len()));
                }
                v
            }
            None => s,
        };
        coeffs.push(rational(ln, value)?);
    }
    if coeffs.is_empty() {
        return err(0, "empty period file");
    }
    Ok(PeriodSequence::new(coeffs))
}

pub fn write_period(c: &PeriodSequence) -> String {
    c.coeffs()
        .iter()
        .enumerate()
        .map(|(m, v)| format!("{m} : {}\n", format_rational(v)))
        .collect()
}

/// ```text
/// order 2
/// 0 2 : 1      # k j : a_{k,j}, the coefficient of t^k D^j
/// 3 2 : -27
/// ```
pub fn parse_operator_file(text: &str) -> Result<DifferentialOperator, ParseError> {
    let mut it = lines(text);
    let Some((l0, first)) = it.next() else {
        return err(0, "empty operator file");
    };
    let order = usize_value(l0, header(l0, first, "order")?)?;
    let mut entries = Vec::new();
    for (ln, s) in it {
        let (lhs, rhs) = split_colon(ln, s)?;
        let kj = ints(ln, lhs)?;
        let [k, j] = kj[..] else {
            return err(ln, "expected `k j : coefficient`");
        };
        if k < 0 || j < 0 || j as usize > order {
            return err(ln, format!("position ({k}, {j}) out of range for order {order}"));
        }
        entries.push((k as usize, j as usize, rational(ln, rhs)?));
    }
    let l = DifferentialOperator::from_entries(entries);
    if l.is_zero() {
        return err(0, "the operator is zero");
    }
    if l.order() != order {
        return err(0, format!("declared order {order}, but the operator has order {}", l.order()));
    }
    Ok(l)
}

pub fn write_operator(l: &DifferentialOperator) -> String {
    let mut out = format!("order {}\n# {}\n", l.order(), l.pretty());
    for (k, j, a) in l.entries() {
        writeln!(out, "{k} {j} : {}", format_rational(&a)).unwrap();
    }
    out
}

/// ```text
/// toric 2 4        # b r: Picard rank and number of divisors
/// 1 1 1 0          # b weight rows
/// 0 0 1 1
/// nef              # generators of the nef cone, one per line
/// 1 0
/// 1 1
/// bundles          # optional
/// 1 1
/// ```
pub fn parse_toric(text: &str) -> Result<(ToricData, BundleData), ParseError> {
    let mut it = lines(text);
    let Some((l0, first)) = it.next() else {
        return err(0, "empty toric file");
    };
    let br = ints(l0, header(l0, first, "toric")?)?;
    let [b, r] = br[..] else {
        return err(l0, "expected `toric b r`");
    };
    let (b, r) = (b as usize, r as usize);
    let mut weights = Vec::new();
    let mut nef = Vec::new();
    let mut bundles = Vec::new();
    let mut section = 0;
    for (ln, s) in it {
        match s {
            "nef" if section == 0 => section = 1,
            "bundles" if section == 1 => section = 2,
            _ => {
                let v = ints(ln, s)?;
                let want = if section == 0 { r } else { b };
                if v.len() != want {
                    return err(ln, format!("expected {want} integers, found {}", v.len()));
                }
                match section {
                    0 => weights.push(v),
                    1 => nef.push(v),
                    _ => bundles.push(v),
                }
            }
        }
    }
    if weights.len() != b {
        return err(0, format!("expected {b} weight rows, found {}", weights.len()));
    }
    if nef.is_empty() {
        return err(0, "missing `nef` section");
    }
    let toric = ToricData::new(weights, nef).or_else(|e| err(0, e.to_string()))?;
    let bundles = BundleData::new(&toric, bundles).or_else(|e| err(0, e.to_string()))?;
    Ok((toric, bundles))
}

pub fn write_toric(t: &ToricData, bundles: &BundleData) -> String {
    let row = |v: &IVec| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    let mut out = format!("toric {} {}\n", t.picard_rank(), t.weights()[0].len());
    for w in t.weights() {
        writeln!(out, "{}", row(w)).unwrap();
    }
    out.push_str("nef\n");
    for n in t.nef() {
        writeln!(out, "{}", row(n)).unwrap();
    }
    if !bundles.bundles().is_empty() {
        out.push_str("bundles\n");
        for l in bundles.bundles() {
            writeln!(out, "{}", row(l)).unwrap();
        }
    }
    out
}

/// ```text
/// dim 3
/// 1 0 0 : 3        # i j k : coefficient of t^k in M_{ij}
/// ```
pub fn parse_quantum_matrix(text: &str) -> Result<QuantumMatrix, ParseError> {
    let mut it = lines(text);
    let Some((l0, first)) = it.next() else {
        return err(0, "empty matrix file");
    };
    let dim = usize_value(l0, header(l0, first, "dim")?)?;
    let mut items = Vec::new();
    for (ln, s) in it {
        let (lhs, rhs) = split_colon(ln, s)?;
        let ijk = ints(ln, lhs)?;
        let [i, j, k] = ijk[..] else {
            return err(ln, "expected `i j k : coefficient`");
        };
        if i < 0 || j < 0 || k < 0 || i as usize >= dim || j as usize >= dim {
            return err(ln, format!("position ({i}, {j}, {k}) out of range for dimension {dim}"));
        }
        items.push((i as usize, j as usize, k as usize, rational(ln, rhs)?));
    }
    QuantumMatrix::from_entries(dim, items).or_else(|e| err(0, e.to_string()))
}

pub fn write_quantum_matrix(m: &QuantumMatrix) -> String {
    let mut out = format!("dim {}\n", m.dim());
    for (i, j, k, c) in m.items() {
        writeln!(out, "{i} {j} {k} : {}", format_rational(&c)).unwrap();
    }
    out
}
