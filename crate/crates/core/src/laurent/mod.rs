//! Sparse Laurent polynomials with exact rational coefficients, and their
//! classical period sequences.

mod expr;
mod period;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, parse_rational, Rational};
use crate::polytope::{Face, LatticePolytope};

pub use expr::parse_expression;
pub use period::{period_sequence, period_sequence_naive, PeriodSequence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("constant term is {0}, expected 0")]
    NonzeroConstantTerm(String),
    #[error("the given polytope is not a face of the Newton polytope")]
    NotAFace,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Exponent vector `x^m`. Ordered graded-lexicographically: total degree
/// first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Σ a_m x^m`; no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_terms(dim, [(vec![0; dim], c)]).unwrap()
    }

    pub fn monomial(exponents: Vec<i64>, c: Rational) -> Self {
        let dim = exponents.len();
        Self::from_terms(dim, [(exponents, c)]).unwrap()
    }

    /// Sums repeated exponents and drops zeros.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, Rational)>,
    ) -> Result<Self, LaurentError> {
        let mut out = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(LaurentError::DimensionMismatch(dim, e.len()));
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[i64]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().map(|m| m.0.clone()).collect()
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.dim])
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn check_dim(&self, other: &Self) -> Result<(), LaurentError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(LaurentError::DimensionMismatch(self.dim, other.dim))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.dim, Rational::one());
        for _ in 0..e {
            acc = acc.multiply(self).unwrap();
        }
        acc
    }

    pub fn newton_polytope(&self) -> Result<LatticePolytope, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        Ok(LatticePolytope::from_points(self.dim, &self.support()).expect("support has the right dimension"))
    }

    /// Terms supported on `face`, which must be a face of the Newton polytope
    /// (the whole polytope counts).
    pub fn face_restriction(&self, face: &LatticePolytope) -> Result<Self, LaurentError> {
        let newt = self.newton_polytope()?;
        if face.ambient_dim() != self.dim {
            return Err(LaurentError::DimensionMismatch(self.dim, face.ambient_dim()));
        }
        let is_face = face.vertices() == newt.vertices()
            || (newt.is_full_dimensional()
                && face.dim() < newt.dim()
                && newt
                    .faces(face.dim())
                    .unwrap()
                    .iter()
                    .any(|f| f.vertices == face.vertices()));
        if !is_face {
            return Err(LaurentError::NotAFace);
        }
        Ok(self.restrict_to(|e| face.contains(e)))
    }

    pub fn restrict_to_face(&self, face: &Face) -> Result<Self, LaurentError> {
        self.face_restriction(&face.as_polytope())
    }

    /// Terms whose exponents satisfy `keep`.
    pub fn restrict_to(&self, keep: impl Fn(&[i64]) -> bool) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(&m.0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Monomial change of variables `x^m ↦ x^{U m}`.
    pub fn transform(&self, u: &[Vec<i64>]) -> Self {
        let dim = u.len();
        let mut out = Self::zero(dim);
        for (m, c) in &self.terms {
            let e: Vec<i64> = u
                .iter()
                .map(|row| row.iter().zip(&m.0).map(|(a, b)| a * b).sum())
                .collect();
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Variable names used by the printer and parser.
    pub fn variable_names(dim: usize) -> Vec<String> {
        if dim <= 4 {
            ["x", "y", "z", "w"][..dim].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=dim).map(|i| format!("x{i}")).collect()
        }
    }
}

impl fmt::Display for LaurentPolynomial {
    /// Highest graded-lex term first, e.g. `x + y + 3*x^-1 + x^-1*y^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let names = Self::variable_names(self.dim);
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .zip(&names)
                .filter(|(e, _)| **e != 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if factors.is_empty() {
                f.write_str(&format_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_rational(&a))?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermsRepr {
    dim: usize,
    terms: Vec<(Vec<i64>, String)>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TermsRepr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), format_rational(c)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TermsRepr::deserialize(d)?;
        let mut terms = Vec::new();
        for (e, c) in repr.terms {
            let c = parse_rational(&c)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational {c:?}")))?;
            terms.push((e, c));
        }
        Self::from_terms(repr.dim, terms).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPolynomial({self})")
    }
}
