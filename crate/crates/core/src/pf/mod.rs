//! Differential operators `L = Σ_k t^k P_k(D)` in `Q⟨t, D⟩`, `D = t d/dt`,
//! acting on power series; fitting annihilators to period sequences; sequence
//! extension through the recursion; the operator at `t = 0`.

mod expr;
mod fit;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, parse_rational, rat, Rational};
use crate::factor::factor;
use crate::laurent::PeriodSequence;
use crate::upoly::QPoly;

pub use expr::parse_operator;
pub use fit::{fit_operator, FitConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfError {
    #[error(
        "no annihilator with order ≤ {max_order} and t-degree ≤ {max_degree} \
         (last shape tried: order {last_order}, degree {last_degree}; {terms} terms, slack {slack})"
    )]
    NoAnnihilator {
        max_order: usize,
        max_degree: usize,
        last_order: usize,
        last_degree: usize,
        terms: usize,
        slack: usize,
    },
    #[error("annihilators of order {order}, t-degree {degree} form a space of dimension {dim}; more terms are needed")]
    AmbiguousNullspace { order: usize, degree: usize, dim: usize },
    #[error("too few terms: {terms} given, the smallest shape needs {needed}")]
    TooFewTerms { terms: usize, needed: usize },
    #[error("P_0({m}) = 0: the recursion cannot produce c_{m}")]
    RecursionStalls { m: usize },
    #[error("operator does not annihilate the sequence (first nonzero entry at index {index})")]
    NotAnnihilated { index: usize },
    #[error("the zero operator")]
    ZeroOperator,
    #[error("cannot parse operator: {0}")]
    Parse(String),
}

/// Coefficient grid `a[k][j]` of `t^k D^j`; trailing zero rows and columns
/// are trimmed so that the order and t-degree are tight.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DifferentialOperator {
    grid: Vec<Vec<Rational>>,
}

/// Type of `L(0) = P_0(D)` according to its roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorType {
    /// All roots are integers.
    Manifold,
    /// All roots are rational, not all integral.
    Orbifold,
    /// `P_0` does not split over Q.
    NonSplit,
}

impl fmt::Display for OperatorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Manifold => "manifold",
            Self::Orbifold => "orbifold",
            Self::NonSplit => "non-split",
        })
    }
}

/// `P_0(D)`, its rational roots with multiplicity, and the type verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorAtZero {
    pub p0: QPoly,
    pub roots: Vec<(Rational, usize)>,
    pub verdict: OperatorType,
}

impl DifferentialOperator {
    /// From `a[k][j]`; rows may have different lengths.
    pub fn from_grid(grid: Vec<Vec<Rational>>) -> Self {
        let mut op = Self { grid };
        op.trim();
        op
    }

    pub fn from_int_grid(grid: &[Vec<i64>]) -> Self {
        Self::from_grid(grid.iter().map(|row| row.iter().map(|&v| rat(v)).collect()).collect())
    }

    /// From the polynomials `P_0(D), P_1(D), …`.
    pub fn from_pk(pk: &[QPoly]) -> Self {
        Self::from_grid(pk.iter().map(|p| p.coeffs().to_vec()).collect())
    }

    /// Sparse `(k, j, a)` triples; repeated positions add up.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let mut grid: Vec<Vec<Rational>> = Vec::new();
        for (k, j, a) in entries {
            if grid.len() <= k {
                grid.resize(k + 1, Vec::new());
            }
            if grid[k].len() <= j {
                grid[k].resize(j + 1, Rational::zero());
            }
            grid[k][j] += a;
        }
        Self::from_grid(grid)
    }

    fn trim(&mut self) {
        let order = self
            .grid
            .iter()
            .filter_map(|row| row.iter().rposition(|a| !a.is_zero()))
            .max();
        match order {
            None => self.grid.clear(),
            Some(r) => {
                for row in &mut self.grid {
                    row.resize(r + 1, Rational::zero());
                }
                while self.grid.last().is_some_and(|row| row.iter().all(Zero::is_zero)) {
                    self.grid.pop();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.grid.is_empty()
    }

    /// Highest power of `D` (0 for the zero operator).
    pub fn order(&self) -> usize {
        self.grid.first().map_or(0, |r| r.len() - 1)
    }

    /// Highest power of `t` (0 for the zero operator).
    pub fn t_degree(&self) -> usize {
        self.grid.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize, j: usize) -> Rational {
        self.grid
            .get(k)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero `(k, j, a_{k,j})`, ordered by `(k, j)`.
    pub fn entries(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for (k, row) in self.grid.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    out.push((k, j, a.clone()));
                }
            }
        }
        out
    }

    /// `P_k(D) = Σ_j a_{k,j} D^j`.
    pub fn pk(&self, k: usize) -> QPoly {
        QPoly::new(self.grid.get(k).cloned().unwrap_or_default())
    }

    /// `p_j(t) = Σ_k a_{k,j} t^k`.
    pub fn pj(&self, j: usize) -> QPoly {
        QPoly::new(self.grid.iter().map(|row| row.get(j).cloned().unwrap_or_else(Rational::zero)).collect())
    }

    /// Leading coefficient `p_order(t)`.
    pub fn leading_coefficient(&self) -> QPoly {
        self.pj(self.order())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_grid(
            self.grid
                .iter()
                .map(|row| row.iter().map(|a| a * s).collect())
                .collect(),
        )
    }

    /// Integer coefficients with content 1, first nonzero `a_{k,j}` in
    /// `(k, j)` order positive.
    pub fn normalized(&self) -> Self {
        let entries = self.entries();
        let Some((_, _, first)) = entries.first() else {
            return self.clone();
        };
        let values: Vec<Rational> = entries.iter().map(|(_, _, a)| a.clone()).collect();
        let ints = crate::arith::primitive_integer_vector(&values);
        let sign = if first.is_negative() { -1 } else { 1 };
        Self::from_entries(
            entries
                .iter()
                .zip(ints)
                .map(|((k, j, _), v)| (*k, *j, Rational::from_integer(v * sign))),
        )
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalized()
    }

    /// Whether `self` and `other` agree up to a nonzero scalar.
    pub fn proportional(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// Coefficients of `L·Σ c_m t^m`: entry `m` is `Σ_k P_k(m-k) c_{m-k}`.
    pub fn apply(&self, c: &PeriodSequence) -> PeriodSequence {
        let pk: Vec<QPoly> = (0..=self.t_degree()).map(|k| self.pk(k)).collect();
        let out = (0..c.len())
            .map(|m| {
                let mut acc = Rational::zero();
                for (k, p) in pk.iter().enumerate() {
                    if k > m || p.is_zero() {
                        continue;
                    }
                    let cm = &c.coeffs()[m - k];
                    if !cm.is_zero() {
                        acc += p.eval(&rat((m - k) as i64)) * cm;
                    }
                }
                acc
            })
            .collect();
        PeriodSequence::new(out)
    }

    /// Index of the first nonzero entry of `apply`, if any.
    pub fn first_failure(&self, c: &PeriodSequence) -> Option<usize> {
        self.apply(c).coeffs().iter().position(|x| !x.is_zero())
    }

    /// `L(0) = P_0(D)` and its type.
    pub fn operator_at_zero(&self) -> OperatorAtZero {
        let p0 = self.pk(0);
        let fac = factor(&p0);
        let split = fac.factors.iter().all(|(f, _)| f.degree() == Some(1));
        let roots = p0.rational_roots();
        let verdict = if !split {
            OperatorType::NonSplit
        } else if roots.iter().all(|(r, _)| r.is_integer()) {
            OperatorType::Manifold
        } else {
            OperatorType::Orbifold
        };
        OperatorAtZero { p0, roots, verdict }
    }

    /// Conventional rendering, grouped by powers of `t` with each `P_k`
    /// factored over Q: `D^2 - 27t^3(D+1)(D+2)`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for k in 0..=self.t_degree() {
            let p = self.pk(k);
            if p.is_zero() {
                continue;
            }
            let (unit, factors) = factored_parts(&p);
            let neg = unit.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = unit.abs();
            let t = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            let body: String = factors.concat();
            if !a.is_one() || (t.is_empty() && body.is_empty()) {
                out.push_str(&format_rational(&a));
            }
            out.push_str(&t);
            out.push_str(&body);
        }
        out
    }

    /// Expanded rendering, one monomial `a t^k D^j` per term in `(k, j)`
    /// order.
    pub fn expanded(&self) -> String {
        let mut out = String::new();
        for (k, j, a) in self.entries() {
            let neg = a.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: String = [(k, "t"), (j, "D")]
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|(e, v)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let abs = a.abs();
            if !abs.is_one() || mono.is_empty() {
                out.push_str(&format_rational(&abs));
            }
            out.push_str(&mono);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Unit (signed content) and rendered primitive factors of `P(D)`, with `D`
/// factors first.
fn factored_parts(p: &QPoly) -> (Rational, Vec<String>) {
    let fac = factor(p);
    let mut unit = fac.unit.clone();
    let mut d_part = Vec::new();
    let mut rest: Vec<(usize, Vec<BigInt>, String)> = Vec::new();
    for (f, mult) in &fac.factors {
        let (u, ints) = f.primitive_part();
        unit *= num_traits::Pow::pow(&u, *mult as u32);
        let is_d = ints.len() == 2 && ints[0].is_zero();
        let body = render_int_poly(&ints);
        match (is_d, *mult) {
            (true, 1) => d_part.push("D".to_string()),
            (true, m) => d_part.push(format!("D^{m}")),
            (false, 1) => rest.push((ints.len(), ints.iter().rev().cloned().collect(), format!("({body})"))),
            (false, m) => rest.push((ints.len(), ints.iter().rev().cloned().collect(), format!("({body})^{m}"))),
        }
    }
    // Lower degree first, then smaller coefficients from the top down.
    rest.sort();
    let rest: Vec<String> = rest.into_iter().map(|(_, _, s)| s).collect();
    d_part.extend(rest);
    (unit, d_part)
}

fn render_int_poly(c: &[BigInt]) -> String {
    let q = QPoly::from_bigints(c);
    q.display_in("D").replace(' ', "")
}

impl fmt::Display for DifferentialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl fmt::Debug for DifferentialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialOperator({})", self.pretty())
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    order: usize,
    /// `(k, j, a_{k,j})`
    entries: Vec<(usize, usize, String)>,
}

impl Serialize for DifferentialOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorRepr {
            order: self.order(),
            entries: self
                .entries()
                .into_iter()
                .map(|(k, j, a)| (k, j, format_rational(&a)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DifferentialOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(d)?;
        let mut entries = Vec::new();
        for (k, j, a) in repr.entries {
            let a = parse_rational(&a).ok_or_else(|| serde::de::Error::custom(format!("bad rational {a:?}")))?;
            entries.push((k, j, a));
        }
        Ok(Self::from_entries(entries))
    }
}

/// Extends `c` to `c_0..c_{m2}` with `c_m = -P_0(m)^{-1} Σ_{k≥1} P_k(m-k) c_{m-k}`.
pub fn extend_sequence(
    l: &DifferentialOperator,
    c: &PeriodSequence,
    m2: usize,
) -> Result<PeriodSequence, PfError> {
    if l.is_zero() {
        return Err(PfError::ZeroOperator);
    }
    if let Some(index) = l.first_failure(c) {
        return Err(PfError::NotAnnihilated { index });
    }
    let pk: Vec<QPoly> = (0..=l.t_degree()).map(|k| l.pk(k)).collect();
    let mut out = c.clone();
    for m in c.len()..=m2 {
        let p0 = pk[0].eval(&rat(m as i64));
        if p0.is_zero() {
            return Err(PfError::RecursionStalls { m });
        }
        let mut acc = Rational::zero();
        for (k, p) in pk.iter().enumerate().skip(1) {
            if k > m || p.is_zero() {
                continue;
            }
            let prev = &out.coeffs()[m - k];
            if !prev.is_zero() {
                acc += p.eval(&rat((m - k) as i64)) * prev;
            }
        }
        out.push(-acc / p0);
    }
    Ok(out)
}

/// Free-function form of [`DifferentialOperator::apply`].
pub fn apply(l: &DifferentialOperator, c: &PeriodSequence) -> PeriodSequence {
    l.apply(c)
}

/// Free-function form of [`DifferentialOperator::operator_at_zero`].
pub fn operator_at_zero(l: &DifferentialOperator) -> OperatorAtZero {
    l.operator_at_zero()
}
