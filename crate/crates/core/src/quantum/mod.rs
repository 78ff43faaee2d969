//! Quantum periods: the toric formula, quantum Lefschetz for complete
//! intersections, the matrix ODE method, regularization and comparison with
//! classical periods.

mod toric;

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorial, format_rational, Rational};
use crate::laurent::PeriodSequence;
use crate::pf::{fit_operator, FitConfig};
use crate::upoly::QPoly;

pub use toric::{BundleData, ToricData};

/// Smallest common length accepted by [`mirror_match`] by default.
pub const DEFAULT_MATCH_DEPTH: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantumError {
    #[error("invalid toric data: {0}")]
    InvalidToric(String),
    #[error("invalid bundle data: {0}")]
    InvalidBundle(String),
    #[error("quantum matrix must be square and nonempty")]
    NotSquare,
    #[error("the first row of M(0) must vanish for Ψ(0) = Id to be consistent")]
    InitialCondition,
    #[error("{m} is an eigenvalue of M(0); the series solution is not unique")]
    Resonance { m: usize },
    #[error("sequences overlap in {available} terms, {required} required")]
    InsufficientOverlap { available: usize, required: usize },
}

/// `G_X` of a toric Fano manifold: `p_m = Σ_{k ∈ NE, -K·k = m} 1/∏(D_i·k)!`.
pub fn toric_quantum_period(t: &ToricData, m_max: usize) -> PeriodSequence {
    toric::graded_sum(t, &[], &t.anticanonical(), m_max)
}

/// `G_X = exp(-a_1 t) F_X` for the complete intersection of the bundles in
/// `b`, where `F_X = Σ t^{A·k} ∏(L_j·k)!/∏(D_i·k)!`.
///
/// The formula holds for a smooth Fano complete intersection cut out by
/// generic sections; neither condition is checked here.
pub fn ci_quantum_period(t: &ToricData, b: &BundleData, m_max: usize) -> PeriodSequence {
    let f = toric::graded_sum(t, b.bundles(), &b.a_class(t), m_max);
    let a1 = f.get(1);
    if a1.is_zero() {
        return f;
    }
    // exp(-a_1 t) = Σ (-a_1)^n / n! t^n
    let mut e = Vec::with_capacity(m_max + 1);
    let mut term = Rational::one();
    for n in 0..=m_max {
        if n > 0 {
            term = term * -&a1 / Rational::from_integer(n.into());
        }
        e.push(term.clone());
    }
    let coeffs = (0..=m_max)
        .map(|m| (0..=m).map(|n| &e[n] * f.get(m - n)).sum())
        .collect();
    PeriodSequence::new(coeffs)
}

/// `c_m = m!·p_m`.
pub fn regularize(p: &PeriodSequence) -> PeriodSequence {
    PeriodSequence::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| c * Rational::from_integer(factorial(m as u64)))
            .collect(),
    )
}

/// Matrix of quantum multiplication by `-K`, entries polynomial in `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumMatrix {
    entries: Vec<Vec<QPoly>>,
}

impl QuantumMatrix {
    pub fn new(entries: Vec<Vec<QPoly>>) -> Result<Self, QuantumError> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(QuantumError::NotSquare);
        }
        Ok(Self { entries })
    }

    /// From `(i, j, k, c)`: coefficient `c` of `t^k` in entry `(i, j)`.
    pub fn from_entries(dim: usize, items: impl IntoIterator<Item = (usize, usize, usize, Rational)>) -> Result<Self, QuantumError> {
        let mut grid: Vec<Vec<Vec<Rational>>> = vec![vec![Vec::new(); dim]; dim];
        for (i, j, k, c) in items {
            if i >= dim || j >= dim {
                return Err(QuantumError::NotSquare);
            }
            let e = &mut grid[i][j];
            if e.len() <= k {
                e.resize(k + 1, Rational::zero());
            }
            e[k] += c;
        }
        Self::new(
            grid.into_iter()
                .map(|row| row.into_iter().map(QPoly::new).collect())
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            entries: vec![vec![QPoly::zero(); dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &QPoly {
        &self.entries[i][j]
    }

    pub fn t_degree(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter_map(QPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// Coefficient matrix of `t^k`.
    fn coefficient(&self, k: usize) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.coeff(k)).collect())
            .collect()
    }

    /// Nonzero `(i, j, k, c)`, ordered.
    pub fn items(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (k, c) in p.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }
}

/// First entry of the first row of `Ψ`, where `DΨ = ΨM` and `Ψ(0) = Id`.
///
/// The first row `s = Σ s_m t^m` starts at `e_0` and satisfies
/// `s_m (m·Id - M_0) = Σ_{k≥1} s_{m-k} M_k`.
pub fn matrix_quantum_period(m: &QuantumMatrix, m_max: usize) -> Result<PeriodSequence, QuantumError> {
    let n = m.dim();
    let coeffs: Vec<Vec<Vec<Rational>>> = (0..=m.t_degree()).map(|k| m.coefficient(k)).collect();
    if coeffs[0][0].iter().any(|c| !c.is_zero()) {
        return Err(QuantumError::InitialCondition);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m_max + 1);
    let mut e0 = vec![Rational::zero(); n];
    e0[0] = Rational::one();
    rows.push(e0);
    for deg in 1..=m_max {
        let mut rhs = vec![Rational::zero(); n];
        for (k, mk) in coeffs.iter().enumerate().skip(1) {
            if k > deg {
                break;
            }
            let s = &rows[deg - k];
            for (i, si) in s.iter().enumerate() {
                if si.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !mk[i][j].is_zero() {
                        rhs[j] += si * &mk[i][j];
                    }
                }
            }
        }
        // Solve (m·Id - M_0)^T s^T = rhs^T.
        let a: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let diag = if i == j { Rational::from_integer(deg.into()) } else { Rational::zero() };
                        diag - &coeffs[0][i][j]
                    })
                    .collect()
            })
            .collect();
        rows.push(solve(a, rhs).ok_or(QuantumError::Resonance { m: deg })?);
    }
    Ok(PeriodSequence::new(rows.into_iter().map(|r| r[0].clone()).collect()))
}

fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] * &inv;
            for j in col..n {
                let v = &f * &a[col][j];
                a[i][j] -= v;
            }
            let v = &f * &b[col];
            b[i] -= v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MatchVerdict {
    /// The sequences agree on their first `depth` terms.
    Match { depth: usize },
    Mismatch {
        index: usize,
        classical: String,
        regularized: String,
    },
}

impl MatchVerdict {
    pub fn is_match(&self) -> bool {
        matches!(self, Self::Match { .. })
    }
}

impl fmt::Display for MatchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Match { depth } => write!(f, "match to depth {depth}"),
            Self::Mismatch {
                index,
                classical,
                regularized,
            } => write!(f, "mismatch at index {index}: {classical} vs {regularized}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    #[serde(flatten)]
    pub verdict: MatchVerdict,
    /// Whether the fitted operators of both sides agree, when both fits
    /// succeeded.
    pub operators_agree: Option<bool>,
}

/// Compares the classical period `c_f` with the regularization of the
/// quantum period `p_x` over their common length.
pub fn mirror_match(c_f: &PeriodSequence, p_x: &PeriodSequence, min_depth: usize) -> Result<MatchVerdict, QuantumError> {
    compare(c_f, &regularize(p_x), min_depth)
}

/// Compares two sequences that are already on the same footing.
pub fn compare(a: &PeriodSequence, b: &PeriodSequence, min_depth: usize) -> Result<MatchVerdict, QuantumError> {
    let depth = a.len().min(b.len());
    if depth < min_depth {
        return Err(QuantumError::InsufficientOverlap {
            available: depth,
            required: min_depth,
        });
    }
    for i in 0..depth {
        if a.get(i) != b.get(i) {
            return Ok(MatchVerdict::Mismatch {
                index: i,
                classical: format_rational(&a.get(i)),
                regularized: format_rational(&b.get(i)),
            });
        }
    }
    Ok(MatchVerdict::Match { depth })
}

/// [`mirror_match`] plus a comparison of the operators fitted on both sides.
pub fn mirror_match_with_operators(
    c_f: &PeriodSequence,
    p_x: &PeriodSequence,
    min_depth: usize,
    cfg: &FitConfig,
) -> Result<MatchReport, QuantumError> {
    let verdict = mirror_match(c_f, p_x, min_depth)?;
    let hat = regularize(p_x);
    let operators_agree = match (fit_operator(c_f, cfg), fit_operator(&hat, cfg)) {
        (Ok(a), Ok(b)) => Some(a.proportional(&b)),
        _ => None,
    };
    Ok(MatchReport { verdict, operators_agree })
}
