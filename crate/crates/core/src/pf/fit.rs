//! Fitting the minimal annihilating operator to a sequence.
//!
//! For a shape (order `r`, common t-degree bound `d`) the unknowns are
//! `a_{k,j}`, `0 ≤ k ≤ d`, `0 ≤ j ≤ r`, and each index `m` gives the linear
//! equation `Σ_k Σ_j a_{k,j} (m-k)^j c_{m-k} = 0`. Shapes are tried with the
//! order ascending and then `d` ascending; the first shape with a nontrivial
//! integer nullspace wins.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{DifferentialOperator, PfError};
use crate::arith::{common_denominator, Rational};
use crate::laurent::PeriodSequence;
use crate::linalg::integer_nullspace;

/// Search bounds. `slack` is the number of equations required beyond the
/// number of unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_order: usize,
    pub max_degree: usize,
    pub slack: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_order: 4,
            max_degree: 20,
            slack: 10,
        }
    }
}

impl FitConfig {
    /// Whether a shape can be tried with `terms` coefficients.
    pub fn admits(&self, order: usize, degree: usize, terms: usize) -> bool {
        (order + 1) * (degree + 1) + self.slack <= terms
    }
}

/// The minimal-order, then minimal-degree operator annihilating `c`,
/// normalized.
pub fn fit_operator(c: &PeriodSequence, cfg: &FitConfig) -> Result<DifferentialOperator, PfError> {
    let terms = c.len();
    let needed = 2 + cfg.slack;
    if terms < needed {
        return Err(PfError::TooFewTerms { terms, needed });
    }
    let table = PowerTable::new(c, cfg.max_order);
    let mut last = (1, 0);
    for order in 1..=cfg.max_order {
        for degree in 0..=cfg.max_degree {
            if !cfg.admits(order, degree, terms) {
                break;
            }
            last = (order, degree);
            let rows = table.rows(order, degree, &[]);
            let kernel = integer_nullspace(&rows, (order + 1) * (degree + 1));
            match kernel.len() {
                0 => continue,
                1 => {
                    let op = strip_leading(&table, order, degree, &kernel[0]);
                    return Ok(op.normalized());
                }
                dim => return Err(PfError::AmbiguousNullspace { order, degree, dim }),
            }
        }
    }
    Err(PfError::NoAnnihilator {
        max_order: cfg.max_order,
        max_degree: cfg.max_degree,
        last_order: last.0,
        last_degree: last.1,
        terms,
        slack: cfg.slack,
    })
}

/// Tries to lower the degree of the leading coefficient `p_r(t)` while
/// keeping the shape, by forcing its top coefficients to vanish.
fn strip_leading(table: &PowerTable, order: usize, degree: usize, v: &[BigInt]) -> DifferentialOperator {
    let mut best = to_operator(order, degree, v);
    let lead_deg = best.leading_coefficient().degree().unwrap_or(0);
    for bound in (0..lead_deg).rev() {
        let zeros: Vec<usize> = (bound + 1..=degree).map(|k| k * (order + 1) + order).collect();
        let rows = table.rows(order, degree, &zeros);
        let kernel = integer_nullspace(&rows, (order + 1) * (degree + 1));
        match kernel.as_slice() {
            [v] => best = to_operator(order, degree, v),
            _ => break,
        }
    }
    best
}

fn to_operator(order: usize, degree: usize, v: &[BigInt]) -> DifferentialOperator {
    DifferentialOperator::from_entries((0..=degree).flat_map(|k| {
        (0..=order).map(move |j| (k, j, Rational::from_integer(v[k * (order + 1) + j].clone())))
    }))
}

/// Integer rows `m^j c_m` cached per index, with denominators cleared.
struct PowerTable {
    /// `pw[m][j] = m^j c_m · den`
    pw: Vec<Vec<BigInt>>,
}

impl PowerTable {
    fn new(c: &PeriodSequence, max_order: usize) -> Self {
        let den = Rational::from_integer(common_denominator(c.coeffs()));
        let pw = c
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, cm)| {
                let base = (cm * &den).to_integer();
                let mut row = Vec::with_capacity(max_order + 1);
                let mut acc = base;
                for _ in 0..=max_order {
                    row.push(acc.clone());
                    acc *= m;
                }
                row
            })
            .collect();
        Self { pw }
    }

    /// Equations for all indices `m`, with extra equations `a_i = 0` for
    /// each unknown index in `zeros`. Unknown `(k, j)` sits at
    /// `k·(order+1) + j`.
    fn rows(&self, order: usize, degree: usize, zeros: &[usize]) -> Vec<Vec<BigInt>> {
        let width = (order + 1) * (degree + 1);
        let mut rows = Vec::with_capacity(self.pw.len() + zeros.len());
        for m in 0..self.pw.len() {
            let mut row = vec![BigInt::zero(); width];
            let mut nonzero = false;
            for k in 0..=degree.min(m) {
                let src = &self.pw[m - k];
                if src[0].is_zero() {
                    continue;
                }
                nonzero = true;
                for j in 0..=order {
                    row[k * (order + 1) + j] = src[j].clone();
                }
            }
            if nonzero {
                rows.push(row);
            }
        }
        for &z in zeros {
            let mut row = vec![BigInt::zero(); width];
            row[z] = BigInt::one();
            rows.push(row);
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorial;
    use crate::pf::parse_operator;
    use num_traits::Pow;

    fn p2_sequence(n: u64) -> PeriodSequence {
        PeriodSequence::from_bigints((0..n).map(|m| {
            if m % 3 == 0 {
                factorial(m) / Pow::pow(factorial(m / 3), 3u32)
            } else {
                BigInt::zero()
            }
        }))
    }

    #[test]
    fn fits_p2_mirror() {
        let l = fit_operator(&p2_sequence(31), &FitConfig::default()).unwrap();
        assert_eq!(l, parse_operator("D^2 - 27t^3(D+1)(D+2)").unwrap());
    }

    #[test]
    fn fits_first_order() {
        // Central binomials: (D) - 2t(2D+1) annihilates Σ C(2m,m) t^m.
        let c = PeriodSequence::from_bigints(
            (0..30u64).map(|m| factorial(2 * m) / Pow::pow(factorial(m), 2u32)),
        );
        let l = fit_operator(&c, &FitConfig::default()).unwrap();
        assert_eq!(l, parse_operator("D - 2t(2D+1)").unwrap());
    }

    #[test]
    fn too_short_input() {
        let c = PeriodSequence::from_ints(&[1, 0, 2]);
        assert!(matches!(fit_operator(&c, &FitConfig::default()), Err(PfError::TooFewTerms { .. })));
    }

    #[test]
    fn reports_frontier() {
        let cfg = FitConfig {
            max_order: 1,
            max_degree: 2,
            slack: 5,
        };
        let err = fit_operator(&p2_sequence(31), &cfg).unwrap_err();
        assert!(matches!(err, PfError::NoAnnihilator { last_order: 1, last_degree: 2, .. }), "{err}");
    }
}
