//! Local Euler forms `L ~ Σ_{h≥0} s^h Q_h(θ)`, `θ = s d/ds`, at a place with
//! local coordinate `s`, and the dimension of the space of formal Laurent
//! series solutions there.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{Field, NumberField, Rational, Rationals};
use crate::linalg::nullity;
use crate::pf::DifferentialOperator;
use crate::upoly::QPoly;

/// `q[h][c]` is the coefficient of `θ^c` in `Q_h`. `q[0]` is nonzero.
#[derive(Debug, Clone)]
pub(crate) struct EulerForm<F: Field> {
    pub field: F,
    pub q: Vec<Vec<F::Elem>>,
}

impl EulerForm<Rationals> {
    pub fn at_zero(l: &DifferentialOperator) -> Self {
        let q = (0..=l.t_degree()).map(|k| l.pk(k).coeffs().to_vec()).collect();
        Self::new(Rationals, q)
    }

    /// `u = 1/t`, `D = -θ_u`, so `Q_h(θ) = P_{deg-h}(-θ)`.
    pub fn at_infinity(l: &DifferentialOperator) -> Self {
        let deg = l.t_degree();
        let q = (0..=deg)
            .map(|h| {
                l.pk(deg - h)
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(c, a)| if c % 2 == 1 { -a } else { a.clone() })
                    .collect()
            })
            .collect();
        Self::new(Rationals, q)
    }
}

impl EulerForm<NumberField> {
    /// At a root `α` of the field's modulus, with `s = t - α`.
    ///
    /// `D^j = Σ_i S(j,i) t^i ∂^i` turns `L` into `Σ_i r_i(t) ∂^i`; after the
    /// shift `t = s + α`, each `r_{i,l} s^l ∂^i` equals `r_{i,l} s^{l-i} θ(θ-1)…(θ-i+1)`.
    pub fn at_root(l: &DifferentialOperator, field: NumberField) -> Self {
        let order = l.order();
        let stirling = stirling2(order);
        let alpha = field.generator();
        let mut by_h: BTreeMap<i64, Vec<Vec<Rational>>> = BTreeMap::new();
        for i in 0..=order {
            let mut r = QPoly::zero();
            for j in i..=order {
                let s = &stirling[j][i];
                if !s.is_zero() {
                    r = r.add(&l.pj(j).scale(&Rational::from_integer(s.clone())));
                }
            }
            if r.is_zero() {
                continue;
            }
            let r = r.mul(&QPoly::x().pow(i));
            let shifted = taylor_shift(&field, &r, &alpha);
            let ff = falling_factorial(i);
            for (lpow, b) in shifted.iter().enumerate() {
                if field.is_zero(b) {
                    continue;
                }
                let h = lpow as i64 - i as i64;
                let row = by_h.entry(h).or_insert_with(|| vec![field.zero(); order + 1]);
                for (c, f) in ff.iter().enumerate() {
                    if !f.is_zero() {
                        row[c] = field.add(&row[c], &field.mul(b, &field.from_rational(f)));
                    }
                }
            }
        }
        let lo = by_h.keys().next().copied().unwrap_or(0);
        let hi = by_h.keys().last().copied().unwrap_or(0);
        let q = (lo..=hi)
            .map(|h| by_h.remove(&h).unwrap_or_else(|| vec![field.zero(); order + 1]))
            .collect();
        Self::new(field, q)
    }
}

impl<F: Field> EulerForm<F> {
    /// Drops leading all-zero `Q_h` (a left factor `s^v`) and trailing zero
    /// coefficients.
    fn new(field: F, mut q: Vec<Vec<F::Elem>>) -> Self {
        for row in &mut q {
            while row.last().is_some_and(|a| field.is_zero(a)) {
                row.pop();
            }
        }
        let first = q.iter().position(|r| !r.is_empty()).unwrap_or(q.len());
        q.drain(..first);
        while q.last().is_some_and(Vec::is_empty) {
            q.pop();
        }
        Self { field, q }
    }

    /// Degree of the indicial polynomial `Q_0`.
    pub fn indicial_degree(&self) -> usize {
        self.q.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    /// `Q_0` made monic, if its coefficients are rational.
    pub fn rational_indicial(&self) -> Option<QPoly> {
        let q0 = self.q.first()?;
        let inv = self.field.inv(q0.last()?);
        let coeffs: Option<Vec<Rational>> = q0
            .iter()
            .map(|a| self.field.as_rational(&self.field.mul(a, &inv)))
            .collect();
        coeffs.map(QPoly::new)
    }

    /// Integer `n` with `Q_0(n) = 0`, ascending.
    pub fn integer_exponents(&self) -> Vec<BigInt> {
        let Some(q0) = self.q.first() else {
            return Vec::new();
        };
        let width = q0.first().map_or(1, |a| self.field.coordinates(a).len());
        let mut g: Option<QPoly> = None;
        for b in 0..width {
            let p = QPoly::new(q0.iter().map(|a| self.field.coordinates(a)[b].clone()).collect());
            if p.is_zero() {
                continue;
            }
            g = Some(match g {
                None => p,
                Some(g) => g.gcd(&p),
            });
        }
        let mut roots: Vec<BigInt> = g
            .map(|g| g.integer_roots().into_iter().map(|(r, _)| r).collect())
            .unwrap_or_default();
        roots.sort();
        roots
    }

    fn eval(&self, h: usize, n: i64) -> F::Elem {
        let Some(row) = self.q.get(h) else {
            return self.field.zero();
        };
        let x = self.field.from_int(n);
        row.iter()
            .rev()
            .fold(self.field.zero(), |acc, a| self.field.add(&self.field.mul(&acc, &x), a))
    }

    /// Dimension of the Laurent series solutions `Σ_{n≥e_min} a_n s^n`,
    /// from the recursion `Σ_h Q_h(n-h) a_{n-h} = 0` truncated at
    /// `n ≤ e_max + order + margin`.
    pub fn laurent_solutions(&self, order: usize, margin: usize) -> usize {
        let exps = self.integer_exponents();
        let (Some(lo), Some(hi)) = (exps.first(), exps.last()) else {
            return 0;
        };
        let lo: i64 = lo.try_into().expect("exponent fits in i64");
        let hi: i64 = hi.try_into().expect("exponent fits in i64");
        let top = hi + (order + margin) as i64;
        let ncols = (top - lo + 1) as usize;
        let rows: Vec<Vec<F::Elem>> = (lo..=top)
            .map(|n| {
                let mut row = vec![self.field.zero(); ncols];
                for h in 0..self.q.len() {
                    let idx = n - h as i64;
                    if idx < lo {
                        break;
                    }
                    row[(idx - lo) as usize] = self.eval(h, idx);
                }
                row
            })
            .collect();
        nullity(&self.field, &rows, ncols)
    }

    /// Human-readable `Q_0`, in `θ` with field elements in `a`.
    pub fn indicial_string(&self) -> String {
        if let Some(p) = self.rational_indicial() {
            return p.display_in("θ");
        }
        let Some(q0) = self.q.first() else {
            return "0".into();
        };
        let mut parts = Vec::new();
        for (c, a) in q0.iter().enumerate().rev() {
            if self.field.is_zero(a) {
                continue;
            }
            let coeff = QPoly::new(self.field.coordinates(a)).display_in("a");
            parts.push(match c {
                0 => format!("({coeff})"),
                1 => format!("({coeff})θ"),
                _ => format!("({coeff})θ^{c}"),
            });
        }
        parts.join(" + ")
    }
}

/// `S(j, i)` for `0 ≤ i ≤ j ≤ n`.
fn stirling2(n: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for j in 1..=n {
        for i in 1..=j {
            s[j][i] = &s[j - 1][i - 1] + BigInt::from(i) * &s[j - 1][i];
        }
    }
    s
}

/// Coefficients of `x(x-1)…(x-i+1)`.
fn falling_factorial(i: usize) -> Vec<Rational> {
    (0..i)
        .fold(QPoly::one(), |acc, k| acc.mul(&QPoly::from_ints(&[-(k as i64), 1])))
        .coeffs()
        .to_vec()
}

/// Coefficients of `r(α + s)` in `s`.
fn taylor_shift(field: &NumberField, r: &QPoly, alpha: &[Rational]) -> Vec<Vec<Rational>> {
    let alpha = alpha.to_vec();
    let mut acc: Vec<Vec<Rational>> = Vec::new();
    for a in r.coeffs().iter().rev() {
        // acc ← acc·(s + α) + a
        let mut next = vec![field.zero(); acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            next[i + 1] = field.add(&next[i + 1], c);
            next[i] = field.add(&next[i], &field.mul(c, &alpha));
        }
        next[0] = field.add(&next[0], &field.from_rational(a));
        acc = next;
    }
    acc
}
