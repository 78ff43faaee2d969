//! Exact scalar helpers shared by every module: rational parsing and
//! printing, factorials and binomials, and the small field abstraction used
//! by the linear algebra (the rationals and simple algebraic extensions).

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::upoly::QPoly;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Gcd of a list of integers (zero for an empty or all-zero list).
pub fn content(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction (sign preserved).
pub fn primitive_integer_vector(values: &[Rational]) -> Vec<BigInt> {
    let den = common_denominator(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let g = content(&ints);
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// Arithmetic context of a field. Elements carry no context of their own so
/// that the same linear algebra serves `Q` and `Q[θ]/(q)`.
pub trait Field {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Coordinates over Q.
    fn coordinates(&self, a: &Self::Elem) -> Vec<Rational>;

    /// `Some` if `a` lies in Q.
    fn as_rational(&self, a: &Self::Elem) -> Option<Rational> {
        let c = self.coordinates(a);
        c[1..].iter().all(Zero::is_zero).then(|| c[0].clone())
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&rat(n))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_rational(&self, r: &Rational) -> Rational {
        r.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn coordinates(&self, a: &Rational) -> Vec<Rational> {
        vec![a.clone()]
    }
}

/// The number field `Q[θ]/(q)` for an irreducible `q`. Elements are
/// coefficient vectors of length `deg q` in the power basis `1, θ, θ², …`.
#[derive(Debug, Clone)]
pub struct NumberField {
    modulus: Arc<QPoly>,
}

impl NumberField {
    /// `q` must be irreducible over Q; it is made monic here.
    pub fn new(q: &QPoly) -> Self {
        assert!(q.degree().unwrap_or(0) >= 1, "modulus must be non-constant");
        Self {
            modulus: Arc::new(q.monic()),
        }
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    /// The generator θ.
    pub fn generator(&self) -> Vec<Rational> {
        self.reduce(&QPoly::x())
    }

    pub fn reduce(&self, p: &QPoly) -> Vec<Rational> {
        let r = p.rem(&self.modulus);
        let mut v = r.into_coeffs();
        v.resize(self.degree(), Rational::zero());
        v
    }

    pub fn to_poly(&self, a: &[Rational]) -> QPoly {
        QPoly::new(a.to_vec())
    }
}

impl Field for NumberField {
    type Elem = Vec<Rational>;

    fn zero(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.degree()]
    }
    fn one(&self) -> Vec<Rational> {
        self.from_rational(&Rational::one())
    }
    fn from_rational(&self, r: &Rational) -> Vec<Rational> {
        let mut v = self.zero();
        v[0] = r.clone();
        v
    }
    fn add(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn sub(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }
    fn mul(&self, a: &Vec<Rational>, b: &Vec<Rational>) -> Vec<Rational> {
        self.reduce(&self.to_poly(a).mul(&self.to_poly(b)))
    }
    fn inv(&self, a: &Vec<Rational>) -> Vec<Rational> {
        let (g, s, _) = self.to_poly(a).ext_gcd(&self.modulus);
        assert!(
            g.degree() == Some(0),
            "inverse of a zero divisor; modulus is not irreducible"
        );
        let lead = g.coeff(0).clone();
        self.reduce(&s.scale(&lead.recip()))
    }
    fn is_zero(&self, a: &Vec<Rational>) -> bool {
        a.iter().all(Zero::is_zero)
    }
    fn coordinates(&self, a: &Vec<Rational>) -> Vec<Rational> {
        a.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat_frac(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), rat(-4));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
        assert_eq!(format_rational(&rat_frac(-2, 4)), "-1/2");
        assert_eq!(format_rational(&rat(7)), "7");
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(factorial(6), BigInt::from(720));
    }

    #[test]
    fn quadratic_field_inverse() {
        // Q(√2)
        let k = NumberField::new(&QPoly::from_ints(&[-2, 0, 1]));
        let a = vec![rat(1), rat(1)];
        let inv = k.inv(&a);
        assert_eq!(k.mul(&a, &inv), k.one());
        let theta = k.generator();
        assert_eq!(k.mul(&theta, &theta), k.from_int(2));
    }
}
