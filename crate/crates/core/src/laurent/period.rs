//! Period sequences and the constant-term kernel.
//!
//! `c_m` is the constant term of `f^m`. We clear denominators once, keep
//! `g_m = (den·f)^m` with integer coefficients in a hash map keyed by packed
//! exponents, and divide by `den^m` when reading off the constant term.
//!
//! Pruning: a term `x^e` of `g_m` can only feed a constant term of some
//! `g_{m'}`, `m ≤ m' ≤ M`, if `-e ∈ (M - m)·Q` where `Q = conv(supp f ∪ {0})`.
//! Everything else is dropped as soon as it appears.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{LaurentError, LaurentPolynomial};
use crate::arith::{common_denominator, format_rational, parse_rational, Rational};
use crate::polytope::lattice::{dot, IVec};
use crate::polytope::LatticePolytope;

/// Coefficients `c_0, c_1, …` of a power series in `t`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PeriodSequence {
    coeffs: Vec<Rational>,
}

impl PeriodSequence {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn from_bigints(values: impl IntoIterator<Item = BigInt>) -> Self {
        Self::new(values.into_iter().map(Rational::from_integer).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// `c_m`, or zero past the end.
    pub fn get(&self, m: usize) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// First `n` coefficients (fewer if the sequence is shorter).
    pub fn head(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn push(&mut self, c: Rational) {
        self.coeffs.push(c);
    }

    /// Coefficients rendered as `p` or `p/q`.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

impl fmt::Display for PeriodSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_strings().join(", "))
    }
}

impl fmt::Debug for PeriodSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodSequence[{self}]")
    }
}

impl Serialize for PeriodSequence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

impl From<Vec<Rational>> for PeriodSequence {
    fn from(coeffs: Vec<Rational>) -> Self {
        Self::new(coeffs)
    }
}

/// `(c_0, …, c_M)` with `c_m` the constant term of `f^m`.
pub fn period_sequence(f: &LaurentPolynomial, m_max: usize) -> Result<PeriodSequence, LaurentError> {
    let ct = f.constant_term();
    if !ct.is_zero() {
        return Err(LaurentError::NonzeroConstantTerm(format_rational(&ct)));
    }
    if f.is_zero() {
        let mut c = vec![Rational::zero(); m_max + 1];
        c[0] = Rational::one();
        return Ok(PeriodSequence::new(c));
    }
    let den = common_denominator(f.terms().map(|(_, c)| c));
    let den_r = Rational::from_integer(den.clone());
    let terms: Vec<(IVec, BigInt)> = f
        .terms()
        .map(|(m, c)| (m.0.clone(), (c * &den_r).to_integer()))
        .collect();
    let pruner = Pruner::new(f);
    let n = f.dim();

    let ints = if n <= 4 && fits_packed(&terms, m_max) {
        run_kernel(&PackedKeys::new(n), &terms, &pruner, m_max)
    } else {
        run_kernel(&VecKeys, &terms, &pruner, m_max)
    };
    Ok(PeriodSequence::new(
        ints.into_iter()
            .enumerate()
            .map(|(m, c)| Rational::new(c, Pow::pow(&den, m)))
            .collect(),
    ))
}

/// Slow reference: iterated multiplication of the sparse polynomial, no
/// pruning.
pub fn period_sequence_naive(f: &LaurentPolynomial, m_max: usize) -> Result<PeriodSequence, LaurentError> {
    let ct = f.constant_term();
    if !ct.is_zero() {
        return Err(LaurentError::NonzeroConstantTerm(format_rational(&ct)));
    }
    let mut g = LaurentPolynomial::constant(f.dim(), Rational::one());
    let mut out = vec![Rational::one()];
    for _ in 0..m_max {
        g = g.multiply(f)?;
        out.push(g.constant_term());
    }
    Ok(PeriodSequence::new(out))
}

struct Pruner {
    /// Facets `⟨u, x⟩ ≥ rhs` of `Q`, or `None` when `Q` is not
    /// full-dimensional (then a bounding box is used instead).
    facets: Option<Vec<(IVec, i64)>>,
    lo: IVec,
    hi: IVec,
}

impl Pruner {
    fn new(f: &LaurentPolynomial) -> Self {
        let n = f.dim();
        let mut pts = f.support();
        pts.push(vec![0; n]);
        let lo = (0..n).map(|i| pts.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi = (0..n).map(|i| pts.iter().map(|p| p[i]).max().unwrap()).collect();
        let q = LatticePolytope::from_points(n, &pts).unwrap();
        let facets = q
            .facet_halfspaces()
            .ok()
            .map(|hs| hs.into_iter().map(|h| (h.normal, h.rhs)).collect());
        Self { facets, lo, hi }
    }

    /// Whether `-e ∈ j·Q`.
    fn keep(&self, e: &[i64], j: i64) -> bool {
        match &self.facets {
            Some(fs) => fs.iter().all(|(u, rhs)| dot(u, e) <= -j * rhs),
            None => e
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&x, (&l, &h))| -x >= j * l && -x <= j * h),
        }
    }
}

/// Exponent keys; `add` must be exact for every exponent that can occur.
trait Keys {
    type K: Clone + Eq + Hash;
    fn pack(&self, e: &[i64]) -> Self::K;
    fn unpack(&self, k: &Self::K) -> IVec;
    fn add(&self, a: &Self::K, b: &Self::K) -> Self::K;
}

const LANE: u32 = 32;
const BIAS: i64 = 1 << 31;

struct PackedKeys {
    n: usize,
    zero: u128,
}

impl PackedKeys {
    fn new(n: usize) -> Self {
        let zero = (0..n).map(|i| (BIAS as u128) << (LANE * i as u32)).sum();
        Self { n, zero }
    }
}

impl Keys for PackedKeys {
    type K = u128;

    fn pack(&self, e: &[i64]) -> u128 {
        e.iter()
            .enumerate()
            .map(|(i, &x)| ((x + BIAS) as u128) << (LANE * i as u32))
            .sum()
    }

    fn unpack(&self, k: &u128) -> IVec {
        (0..self.n)
            .map(|i| ((k >> (LANE * i as u32)) & 0xffff_ffff) as i64 - BIAS)
            .collect()
    }

    fn add(&self, a: &u128, b: &u128) -> u128 {
        // Each lane carries one extra bias.
        a + b - self.zero
    }
}

struct VecKeys;

impl Keys for VecKeys {
    type K = IVec;

    fn pack(&self, e: &[i64]) -> IVec {
        e.to_vec()
    }

    fn unpack(&self, k: &IVec) -> IVec {
        k.clone()
    }

    fn add(&self, a: &IVec, b: &IVec) -> IVec {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
}

fn fits_packed(terms: &[(IVec, BigInt)], m_max: usize) -> bool {
    let max = terms.iter().flat_map(|(e, _)| e.iter()).map(|x| x.abs()).max().unwrap_or(0);
    (max as i128) * (m_max as i128 + 1) < (BIAS as i128) / 2
}

fn run_kernel<S: Keys>(keys: &S, terms: &[(IVec, BigInt)], pruner: &Pruner, m_max: usize) -> Vec<BigInt> {
    let zero_key = keys.pack(&vec![0; terms[0].0.len()]);
    let f: Vec<(S::K, &BigInt)> = terms.iter().map(|(e, c)| (keys.pack(e), c)).collect();
    let mut g: FxHashMap<S::K, BigInt> = FxHashMap::default();
    g.insert(zero_key.clone(), BigInt::one());
    let mut out = vec![BigInt::one()];
    for m in 1..=m_max {
        let j = (m_max - m) as i64;
        let mut next: FxHashMap<S::K, BigInt> = FxHashMap::with_capacity_and_hasher(g.len() * 2, Default::default());
        for (e, c) in &g {
            for (s, a) in &f {
                let k = keys.add(e, s);
                let v = c * *a;
                match next.get_mut(&k) {
                    Some(acc) => *acc += v,
                    None => {
                        next.insert(k, v);
                    }
                }
            }
        }
        next.retain(|k, c| !c.is_zero() && pruner.keep(&keys.unpack(k), j));
        out.push(next.get(&zero_key).cloned().unwrap_or_else(BigInt::zero));
        g = next;
    }
    out
}
