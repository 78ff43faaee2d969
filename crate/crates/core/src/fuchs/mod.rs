//! Singularity analysis of Fuchsian operators: singular places, local
//! exponents, dimensions of the single-valued local solution spaces, the
//! ramification `rf` and the defect `rf - 2·rank`.
//!
//! At a regular singular point the single-valued local solutions are exactly
//! the formal Laurent series solutions, so `dim V^{T_s}` is the nullity of a
//! truncated recursion. Conjugate algebraic points are analyzed once in
//! `Q[θ]/(q)` and counted `deg q` times.

mod local;

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{format_rational, NumberField, Rational};
use crate::factor::factor;
use crate::pf::DifferentialOperator;
use crate::upoly::QPoly;

use local::EulerForm;

/// Default truncation margin of the local recursion.
pub const DEFAULT_MARGIN: usize = 20;
/// Extra margin used to confirm that the dimension has stabilized.
pub const STABILITY_STEP: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuchsError {
    #[error("the zero operator has no singularity analysis")]
    ZeroOperator,
    #[error("irregular singularity at {place}: indicial degree {degree} < order {order}")]
    Irregular { place: String, degree: usize, order: usize },
    #[error("local solution dimension at {place} did not stabilize ({dims:?}); increase the margin")]
    Unstable { place: String, dims: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SingularPlace {
    Zero,
    Infinity,
    /// All roots of an irreducible monic `q(t)` with `q(0) ≠ 0`.
    Algebraic(QPoly),
}

impl SingularPlace {
    pub fn packet_size(&self) -> usize {
        match self {
            Self::Zero | Self::Infinity => 1,
            Self::Algebraic(q) => q.degree().unwrap_or(0),
        }
    }
}

impl fmt::Display for SingularPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("0"),
            Self::Infinity => f.write_str("∞"),
            Self::Algebraic(q) => {
                let (_, ints) = q.primitive_part();
                write!(f, "{} = 0", QPoly::from_bigints(&ints).display_in("t"))
            }
        }
    }
}

impl Serialize for SingularPlace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Indicial polynomial and exponents at one place.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Indicial {
    pub polynomial: String,
    /// Rational exponents with multiplicity; empty when the indicial
    /// polynomial has irrational coefficients.
    #[serde(serialize_with = "ser_exponents")]
    pub exponents: Vec<(Rational, usize)>,
    /// Whether every exponent is rational and listed in `exponents`.
    pub rational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalData {
    pub place: SingularPlace,
    pub indicial: Indicial,
    /// Dimension of the single-valued local solutions at one point of the
    /// packet.
    pub invariant_dim: usize,
    /// `packet size × (order - invariant_dim)`.
    pub contribution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamificationReport {
    pub rank: usize,
    pub places: Vec<LocalData>,
    pub rf: usize,
    pub defect: i64,
    pub extremal_candidate: bool,
    pub caveat: &'static str,
}

const CAVEAT: &str = "irreducibility and nontriviality of the solution system are assumed, not verified";

fn ser_exponents<S: Serializer>(v: &[(Rational, usize)], s: S) -> Result<S::Ok, S::Error> {
    let out: Vec<(String, usize)> = v.iter().map(|(r, m)| (format_rational(r), *m)).collect();
    out.serialize(s)
}

/// `0`, `∞` and the irreducible factors of the leading coefficient other
/// than `t`.
pub fn singular_places(l: &DifferentialOperator) -> Vec<SingularPlace> {
    let mut out = vec![SingularPlace::Zero, SingularPlace::Infinity];
    let lead = l.leading_coefficient();
    if lead.degree().unwrap_or(0) > 0 {
        for (q, _) in factor(&lead).factors {
            if q.coeff(0).is_zero() {
                continue;
            }
            out.push(SingularPlace::Algebraic(q.monic()));
        }
    }
    out
}

enum Form {
    Q(EulerForm<crate::arith::Rationals>),
    K(EulerForm<NumberField>),
}

impl Form {
    fn of(l: &DifferentialOperator, place: &SingularPlace) -> Self {
        match place {
            SingularPlace::Zero => Self::Q(EulerForm::at_zero(l)),
            SingularPlace::Infinity => Self::Q(EulerForm::at_infinity(l)),
            SingularPlace::Algebraic(q) => Self::K(EulerForm::at_root(l, NumberField::new(q))),
        }
    }

    fn indicial_degree(&self) -> usize {
        match self {
            Self::Q(f) => f.indicial_degree(),
            Self::K(f) => f.indicial_degree(),
        }
    }

    fn indicial(&self) -> Indicial {
        let (polynomial, rational) = match self {
            Self::Q(f) => (f.indicial_string(), f.rational_indicial()),
            Self::K(f) => (f.indicial_string(), f.rational_indicial()),
        };
        let exponents = rational.as_ref().map(QPoly::rational_roots).unwrap_or_default();
        let found: usize = exponents.iter().map(|(_, m)| m).sum();
        let degree = self.indicial_degree();
        Indicial {
            polynomial,
            rational: found == degree,
            exponents,
        }
    }

    fn laurent_solutions(&self, order: usize, margin: usize) -> usize {
        match self {
            Self::Q(f) => f.laurent_solutions(order, margin),
            Self::K(f) => f.laurent_solutions(order, margin),
        }
    }
}

fn regular_form(l: &DifferentialOperator, place: &SingularPlace) -> Result<Form, FuchsError> {
    if l.is_zero() {
        return Err(FuchsError::ZeroOperator);
    }
    let form = Form::of(l, place);
    let degree = form.indicial_degree();
    if degree < l.order() {
        return Err(FuchsError::Irregular {
            place: place.to_string(),
            degree,
            order: l.order(),
        });
    }
    Ok(form)
}

/// Indicial polynomial and exponents at `place`.
pub fn indicial_data(l: &DifferentialOperator, place: &SingularPlace) -> Result<Indicial, FuchsError> {
    Ok(regular_form(l, place)?.indicial())
}

/// `dim V^{T_s}` at one point of `place`, at the default margin.
pub fn invariant_dimension(l: &DifferentialOperator, place: &SingularPlace) -> Result<usize, FuchsError> {
    invariant_dimension_with(l, place, DEFAULT_MARGIN)
}

pub fn invariant_dimension_with(
    l: &DifferentialOperator,
    place: &SingularPlace,
    margin: usize,
) -> Result<usize, FuchsError> {
    let form = regular_form(l, place)?;
    stable_dimension(&form, l.order(), place, margin)
}

fn stable_dimension(form: &Form, order: usize, place: &SingularPlace, margin: usize) -> Result<usize, FuchsError> {
    let a = form.laurent_solutions(order, margin);
    let b = form.laurent_solutions(order, margin + STABILITY_STEP);
    if a != b {
        return Err(FuchsError::Unstable {
            place: place.to_string(),
            dims: vec![a, b],
        });
    }
    Ok(a)
}

pub fn local_data(l: &DifferentialOperator, place: &SingularPlace, margin: usize) -> Result<LocalData, FuchsError> {
    let form = regular_form(l, place)?;
    let order = l.order();
    let dim = stable_dimension(&form, order, place, margin)?;
    Ok(LocalData {
        place: place.clone(),
        indicial: form.indicial(),
        invariant_dim: dim,
        contribution: place.packet_size() * (order - dim.min(order)),
    })
}

pub fn ramification_report(l: &DifferentialOperator) -> Result<RamificationReport, FuchsError> {
    ramification_report_with(l, DEFAULT_MARGIN)
}

pub fn ramification_report_with(l: &DifferentialOperator, margin: usize) -> Result<RamificationReport, FuchsError> {
    if l.is_zero() {
        return Err(FuchsError::ZeroOperator);
    }
    let places = singular_places(l)
        .par_iter()
        .map(|p| local_data(l, p, margin))
        .collect::<Result<Vec<_>, _>>()?;
    let rank = l.order();
    let rf: usize = places.iter().map(|d| d.contribution).sum();
    let defect = rf as i64 - 2 * rank as i64;
    Ok(RamificationReport {
        rank,
        places,
        rf,
        defect,
        extremal_candidate: defect == 0,
        caveat: CAVEAT,
    })
}

impl fmt::Display for RamificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:<28} {:>8} {:>12}", "place", "exponents", "dim V^T", "contribution")?;
        for d in &self.places {
            let mut exps: Vec<String> = d
                .indicial
                .exponents
                .iter()
                .flat_map(|(r, m)| std::iter::repeat_n(format_rational(r), *m))
                .collect();
            if !d.indicial.rational {
                exps = vec![format!("roots of {}", d.indicial.polynomial)];
            }
            writeln!(
                f,
                "{:<24} {:<28} {:>8} {:>12}",
                d.place.to_string(),
                format!("{{{}}}", exps.join(", ")),
                d.invariant_dim,
                d.contribution
            )?;
        }
        writeln!(f, "rank {}  rf {}  defect {}", self.rank, self.rf, self.defect)?;
        if self.extremal_candidate {
            write!(f, "extremal candidate ({})", self.caveat)
        } else {
            write!(f, "not extremal")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::pf::parse_operator;

    fn p2_operator() -> DifferentialOperator {
        parse_operator("D^2 - 27t^3(D+1)(D+2)").unwrap()
    }

    #[test]
    fn places_of_p2_operator() {
        let places = singular_places(&p2_operator());
        // 27t^3 - 1 = (3t - 1)(9t^2 + 3t + 1)
        assert_eq!(places.len(), 4);
        assert_eq!(places[2].to_string(), "3t - 1 = 0");
        assert_eq!(places[3].to_string(), "9t^2 + 3t + 1 = 0");
        assert_eq!(places[3].packet_size(), 2);
    }

    #[test]
    fn operator_d_has_only_zero_and_infinity() {
        let l = parse_operator("D").unwrap();
        assert_eq!(singular_places(&l), vec![SingularPlace::Zero, SingularPlace::Infinity]);
    }

    #[test]
    fn exponents_of_p2_operator() {
        let l = p2_operator();
        let at0 = indicial_data(&l, &SingularPlace::Zero).unwrap();
        assert_eq!(at0.exponents, vec![(rat(0), 2)]);
        let at_inf = indicial_data(&l, &SingularPlace::Infinity).unwrap();
        assert_eq!(at_inf.exponents, vec![(rat(1), 1), (rat(2), 1)]);
    }

    #[test]
    fn p2_operator_is_extremal() {
        let r = ramification_report(&p2_operator()).unwrap();
        assert_eq!(r.rf, 4);
        assert_eq!(r.defect, 0);
        assert!(r.extremal_candidate);
    }

    #[test]
    fn d_squared_at_zero() {
        let l = parse_operator("D^2").unwrap();
        let d = indicial_data(&l, &SingularPlace::Zero).unwrap();
        assert_eq!(d.exponents, vec![(rat(0), 2)]);
        assert_eq!(invariant_dimension(&l, &SingularPlace::Zero).unwrap(), 1);
    }

    #[test]
    fn nonsingular_point_contributes_nothing() {
        // Leading coefficient 1 - t; the point t = 2 is ordinary.
        let l = parse_operator("D^2 - t(D^2 + D + 1)").unwrap();
        let q = SingularPlace::Algebraic(QPoly::from_ints(&[-2, 1]));
        assert_eq!(invariant_dimension(&l, &q).unwrap(), 2);
    }

    #[test]
    fn irregular_point_is_reported() {
        // At ∞ the indicial part is P_1(-θ) = -1, of degree 0 < 2.
        let l = parse_operator("D^2 - t").unwrap();
        assert!(matches!(
            local_data(&l, &SingularPlace::Infinity, DEFAULT_MARGIN),
            Err(FuchsError::Irregular { .. })
        ));
    }

    /// Local solution count at a real point `alpha`, in floating point:
    /// `D s^n = n s^n + α n s^{n-1}` with `s = t - α`. With `e` the largest
    /// index drop of the truncated map, the unknowns `a_n`, `lo ≤ n ≤ top`,
    /// meet the equations for `s^k`, `lo - e ≤ k ≤ top - e`.
    fn numeric_local_solutions(l: &DifferentialOperator, alpha: f64, lo: i64, top: i64) -> usize {
        use num_traits::ToPrimitive;
        use std::collections::BTreeMap;
        let order = l.order() as i64;
        let shifted: Vec<Vec<f64>> = (0..=l.order())
            .map(|j| {
                // p_j(α + s) by repeated synthetic division
                let mut c: Vec<f64> = l.pj(j).coeffs().iter().map(|a| a.to_f64().unwrap()).collect();
                let mut out = Vec::new();
                while !c.is_empty() {
                    let mut rem = 0.0;
                    let mut quot = vec![0.0; c.len() - 1];
                    for i in (0..c.len()).rev() {
                        rem = rem * alpha + c[i];
                        if i > 0 {
                            quot[i - 1] = rem;
                        }
                    }
                    out.push(rem);
                    c = quot;
                }
                out
            })
            .collect();
        let mut image: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for n in lo..=top {
            let mut v: BTreeMap<i64, f64> = [(n, 1.0)].into();
            for j in 0..=l.order() {
                for (&e, &a) in &v {
                    for (i, b) in shifted[j].iter().enumerate() {
                        *image.entry((e + i as i64, n)).or_insert(0.0) += a * b;
                    }
                }
                let mut next = BTreeMap::new();
                for (&e, &a) in &v {
                    *next.entry(e).or_insert(0.0) += a * e as f64;
                    *next.entry(e - 1).or_insert(0.0) += a * alpha * e as f64;
                }
                v = next;
            }
        }
        let drop = image
            .iter()
            .filter(|(_, v)| v.abs() > 1e-9)
            .map(|(&(k, n), _)| n - k)
            .max()
            .unwrap();
        assert!(drop <= order);
        let m: Vec<Vec<f64>> = (lo - drop..=top - drop)
            .map(|k| (lo..=top).map(|n| image.get(&(k, n)).copied().unwrap_or(0.0)).collect())
            .collect();
        forward_solution_count(&m)
    }

    /// Solutions of a lower triangular system by forward substitution: a
    /// vanishing diagonal opens a free parameter and turns its row into a
    /// constraint on the earlier unknowns.
    fn forward_solution_count(m: &[Vec<f64>]) -> usize {
        let n = m.len();
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut constraints: Vec<Vec<f64>> = Vec::new();
        let mut free = 0;
        for i in 0..n {
            let scale = m[i].iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let mut rhs = vec![0.0; free];
            for (j, v) in values.iter().enumerate() {
                for (r, x) in rhs.iter_mut().zip(v) {
                    *r += m[i][j] * x;
                }
            }
            if m[i][i].abs() > 1e-9 * scale {
                values.push(rhs.iter().map(|r| -r / m[i][i]).collect());
            } else {
                constraints.push(rhs);
                free += 1;
                for v in values.iter_mut() {
                    v.push(0.0);
                }
                let mut e = vec![0.0; free];
                e[free - 1] = 1.0;
                values.push(e);
            }
        }
        let constraints: Vec<Vec<f64>> = constraints
            .into_iter()
            .map(|mut c| {
                c.resize(free, 0.0);
                let s = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if s > 0.0 {
                    c.iter_mut().for_each(|x| *x /= s);
                }
                c
            })
            .collect();
        free - small_rank(constraints)
    }

    fn small_rank(mut m: Vec<Vec<f64>>) -> usize {
        let ncols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for col in 0..ncols {
            let Some(p) = (r..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else {
                break;
            };
            if m[p][col].abs() < 1e-6 {
                continue;
            }
            m.swap(r, p);
            let pivot = m[r].clone();
            for row in m.iter_mut().skip(r + 1) {
                let f = row[col] / pivot[col];
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x -= f * y);
            }
            r += 1;
        }
        r
    }

    #[test]
    fn quadratic_packet_agrees_with_numeric_roots() {
        let l = parse_operator(
            "128 t^{4} D^{3} + 768 t^{4} D^{2} + 1408 t^{4} D + 28 t^{2} D^{3} + 768 t^{4} \
             + 84 t^{2} D^{2} + 88 t^{2} D - D^{3} + 32 t^{2}",
        )
        .unwrap();
        let q = SingularPlace::Algebraic(QPoly::from_ints(&[-1, 0, 32]).monic());
        let exact = invariant_dimension(&l, &q).unwrap();
        let root = (1.0f64 / 32.0).sqrt();
        for alpha in [root, -root] {
            assert_eq!(numeric_local_solutions(&l, alpha, -5, 30), exact);
        }
        // An ordinary point for comparison.
        assert_eq!(numeric_local_solutions(&l, 0.3, -5, 30), 3);
    }
}
