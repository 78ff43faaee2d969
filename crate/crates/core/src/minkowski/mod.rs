//! The Minkowski ansatz: Laurent polynomials on a reflexive polygon or
//! 3-tope with binomial edge terms, facet terms built from admissible
//! lattice Minkowski decompositions, and zero constant term.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{binomial, Rational};
use crate::laurent::LaurentPolynomial;
use crate::polytope::decompose::{lattice_minkowski_decompositions, MinkowskiDecomposition, PolygonEdges};
use crate::polytope::lattice::{add, gcd_all, scale, sub, IVec};
use crate::polytope::{Face, LatticePolytope, PolytopeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinkowskiError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("polytope is not reflexive")]
    NotReflexive,
    #[error("the ansatz is implemented for polygons and 3-topes, not dimension {0}")]
    UnsupportedDimension(usize),
    #[error("edge direction {0:?} is not primitive or the length is not positive")]
    BadEdge(IVec),
    #[error("irreducible summand {0:?} has relative interior lattice points")]
    InteriorSummand(Vec<IVec>),
    #[error("irreducible summand {0:?} is neither a segment nor a triangle")]
    UnsupportedSummand(Vec<IVec>),
    #[error("conflicting coefficients {existing} and {new} at lattice point {point:?}")]
    Inconsistent {
        point: IVec,
        existing: String,
        new: String,
    },
}

/// The edge `[μ, μ + eν]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTermSpec {
    pub mu: IVec,
    pub nu: IVec,
    pub e: i64,
}

impl EdgeTermSpec {
    pub fn new(mu: IVec, nu: IVec, e: i64) -> Result<Self, MinkowskiError> {
        if e < 1 || gcd_all(&nu) != 1 || mu.len() != nu.len() {
            return Err(MinkowskiError::BadEdge(nu));
        }
        Ok(Self { mu, nu, e })
    }

    /// The edge between two lattice points.
    pub fn between(a: &[i64], b: &[i64]) -> Result<Self, MinkowskiError> {
        let d = sub(b, a);
        let e = gcd_all(&d);
        if e == 0 {
            return Err(MinkowskiError::BadEdge(d));
        }
        Self::new(a.to_vec(), d.iter().map(|x| x / e).collect(), e)
    }

    /// `(point, C(e, i))` for `i = 0..=e`.
    fn weighted_points(&self) -> Vec<(IVec, Rational)> {
        (0..=self.e)
            .map(|i| {
                let c = binomial(self.e as u64, i as u64);
                (add(&self.mu, &scale(&self.nu, i)), Rational::from_integer(c))
            })
            .collect()
    }
}

/// `x^μ (1 + x^ν)^e`.
pub fn edge_term(edge: &EdgeTermSpec) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(edge.mu.len(), edge.weighted_points()).expect("consistent dimensions")
}

/// Coefficients assigned point by point, refusing to overwrite a different
/// value.
#[derive(Debug, Clone, Default)]
struct Assignment {
    coeffs: BTreeMap<IVec, Rational>,
}

impl Assignment {
    fn set(&mut self, point: IVec, c: Rational) -> Result<(), MinkowskiError> {
        match self.coeffs.get(&point) {
            Some(old) if *old != c => Err(MinkowskiError::Inconsistent {
                point,
                existing: old.to_string(),
                new: c.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.coeffs.insert(point, c);
                Ok(())
            }
        }
    }

    fn into_polynomial(self, dim: usize) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(dim, self.coeffs).expect("consistent dimensions")
    }
}

/// Edges `(start, end)` of a polytope of dimension at most 2, in ambient
/// coordinates.
fn boundary_edges(p: &LatticePolytope) -> Vec<(IVec, IVec)> {
    let v = p.vertices();
    match p.dim() {
        0 => Vec::new(),
        1 => vec![(v[0].clone(), v[1].clone())],
        _ => {
            let chart = p.chart();
            let local: Vec<IVec> = v.iter().map(|x| chart.to_chart(x).unwrap()).collect();
            let edges = PolygonEdges::of(&local);
            let k = edges.vertices.len();
            (0..k)
                .map(|i| {
                    (
                        chart.to_ambient(&edges.vertices[i]),
                        chart.to_ambient(&edges.vertices[(i + 1) % k]),
                    )
                })
                .collect()
        }
    }
}

/// Binomial weights on the boundary of `p` (dimension ≤ 2), nothing inside.
fn boundary_polynomial(p: &LatticePolytope) -> Result<LaurentPolynomial, MinkowskiError> {
    let mut acc = Assignment::default();
    if p.dim() == 0 {
        acc.set(p.vertices()[0].clone(), Rational::one())?;
    }
    for (a, b) in boundary_edges(p) {
        for (pt, c) in EdgeTermSpec::between(&a, &b)?.weighted_points() {
            acc.set(pt, c)?;
        }
    }
    Ok(acc.into_polynomial(p.ambient_dim()))
}

/// `f_{F_i}` for an admissible irreducible summand.
fn summand_polynomial(s: &LatticePolytope) -> Result<LaurentPolynomial, MinkowskiError> {
    if !s.is_admissible() {
        return Err(MinkowskiError::InteriorSummand(s.vertices().to_vec()));
    }
    if s.dim() == 2 && s.vertices().len() != 3 {
        return Err(MinkowskiError::UnsupportedSummand(s.vertices().to_vec()));
    }
    boundary_polynomial(s)
}

/// A candidate face term with the decomposition it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceTerm {
    pub polynomial: LaurentPolynomial,
    pub decomposition: MinkowskiDecomposition,
}

/// One term `∏ f_{F_i}` per admissible lattice Minkowski decomposition of
/// the polygon `q`, translated onto `q`. Empty if there is none.
pub fn polygon_terms(q: &LatticePolytope) -> Result<Vec<FaceTerm>, MinkowskiError> {
    let shift = q.vertices()[0].clone();
    let mut out = Vec::new();
    for decomposition in lattice_minkowski_decompositions(q)? {
        if !decomposition.is_admissible() {
            continue;
        }
        let mut f = LaurentPolynomial::monomial(shift.clone(), Rational::one());
        for s in &decomposition.summands {
            f = f.multiply(&summand_polynomial(s)?).expect("same dimension");
        }
        debug_assert_eq!(f.newton_polytope().ok().as_ref().map(|p| p.vertices()), Some(q.vertices()));
        out.push(FaceTerm {
            polynomial: f,
            decomposition,
        });
    }
    Ok(out)
}

/// [`polygon_terms`] for a 2-face.
pub fn face_terms(face: &Face) -> Result<Vec<FaceTerm>, MinkowskiError> {
    if face.dim != 2 {
        return Err(PolytopeError::NotPolygon(face.dim).into());
    }
    polygon_terms(&face.as_polytope())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDiagnostic {
    pub vertices: Vec<IVec>,
    /// All lattice Minkowski decompositions.
    pub decompositions: usize,
    /// Those whose summands are all admissible.
    pub admissible: usize,
}

/// A Minkowski polynomial and every facet choice producing it: `choices[i][j]`
/// indexes the face terms of facet `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinkowskiPolynomial {
    pub polynomial: LaurentPolynomial,
    pub choices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzResult {
    pub polynomials: Vec<MinkowskiPolynomial>,
    /// One entry per facet, in [`LatticePolytope::faces`] order. Empty for
    /// polygons.
    pub facets: Vec<FacetDiagnostic>,
}

impl AnsatzResult {
    pub fn len(&self) -> usize {
        self.polynomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polynomials.is_empty()
    }

    /// Facets without an admissible decomposition.
    pub fn blocking_facets(&self) -> Vec<&FacetDiagnostic> {
        self.facets.iter().filter(|f| f.admissible == 0).collect()
    }
}

/// All Minkowski polynomials on the reflexive polygon or 3-tope `p`.
pub fn minkowski_polynomials(p: &LatticePolytope) -> Result<AnsatzResult, MinkowskiError> {
    if !p.is_reflexive() {
        return Err(MinkowskiError::NotReflexive);
    }
    match p.ambient_dim() {
        2 => Ok(AnsatzResult {
            polynomials: vec![MinkowskiPolynomial {
                polynomial: boundary_polynomial(p)?,
                choices: vec![Vec::new()],
            }],
            facets: Vec::new(),
        }),
        3 => three_topes(p),
        n => Err(MinkowskiError::UnsupportedDimension(n)),
    }
}

fn three_topes(p: &LatticePolytope) -> Result<AnsatzResult, MinkowskiError> {
    let facets = p.faces(2)?;
    let mut edge_coeffs = Assignment::default();
    for edge in p.faces(1)? {
        let v = &edge.vertices;
        for (pt, c) in EdgeTermSpec::between(&v[0], &v[1])?.weighted_points() {
            edge_coeffs.set(pt, c)?;
        }
    }

    let mut terms = Vec::with_capacity(facets.len());
    let mut diagnostics = Vec::with_capacity(facets.len());
    for face in &facets {
        let poly = face.as_polytope();
        let all = lattice_minkowski_decompositions(&poly)?.len();
        let t = face_terms(face)?;
        diagnostics.push(FacetDiagnostic {
            vertices: face.vertices.clone(),
            decompositions: all,
            admissible: t.len(),
        });
        terms.push((face.lattice_points(), t));
    }
    if terms.iter().any(|(_, t)| t.is_empty()) {
        return Ok(AnsatzResult {
            polynomials: Vec::new(),
            facets: diagnostics,
        });
    }

    let counts: Vec<usize> = terms.iter().map(|(_, t)| t.len()).collect();
    let total: usize = counts.iter().product();
    let assembled: Vec<(Vec<usize>, LaurentPolynomial)> = (0..total)
        .into_par_iter()
        .map(|index| {
            let choice = mixed_radix(index, &counts);
            let mut acc = edge_coeffs.clone();
            for ((points, t), &j) in terms.iter().zip(&choice) {
                let f = &t[j].polynomial;
                for pt in points {
                    acc.set(pt.clone(), f.coefficient(pt))?;
                }
            }
            acc.set(vec![0; 3], Rational::zero())?;
            Ok((choice, acc.into_polynomial(3)))
        })
        .collect::<Result<_, MinkowskiError>>()?;

    let mut polynomials: Vec<MinkowskiPolynomial> = Vec::new();
    let mut seen: HashMap<LaurentPolynomial, usize> = HashMap::new();
    for (choice, f) in assembled {
        match seen.get(&f) {
            Some(&i) => polynomials[i].choices.push(choice),
            None => {
                seen.insert(f.clone(), polynomials.len());
                polynomials.push(MinkowskiPolynomial {
                    polynomial: f,
                    choices: vec![choice],
                });
            }
        }
    }
    Ok(AnsatzResult {
        polynomials,
        facets: diagnostics,
    })
}

/// `index` in the mixed radix `counts`, first digit most significant.
fn mixed_radix(mut index: usize, counts: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; counts.len()];
    for (d, &c) in digits.iter_mut().zip(counts).rev() {
        *d = index % c;
        index /= c;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::laurent::parse_expression;

    fn poly(pts: &[&[i64]]) -> LatticePolytope {
        let pts: Vec<IVec> = pts.iter().map(|p| p.to_vec()).collect();
        LatticePolytope::from_points(pts[0].len(), &pts).unwrap()
    }

    #[test]
    fn edge_terms() {
        let e = EdgeTermSpec::between(&[1, 0], &[0, 1]).unwrap();
        assert_eq!(edge_term(&e), parse_expression("x + y", 2).unwrap());
        let e = EdgeTermSpec::new(vec![0, -1], vec![1, 1], 2).unwrap();
        assert_eq!(edge_term(&e), parse_expression("y^-1 + 2*x + x^2*y", 2).unwrap());
        let e = EdgeTermSpec::between(&[0], &[3]).unwrap();
        let coeffs: Vec<Rational> = (0..4).map(|i| edge_term(&e).coefficient(&[i])).collect();
        assert_eq!(coeffs, vec![rat(1), rat(3), rat(3), rat(1)]);
        assert!(EdgeTermSpec::new(vec![0, 0], vec![2, 0], 1).is_err());
    }

    #[test]
    fn unit_square_term_is_product_of_segments() {
        let q = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let t = polygon_terms(&q).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].polynomial, parse_expression("1 + x + y + x*y", 2).unwrap());
    }

    #[test]
    fn a2_triangle_term() {
        // conv{(0,0),(2,0),(0,1)} is irreducible and admissible.
        let q = poly(&[&[0, 0], &[2, 0], &[0, 1]]);
        let t = polygon_terms(&q).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].polynomial, parse_expression("1 + 2*x + x^2 + y", 2).unwrap());
    }

    #[test]
    fn polygon_with_interior_point_has_no_terms() {
        let q = poly(&[&[0, -1], &[-1, 1], &[1, 1]]);
        assert!(polygon_terms(&q).unwrap().is_empty());
    }

    #[test]
    fn reflexive_polygons() {
        let p2 = poly(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let r = minkowski_polynomials(&p2).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.polynomials[0].polynomial, parse_expression("x + y + x^-1*y^-1", 2).unwrap());

        let q = poly(&[&[1, 0], &[1, 1], &[0, 1], &[-1, -1]]);
        let r = minkowski_polynomials(&q).unwrap();
        assert_eq!(
            r.polynomials[0].polynomial,
            parse_expression("x + x*y + y + x^-1*y^-1", 2).unwrap()
        );
    }

    #[test]
    fn rejects_non_reflexive() {
        let q = poly(&[&[1, 0], &[0, 1], &[-3, -3]]);
        assert_eq!(minkowski_polynomials(&q), Err(MinkowskiError::NotReflexive));
    }

    #[test]
    fn octahedron_gives_one_polynomial() {
        let p = poly(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        let r = minkowski_polynomials(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.facets.len(), 8);
        assert_eq!(
            r.polynomials[0].polynomial,
            parse_expression("x + y + z + x^-1 + y^-1 + z^-1", 3).unwrap()
        );
    }

    #[test]
    fn mixed_radix_digits() {
        assert_eq!(mixed_radix(5, &[2, 3]), vec![1, 2]);
        assert_eq!(mixed_radix(0, &[1, 1, 1]), vec![0, 0, 0]);
    }
}
