//! Lattice Minkowski decompositions of polygons.
//!
//! Walk the boundary counterclockwise and write the edges as `e_i·ν_i` with
//! `ν_i` primitive. A lattice summand is then a vector `0 ≤ a ≤ e` with
//! `Σ a_i ν_i = 0` (its edges are `a_i ν_i` in the same cyclic order), and a
//! decomposition is a multiset of such vectors adding up to `e`.
//!
//! Lattice bookkeeping: every lattice polygon contains a unimodular
//! triangle, so a two-dimensional summand has `Lat = Z²`; a segment in
//! direction `ν` has `Lat = Zν`.

use serde::{Deserialize, Serialize};

use super::lattice::{add, index_in_zn, scale, IVec};
use super::{LatticePolytope, PolytopeError};

/// One decomposition `Q = Σ summands` (up to translation of each summand).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinkowskiDecomposition {
    /// Summands in the ambient lattice of `Q`, each translated so that its
    /// smallest vertex sits at the origin. Sorted.
    pub summands: Vec<LatticePolytope>,
    /// Edge multiplicity vector of each summand, indexed like
    /// [`PolygonEdges::edges`].
    pub edge_vectors: Vec<Vec<i64>>,
}

impl MinkowskiDecomposition {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// True iff every summand has no lattice points in its relative interior.
    pub fn is_admissible(&self) -> bool {
        self.summands.iter().all(LatticePolytope::is_admissible)
    }
}

/// Counterclockwise boundary data of a lattice polygon in chart
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonEdges {
    /// Vertices in counterclockwise order, starting from the smallest.
    pub vertices: Vec<IVec>,
    /// `(ν_i, e_i)`: edge from `vertices[i]` to `vertices[i+1]` is `e_i·ν_i`.
    pub edges: Vec<(IVec, i64)>,
}

impl PolygonEdges {
    pub fn of(vertices: &[IVec]) -> Self {
        let vertices = ccw_order(vertices);
        let k = vertices.len();
        let edges = (0..k)
            .map(|i| {
                let d = super::lattice::sub(&vertices[(i + 1) % k], &vertices[i]);
                let e = super::lattice::gcd_all(&d);
                (d.iter().map(|x| x / e).collect(), e)
            })
            .collect();
        Self { vertices, edges }
    }

    pub fn multiplicities(&self) -> Vec<i64> {
        self.edges.iter().map(|(_, e)| *e).collect()
    }

    /// Polygon (or segment, or point) with edges `a_i ν_i`, starting at the
    /// origin.
    pub fn summand_points(&self, a: &[i64]) -> Vec<IVec> {
        let mut p = vec![0, 0];
        let mut pts = vec![p.clone()];
        for ((nu, _), &ai) in self.edges.iter().zip(a) {
            if ai > 0 {
                p = add(&p, &scale(nu, ai));
                pts.push(p.clone());
            }
        }
        pts
    }

    fn is_closed(&self, a: &[i64]) -> bool {
        let mut s = [0i64, 0];
        for ((nu, _), &ai) in self.edges.iter().zip(a) {
            s[0] += ai * nu[0];
            s[1] += ai * nu[1];
        }
        s == [0, 0]
    }

    /// Primitive directions used by `a` if it is a segment, `None` if it is
    /// two-dimensional (or zero).
    fn segment_direction(&self, a: &[i64]) -> Option<IVec> {
        let used: Vec<&IVec> = self
            .edges
            .iter()
            .zip(a)
            .filter(|(_, &ai)| ai > 0)
            .map(|((nu, _), _)| nu)
            .collect();
        match used.as_slice() {
            [u, v] if add(u, v) == vec![0, 0] => Some((*u).clone()),
            _ => None,
        }
    }
}

/// Counterclockwise order of the vertices of a convex polygon, starting at the
/// lexicographically smallest vertex (Andrew's monotone chain).
pub fn ccw_order(vertices: &[IVec]) -> Vec<IVec> {
    let mut pts = vertices.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &IVec, a: &IVec, b: &IVec| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<IVec> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<IVec> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Lattice condition against `Lat(Q) = Z²` for a family of summands.
fn spans_plane(edges: &PolygonEdges, parts: &[&Vec<i64>]) -> bool {
    let mut dirs = Vec::new();
    for a in parts {
        match edges.segment_direction(a) {
            None => return true,
            Some(nu) => dirs.push(nu),
        }
    }
    index_in_zn(&dirs, 2) == Some(1)
}

/// Lattice condition for a split `a = b + c`, relative to `Lat(a)`.
fn split_is_lattice(edges: &PolygonEdges, a: &[i64], b: &[i64], c: &[i64]) -> bool {
    match edges.segment_direction(a) {
        // Summands of a segment are parallel segments; Zν + Zν = Zν.
        Some(_) => true,
        None => spans_plane(edges, &[&b.to_vec(), &c.to_vec()]),
    }
}

fn bounded_vectors(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..=b).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

fn closed_subvectors(edges: &PolygonEdges, bound: &[i64]) -> Vec<Vec<i64>> {
    bounded_vectors(bound)
        .into_iter()
        .filter(|a| a.iter().any(|&x| x > 0) && edges.is_closed(a))
        .collect()
}

/// Lattice-irreducible summand vectors of the polygon, sorted.
pub fn irreducible_summands(edges: &PolygonEdges) -> Vec<Vec<i64>> {
    let closed = closed_subvectors(edges, &edges.multiplicities());
    closed
        .iter()
        .filter(|a| {
            !closed.iter().any(|b| {
                if b == *a || b.iter().zip(a.iter()).any(|(x, y)| x > y) {
                    return false;
                }
                let c: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                split_is_lattice(edges, a, b, &c)
            })
        })
        .cloned()
        .collect()
}

/// All lattice Minkowski decompositions of a polygon into lattice-irreducible
/// summands, in a deterministic order.
pub fn lattice_minkowski_decompositions(
    q: &LatticePolytope,
) -> Result<Vec<MinkowskiDecomposition>, PolytopeError> {
    let d = q.dim();
    if d != 2 {
        return Err(PolytopeError::NotPolygon(d));
    }
    let chart = q.chart();
    let local: Vec<IVec> = q.vertices().iter().map(|v| chart.to_chart(v).unwrap()).collect();
    let edges = PolygonEdges::of(&local);
    let irreducible = irreducible_summands(&edges);
    let target = edges.multiplicities();

    let mut results = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    collect(&irreducible, 0, &target, &mut chosen, &mut |parts: &[usize]| {
        let vecs: Vec<&Vec<i64>> = parts.iter().map(|&i| &irreducible[i]).collect();
        if spans_plane(&edges, &vecs) {
            results.push(parts.to_vec());
        }
    });

    let to_ambient = |y: &IVec| -> IVec {
        let mut x = vec![0; q.ambient_dim()];
        for (c, b) in y.iter().zip(&chart.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    };
    let mut out: Vec<MinkowskiDecomposition> = results
        .into_iter()
        .map(|parts| {
            let mut pairs: Vec<(LatticePolytope, Vec<i64>)> = parts
                .iter()
                .map(|&i| {
                    let a = &irreducible[i];
                    let pts: Vec<IVec> = edges.summand_points(a).iter().map(to_ambient).collect();
                    let poly = LatticePolytope::from_points(q.ambient_dim(), &pts)
                        .unwrap()
                        .normalized_translation();
                    (poly, a.clone())
                })
                .collect();
            pairs.sort_by(|x, y| x.1.cmp(&y.1));
            let (summands, edge_vectors) = pairs.into_iter().unzip();
            MinkowskiDecomposition {
                summands,
                edge_vectors,
            }
        })
        .collect();
    out.sort_by(|a, b| a.edge_vectors.cmp(&b.edge_vectors));
    Ok(out)
}

/// Multisets (non-decreasing index sequences) of items summing to `rest`.
fn collect(
    items: &[Vec<i64>],
    start: usize,
    rest: &[i64],
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if rest.iter().all(|&x| x == 0) {
        emit(chosen);
        return;
    }
    for i in start..items.len() {
        if items[i].iter().zip(rest).all(|(a, r)| a <= r) {
            let next: Vec<i64> = rest.iter().zip(&items[i]).map(|(r, a)| r - a).collect();
            chosen.push(i);
            collect(items, i, &next, chosen, emit);
            chosen.pop();
        }
    }
}
