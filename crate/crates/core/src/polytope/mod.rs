//! Lattice polytopes of small dimension: hulls, faces with planar charts,
//! lattice points, polarity, reflexivity and admissibility, affine lattices,
//! normalized volume, normal forms and lattice Minkowski decompositions.

pub mod decompose;
pub mod enumerate;
pub mod lattice;
pub mod normal_form;

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decompose::{lattice_minkowski_decompositions, MinkowskiDecomposition};
use lattice::{coordinates, cross, dot, hnf_rows, primitive, saturated_basis, sub, IVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("empty point set")]
    Empty,
    #[error("point {point:?} has length {got}, expected {expected}")]
    DimensionMismatch {
        point: Vec<i64>,
        got: usize,
        expected: usize,
    },
    #[error("polytope is not full-dimensional (dimension {actual} in Z^{ambient})")]
    NotFullDimensional { actual: usize, ambient: usize },
    #[error("the origin is not in the interior")]
    OriginNotInterior,
    #[error("expected a polygon, got a polytope of dimension {0}")]
    NotPolygon(usize),
    #[error("face dimension {requested} out of range for a polytope of dimension {dim}")]
    BadFaceDimension { requested: usize, dim: usize },
    #[error("{0}")]
    Unsupported(String),
}

/// A supporting inequality `⟨normal, x⟩ ≥ rhs` with primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: IVec,
    pub rhs: i64,
}

impl Halfspace {
    pub fn slack(&self, x: &[i64]) -> i64 {
        dot(&self.normal, x) - self.rhs
    }
}

/// A lattice polytope given by its vertex set (sorted, no redundant points).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePolytope {
    ambient: usize,
    vertices: Vec<IVec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    id: Option<String>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticePolytope{:?}", self.vertices)
    }
}

/// Affine embedding `y ↦ base + Σ y_i basis_i` of `Z^d` onto the saturated
/// lattice of an affine subspace of `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineChart {
    pub base: IVec,
    pub basis: Vec<IVec>,
}

impl AffineChart {
    /// Chart of the saturated affine lattice through `points`, with base the
    /// smallest point and basis in Hermite form.
    pub fn through(points: &[IVec]) -> Self {
        let base = points.iter().min().unwrap().clone();
        let n = base.len();
        let diffs: Vec<IVec> = points.iter().map(|p| sub(p, &base)).collect();
        Self {
            basis: saturated_basis(&diffs, n),
            base,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_ambient(&self, y: &[i64]) -> IVec {
        let mut x = self.base.clone();
        for (c, b) in y.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    /// Chart coordinates of an ambient lattice point on the subspace.
    pub fn to_chart(&self, x: &[i64]) -> Option<IVec> {
        coordinates(&self.basis, &sub(x, &self.base))
    }
}

/// A face of a full-dimensional lattice polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub dim: usize,
    /// Indices into the parent's vertex list.
    pub vertex_indices: Vec<usize>,
    pub vertices: Vec<IVec>,
    pub chart: AffineChart,
}

impl Face {
    /// The face as a full-dimensional polytope in its chart coordinates.
    pub fn in_chart(&self) -> LatticePolytope {
        let pts: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| self.chart.to_chart(v).expect("vertex lies on its own chart"))
            .collect();
        LatticePolytope::from_points(self.dim, &pts).expect("face has vertices")
    }

    pub fn lattice_points(&self) -> Vec<IVec> {
        let mut pts: Vec<IVec> = self
            .in_chart()
            .lattice_points()
            .iter()
            .map(|y| self.chart.to_ambient(y))
            .collect();
        pts.sort();
        pts
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match self.chart.to_chart(x) {
            Some(y) => self.in_chart().contains(&y),
            None => false,
        }
    }

    pub fn as_polytope(&self) -> LatticePolytope {
        LatticePolytope::from_points(self.vertices[0].len(), &self.vertices).unwrap()
    }
}

/// Vertex list with rational coordinates (polar duals).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPolytope {
    pub vertices: Vec<Vec<Ratio<i64>>>,
}

impl RationalPolytope {
    pub fn from_lattice(p: &LatticePolytope) -> Self {
        let mut vertices: Vec<Vec<Ratio<i64>>> = p
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| Ratio::from_integer(x)).collect())
            .collect();
        vertices.sort();
        Self { vertices }
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().flatten().all(Ratio::is_integer)
    }

    pub fn to_lattice(&self) -> Option<LatticePolytope> {
        if !self.is_lattice() {
            return None;
        }
        let n = self.vertices.first()?.len();
        let pts: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x.to_integer()).collect())
            .collect();
        LatticePolytope::from_points(n, &pts).ok()
    }

    /// Polar dual; the origin must be interior.
    pub fn polar(&self) -> Result<RationalPolytope, PolytopeError> {
        let den = self
            .vertices
            .iter()
            .flatten()
            .fold(1i64, |acc, x| acc.lcm(x.denom()));
        let n = self.vertices.first().ok_or(PolytopeError::Empty)?.len();
        let scaled: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| (x * den).to_integer()).collect())
            .collect();
        let p = LatticePolytope::from_points(n, &scaled)?;
        // (den·P)* = P*/den.
        let dual = p.polar()?;
        let mut vertices: Vec<Vec<Ratio<i64>>> = dual
            .vertices
            .into_iter()
            .map(|v| v.into_iter().map(|x| x * den).collect())
            .collect();
        vertices.sort();
        Ok(Self { vertices })
    }
}

impl LatticePolytope {
    /// Convex hull of a finite point set in `Z^ambient`.
    pub fn from_points(ambient: usize, points: &[IVec]) -> Result<Self, PolytopeError> {
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        for p in points {
            if p.len() != ambient {
                return Err(PolytopeError::DimensionMismatch {
                    point: p.clone(),
                    got: p.len(),
                    expected: ambient,
                });
            }
        }
        let pts: Vec<IVec> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let chart = AffineChart::through(&pts);
        let d = chart.dim();
        let vertices = if d == ambient {
            hull_vertices(&pts, ambient)
        } else if d == 0 {
            vec![pts[0].clone()]
        } else {
            let local: Vec<IVec> = pts.iter().map(|p| chart.to_chart(p).unwrap()).collect();
            let mut vs: Vec<IVec> = hull_vertices(&local, d)
                .iter()
                .map(|y| chart.to_ambient(y))
                .collect();
            vs.sort();
            vs
        };
        Ok(Self {
            ambient,
            vertices,
            id: None,
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.chart().dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn chart(&self) -> AffineChart {
        AffineChart::through(&self.vertices)
    }

    fn require_full(&self) -> Result<(), PolytopeError> {
        if self.is_full_dimensional() {
            Ok(())
        } else {
            Err(PolytopeError::NotFullDimensional {
                actual: self.dim(),
                ambient: self.ambient,
            })
        }
    }

    /// Facet inequalities of a full-dimensional polytope, sorted.
    pub fn facet_halfspaces(&self) -> Result<Vec<Halfspace>, PolytopeError> {
        self.require_full()?;
        Ok(facets_of(&self.vertices, self.ambient))
    }

    /// Membership for lattice points (any dimension).
    pub fn contains(&self, x: &[i64]) -> bool {
        if self.is_full_dimensional() {
            return facets_of(&self.vertices, self.ambient)
                .iter()
                .all(|h| h.slack(x) >= 0);
        }
        let chart = self.chart();
        match chart.to_chart(x) {
            None => false,
            Some(y) => {
                let local: Vec<IVec> = self.vertices.iter().map(|v| chart.to_chart(v).unwrap()).collect();
                if chart.dim() == 0 {
                    return true;
                }
                facets_of(&local, chart.dim()).iter().all(|h| h.slack(&y) >= 0)
            }
        }
    }

    /// All lattice points, sorted.
    pub fn lattice_points(&self) -> Vec<IVec> {
        if self.vertices.len() == 1 {
            return self.vertices.clone();
        }
        let chart = self.chart();
        if !self.is_full_dimensional() {
            let local: Vec<IVec> = self.vertices.iter().map(|v| chart.to_chart(v).unwrap()).collect();
            let inner = LatticePolytope::from_points(chart.dim(), &local).unwrap();
            let mut pts: Vec<IVec> = inner
                .lattice_points()
                .iter()
                .map(|y| chart.to_ambient(y))
                .collect();
            pts.sort();
            return pts;
        }
        let facets = facets_of(&self.vertices, self.ambient);
        box_points(&self.vertices, self.ambient)
            .into_iter()
            .filter(|x| facets.iter().all(|h| h.slack(x) >= 0))
            .collect()
    }

    /// Lattice points in the relative interior, sorted.
    pub fn relative_interior_points(&self) -> Vec<IVec> {
        let chart = self.chart();
        let d = chart.dim();
        if d == 0 {
            return self.vertices.clone();
        }
        let local: Vec<IVec> = self.vertices.iter().map(|v| chart.to_chart(v).unwrap()).collect();
        let facets = facets_of(&local, d);
        let mut pts: Vec<IVec> = box_points(&local, d)
            .into_iter()
            .filter(|y| facets.iter().all(|h| h.slack(y) > 0))
            .map(|y| chart.to_ambient(&y))
            .collect();
        pts.sort();
        pts
    }

    /// No lattice points in the relative interior.
    pub fn is_admissible(&self) -> bool {
        self.relative_interior_points().is_empty()
    }

    pub fn contains_origin_in_interior(&self) -> bool {
        self.is_full_dimensional()
            && facets_of(&self.vertices, self.ambient)
                .iter()
                .all(|h| h.rhs < 0)
    }

    pub fn polar(&self) -> Result<RationalPolytope, PolytopeError> {
        self.require_full()?;
        let facets = facets_of(&self.vertices, self.ambient);
        if facets.iter().any(|h| h.rhs >= 0) {
            return Err(PolytopeError::OriginNotInterior);
        }
        let mut vertices: Vec<Vec<Ratio<i64>>> = facets
            .iter()
            .map(|h| h.normal.iter().map(|&u| Ratio::new(u, -h.rhs)).collect())
            .collect();
        vertices.sort();
        Ok(RationalPolytope { vertices })
    }

    /// Origin is the only interior lattice point and the polar is a lattice
    /// polytope.
    pub fn is_reflexive(&self) -> bool {
        if !self.is_full_dimensional() {
            return false;
        }
        let origin = vec![0; self.ambient];
        if self.relative_interior_points() != vec![origin] {
            return false;
        }
        self.polar().is_ok_and(|p| p.is_lattice())
    }

    /// All faces of dimension `d`, sorted by vertex list.
    pub fn faces(&self, d: usize) -> Result<Vec<Face>, PolytopeError> {
        self.require_full()?;
        let n = self.ambient;
        if d >= n {
            return Err(PolytopeError::BadFaceDimension { requested: d, dim: n });
        }
        let vertex_sets = face_vertex_sets(&self.vertices, n, d);
        let mut faces: Vec<Face> = vertex_sets
            .into_iter()
            .map(|vs| {
                let vertices: Vec<IVec> = vs.to_vec();
                let vertex_indices = vertices
                    .iter()
                    .map(|v| self.vertices.binary_search(v).unwrap())
                    .collect();
                let chart = AffineChart::through(&vertices);
                Face {
                    dim: d,
                    vertex_indices,
                    vertices,
                    chart,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        Ok(faces)
    }

    /// `Lat(P)`: base point and Hermite basis of the lattice generated by
    /// differences of lattice points.
    pub fn affine_lattice(&self) -> AffineLattice {
        let pts = self.lattice_points();
        let base = pts[0].clone();
        let diffs: Vec<IVec> = pts.iter().skip(1).map(|p| sub(p, &base)).collect();
        AffineLattice {
            basis: hnf_rows(&diffs),
            base,
        }
    }

    /// `d! · vol` in the saturated lattice of the affine hull (`d` = dim).
    pub fn normalized_volume(&self) -> u64 {
        let chart = self.chart();
        let d = chart.dim();
        if d == 0 {
            return 1;
        }
        let local: Vec<IVec> = self.vertices.iter().map(|v| chart.to_chart(v).unwrap()).collect();
        normalized_volume_full(&local, d)
    }

    pub fn translate(&self, by: &[i64]) -> Self {
        let mut vertices: Vec<IVec> = self.vertices.iter().map(|v| lattice::add(v, by)).collect();
        vertices.sort();
        Self {
            ambient: self.ambient,
            vertices,
            id: self.id.clone(),
        }
    }

    /// Image under `x ↦ M x` for an integer matrix `M` (rows).
    pub fn transform(&self, m: &[IVec]) -> Result<Self, PolytopeError> {
        let pts: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| m.iter().map(|row| dot(row, v)).collect())
            .collect();
        Self::from_points(m.len(), &pts)
    }

    /// Minkowski sum.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, PolytopeError> {
        let pts: Vec<IVec> = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| lattice::add(a, b)))
            .collect();
        Self::from_points(self.ambient, &pts)
    }

    /// Translate so that the smallest vertex is the origin.
    pub fn normalized_translation(&self) -> Self {
        let v0 = self.vertices[0].clone();
        let mut out = self.translate(&lattice::scale(&v0, -1));
        out.id = None;
        out
    }

    /// Lattice length of a segment (number of primitive steps).
    pub fn lattice_length(&self) -> Option<i64> {
        (self.vertices.len() == 2).then(|| lattice::gcd_all(&sub(&self.vertices[1], &self.vertices[0])))
    }
}

/// `Lat(Q)` together with a base point of the affine lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineLattice {
    pub base: IVec,
    pub basis: Vec<IVec>,
}

impl AffineLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn box_points(points: &[IVec], n: usize) -> Vec<IVec> {
    let lo: IVec = (0..n).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: IVec = (0..n).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
    let mut out = vec![Vec::new()];
    for i in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: IVec| {
                (lo[i]..=hi[i]).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Facets of the hull of a full-dimensional point set, by enumerating
/// hyperplanes through `n` affinely independent points.
pub(crate) fn facets_of(points: &[IVec], n: usize) -> Vec<Halfspace> {
    let mut found = BTreeSet::new();
    let m = points.len();
    let mut idx: Vec<usize> = (0..n).collect();
    if m < n {
        return Vec::new();
    }
    loop {
        let base = &points[idx[0]];
        let diffs: Vec<IVec> = idx[1..].iter().map(|&i| sub(&points[i], base)).collect();
        let normal = primitive(&cross(&diffs, n));
        if normal.iter().any(|&x| x != 0) {
            let rhs = dot(&normal, base);
            let (mut pos, mut neg) = (false, false);
            for p in points {
                let s = dot(&normal, p) - rhs;
                pos |= s > 0;
                neg |= s < 0;
                if pos && neg {
                    break;
                }
            }
            if !(pos && neg) {
                let h = if neg {
                    Halfspace {
                        normal: normal.iter().map(|x| -x).collect(),
                        rhs: -rhs,
                    }
                } else {
                    Halfspace { normal, rhs }
                };
                found.insert(h);
            }
        }
        // Next combination.
        let mut i = n;
        loop {
            if i == 0 {
                return found.into_iter().collect();
            }
            i -= 1;
            if idx[i] < m - n + i {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Vertices of the hull of a full-dimensional point set.
fn hull_vertices(points: &[IVec], n: usize) -> Vec<IVec> {
    if n == 0 {
        return vec![points[0].clone()];
    }
    let facets = facets_of(points, n);
    let mut vs: Vec<IVec> = points
        .iter()
        .filter(|p| {
            let tight: Vec<IVec> = facets
                .iter()
                .filter(|h| h.slack(p) == 0)
                .map(|h| h.normal.clone())
                .collect();
            hnf_rows(&tight).len() == n
        })
        .cloned()
        .collect();
    vs.sort();
    vs
}

/// Vertex sets of the `d`-faces of a full-dimensional polytope in `Z^n`.
fn face_vertex_sets(vertices: &[IVec], n: usize, d: usize) -> BTreeSet<Vec<IVec>> {
    let facets = facets_of(vertices, n);
    let facet_sets: BTreeSet<Vec<IVec>> = facets
        .iter()
        .map(|h| vertices.iter().filter(|v| h.slack(v) == 0).cloned().collect())
        .collect();
    if d + 1 == n {
        return facet_sets;
    }
    let mut out = BTreeSet::new();
    for fs in facet_sets {
        let chart = AffineChart::through(&fs);
        let local: Vec<IVec> = fs.iter().map(|v| chart.to_chart(v).unwrap()).collect();
        let mut local_sorted = local.clone();
        local_sorted.sort();
        for sub_face in face_vertex_sets(&local_sorted, n - 1, d) {
            let mut amb: Vec<IVec> = sub_face.iter().map(|y| chart.to_ambient(y)).collect();
            amb.sort();
            out.insert(amb);
        }
    }
    out
}

fn normalized_volume_full(vertices: &[IVec], n: usize) -> u64 {
    if n == 1 {
        let xs: Vec<i64> = vertices.iter().map(|v| v[0]).collect();
        return (xs.iter().max().unwrap() - xs.iter().min().unwrap()) as u64;
    }
    let apex = &vertices[0];
    facets_of(vertices, n)
        .iter()
        .map(|h| {
            let height = h.slack(apex) as u64;
            if height == 0 {
                return 0;
            }
            let fv: Vec<IVec> = vertices.iter().filter(|v| h.slack(v) == 0).cloned().collect();
            let chart = AffineChart::through(&fv);
            let local: Vec<IVec> = fv.iter().map(|v| chart.to_chart(v).unwrap()).collect();
            height * normalized_volume_full(&local, n - 1)
        })
        .sum()
}
