//! Canonical representative of a full-dimensional lattice polytope up to
//! `GL(n, Z)` and lattice translations.
//!
//! For every ordered affinely independent tuple of vertices `(v0; v1..vn)`
//! there is a unique unimodular `U` putting the edge matrix `[v1-v0 .. vn-v0]`
//! into Hermite form. The normal form is the lexicographically smallest
//! sorted vertex list `U(v - v0)` over all tuples. Brute force, but cheap at
//! the sizes that occur here.

use super::lattice::{dot, hnf_with_transform, sub, IVec};
use super::{LatticePolytope, PolytopeError};

/// Sorted vertex list of the normal form.
pub fn normal_form(p: &LatticePolytope) -> Result<Vec<IVec>, PolytopeError> {
    let n = p.ambient_dim();
    if !p.is_full_dimensional() {
        return Err(PolytopeError::NotFullDimensional {
            actual: p.dim(),
            ambient: n,
        });
    }
    let vs = p.vertices();
    let mut best: Option<Vec<IVec>> = None;
    let mut tuple = Vec::with_capacity(n + 1);
    search(vs, n, &mut tuple, &mut best);
    Ok(best.expect("a full-dimensional polytope has an affine basis of vertices"))
}

fn search(vs: &[IVec], n: usize, tuple: &mut Vec<usize>, best: &mut Option<Vec<IVec>>) {
    if tuple.len() == n + 1 {
        if let Some(cand) = candidate(vs, n, tuple) {
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
        }
        return;
    }
    for i in 0..vs.len() {
        if !tuple.contains(&i) {
            tuple.push(i);
            search(vs, n, tuple, best);
            tuple.pop();
        }
    }
}

fn candidate(vs: &[IVec], n: usize, tuple: &[usize]) -> Option<Vec<IVec>> {
    let v0 = &vs[tuple[0]];
    // Rows of W are coordinates; columns are the edge vectors.
    let edges: Vec<IVec> = tuple[1..].iter().map(|&i| sub(&vs[i], v0)).collect();
    let w: Vec<IVec> = (0..n).map(|r| edges.iter().map(|e| e[r]).collect()).collect();
    let (h, u) = hnf_with_transform(&w);
    if h.len() < n {
        return None;
    }
    let mut out: Vec<IVec> = vs
        .iter()
        .map(|v| {
            let d = sub(v, v0);
            u.iter().map(|row| dot(row, &d)).collect()
        })
        .collect();
    out.sort();
    Some(out)
}

/// Whether two full-dimensional polytopes are unimodularly equivalent up to
/// translation.
pub fn equivalent(a: &LatticePolytope, b: &LatticePolytope) -> Result<bool, PolytopeError> {
    if a.vertices().len() != b.vertices().len() || a.ambient_dim() != b.ambient_dim() {
        return Ok(false);
    }
    Ok(normal_form(a)? == normal_form(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[&[i64]]) -> LatticePolytope {
        let pts: Vec<IVec> = pts.iter().map(|p| p.to_vec()).collect();
        LatticePolytope::from_points(pts[0].len(), &pts).unwrap()
    }

    #[test]
    fn invariant_under_unimodular_maps() {
        let p = poly(&[&[1, 0], &[1, 1], &[0, 1], &[-1, -1]]);
        let u = vec![vec![2, 1], vec![1, 1]];
        let q = p.transform(&u).unwrap().translate(&[5, -7]);
        assert_eq!(normal_form(&p).unwrap(), normal_form(&q).unwrap());
    }

    #[test]
    fn distinguishes_inequivalent_triangles() {
        let a = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        let b = poly(&[&[0, 0], &[2, 0], &[0, 1]]);
        assert!(!equivalent(&a, &b).unwrap());
        let c = poly(&[&[0, 0], &[1, 0], &[1, 2]]);
        assert!(equivalent(&b, &c).unwrap());
    }
}
