//! Brute-force enumeration of reflexive polygons.

use std::collections::BTreeMap;

use super::lattice::IVec;
use super::normal_form::normal_form;
use super::LatticePolytope;

/// All reflexive polygons with vertices in `[-r, r]²`, one representative per
/// unimodular equivalence class (the one with the smallest coordinates),
/// sorted by normal form.
///
/// Vertices are chosen in angular order around the origin, which is the
/// cyclic order of any convex polygon containing the origin in its interior.
/// A branch is cut as soon as the partial hull has a nonzero interior lattice
/// point, or a chosen point stops being a vertex, since hulls only grow.
pub fn reflexive_polygons(r: i64) -> Vec<LatticePolytope> {
    let mut pts: Vec<IVec> = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            if (x, y) != (0, 0) {
                pts.push(vec![x, y]);
            }
        }
    }
    pts.sort_by(|a, b| angle_cmp(a, b));

    let mut found: BTreeMap<Vec<IVec>, LatticePolytope> = BTreeMap::new();
    let mut chosen = Vec::new();
    dfs(&pts, 0, &mut chosen, &mut found);
    found.into_values().collect()
}

fn half(p: &[i64]) -> u8 {
    // 0 for angles in [0, π), 1 for [π, 2π).
    if p[1] > 0 || (p[1] == 0 && p[0] > 0) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    half(a)
        .cmp(&half(b))
        .then_with(|| 0.cmp(&(a[0] * b[1] - a[1] * b[0])))
        .then_with(|| (a[0].abs() + a[1].abs()).cmp(&(b[0].abs() + b[1].abs())))
}

fn compactness(p: &LatticePolytope) -> (i64, i64, Vec<IVec>) {
    let flat = p.vertices().iter().flatten();
    let max = flat.clone().map(|x| x.abs()).max().unwrap_or(0);
    let sum = flat.map(|x| x.abs()).sum();
    (max, sum, p.vertices().to_vec())
}

fn has_nonzero_interior_point(p: &LatticePolytope) -> bool {
    p.relative_interior_points()
        .iter()
        .any(|q| q.iter().any(|&x| x != 0))
}

fn dfs(
    pts: &[IVec],
    start: usize,
    chosen: &mut Vec<IVec>,
    found: &mut BTreeMap<Vec<IVec>, LatticePolytope>,
) {
    if chosen.len() >= 3 {
        let Ok(p) = LatticePolytope::from_points(2, chosen) else {
            return;
        };
        // Points that stop being vertices never become vertices again.
        if p.vertices().len() < chosen.len() {
            return;
        }
        if has_nonzero_interior_point(&p) {
            return;
        }
        if p.is_reflexive() {
            let nf = normal_form(&p).unwrap();
            // Keep the most compact representative of each class.
            match found.get(&nf) {
                Some(q) if compactness(q) <= compactness(&p) => {}
                _ => {
                    found.insert(nf, p);
                }
            }
        }
    }
    for i in start..pts.len() {
        chosen.push(pts[i].clone());
        dfs(pts, i + 1, chosen, found);
        chosen.pop();
    }
}
