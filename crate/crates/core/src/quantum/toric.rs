use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::QuantumError;
use crate::arith::{factorial, Rational};
use crate::laurent::PeriodSequence;
use crate::polytope::lattice::{dot, hnf_rows, integer_kernel, IVec};

/// Weight data of a toric variety: `weights[a][i]` is the `a`-th entry of
/// the column `D_i ∈ Z^b`. The Mori cone is `NE = {k : ⟨nef_j, k⟩ ≥ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricData {
    weights: Vec<IVec>,
    nef: Vec<IVec>,
    rays: Vec<IVec>,
}

impl ToricData {
    pub fn new(weights: Vec<IVec>, nef: Vec<IVec>) -> Result<Self, QuantumError> {
        let b = weights.len();
        if b == 0 {
            return Err(QuantumError::InvalidToric("no weight rows".into()));
        }
        let r = weights[0].len();
        if r == 0 || weights.iter().any(|w| w.len() != r) {
            return Err(QuantumError::InvalidToric("weight rows have different lengths".into()));
        }
        if nef.iter().any(|n| n.len() != b) {
            return Err(QuantumError::InvalidToric(format!("nef generators must have length {b}")));
        }
        let rays = cone_rays(&nef, b)?;
        let data = Self { weights, nef, rays };
        let k = data.anticanonical();
        for ray in &data.rays {
            if dot(&k, ray) <= 0 {
                return Err(QuantumError::InvalidToric(format!(
                    "-K is not positive on the Mori cone generator {ray:?}"
                )));
            }
        }
        Ok(data)
    }

    /// `P^n`: one weight row of `n + 1` ones.
    pub fn projective_space(n: usize) -> Self {
        Self::new(vec![vec![1; n + 1]], vec![vec![1]]).expect("valid data")
    }

    /// `P^{n_1} × … × P^{n_s}`.
    pub fn product_of_projective_spaces(dims: &[usize]) -> Self {
        let b = dims.len();
        let r: usize = dims.iter().map(|n| n + 1).sum();
        let mut weights = vec![vec![0; r]; b];
        let mut col = 0;
        for (a, &n) in dims.iter().enumerate() {
            for _ in 0..=n {
                weights[a][col] = 1;
                col += 1;
            }
        }
        let nef = (0..b)
            .map(|a| (0..b).map(|c| i64::from(a == c)).collect())
            .collect();
        Self::new(weights, nef).expect("valid data")
    }

    pub fn picard_rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[IVec] {
        &self.weights
    }

    pub fn nef(&self) -> &[IVec] {
        &self.nef
    }

    /// Extreme rays of the Mori cone.
    pub fn mori_rays(&self) -> &[IVec] {
        &self.rays
    }

    /// Column `D_i`.
    pub fn divisor(&self, i: usize) -> IVec {
        self.weights.iter().map(|row| row[i]).collect()
    }

    pub fn divisors(&self) -> Vec<IVec> {
        (0..self.weights[0].len()).map(|i| self.divisor(i)).collect()
    }

    /// `-K = Σ D_i`.
    pub fn anticanonical(&self) -> IVec {
        self.weights.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn in_mori_cone(&self, k: &[i64]) -> bool {
        self.nef.iter().all(|n| dot(n, k) >= 0)
    }

    /// `|k_a| ≤ bound[a]` for every `k ∈ NE` with `⟨grading, k⟩ ≤ m_max`.
    pub(crate) fn box_bounds(&self, grading: &[i64], m_max: usize) -> Vec<i64> {
        (0..self.picard_rank())
            .map(|a| {
                self.rays
                    .iter()
                    .map(|ray| {
                        let w = dot(grading, ray);
                        Integer::div_ceil(&(m_max as i64 * ray[a].abs()), &w)
                    })
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }
}

/// Nef bundles `L_1, …, L_c` on a toric Fano manifold with
/// `A = -K - Σ L_j` positive on the Mori cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleData {
    bundles: Vec<IVec>,
}

impl BundleData {
    pub fn new(toric: &ToricData, bundles: Vec<IVec>) -> Result<Self, QuantumError> {
        let b = toric.picard_rank();
        for l in &bundles {
            if l.len() != b {
                return Err(QuantumError::InvalidBundle(format!("bundle {l:?} must have length {b}")));
            }
            if let Some(ray) = toric.rays.iter().find(|ray| dot(l, ray) < 0) {
                return Err(QuantumError::InvalidBundle(format!("{l:?} is negative on {ray:?}")));
            }
        }
        let data = Self { bundles };
        let a = data.a_class(toric);
        if let Some(ray) = toric.rays.iter().find(|ray| dot(&a, ray) <= 0) {
            return Err(QuantumError::InvalidBundle(format!(
                "A = {a:?} is not positive on the Mori cone generator {ray:?}"
            )));
        }
        Ok(data)
    }

    pub fn empty() -> Self {
        Self { bundles: Vec::new() }
    }

    pub fn bundles(&self) -> &[IVec] {
        &self.bundles
    }

    /// `A = -K - Σ L_j`.
    pub fn a_class(&self, toric: &ToricData) -> IVec {
        let mut a = toric.anticanonical();
        for l in &self.bundles {
            for (x, y) in a.iter_mut().zip(l) {
                *x -= y;
            }
        }
        a
    }
}

/// Extreme rays of `{k : ⟨n_j, k⟩ ≥ 0}`: primitive generators of the lines
/// cut out by `b - 1` of the inequalities that satisfy all of them.
fn cone_rays(nef: &[IVec], b: usize) -> Result<Vec<IVec>, QuantumError> {
    if b == 1 {
        let pos = nef.iter().all(|n| n[0] >= 0);
        let neg = nef.iter().all(|n| n[0] <= 0);
        return match (pos, neg) {
            (true, false) => Ok(vec![vec![1]]),
            (false, true) => Ok(vec![vec![-1]]),
            _ => Err(QuantumError::InvalidToric("the Mori cone is not a pointed ray".into())),
        };
    }
    let mut rays = BTreeSet::new();
    for subset in subsets(nef.len(), b - 1) {
        let rows: Vec<IVec> = subset.iter().map(|&i| nef[i].clone()).collect();
        let ker = integer_kernel(&rows, b);
        if ker.len() != 1 {
            continue;
        }
        for sign in [1, -1] {
            let v: IVec = ker[0].iter().map(|x| x * sign).collect();
            if nef.iter().all(|n| dot(n, &v) >= 0) {
                rays.insert(v);
            }
        }
    }
    let rays: Vec<IVec> = rays.into_iter().collect();
    // Pointed and full dimensional: the nef rows span, and some ray exists.
    let rank_ok = hnf_rows(nef).iter().filter(|r| r.iter().any(|&x| x != 0)).count() == b;
    if rays.is_empty() || !rank_ok {
        return Err(QuantumError::InvalidToric("the Mori cone is not pointed".into()));
    }
    Ok(rays)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Σ_{k ∈ NE, ⟨grading,k⟩ = m} ∏ (L_j·k)! / ∏ (D_i·k)!` for `m ≤ m_max`,
/// with `1/(negative)! = 0`.
pub(crate) fn graded_sum(toric: &ToricData, bundles: &[IVec], grading: &[i64], m_max: usize) -> PeriodSequence {
    let bounds = toric.box_bounds(grading, m_max);
    let pivot = grading
        .iter()
        .position(|&g| g != 0)
        .expect("grading is positive on the cone, so nonzero");
    let divisors = toric.divisors();
    let coeffs: Vec<Rational> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut acc = Rational::zero();
            for_each_in_slice(grading, &bounds, pivot, m as i64, |k| {
                if !toric.in_mori_cone(k) {
                    return;
                }
                if let Some(term) = term(&divisors, bundles, k) {
                    acc += term;
                }
            });
            acc
        })
        .collect();
    PeriodSequence::new(coeffs)
}

/// Calls `f` on every `k` in the box with `⟨grading, k⟩ = m`; the
/// coordinate `pivot` is solved from the others.
fn for_each_in_slice(grading: &[i64], bounds: &[i64], pivot: usize, m: i64, mut f: impl FnMut(&[i64])) {
    let b = grading.len();
    let mut k = vec![0i64; b];
    let free: Vec<usize> = (0..b).filter(|&a| a != pivot).collect();
    for a in &free {
        k[*a] = -bounds[*a];
    }
    loop {
        let rest: i64 = free.iter().map(|&a| grading[a] * k[a]).sum();
        let num = m - rest;
        if num % grading[pivot] == 0 {
            let kp = num / grading[pivot];
            if kp.abs() <= bounds[pivot] {
                k[pivot] = kp;
                f(&k);
            }
        }
        // odometer over the free coordinates
        let mut i = 0;
        loop {
            if i == free.len() {
                return;
            }
            let a = free[i];
            if k[a] < bounds[a] {
                k[a] += 1;
                break;
            }
            k[a] = -bounds[a];
            i += 1;
        }
    }
}

fn term(divisors: &[IVec], bundles: &[IVec], k: &[i64]) -> Option<Rational> {
    let mut den = BigInt::one();
    for d in divisors {
        let e = dot(d, k);
        if e < 0 {
            return None;
        }
        den *= factorial(e as u64);
    }
    let mut num = BigInt::one();
    for l in bundles {
        num *= factorial(dot(l, k).max(0) as u64);
    }
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rays_of_simplicial_cone() {
        let t = ToricData::product_of_projective_spaces(&[1, 1]);
        assert_eq!(t.mori_rays(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(t.anticanonical(), vec![2, 2]);
    }

    #[test]
    fn rejects_non_fano_grading() {
        // Hirzebruch-type weights with -K = (0, 2) vanishing on a ray.
        let err = ToricData::new(vec![vec![1, 1, -2, 0], vec![0, 0, 1, 1]], vec![vec![1, 0], vec![0, 1]]);
        assert!(matches!(err, Err(QuantumError::InvalidToric(_))), "{err:?}");
    }

    #[test]
    fn rejects_non_nef_bundle() {
        let t = ToricData::projective_space(3);
        assert!(BundleData::new(&t, vec![vec![-1]]).is_err());
        assert!(BundleData::new(&t, vec![vec![4]]).is_err());
        assert!(BundleData::new(&t, vec![vec![3]]).is_ok());
    }

    #[test]
    fn slices_cover_the_box() {
        let mut seen = Vec::new();
        for_each_in_slice(&[1, 2], &[3, 3], 0, 2, |k| seen.push(k.to_vec()));
        assert_eq!(seen, vec![vec![2, 0], vec![0, 1], vec![-2, 2]]);
    }
}
