//! Small-integer lattice helpers: determinants, Hermite normal forms,
//! integer kernels and saturation. Matrices here are tiny (dimension ≤ 4 in
//! practice), so everything is done in `i128` with exact division.

use num_integer::Integer;

pub type IVec = Vec<i64>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[i64], s: i64) -> IVec {
    a.iter().map(|x| x * s).collect()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, &x| acc.gcd(&x))
}

/// Divides by the gcd of the entries (zero vector unchanged).
pub fn primitive(v: &[i64]) -> IVec {
    let g = gcd_all(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Bareiss determinant of a square matrix.
pub fn det(m: &[IVec]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Normal to the hyperplane through the origin spanned by `n - 1` vectors in
/// `Z^n` (generalized cross product). Zero if they are dependent.
pub fn cross(vectors: &[IVec], n: usize) -> IVec {
    debug_assert_eq!(vectors.len() + 1, n);
    (0..n)
        .map(|col| {
            let minor: Vec<IVec> = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let d = det(&minor);
            if col % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Row-style Hermite normal form: the returned nonzero rows are the unique
/// echelon basis (positive pivots, entries above each pivot reduced into
/// `[0, pivot)`) of the lattice spanned by the input rows.
pub fn hnf_rows(rows: &[IVec]) -> Vec<IVec> {
    hnf_with_transform(rows).0
}

/// As [`hnf_rows`], also returning a unimodular `U` with `U · rows = H`
/// (padded with the zero rows that were discarded).
pub fn hnf_with_transform(rows: &[IVec]) -> (Vec<IVec>, Vec<IVec>) {
    let m = rows.len();
    if m == 0 {
        return (Vec::new(), Vec::new());
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..m)
        .map(|i| (0..m).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        // Euclid on column `col` among rows r..m.
        loop {
            let nonzero: Vec<usize> = (r..m).filter(|&i| a[i][col] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            a.swap(r, piv);
            u.swap(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if a[i][col] != 0 {
                    let q = Integer::div_floor(&a[i][col], &a[r][col]);
                    for j in 0..n {
                        a[i][j] -= q * a[r][j];
                    }
                    for j in 0..m {
                        u[i][j] -= q * u[r][j];
                    }
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][col] == 0 {
            continue;
        }
        if a[r][col] < 0 {
            for j in 0..n {
                a[r][j] = -a[r][j];
            }
            for j in 0..m {
                u[r][j] = -u[r][j];
            }
        }
        for i in 0..r {
            let q = Integer::div_floor(&a[i][col], &a[r][col]);
            if q != 0 {
                for j in 0..n {
                    a[i][j] -= q * a[r][j];
                }
                for j in 0..m {
                    u[i][j] -= q * u[r][j];
                }
            }
        }
        r += 1;
    }
    let to64 = |v: &Vec<i128>| v.iter().map(|&x| x as i64).collect::<IVec>();
    let h: Vec<IVec> = a[..r].iter().map(to64).collect();
    let mut uu: Vec<IVec> = u.iter().map(to64).collect();
    uu.truncate(m);
    (h, uu)
}

/// Basis of `{x ∈ Z^n : A x = 0}` (saturated by construction).
pub fn integer_kernel(a: &[IVec], n: usize) -> Vec<IVec> {
    if a.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    // Column operations on A are row operations on A^T; track them in U.
    let at: Vec<IVec> = (0..n)
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect();
    let (h, u) = hnf_with_transform(&at);
    u[h.len()..].to_vec()
}

/// Integer basis of the saturation `span_Q(vectors) ∩ Z^n`, in Hermite form.
pub fn saturated_basis(vectors: &[IVec], n: usize) -> Vec<IVec> {
    let nonzero: Vec<IVec> = vectors.iter().filter(|v| v.iter().any(|&x| x != 0)).cloned().collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let normals = integer_kernel(&nonzero, n);
    let basis = integer_kernel(&normals, n);
    hnf_rows(&basis)
}

/// Integer coordinates of `v` in the basis `basis` (rows), if they exist.
pub fn coordinates(basis: &[IVec], v: &[i64]) -> Option<IVec> {
    let d = basis.len();
    let n = v.len();
    if d == 0 {
        return v.iter().all(|&x| x == 0).then(Vec::new);
    }
    // Solve Σ y_i basis_i = v via rational elimination on the n×(d+1) system.
    let mut a: Vec<Vec<num_rational::Ratio<i128>>> = (0..n)
        .map(|j| {
            let mut row: Vec<_> = (0..d)
                .map(|i| num_rational::Ratio::from_integer(basis[i][j] as i128))
                .collect();
            row.push(num_rational::Ratio::from_integer(v[j] as i128));
            row
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..d {
        let Some(pr) = (r..n).find(|&i| a[i][col] != num_rational::Ratio::from_integer(0)) else {
            return None;
        };
        a.swap(r, pr);
        let p = a[r][col];
        for x in a[r].iter_mut() {
            *x /= p;
        }
        for i in 0..n {
            if i != r {
                let f = a[i][col];
                if f != num_rational::Ratio::from_integer(0) {
                    for j in 0..=d {
                        let t = a[r][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| row[d] != num_rational::Ratio::from_integer(0)) {
        return None;
    }
    let y: Vec<_> = (0..d).map(|i| a[i][d]).collect();
    if y.iter().all(|q| q.is_integer()) {
        Some(y.iter().map(|q| q.to_integer() as i64).collect())
    } else {
        None
    }
}

/// Index of the lattice spanned by `rows` inside `Z^n` if it has full rank,
/// otherwise `None`.
pub fn index_in_zn(rows: &[IVec], n: usize) -> Option<i64> {
    let h = hnf_rows(rows);
    if h.len() < n {
        return None;
    }
    Some(h.iter().enumerate().map(|(i, r)| r[i]).product::<i64>().abs())
}
