//! Exact linear algebra: integer (fraction-free) nullspaces for the operator
//! fitting, and generic field elimination for the local analysis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{content, Field};

/// Basis of the rational nullspace of an integer matrix, each vector scaled
/// to a primitive integer vector. Every row must have `ncols` entries.
///
/// Elimination is fraction-free: `r_i ← p·r_i − a·r_p`, followed by removal of
/// the row content. Pivots are chosen by smallest magnitude in the column.
pub fn integer_nullspace(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .map(|r| primitive_row(r.clone()))
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == a.len() {
            break;
        }
        let Some(best) = (next..a.len())
            .filter(|&i| !a[i][col].is_zero())
            .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()))
        else {
            continue;
        };
        a.swap(next, best);
        let pivot_row = a[next].clone();
        let p = pivot_row[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let g = p.gcd(&row[col]);
            let mp = &p / &g;
            let ma = &row[col] / &g;
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &mp - &ma * y;
            }
            *row = primitive_row(std::mem::take(row));
        }
        pivots.push((next, col));
        next += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let lcm = pivots
        .iter()
        .fold(BigInt::one(), |acc, &(r, c)| acc.lcm(&a[r][c]));
    (0..ncols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![BigInt::zero(); ncols];
            v[free] = lcm.clone();
            for &(r, c) in &pivots {
                v[c] = -(&a[r][free] * &lcm) / &a[r][c];
            }
            primitive_row(v)
        })
        .collect()
}

fn primitive_row(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = content(&row);
    if !g.is_zero() && !g.is_one() {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    row
}

/// Rank of a matrix over an arbitrary field.
pub fn rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut a: Vec<Vec<F::Elem>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..a.len()).find(|&i| !field.is_zero(&a[i][col])) else {
            continue;
        };
        a.swap(r, pr);
        let inv = field.inv(&a[r][col]);
        let pivot_row: Vec<F::Elem> = a[r].iter().map(|x| field.mul(x, &inv)).collect();
        for row in a.iter_mut().skip(r + 1) {
            if field.is_zero(&row[col]) {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(x, &field.mul(&f, y));
            }
        }
        a[r] = pivot_row;
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Dimension of the right nullspace of an `rows × ncols` matrix.
pub fn nullity<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    ncols - rank(field, rows)
}
