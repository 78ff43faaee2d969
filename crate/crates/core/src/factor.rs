//! Factorization of univariate polynomials over Q.
//!
//! Squarefree decomposition over Q, then for each squarefree part the
//! classical route: Berlekamp factorization modulo a small prime, multifactor
//! Hensel lifting, and recombination of the lifted factors by trial division.
//! Degrees met in practice are small (leading coefficients and indicial
//! polynomials of differential operators), so exhaustive recombination is
//! fine.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;
use crate::upoly::QPoly;

/// `poly = unit · ∏ factor^multiplicity`, factors primitive integral with
/// positive leading coefficient, sorted by (degree, coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(QPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> QPoly {
        self.factors
            .iter()
            .fold(QPoly::constant(self.unit.clone()), |acc, (f, m)| {
                acc.mul(&f.pow(*m))
            })
    }

    /// True if every factor is linear.
    pub fn splits(&self) -> bool {
        self.factors.iter().all(|(f, _)| f.degree() == Some(1))
    }
}

pub fn factor(p: &QPoly) -> Factorization {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let (unit, prim) = p.primitive_part();
    let prim = QPoly::from_bigints(&prim);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&prim) {
        for f in factor_squarefree(&part) {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    // The factors are primitive with positive leads, so the unit is the
    // leading coefficient of p divided by the product of factor leads.
    let lead_prod = factors
        .iter()
        .fold(Rational::one(), |acc, (f, m)| acc * f.lead().pow(*m as i32));
    let unit = &unit * prim.lead() / lead_prod;
    Factorization { unit, factors }
}

/// Yun's algorithm; returns squarefree, pairwise coprime parts with their
/// multiplicities, skipping constant parts.
fn squarefree_decomposition(p: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let mut a = p.gcd(&dp);
    let mut b = p.div_exact(&a).unwrap();
    let mut c = dp.div_exact(&a).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    loop {
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).unwrap();
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Irreducible factors of a squarefree polynomial, each primitive integral
/// with positive leading coefficient.
fn factor_squarefree(p: &QPoly) -> Vec<QPoly> {
    let (_, ints) = p.primitive_part();
    let mut f = ints;
    let mut out = Vec::new();
    if f[0].is_zero() {
        out.push(QPoly::x());
        f.remove(0);
    }
    if f.len() <= 2 {
        if f.len() == 2 {
            out.push(QPoly::from_bigints(&f));
        }
        return out;
    }
    out.extend(zassenhaus(&f).into_iter().map(|g| QPoly::from_bigints(&g)));
    out
}

type ZPoly = Vec<BigInt>;
type FpPoly = Vec<u64>;

fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    let lc = f[n].clone();
    let p = choose_prime(f);
    let f_p = fp_monic(&fp_from_z(f, p), p);
    let modular = berlekamp(&f_p, p);
    if modular.len() == 1 {
        return vec![f.clone()];
    }

    // Any factor's coefficients are bounded by 2^n · ‖f‖₁ (Mignotte).
    let norm: BigInt = f.iter().map(|c| c.abs()).sum();
    let bound = (BigInt::one() << n) * norm * lc.abs() * 2;
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    let mut k = 1;
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    let mut lifted = hensel_lift_all(f, &modular, p, k);

    let mut remaining = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in combinations(lifted.len(), size) {
            let lc_rem = remaining.last().unwrap().clone();
            let mut cand: ZPoly = vec![lc_rem.clone()];
            for &i in &subset {
                cand = z_mod(&z_mul(&cand, &lifted[i]), &modulus);
            }
            let cand = primitive(&symmetric(&cand, &modulus));
            if let Some(q) = z_div_exact(&remaining, &cand) {
                out.push(normalize_sign(cand));
                remaining = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    out.push(normalize_sign(primitive(&remaining)));
    out
}

fn choose_prime(f: &ZPoly) -> u64 {
    let lc = f.last().unwrap();
    let df: ZPoly = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    (3u64..)
        .filter(|&q| is_prime(q))
        .find(|&q| {
            if (lc % BigInt::from(q)).is_zero() {
                return false;
            }
            let fp = fp_from_z(f, q);
            let dfp = fp_from_z(&df, q);
            fp_gcd(&fp, &dfp, q).len() == 1
        })
        .unwrap()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

// ---- polynomials over F_p ----

fn fp_trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_from_z(a: &ZPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    fp_trim(
        a.iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn fp_add(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_pow_scalar(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow_scalar(a, p - 2, p)
}

fn fp_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = fp_inv(l, p);
            a.iter().map(|&c| c * inv % p).collect()
        }
    }
}

fn fp_div_rem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let db = b.len() - 1;
    let inv = fp_inv(*b.last().unwrap(), p);
    let mut rem = a.clone();
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u64; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i] * inv % p;
        if c == 0 {
            continue;
        }
        for (j, &bc) in b.iter().enumerate() {
            rem[i - db + j] = (rem[i - db + j] + p - c * bc % p) % p;
        }
        quot[i - db] = c;
    }
    rem.truncate(db);
    (fp_trim(quot), fp_trim(rem))
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_div_rem(&a, &b, p).1;
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

/// `(g, s, t)` with `s·a + t·b = g` monic.
fn fp_ext_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (FpPoly, FpPoly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (FpPoly, FpPoly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_div_rem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s);
        let t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = fp_inv(*r0.last().unwrap(), p);
    let sc = |v: &FpPoly| fp_trim(v.iter().map(|&c| c * inv % p).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

/// Factors a monic squarefree polynomial over F_p into monic irreducibles.
fn berlekamp(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let n = f.len() - 1;
    // Row i: x^(i·p) mod f.
    let mut xp: FpPoly = vec![1];
    let x_to_p = {
        let mut base: FpPoly = vec![0, 1];
        let mut acc: FpPoly = vec![1];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_div_rem(&fp_mul(&acc, &base, p), f, p).1;
            }
            base = fp_div_rem(&fp_mul(&base, &base, p), f, p).1;
            e >>= 1;
        }
        acc
    };
    let mut q = vec![vec![0u64; n]; n];
    for row in q.iter_mut() {
        for (j, &c) in xp.iter().enumerate() {
            row[j] = c;
        }
        xp = fp_div_rem(&fp_mul(&xp, &x_to_p, p), f, p).1;
    }
    // Kernel of (Q - I)^T: solve v·(Q - I) = 0.
    let mut m = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = if i == j { (q[i][j] + p - 1) % p } else { q[i][j] };
            m[j][i] = v;
        }
    }
    let basis = fp_nullspace(&m, p);
    if basis.len() == 1 {
        return vec![f.clone()];
    }
    let mut factors = vec![f.clone()];
    for v in basis.iter() {
        let v = fp_trim(v.clone());
        if v.len() <= 1 {
            continue;
        }
        let mut next = Vec::new();
        for g in factors {
            if g.len() <= 2 {
                next.push(g);
                continue;
            }
            let mut rest = g.clone();
            for s in 0..p {
                if rest.len() <= 2 {
                    break;
                }
                let shifted = fp_sub(&v, &vec![s], p);
                let h = fp_gcd(&rest, &shifted, p);
                if h.len() > 1 && h.len() < rest.len() {
                    rest = fp_div_rem(&rest, &h, p).0;
                    next.push(h);
                }
            }
            if rest.len() > 1 {
                next.push(fp_monic(&rest, p));
            }
        }
        factors = next;
        if factors.len() == basis.len() {
            break;
        }
    }
    factors
}

/// Right nullspace basis of a matrix over F_p.
fn fp_nullspace(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = fp_inv(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + p - f * a[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[i][fc]) % p;
            }
            v
        })
        .collect()
}

// ---- integer polynomials ----

fn z_trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn z_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

fn z_sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    z_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn z_mod(a: &ZPoly, m: &BigInt) -> ZPoly {
    z_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    z_trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn primitive(a: &ZPoly) -> ZPoly {
    let g = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return a.clone();
    }
    a.iter().map(|c| c / &g).collect()
}

fn normalize_sign(a: ZPoly) -> ZPoly {
    if a.last().is_some_and(|c| c.is_negative()) {
        a.into_iter().map(|c| -c).collect()
    } else {
        a
    }
}

fn z_div_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let qa = QPoly::from_bigints(a);
    let qb = QPoly::from_bigints(b);
    let q = qa.div_exact(&qb)?;
    if !q.is_integral() {
        return None;
    }
    Some(q.coeffs().iter().map(|c| c.to_integer()).collect())
}

fn fp_to_z(a: &FpPoly) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f ≡ lc(f) · ∏ factors (mod p)` to monic factors modulo `p^k`.
fn hensel_lift_all(f: &ZPoly, factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let modulus = BigInt::from(p).pow(k);
    let mut out = Vec::new();
    let mut cur = z_mod(f, &modulus);
    for i in 0..factors.len() - 1 {
        let lc_p = (cur.last().unwrap() % BigInt::from(p)).to_u64().unwrap();
        let mut cof: FpPoly = vec![lc_p];
        for u in &factors[i + 1..] {
            cof = fp_mul(&cof, u, p);
        }
        let (g, h) = hensel_lift(&cur, &factors[i], &cof, p, k);
        out.push(g);
        cur = h;
    }
    let lc_inv = cur
        .last()
        .unwrap()
        .extended_gcd(&modulus)
        .x
        .mod_floor(&modulus);
    out.push(z_mod(
        &cur.iter().map(|c| c * &lc_inv).collect::<ZPoly>(),
        &modulus,
    ));
    out
}

/// Two-factor linear Hensel lifting of `f ≡ g·h (mod p)` with `g` monic.
fn hensel_lift(f: &ZPoly, g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (_, s, t) = fp_ext_gcd(g, h, p);
    let pb = BigInt::from(p);
    let mut gz = fp_to_z(g);
    let mut hz = fp_to_z(h);
    let mut m = pb.clone();
    for _ in 1..k {
        let diff = z_sub(f, &z_mul(&gz, &hz));
        let e: ZPoly = diff.iter().map(|c| c / &m).collect();
        let e_p = fp_from_z(&e, p);
        let (q, tau) = fp_div_rem(&fp_mul(&t, &e_p, p), g, p);
        let sigma = fp_add(&fp_mul(&s, &e_p, p), &fp_mul(&q, h, p), p);
        let next = &m * &pb;
        gz = z_mod(
            &z_add_scaled(&gz, &fp_to_z(&tau), &m),
            &next,
        );
        hz = z_mod(
            &z_add_scaled(&hz, &fp_to_z(&sigma), &m),
            &next,
        );
        m = next;
    }
    (gz, hz)
}

fn z_add_scaled(a: &ZPoly, b: &ZPoly, s: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    z_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero) * s)
            .collect(),
    )
}
