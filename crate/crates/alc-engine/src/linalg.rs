//! Exact linear algebra over the rationals: sparse vectors, incremental
//! echelon forms, kernels, fraction-free determinants.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::rational::Q;

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SVec = Vec<(usize, Q)>;

pub fn sv_from_dense(v: &[Q]) -> SVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sv_to_dense(v: &SVec, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Builds a sparse vector from unordered (index, value) terms, summing repeats.
pub fn sv_collect<I: IntoIterator<Item = (usize, Q)>>(terms: I) -> SVec {
    let mut map: HashMap<usize, Q> = HashMap::new();
    for (i, x) in terms {
        if x.is_zero() {
            continue;
        }
        *map.entry(i).or_insert_with(Q::zero) += x;
    }
    let mut v: SVec = map.into_iter().filter(|(_, x)| !x.is_zero()).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

/// y + a*x
pub fn sv_axpy(y: &SVec, a: &Q, x: &SVec) -> SVec {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j >= x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i >= y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i].clone());
            i += 1;
        } else if take_x {
            out.push((x[j].0, a * &x[j].1));
            j += 1;
        } else {
            let s = &y[i].1 + a * &x[j].1;
            if !s.is_zero() {
                out.push((y[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sv_scale(v: &SVec, a: &Q) -> SVec {
    if a.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * a)).collect()
}

pub fn sv_get(v: &SVec, idx: usize) -> Q {
    match v.binary_search_by_key(&idx, |(i, _)| *i) {
        Ok(p) => v[p].1.clone(),
        Err(_) => Q::zero(),
    }
}

/// Incremental row echelon form with unit leading coefficients.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SVec] {
        &self.rows
    }

    /// Eliminates leading entries against existing pivots.
    pub fn reduce(&self, mut v: SVec) -> SVec {
        while let Some((c, x)) = v.first().cloned() {
            match self.pivot_row.get(&c) {
                Some(&r) => v = sv_axpy(&v, &(-x), &self.rows[r]),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: SVec) -> bool {
        let v = self.reduce(v);
        match v.first() {
            None => false,
            Some((c, lead)) => {
                let c = *c;
                let inv = lead.recip();
                let v = sv_scale(&v, &inv);
                self.pivot_row.insert(c, self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }
}

/// Basis of { x : sum_j x_j * cols[j] = 0 }, as sparse vectors indexed by j.
pub fn kernel_of_columns(cols: &[SVec]) -> Vec<SVec> {
    let mut rows: Vec<(SVec, SVec)> = Vec::new();
    let mut pivot_row: HashMap<usize, usize> = HashMap::new();
    let mut kernel = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        let mut track: SVec = vec![(j, Q::one())];
        while let Some((c, x)) = v.first().cloned() {
            match pivot_row.get(&c) {
                Some(&r) => {
                    let a = -x;
                    v = sv_axpy(&v, &a, &rows[r].0);
                    track = sv_axpy(&track, &a, &rows[r].1);
                }
                None => break,
            }
        }
        match v.first() {
            None => kernel.push(track),
            Some((c, lead)) => {
                let c = *c;
                let inv = lead.recip();
                pivot_row.insert(c, rows.len());
                rows.push((sv_scale(&v, &inv), sv_scale(&track, &inv)));
            }
        }
    }
    kernel
}

/// Rank of the span of the given sparse vectors.
pub fn rank_of(vs: &[SVec]) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v.clone());
    }
    e.rank()
}

/// Independent subset of `vs` spanning the same space (keeps input vectors).
pub fn independent_subset(vs: Vec<SVec>) -> Vec<SVec> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for v in vs {
        if e.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

/// Dense Gauss-Jordan solve of a*x = b; returns one solution if consistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut r = a[i].clone();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let inv = aug[row][col].recip();
        for x in aug[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m {
            if r != row && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=n {
                    let t = &f * &aug[row][c];
                    aug[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    if aug[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

pub fn rank_dense(a: &[Vec<Q>]) -> usize {
    let vs: Vec<SVec> = a.iter().map(|r| sv_from_dense(r)).collect();
    rank_of(&vs)
}

pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut cols = vec![vec![Q::zero(); n]; n];
    for j in 0..n {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        let x = solve(a, &e)?;
        for i in 0..n {
            cols[i][j] = x[i].clone();
        }
    }
    if rank_dense(a) < n {
        return None;
    }
    Some(cols)
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Largest 62-bit prime, used for quick nonsingularity certificates.
pub const PRIME: u64 = 4_611_686_018_427_387_847;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn to_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.try_into().unwrap_or(0)
}

/// Determinant modulo a prime. Nonzero certifies nonzero over the integers.
pub fn det_mod_p(m: &[Vec<BigInt>], p: u64) -> u64 {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|r| r.iter().map(|x| to_mod(x, p)).collect())
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| a[r][k] != 0) else {
            return 0;
        };
        if r != k {
            a.swap(r, k);
            det = (p - det) % p;
        }
        det = mulmod(det, a[k][k], p);
        let inv = powmod(a[k][k], p - 2, p);
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let f = mulmod(a[i][k], inv, p);
            for j in k..n {
                let t = mulmod(f, a[k][j], p);
                a[i][j] = (a[i][j] + p - t) % p;
            }
        }
    }
    det
}

/// Clears denominators of a rational vector, returning a primitive integer vector.
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn abs_max(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qv};

    #[test]
    fn kernel_of_dependent_columns() {
        let cols: Vec<SVec> = vec![
            sv_from_dense(&qv(&[1, 2])),
            sv_from_dense(&qv(&[2, 4])),
            sv_from_dense(&qv(&[0, 1])),
        ];
        let k = kernel_of_columns(&cols);
        assert_eq!(k.len(), 1);
        let x = sv_to_dense(&k[0], 3);
        assert_eq!(&x[0] * q(1) + &x[1] * q(2), q(0));
    }

    #[test]
    fn bareiss_matches_mod_p() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![2.into(), 3.into(), 1.into()],
            vec![4.into(), 1.into(), 5.into()],
            vec![7.into(), 2.into(), 2.into()],
        ];
        let d = det_bareiss(m.clone());
        assert_eq!(d, BigInt::from(2 * (2 - 10) - 3 * (8 - 35) + (8 - 7)));
        assert_eq!(det_mod_p(&m, PRIME), to_mod(&d, PRIME));
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![qv(&[1, 1]), qv(&[2, 2])];
        assert!(solve(&a, &qv(&[1, 3])).is_none());
        assert!(solve(&a, &qv(&[1, 2])).is_some());
    }
}
