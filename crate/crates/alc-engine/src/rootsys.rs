//! Cartan data, positive roots and the invariant form for the simple types.
//!
//! Conventions: `cartan[i][j] = <alpha_i^vee, alpha_j>`, so the simple root
//! `alpha_j` has fundamental coordinates given by column `j`. Short roots have
//! squared length 2 and `(alpha_i, alpha_i) = 2 d_i`. D has its fork on the
//! last two nodes, E uses Bourbaki numbering, F4 and G2 put short roots first.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::linalg;
use crate::rational::{q, Q};

/// Weight in fundamental-weight coordinates.
pub type Weight = Vec<Q>;
/// Integral weight in fundamental-weight coordinates.
pub type IWeight = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DynkinType {
    pub family: Family,
    pub rank: usize,
}

impl DynkinType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let bad = |bound| {
            Err(EngineError::InvalidRank {
                family: family.letter(),
                rank,
                bound,
            })
        };
        match family {
            Family::A if rank < 1 => bad("rank >= 1"),
            Family::B | Family::C if rank < 2 => bad("rank >= 2"),
            Family::D if rank < 4 => bad("rank >= 4"),
            Family::E if !(6..=8).contains(&rank) => bad("rank in {6,7,8}"),
            Family::F if rank != 4 => bad("rank = 4"),
            Family::G if rank != 2 => bad("rank = 2"),
            _ => Ok(DynkinType { family, rank }),
        }
    }

    /// Number of positive roots.
    pub fn positive_root_count(&self) -> usize {
        let l = self.rank;
        match self.family {
            Family::A => l * (l + 1) / 2,
            Family::B | Family::C => l * l,
            Family::D => l * (l - 1),
            Family::E => match l {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.positive_root_count() + self.rank
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| EngineError::InvalidType(s.to_string()))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| EngineError::InvalidType(s.to_string()))?;
        DynkinType::new(fam, rank)
    }
}

fn cartan_matrix(t: DynkinType) -> (Vec<Vec<i64>>, Vec<i64>) {
    let l = t.rank;
    let mut a = vec![vec![0i64; l]; l];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    let mut d = vec![1i64; l];
    match t.family {
        Family::A => {
            for i in 0..l - 1 {
                link(i, i + 1, -1, -1);
            }
        }
        Family::B => {
            for i in 0..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 2, l - 1, -1, -2);
            d = vec![2; l];
            d[l - 1] = 1;
        }
        Family::C => {
            for i in 0..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 2, l - 1, -2, -1);
            d[l - 1] = 2;
        }
        Family::D => {
            for i in 0..l - 2 {
                link(i, i + 1, -1, -1);
            }
            link(l - 3, l - 1, -1, -1);
        }
        Family::E => {
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            for i in 2..l - 1 {
                link(i, i + 1, -1, -1);
            }
        }
        Family::F => {
            link(0, 1, -1, -1);
            link(1, 2, -2, -1);
            link(2, 3, -1, -1);
            d = vec![1, 1, 2, 2];
        }
        Family::G => {
            link(0, 1, -3, -1);
            d = vec![1, 3];
        }
    }
    (a, d)
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub dynkin: DynkinType,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
    /// Positive roots in simple-root coordinates, ordered by height then lexicographically.
    pub positive_roots: Vec<Vec<i64>>,
    /// The same roots in fundamental-weight coordinates.
    pub root_weights: Vec<IWeight>,
    /// Column j holds omega_j in simple-root coordinates.
    pub fundamental_weights: Vec<Vec<Q>>,
    pub rho: Weight,
    root_index: HashMap<Vec<i64>, usize>,
    /// Gram matrix of fundamental weights scaled by `gram_den`.
    gram_num: Vec<Vec<i64>>,
    gram_den: i64,
}

pub fn build_root_system(dynkin: DynkinType) -> Result<RootSystem> {
    let t = DynkinType::new(dynkin.family, dynkin.rank)?;
    RootSystem::new(t)
}

impl RootSystem {
    pub fn new(dynkin: DynkinType) -> Result<Self> {
        let (cartan, symmetrizer) = cartan_matrix(dynkin);
        let l = dynkin.rank;
        for i in 0..l {
            for j in 0..l {
                if symmetrizer[i] * cartan[i][j] != symmetrizer[j] * cartan[j][i] {
                    return Err(EngineError::Consistency("Cartan matrix not symmetrizable".into()));
                }
            }
        }
        // Closure by root strings.
        let mut roots: Vec<Vec<i64>> = (0..l)
            .map(|i| {
                let mut v = vec![0; l];
                v[i] = 1;
                v
            })
            .collect();
        let mut index: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();
        let mut k = 0;
        while k < roots.len() {
            let r = roots[k].clone();
            for i in 0..l {
                let pairing: i64 = (0..l).map(|j| cartan[i][j] * r[j]).sum();
                let mut p = 0;
                let mut down = r.clone();
                loop {
                    down[i] -= 1;
                    if index.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pairing > 0 {
                    let mut up = r.clone();
                    up[i] += 1;
                    if !index.contains_key(&up) {
                        index.insert(up.clone(), roots.len());
                        roots.push(up);
                    }
                }
            }
            k += 1;
        }
        roots.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        if roots.len() != dynkin.positive_root_count() {
            return Err(EngineError::Consistency(format!(
                "{} positive roots generated for {}, expected {}",
                roots.len(),
                dynkin,
                dynkin.positive_root_count()
            )));
        }
        let root_index = roots.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();
        let root_weights = roots
            .iter()
            .map(|r| (0..l).map(|i| (0..l).map(|j| cartan[i][j] * r[j]).sum()).collect())
            .collect();
        let aq: Vec<Vec<Q>> = cartan.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let inv = linalg::inverse(&aq).expect("Cartan matrix is invertible");
        // (omega_j, omega_k) = d_j (A^{-1})_{jk}
        let gram: Vec<Vec<Q>> = (0..l)
            .map(|j| (0..l).map(|k| q(symmetrizer[j]) * &inv[j][k]).collect())
            .collect();
        let mut den = BigInt::one();
        for row in &gram {
            for x in row {
                den = num::integer::lcm(den, x.denom().clone());
            }
        }
        let gram_den = den.to_i64().expect("small denominator");
        let gram_num = gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x * q(gram_den)).to_integer().to_i64().unwrap())
                    .collect()
            })
            .collect();
        Ok(RootSystem {
            dynkin,
            cartan,
            symmetrizer,
            positive_roots: roots,
            root_weights,
            fundamental_weights: inv,
            rho: vec![q(1); l],
            root_index,
            gram_num,
            gram_den,
        })
    }

    pub fn rank(&self) -> usize {
        self.dynkin.rank
    }

    /// Index of a positive root given in simple-root coordinates.
    pub fn root_index(&self, r: &[i64]) -> Option<usize> {
        self.root_index.get(r).copied()
    }

    pub fn is_root(&self, r: &[i64]) -> bool {
        if r.iter().all(|&x| x <= 0) {
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            self.root_index.contains_key(&neg)
        } else {
            self.root_index.contains_key(r)
        }
    }

    /// Simple root alpha_j in fundamental coordinates.
    pub fn simple_root_weight(&self, j: usize) -> IWeight {
        (0..self.rank()).map(|i| self.cartan[i][j]).collect()
    }

    /// Fundamental coordinates of a combination of simple roots.
    pub fn root_to_weight(&self, c: &[i64]) -> IWeight {
        let l = self.rank();
        (0..l).map(|i| (0..l).map(|j| self.cartan[i][j] * c[j]).sum()).collect()
    }

    /// Simple-root coordinates of a weight.
    pub fn weight_to_root_coords(&self, w: &[Q]) -> Vec<Q> {
        let l = self.rank();
        (0..l)
            .map(|i| (0..l).map(|j| &self.fundamental_weights[i][j] * &w[j]).sum())
            .collect()
    }

    /// Squared length of a positive root, index into `positive_roots`.
    pub fn root_length2(&self, k: usize) -> i64 {
        let c = &self.positive_roots[k];
        let w = &self.root_weights[k];
        // (beta, beta) = sum_j c_j d_j <beta, alpha_j^vee>
        (0..self.rank()).map(|j| c[j] * self.symmetrizer[j] * w[j]).sum()
    }

    pub fn inner_product(&self, a: &[Q], b: &[Q]) -> Result<Q> {
        let l = self.rank();
        if a.len() != l || b.len() != l {
            return Err(EngineError::DimensionMismatch {
                expected: l,
                got: if a.len() != l { a.len() } else { b.len() },
            });
        }
        Ok(self.ip(a, b))
    }

    /// Unchecked rational inner product.
    pub fn ip(&self, a: &[Q], b: &[Q]) -> Q {
        let l = self.rank();
        let mut s = Q::zero();
        for j in 0..l {
            if a[j].is_zero() {
                continue;
            }
            let mut t = Q::zero();
            for k in 0..l {
                if self.gram_num[j][k] != 0 && !b[k].is_zero() {
                    t += &b[k] * q(self.gram_num[j][k]);
                }
            }
            s += &a[j] * t;
        }
        s / q(self.gram_den)
    }

    /// Integer inner product scaled by `ip_den()`.
    pub fn ip_num(&self, a: &[i64], b: &[i64]) -> i128 {
        let l = self.rank();
        let mut s: i128 = 0;
        for j in 0..l {
            if a[j] == 0 {
                continue;
            }
            let mut t: i128 = 0;
            for k in 0..l {
                t += self.gram_num[j][k] as i128 * b[k] as i128;
            }
            s += a[j] as i128 * t;
        }
        s
    }

    pub fn ip_den(&self) -> i64 {
        self.gram_den
    }

    pub fn ip_int(&self, a: &[i64], b: &[i64]) -> Q {
        Q::new(BigInt::from(self.ip_num(a, b)), BigInt::from(self.gram_den))
    }

    /// Simple reflection s_i in fundamental coordinates.
    pub fn reflect(&self, w: &mut [i64], i: usize) {
        let c = w[i];
        if c == 0 {
            return;
        }
        for (k, x) in w.iter_mut().enumerate() {
            *x -= c * self.cartan[k][i];
        }
    }

    pub fn reflect_q(&self, w: &[Q], i: usize) -> Weight {
        let c = w[i].clone();
        w.iter()
            .enumerate()
            .map(|(k, x)| x - &c * q(self.cartan[k][i]))
            .collect()
    }

    /// Dominant conjugate under the reflections in `nodes`, with the sign of the
    /// word; the sign is 0 when the image lies on a wall.
    pub fn dominant_conjugate_in(&self, w: &[i64], nodes: &[usize]) -> (IWeight, i32) {
        let mut v = w.to_vec();
        let mut sign = 1;
        while let Some(&i) = nodes.iter().find(|&&i| v[i] < 0) {
            self.reflect(&mut v, i);
            sign = -sign;
        }
        if nodes.iter().any(|&i| v[i] == 0) {
            sign = 0;
        }
        (v, sign)
    }

    pub fn all_nodes(&self) -> Vec<usize> {
        (0..self.rank()).collect()
    }

    /// Dominant conjugate under the full Weyl group.
    pub fn dominant_conjugate(&self, w: &[Q]) -> (Weight, i32) {
        let mut v = w.to_vec();
        let mut sign = 1;
        let mut on_wall = false;
        while let Some(i) = (0..self.rank()).find(|&i| v[i].is_negative()) {
            v = self.reflect_q(&v, i);
            sign = -sign;
        }
        if v.iter().any(|x| x.is_zero()) {
            on_wall = true;
        }
        (v, if on_wall { 0 } else { sign })
    }

    /// Dimension of the irreducible g-module of highest weight `lam`.
    pub fn weyl_dim(&self, lam: &[Q]) -> Result<u64> {
        let l = self.rank();
        if lam.len() != l {
            return Err(EngineError::DimensionMismatch { expected: l, got: lam.len() });
        }
        let mut ints = Vec::with_capacity(l);
        for x in lam {
            if !x.is_integer() {
                return Err(EngineError::NotIntegral(crate::rational::fmt_qvec(lam)));
            }
            let v = x.to_integer().to_i64().unwrap();
            if v < 0 {
                return Err(EngineError::NotDominant(crate::rational::fmt_qvec(lam)));
            }
            ints.push(v);
        }
        Ok(self.levi_dim(&ints, &self.all_nodes()))
    }

    /// Positive roots supported on `nodes` (indices into `positive_roots`).
    pub fn subsystem_roots(&self, nodes: &[usize]) -> Vec<usize> {
        (0..self.positive_roots.len())
            .filter(|&k| {
                self.positive_roots[k]
                    .iter()
                    .enumerate()
                    .all(|(j, &c)| c == 0 || nodes.contains(&j))
            })
            .collect()
    }

    /// Weyl dimension for the semisimple subsystem on `nodes`; `lam` is a full
    /// weight whose coordinates on `nodes` are nonnegative.
    pub fn levi_dim(&self, lam: &[i64], nodes: &[usize]) -> u64 {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for k in self.subsystem_roots(nodes) {
            let c = &self.positive_roots[k];
            let mut a: i64 = 0;
            let mut b: i64 = 0;
            for &j in nodes {
                a += (lam[j] + 1) * c[j] * self.symmetrizer[j];
                b += c[j] * self.symmetrizer[j];
            }
            num *= a;
            den *= b;
        }
        (num / den).to_u64().expect("dimension fits in u64")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_all_types() {
        for s in ["A1", "A5", "B2", "B6", "C3", "C7", "D4", "D8", "E6", "E7", "E8", "F4", "G2"] {
            let t: DynkinType = s.parse().unwrap();
            let rs = build_root_system(t).unwrap();
            assert_eq!(rs.positive_roots.len(), t.positive_root_count(), "{s}");
        }
    }

    #[test]
    fn rank_bounds_rejected() {
        assert!("D3".parse::<DynkinType>().is_err());
        assert!("E9".parse::<DynkinType>().is_err());
        assert!("G3".parse::<DynkinType>().is_err());
        assert!("b3".parse::<DynkinType>().is_ok());
    }

    #[test]
    fn rho_pairs_to_symmetrizer() {
        let rs = build_root_system("F4".parse().unwrap()).unwrap();
        for i in 0..4 {
            let a: Vec<Q> = rs.simple_root_weight(i).iter().map(|&x| q(x)).collect();
            assert_eq!(rs.ip(&rs.rho, &a), q(rs.symmetrizer[i]));
        }
    }
}
