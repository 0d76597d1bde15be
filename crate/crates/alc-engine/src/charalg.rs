//! Character arithmetic for the Levi factor: Freudenthal multiplicities,
//! Klimyk tensor products, symmetric and exterior squares.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::parabolic::ParabolicData;
use crate::rational::{serde_qvec, Q};
use crate::rootsys::{DynkinType, IWeight};

/// Weight multiset of a Levi module.
pub type WeightCharacter = BTreeMap<IWeight, u64>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrrepLabel {
    /// Full g-weight of the highest weight vector.
    pub weight: IWeight,
    #[serde(with = "serde_qvec")]
    pub central: Vec<Q>,
}

impl IrrepLabel {
    pub fn new(pd: &ParabolicData, weight: IWeight) -> Self {
        let central = pd.central_coords_int(&weight);
        IrrepLabel { weight, central }
    }

    /// Coefficients over the uncrossed nodes.
    pub fn levi_coords(&self, pd: &ParabolicData) -> Vec<i64> {
        pd.levi.iter().map(|&j| self.weight[j]).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub entries: BTreeMap<IrrepLabel, u64>,
}

#[derive(Serialize, Deserialize)]
struct DecompEntry {
    #[serde(with = "serde_qvec")]
    weight: Vec<Q>,
    #[serde(with = "serde_qvec")]
    central: Vec<Q>,
    mult: u64,
    dim: u64,
}

impl Decomposition {
    pub fn add(&mut self, l: IrrepLabel, m: u64) {
        *self.entries.entry(l).or_insert(0) += m;
    }

    /// Number of components counted with multiplicity.
    pub fn count(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn dim(&self, pd: &ParabolicData) -> u64 {
        self.entries.iter().map(|(l, m)| m * pd.levi_dim(&l.weight)).sum()
    }

    pub fn to_json(&self, pd: &ParabolicData) -> serde_json::Value {
        let v: Vec<DecompEntry> = self
            .entries
            .iter()
            .map(|(l, m)| DecompEntry {
                weight: l.weight.iter().map(|&x| crate::rational::q(x)).collect(),
                central: l.central.clone(),
                mult: *m,
                dim: pd.levi_dim(&l.weight),
            })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }
}

type CacheKey = (DynkinType, Vec<usize>, IWeight);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<WeightCharacter>>> {
    static C: OnceLock<RwLock<HashMap<CacheKey, Arc<WeightCharacter>>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// All weights of the irreducible Levi module with highest weight `lam`.
pub fn freudenthal(pd: &ParabolicData, lam: &[i64]) -> Result<Arc<WeightCharacter>> {
    if !pd.is_levi_dominant(lam) {
        return Err(EngineError::NotDominant(format!("{lam:?}")));
    }
    let key = (pd.dynkin(), pd.levi.clone(), lam.to_vec());
    if let Some(c) = cache().read().expect("cache lock").get(&key) {
        return Ok(c.clone());
    }
    let ch = Arc::new(freudenthal_uncached(pd, lam));
    cache().write().expect("cache lock").insert(key, ch.clone());
    Ok(ch)
}

fn freudenthal_uncached(pd: &ParabolicData, lam: &[i64]) -> WeightCharacter {
    let rs = &pd.rs;
    let l = rs.rank();
    let pos: Vec<IWeight> = rs
        .subsystem_roots(&pd.levi)
        .into_iter()
        .map(|k| rs.root_weights[k].clone())
        .collect();
    let mut two_rho = vec![0i64; l];
    for r in &pos {
        for i in 0..l {
            two_rho[i] += r[i];
        }
    }
    let simple: Vec<IWeight> = pd.levi.iter().map(|&j| rs.simple_root_weight(j)).collect();
    let mut mult: HashMap<IWeight, u64> = HashMap::new();
    mult.insert(lam.to_vec(), 1);
    let mut level: Vec<IWeight> = vec![lam.to_vec()];
    let lam_plus: IWeight = (0..l).map(|i| lam[i] + two_rho[i]).collect();
    while !level.is_empty() {
        let mut next: HashSet<IWeight> = HashSet::new();
        for mu in &level {
            for a in &simple {
                next.insert((0..l).map(|i| mu[i] - a[i]).collect());
            }
        }
        let mut next_level = Vec::new();
        for nu in next {
            // (lam - nu, lam + nu + 2 rho')
            let diff: IWeight = (0..l).map(|i| lam[i] - nu[i]).collect();
            let sum: IWeight = (0..l).map(|i| lam_plus[i] + nu[i]).collect();
            let den = rs.ip_num(&diff, &sum);
            let mut num: i128 = 0;
            for b in &pos {
                let mut w: IWeight = nu.clone();
                loop {
                    for i in 0..l {
                        w[i] += b[i];
                    }
                    match mult.get(&w) {
                        Some(&m) => num += 2 * m as i128 * rs.ip_num(&w, b),
                        None => break,
                    }
                }
            }
            if num == 0 {
                continue;
            }
            debug_assert!(den > 0 && num % den == 0);
            let m = (num / den) as u64;
            if m > 0 {
                mult.insert(nu.clone(), m);
                next_level.push(nu);
            }
        }
        level = next_level;
    }
    mult.into_iter().collect()
}

/// Klimyk: components of V_lam (x) (module with character `ch`).
pub fn klimyk(pd: &ParabolicData, lam: &[i64], ch: &WeightCharacter) -> Decomposition {
    let l = pd.rank();
    let mut acc: HashMap<IWeight, i64> = HashMap::new();
    for (nu, m) in ch {
        let shifted: IWeight = (0..l).map(|i| lam[i] + nu[i] + pd.rho_levi[i]).collect();
        let (dom, sign) = pd.rs.dominant_conjugate_in(&shifted, &pd.levi);
        if sign == 0 {
            continue;
        }
        let hw: IWeight = (0..l).map(|i| dom[i] - pd.rho_levi[i]).collect();
        *acc.entry(hw).or_insert(0) += sign as i64 * *m as i64;
    }
    let mut d = Decomposition::default();
    for (w, m) in acc {
        assert!(m >= 0, "negative Klimyk multiplicity");
        if m > 0 {
            d.add(IrrepLabel::new(pd, w), m as u64);
        }
    }
    d
}

pub fn tensor_decompose(pd: &ParabolicData, lam: &[i64], mu: &[i64]) -> Result<Decomposition> {
    let (a, b) = if pd.levi_dim(mu) <= pd.levi_dim(lam) { (lam, mu) } else { (mu, lam) };
    let ch = freudenthal(pd, b)?;
    if !pd.is_levi_dominant(a) {
        return Err(EngineError::NotDominant(format!("{a:?}")));
    }
    Ok(klimyk(pd, a, &ch))
}

/// Splits a genuine character into irreducibles by peeling off maximal weights.
pub fn greedy_decompose(pd: &ParabolicData, ch: &WeightCharacter) -> Result<Decomposition> {
    let mut res: HashMap<IWeight, i64> = ch.iter().map(|(w, m)| (w.clone(), *m as i64)).collect();
    let two_rho: Vec<i64> = {
        let l = pd.rank();
        let mut v = vec![0; l];
        for k in pd.rs.subsystem_roots(&pd.levi) {
            for i in 0..l {
                v[i] += pd.rs.root_weights[k][i];
            }
        }
        v
    };
    let mut d = Decomposition::default();
    loop {
        res.retain(|_, m| *m != 0);
        let Some(top) = res
            .keys()
            .max_by(|a, b| {
                pd.rs
                    .ip_num(a, &two_rho)
                    .cmp(&pd.rs.ip_num(b, &two_rho))
                    .then_with(|| a.cmp(b))
            })
            .cloned()
        else {
            break;
        };
        let m = res[&top];
        if m < 0 || !pd.is_levi_dominant(&top) {
            return Err(EngineError::Consistency(format!("not a character: leading weight {top:?}")));
        }
        let sub = freudenthal(pd, &top)?;
        for (w, k) in sub.iter() {
            *res.entry(w.clone()).or_insert(0) -= m * *k as i64;
        }
        d.add(IrrepLabel::new(pd, top), m as u64);
    }
    Ok(d)
}

fn expand(pd: &ParabolicData, parts: &[IWeight]) -> Result<Vec<Vec<IWeight>>> {
    parts
        .iter()
        .map(|p| {
            let ch = freudenthal(pd, p)?;
            let mut v = Vec::new();
            for (w, m) in ch.iter() {
                for _ in 0..*m {
                    v.push(w.clone());
                }
            }
            Ok(v)
        })
        .collect()
}

fn add(a: &[i64], b: &[i64]) -> IWeight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn square_character(pd: &ParabolicData, parts: &[IWeight], strict: bool) -> Result<WeightCharacter> {
    let ws = expand(pd, parts)?;
    let all: Vec<&IWeight> = ws.iter().flatten().collect();
    let mut ch = WeightCharacter::new();
    for i in 0..all.len() {
        let start = if strict { i + 1 } else { i };
        for j in start..all.len() {
            *ch.entry(add(all[i], all[j])).or_insert(0) += 1;
        }
    }
    Ok(ch)
}

/// S^2 of the direct sum of the given irreducibles.
pub fn sym2_decompose(pd: &ParabolicData, parts: &[IWeight]) -> Result<Decomposition> {
    greedy_decompose(pd, &square_character(pd, parts, false)?)
}

/// Lambda^2 of the direct sum of the given irreducibles.
pub fn alt2_decompose(pd: &ParabolicData, parts: &[IWeight]) -> Result<Decomposition> {
    greedy_decompose(pd, &square_character(pd, parts, true)?)
}

/// Determinant character: the sum of all weights.
pub fn top_exterior_weight(pd: &ParabolicData, parts: &[IWeight]) -> Result<IWeight> {
    let mut s = vec![0i64; pd.rank()];
    for p in parts {
        for (w, m) in freudenthal(pd, p)?.iter() {
            for i in 0..s.len() {
                s[i] += w[i] * *m as i64;
            }
        }
    }
    Ok(s)
}

/// Character of a dual module.
pub fn dual_character(ch: &WeightCharacter) -> WeightCharacter {
    ch.iter().map(|(w, m)| (w.iter().map(|x| -x).collect(), *m)).collect()
}

pub fn character_dim(ch: &WeightCharacter) -> u64 {
    ch.values().sum()
}
