//! Gradings from crossed nodes, growth vectors, central projections and
//! diagram automorphisms.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::error::{EngineError, Result};
use crate::linalg;
use crate::rational::{fmt_q, q, Q};
use crate::rootsys::{DynkinType, IWeight, RootSystem, Weight};

#[derive(Clone, Debug)]
pub struct ParabolicData {
    pub rs: Arc<RootSystem>,
    /// Crossed nodes, 0-based, sorted.
    pub sigma0: Vec<usize>,
    /// Uncrossed nodes, 0-based, sorted.
    pub levi: Vec<usize>,
    /// k -> dim g_k for k >= 1 (equal to dim g_{-k}).
    pub grading: BTreeMap<usize, usize>,
    pub depth: usize,
    /// alpha^0 for alpha in sigma0, fundamental coordinates.
    pub central_basis: Vec<Weight>,
    central_gram_inv: Vec<Vec<Q>>,
    levi_gram_inv: Vec<Vec<Q>>,
    pub rho_prime: Weight,
    /// Sum of the uncrossed fundamental weights; same dot action as rho'.
    pub rho_levi: IWeight,
}

/// Crossed height of a positive root.
pub fn sigma_height(root: &[i64], sigma0: &[usize]) -> i64 {
    sigma0.iter().map(|&a| root[a]).sum()
}

pub fn grading(rs: Arc<RootSystem>, sigma0: &[usize]) -> Result<ParabolicData> {
    let l = rs.rank();
    let mut s: Vec<usize> = sigma0.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(EngineError::InvalidNodes("no crossed node".into()));
    }
    if let Some(&bad) = s.iter().find(|&&a| a >= l) {
        return Err(EngineError::InvalidNodes(format!("node {} out of range for {}", bad + 1, rs.dynkin)));
    }
    let levi: Vec<usize> = (0..l).filter(|i| !s.contains(i)).collect();
    let mut grading = BTreeMap::new();
    for r in &rs.positive_roots {
        let h = sigma_height(r, &s) as usize;
        if h > 0 {
            *grading.entry(h).or_insert(0) += 1;
        }
    }
    let depth = grading.keys().copied().max().unwrap_or(0);

    // Orthogonal projection onto the span of uncrossed simple roots.
    let levi_gram: Vec<Vec<Q>> = levi
        .iter()
        .map(|&i| levi.iter().map(|&j| q(rs.symmetrizer[i] * rs.cartan[i][j])).collect())
        .collect();
    let levi_gram_inv = if levi.is_empty() { Vec::new() } else { linalg::inverse(&levi_gram).expect("levi gram invertible") };

    let mut pd = ParabolicData {
        rs: rs.clone(),
        sigma0: s.clone(),
        levi: levi.clone(),
        grading,
        depth,
        central_basis: Vec::new(),
        central_gram_inv: Vec::new(),
        levi_gram_inv,
        rho_prime: vec![Q::zero(); l],
        rho_levi: (0..l).map(|i| if levi.contains(&i) { 1 } else { 0 }).collect(),
    };
    let central_basis: Vec<Weight> = s
        .iter()
        .map(|&a| {
            let w: Weight = rs.simple_root_weight(a).iter().map(|&x| q(x)).collect();
            let lp = pd.levi_part(&w);
            w.iter().zip(lp.iter()).map(|(x, y)| x - y).collect()
        })
        .collect();
    let gram: Vec<Vec<Q>> = central_basis
        .iter()
        .map(|a| central_basis.iter().map(|b| rs.ip(a, b)).collect())
        .collect();
    pd.central_gram_inv = linalg::inverse(&gram).ok_or_else(|| EngineError::Singular("central gram".into()))?;
    pd.central_basis = central_basis;
    let mut rho = vec![Q::zero(); l];
    for k in rs.subsystem_roots(&levi) {
        for (i, x) in rs.root_weights[k].iter().enumerate() {
            rho[i] += q(*x);
        }
    }
    pd.rho_prime = rho.into_iter().map(|x| x / q(2)).collect();
    Ok(pd)
}

impl ParabolicData {
    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn dynkin(&self) -> DynkinType {
        self.rs.dynkin
    }

    /// Position of a crossed node inside `sigma0`.
    pub fn cross_pos(&self, node: usize) -> Option<usize> {
        self.sigma0.iter().position(|&a| a == node)
    }

    pub fn growth_vector(&self) -> Vec<usize> {
        let mut acc = 0;
        (1..=self.depth)
            .map(|k| {
                acc += self.grading.get(&k).copied().unwrap_or(0);
                acc
            })
            .collect()
    }

    /// dim of g_0 (Levi plus Cartan).
    pub fn dim_g0(&self) -> usize {
        self.rank() + 2 * self.rs.subsystem_roots(&self.levi).len()
    }

    /// Orthogonal projection onto the span of the uncrossed simple roots.
    pub fn levi_part(&self, w: &[Q]) -> Weight {
        let l = self.rank();
        let mut out = vec![Q::zero(); l];
        if self.levi.is_empty() {
            return out;
        }
        // (w, alpha_j) = w_j d_j
        let rhs: Vec<Q> = self.levi.iter().map(|&j| &w[j] * q(self.rs.symmetrizer[j])).collect();
        for (a, &i) in self.levi.iter().enumerate() {
            let c: Q = (0..self.levi.len()).map(|b| &self.levi_gram_inv[a][b] * &rhs[b]).sum();
            if c.is_zero() {
                continue;
            }
            for (k, x) in out.iter_mut().enumerate() {
                *x += &c * q(self.rs.cartan[k][i]);
            }
        }
        out
    }

    /// Coefficients of the central part of `w` in the basis {alpha^0}.
    pub fn central_coords(&self, w: &[Q]) -> Vec<Q> {
        let rhs: Vec<Q> = self.central_basis.iter().map(|b| self.rs.ip(w, b)).collect();
        let n = rhs.len();
        (0..n)
            .map(|a| (0..n).map(|b| &self.central_gram_inv[a][b] * &rhs[b]).sum())
            .collect()
    }

    pub fn central_coords_int(&self, w: &[i64]) -> Vec<Q> {
        let wq: Weight = w.iter().map(|&x| q(x)).collect();
        self.central_coords(&wq)
    }

    /// Fundamental coordinates of a central weight given in the {alpha^0} basis.
    pub fn central_to_weight(&self, c: &[Q]) -> Weight {
        let l = self.rank();
        let mut out = vec![Q::zero(); l];
        for (coef, b) in c.iter().zip(&self.central_basis) {
            for k in 0..l {
                out[k] += coef * &b[k];
            }
        }
        out
    }

    /// Splits `w` into (levi part, central coordinates).
    pub fn central_projection(&self, w: &[Q]) -> (Weight, Vec<Q>) {
        (self.levi_part(w), self.central_coords(w))
    }

    pub fn is_levi_dominant(&self, w: &[i64]) -> bool {
        self.levi.iter().all(|&j| w[j] >= 0)
    }

    /// Levi-dominant conjugate of -w: the label of the dual module.
    pub fn dual_label(&self, w: &[i64]) -> IWeight {
        let neg: IWeight = w.iter().map(|x| -x).collect();
        self.rs.dominant_conjugate_in(&neg, &self.levi).0
    }

    pub fn levi_dim(&self, w: &[i64]) -> u64 {
        self.rs.levi_dim(w, &self.levi)
    }

    /// Paper-style notation, 1-based nodes.
    pub fn notation(&self) -> String {
        let nodes: Vec<String> = self.sigma0.iter().map(|a| (a + 1).to_string()).collect();
        format!("{}:x@{}", self.rs.dynkin, nodes.join(","))
    }
}

/// Parses "B3:x@3" or "F4:x@2,4" into a type and 0-based crossed nodes.
pub fn parse_diagram(s: &str) -> Result<(DynkinType, Vec<usize>)> {
    let (t, rest) = s
        .split_once(':')
        .ok_or_else(|| EngineError::Parse(format!("expected TYPE:x@nodes, got {s:?}")))?;
    let t: DynkinType = t.parse()?;
    let nodes = rest
        .trim()
        .strip_prefix("x@")
        .ok_or_else(|| EngineError::Parse(format!("expected x@ after ':' in {s:?}")))?;
    let mut out = Vec::new();
    for part in nodes.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| EngineError::Parse(format!("bad node {part:?} in {s:?}")))?;
        if n == 0 || n > t.rank {
            return Err(EngineError::InvalidNodes(format!("node {n} out of range for {t}")));
        }
        out.push(n - 1);
    }
    out.sort_unstable();
    out.dedup();
    Ok((t, out))
}

/// Node permutations preserving the Cartan matrix.
pub fn diagram_automorphisms(rs: &RootSystem) -> Vec<Vec<usize>> {
    let l = rs.rank();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; l];
    let mut used = vec![false; l];
    fn extend(rs: &RootSystem, k: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let l = rs.rank();
        if k == l {
            out.push(perm.clone());
            return;
        }
        for img in 0..l {
            if used[img] {
                continue;
            }
            let ok = (0..k).all(|j| rs.cartan[k][j] == rs.cartan[img][perm[j]] && rs.cartan[j][k] == rs.cartan[perm[j]][img]);
            if ok && rs.symmetrizer[k] == rs.symmetrizer[img] {
                perm[k] = img;
                used[img] = true;
                extend(rs, k + 1, perm, used, out);
                used[img] = false;
            }
        }
    }
    extend(rs, 0, &mut perm, &mut used, &mut out);
    out
}

pub fn strong_alc_symmetry(pd: &ParabolicData, a: usize, b: usize) -> Result<bool> {
    if !pd.sigma0.contains(&a) || !pd.sigma0.contains(&b) {
        return Err(EngineError::InvalidNodes(format!("nodes {} and {} must both be crossed", a + 1, b + 1)));
    }
    Ok(diagram_automorphisms(&pd.rs).iter().any(|p| {
        p[a] == b && p[b] == a && pd.sigma0.iter().all(|x| pd.sigma0.contains(&p[*x]))
    }))
}

/// Lexicographically least image of `sigma0` under diagram automorphisms,
/// together with every automorphism attaining it.
pub fn canonical_sigma0(rs: &RootSystem, sigma0: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let autos = diagram_automorphisms(rs);
    let image = |p: &Vec<usize>| {
        let mut v: Vec<usize> = sigma0.iter().map(|&x| p[x]).collect();
        v.sort_unstable();
        v
    };
    let best = autos.iter().map(image).min().expect("identity present");
    let attaining = autos.into_iter().filter(|p| image(p) == best).collect();
    (best, attaining)
}

pub fn permute_weight(w: &[i64], p: &[usize]) -> IWeight {
    let mut out = vec![0; w.len()];
    for (i, &x) in w.iter().enumerate() {
        out[p[i]] = x;
    }
    out
}

/// Two-line ASCII picture: labels over nodes, `x` marks crossed nodes.
/// Branch nodes of D and E are listed after the main chain.
pub fn render(pd: &ParabolicData, labels: Option<&[Q]>) -> String {
    let t = pd.dynkin();
    let l = t.rank;
    let (chain, extra): (Vec<usize>, Vec<(usize, usize)>) = match t.family {
        crate::rootsys::Family::D => ((0..l - 1).collect(), vec![(l - 1, l - 3)]),
        crate::rootsys::Family::E => {
            let mut c = vec![0];
            c.extend(2..l);
            (c, vec![(1, 3)])
        }
        _ => ((0..l).collect(), vec![]),
    };
    let bond = |i: usize, j: usize| match (pd.rs.cartan[i][j], pd.rs.cartan[j][i]) {
        (-1, -1) => "---",
        (-2, -1) | (-3, -1) => "-<-",
        (-1, -2) | (-1, -3) => "->-",
        _ => "   ",
    };
    let lab = |i: usize| -> String {
        match labels {
            Some(v) if !v[i].is_zero() => fmt_q(&v[i]),
            _ => String::new(),
        }
    };
    let sym = |i: usize| if pd.sigma0.contains(&i) { "x" } else { "o" };
    let mut top = String::new();
    let mut bot = String::new();
    for (k, &i) in chain.iter().enumerate() {
        if k > 0 {
            let b = bond(chain[k - 1], i);
            top.push_str("   ");
            bot.push_str(b);
        }
        let s = lab(i);
        let w = s.len().max(1);
        top.push_str(&format!("{s:^w$}"));
        bot.push_str(&format!("{:^w$}", sym(i)));
    }
    for (node, attach) in extra {
        let s = lab(node);
        bot.push_str(&format!("   [{}{} on {}]", sym(node), if s.is_empty() { String::new() } else { format!("({s})") }, attach + 1));
    }
    format!("{}\n{}", top.trim_end(), bot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build_root_system;

    fn pd(s: &str) -> ParabolicData {
        let (t, n) = parse_diagram(s).unwrap();
        grading(Arc::new(build_root_system(t).unwrap()), &n).unwrap()
    }

    #[test]
    fn dimension_bookkeeping() {
        for s in ["A5:x@2", "B4:x@1,3", "E7:x@4", "F4:x@2,4", "G2:x@1"] {
            let p = pd(s);
            let pos: usize = p.grading.values().sum();
            assert_eq!(p.dim_g0() + 2 * pos, p.dynkin().dim(), "{s}");
        }
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        let p = pd("E6:x@2,5");
        let w: Weight = [3, -1, 2, 0, -4, 1].iter().map(|&x| q(x)).collect();
        let (lp, c) = p.central_projection(&w);
        let back = p.central_to_weight(&c);
        for k in 0..6 {
            assert_eq!(&lp[k] + &back[k], w[k]);
        }
        assert_eq!(p.levi_part(&lp), lp);
        for &j in &p.levi {
            let a: Weight = p.rs.simple_root_weight(j).iter().map(|&x| q(x)).collect();
            assert!(p.rs.ip(&back, &a).is_zero());
        }
        for b in &p.central_basis {
            assert!(p.rs.ip(&lp, b).is_zero());
        }
    }

    #[test]
    fn parse_rejects_bad_nodes() {
        assert!(parse_diagram("B3:x@4").is_err());
        assert!(parse_diagram("B3x@1").is_err());
        assert_eq!(parse_diagram("A7:x@6,2").unwrap().1, vec![1, 5]);
    }
}
