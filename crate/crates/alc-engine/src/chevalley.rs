//! Chevalley basis structure constants and explicit Levi modules.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charalg::{Decomposition, IrrepLabel};
use crate::error::{EngineError, Result};
use crate::linalg::{self, sv_collect, Echelon, SVec};
use crate::parabolic::{sigma_height, ParabolicData};
use crate::rational::{q, Q};
use crate::rootsys::{IWeight, RootSystem};

/// Signed root id: k+1 for positive root k, -(k+1) for its negative.
pub type SRoot = i64;

fn pos_index(r: SRoot) -> usize {
    (r.unsigned_abs() - 1) as usize
}

/// Sparse element of g with integer coordinates.
pub type Elem = Vec<(usize, i64)>;

fn elem_collect<I: IntoIterator<Item = (usize, i64)>>(terms: I) -> Elem {
    let mut m: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, c) in terms {
        *m.entry(i).or_insert(0) += c;
    }
    m.into_iter().filter(|(_, c)| *c != 0).collect()
}

#[derive(Clone, Debug)]
pub struct ChevalleyAlgebra {
    pub rs: Arc<RootSystem>,
    npos: usize,
    /// N_{r,s} for positive r, s with r+s a root.
    table: HashMap<(usize, usize), i64>,
    /// Extraspecial pair for each non-simple positive root.
    pub extraspecial: HashMap<usize, (usize, usize)>,
}

impl ChevalleyAlgebra {
    pub fn dim(&self) -> usize {
        2 * self.npos + self.rs.rank()
    }

    pub fn npos(&self) -> usize {
        self.npos
    }

    /// Basis index of the root vector e_r.
    pub fn root_basis(&self, r: SRoot) -> usize {
        if r > 0 {
            pos_index(r)
        } else {
            self.npos + pos_index(r)
        }
    }

    pub fn cartan_basis(&self, i: usize) -> usize {
        2 * self.npos + i
    }

    /// Signed root of a basis element, None for the Cartan part.
    pub fn basis_root(&self, x: usize) -> Option<SRoot> {
        if x < self.npos {
            Some(x as i64 + 1)
        } else if x < 2 * self.npos {
            Some(-((x - self.npos) as i64 + 1))
        } else {
            None
        }
    }

    pub fn root_coords(&self, r: SRoot) -> Vec<i64> {
        let c = &self.rs.positive_roots[pos_index(r)];
        if r > 0 {
            c.clone()
        } else {
            c.iter().map(|x| -x).collect()
        }
    }

    /// Weight of a basis element in fundamental coordinates.
    pub fn basis_weight(&self, x: usize) -> IWeight {
        match self.basis_root(x) {
            Some(r) => {
                let w = &self.rs.root_weights[pos_index(r)];
                if r > 0 {
                    w.clone()
                } else {
                    w.iter().map(|v| -v).collect()
                }
            }
            None => vec![0; self.rs.rank()],
        }
    }

    fn sroot_of(&self, c: &[i64]) -> Option<SRoot> {
        if c.iter().all(|&x| x >= 0) {
            self.rs.root_index(c).map(|k| k as i64 + 1)
        } else if c.iter().all(|&x| x <= 0) {
            let n: Vec<i64> = c.iter().map(|x| -x).collect();
            self.rs.root_index(&n).map(|k| -(k as i64 + 1))
        } else {
            None
        }
    }

    fn len2(&self, r: SRoot) -> i64 {
        self.rs.root_length2(pos_index(r))
    }

    fn sum_root(&self, r: SRoot, s: SRoot) -> Option<SRoot> {
        let a = self.root_coords(r);
        let b = self.root_coords(s);
        let c: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.sroot_of(&c)
    }

    /// N_{r,s}; zero when r+s is not a root.
    pub fn n(&self, r: SRoot, s: SRoot) -> i64 {
        let Some(rs_sum) = self.sum_root(r, s) else { return 0 };
        let t = -rs_sum;
        if r > 0 && s > 0 {
            return self.table[&(pos_index(r), pos_index(s))];
        }
        if r < 0 && s < 0 {
            return -self.n(-r, -s);
        }
        // r + s + t = 0: N_{r,s}/(t,t) = N_{s,t}/(r,r) = N_{t,r}/(s,s)
        let (num, den, val) = if r > 0 {
            if t > 0 {
                (self.len2(t), self.len2(s), self.n(t, r))
            } else {
                (self.len2(t), self.len2(r), self.n(s, t))
            }
        } else if t > 0 {
            (self.len2(t), self.len2(r), self.n(s, t))
        } else {
            (self.len2(t), self.len2(s), self.n(t, r))
        };
        let v = num * val;
        debug_assert_eq!(v % den, 0);
        v / den
    }

    /// Coroot h_r for a positive root r in the basis h_i.
    fn coroot(&self, k: usize) -> Elem {
        let c = &self.rs.positive_roots[k];
        let dr = self.rs.root_length2(k) / 2;
        elem_collect((0..self.rs.rank()).map(|i| {
            let v = c[i] * self.rs.symmetrizer[i];
            debug_assert_eq!(v % dr, 0);
            (self.cartan_basis(i), v / dr)
        }))
    }

    /// Bracket of two basis elements.
    pub fn bracket_basis(&self, x: usize, y: usize) -> Elem {
        match (self.basis_root(x), self.basis_root(y)) {
            (Some(r), Some(s)) => {
                if r == -s {
                    let h = self.coroot(pos_index(r));
                    if r > 0 {
                        h
                    } else {
                        h.into_iter().map(|(i, c)| (i, -c)).collect()
                    }
                } else {
                    match self.sum_root(r, s) {
                        Some(t) => vec![(self.root_basis(t), self.n(r, s))],
                        None => Vec::new(),
                    }
                }
            }
            (None, Some(s)) => {
                let i = x - 2 * self.npos;
                let w = self.basis_weight(y);
                let _ = s;
                if w[i] == 0 {
                    Vec::new()
                } else {
                    vec![(y, w[i])]
                }
            }
            (Some(_), None) => self.bracket_basis(y, x).into_iter().map(|(i, c)| (i, -c)).collect(),
            (None, None) => Vec::new(),
        }
    }

    pub fn bracket(&self, a: &Elem, b: &Elem) -> Elem {
        let mut terms = Vec::new();
        for (x, cx) in a {
            for (y, cy) in b {
                for (z, cz) in self.bracket_basis(*x, *y) {
                    terms.push((z, cx * cy * cz));
                }
            }
        }
        elem_collect(terms)
    }

    fn jacobi_triple(&self, x: usize, y: usize, z: usize) -> bool {
        let ex = vec![(x, 1)];
        let ey = vec![(y, 1)];
        let ez = vec![(z, 1)];
        let a = self.bracket(&ex, &self.bracket(&ey, &ez));
        let b = self.bracket(&ey, &self.bracket(&ez, &ex));
        let c = self.bracket(&ez, &self.bracket(&ex, &ey));
        elem_collect(a.into_iter().chain(b).chain(c)).is_empty()
    }

    /// Exhaustive Jacobi check for rank <= 4, `samples` random triples otherwise.
    pub fn check_jacobi(&self, samples: usize, seed: u64) -> Result<()> {
        let d = self.dim();
        let fail = |x, y, z| Err(EngineError::Consistency(format!("Jacobi fails on basis triple ({x},{y},{z})")));
        if self.rs.rank() <= 4 {
            for x in 0..d {
                for y in x + 1..d {
                    for z in y + 1..d {
                        if !self.jacobi_triple(x, y, z) {
                            return fail(x, y, z);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (x, y, z) = (rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d));
                if !self.jacobi_triple(x, y, z) {
                    return fail(x, y, z);
                }
            }
        }
        Ok(())
    }

    /// Killing form on basis elements: tr(ad x ad y).
    pub fn killing(&self, x: usize, y: usize) -> i64 {
        let mut tr = 0;
        for z in 0..self.dim() {
            let inner = self.bracket_basis(y, z);
            let outer = self.bracket(&vec![(x, 1)], &inner);
            tr += outer.iter().filter(|(i, _)| *i == z).map(|(_, c)| c).sum::<i64>();
        }
        tr
    }

    /// Invariant form normalised so that <e_r, e_{-r}> = 2/(r,r).
    pub fn pairing(&self, x: usize, y: usize) -> Q {
        match (self.basis_root(x), self.basis_root(y)) {
            (Some(r), Some(s)) if r == -s => q(2) / q(self.len2(r)),
            _ => Q::zero(),
        }
    }
}

pub fn build_chevalley(rs: Arc<RootSystem>) -> Result<ChevalleyAlgebra> {
    let npos = rs.positive_roots.len();
    let mut alg = ChevalleyAlgebra {
        rs: rs.clone(),
        npos,
        table: HashMap::new(),
        extraspecial: HashMap::new(),
    };
    // Positive pairs (a, b), a < b in the root order, grouped by their sum.
    let mut pairs: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..npos {
        for b in a + 1..npos {
            let c: Vec<i64> = rs.positive_roots[a].iter().zip(&rs.positive_roots[b]).map(|(x, y)| x + y).collect();
            if let Some(k) = rs.root_index(&c) {
                pairs.entry(k).or_default().push((a, b));
            }
        }
    }
    // Roots are ordered by height, so each sum only needs smaller sums.
    for (&xi, list) in &pairs {
        let (a, b) = list[0];
        alg.extraspecial.insert(xi, (a, b));
        let mut p = 0;
        let mut down = rs.positive_roots[b].clone();
        loop {
            for (d, x) in down.iter_mut().zip(&rs.positive_roots[a]) {
                *d -= x;
            }
            if rs.is_root(&down) {
                p += 1;
            } else {
                break;
            }
        }
        alg.table.insert((a, b), p + 1);
        alg.table.insert((b, a), -(p + 1));
        let ra = a as i64 + 1;
        let rb = b as i64 + 1;
        let lxi = rs.root_length2(xi);
        for &(z, e) in &list[1..] {
            let rz = z as i64 + 1;
            let re = e as i64 + 1;
            let mut num = Q::zero();
            if alg.sum_root(re, -ra).is_some() {
                let d = alg.sum_root(re, -ra).unwrap();
                num += q(alg.n(re, -ra) * alg.n(rz, -rb)) / q(alg.len2(d));
            }
            if alg.sum_root(rz, -ra).is_some() {
                let d = alg.sum_root(rz, -ra).unwrap();
                num += q(alg.n(-ra, rz) * alg.n(re, -rb)) / q(alg.len2(d));
            }
            let v = num * q(lxi) / q(p + 1);
            if !v.is_integer() {
                return Err(EngineError::Consistency(format!("non-integral structure constant for roots {z},{e}")));
            }
            let v = crate::rational::to_i64(&v).unwrap();
            alg.table.insert((z, e), v);
            alg.table.insert((e, z), -v);
        }
    }
    Ok(alg)
}

/// Sparse integer matrix stored by columns: `cols[j]` is the image of basis vector j.
#[derive(Clone, Debug, Default)]
pub struct SMat {
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SMat {
    pub fn apply(&self, v: &SVec) -> SVec {
        sv_collect(v.iter().flat_map(|(j, x)| self.cols[*j].iter().map(move |(i, c)| (*i, x * q(*c)))))
    }

    pub fn neg_transpose(&self) -> SMat {
        let n = self.cols.len();
        let mut cols = vec![Vec::new(); n];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, c) in col {
                cols[*i].push((j, -c));
            }
        }
        SMat { cols }
    }
}

/// A p_0-module over the rationals with explicit raising and lowering operators
/// for every uncrossed node; Cartan elements act through `weights`.
#[derive(Clone, Debug)]
pub struct ExplicitModule {
    pub weights: Vec<IWeight>,
    pub levi: Vec<usize>,
    pub raise: Vec<SMat>,
    pub lower: Vec<SMat>,
}

impl ExplicitModule {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_blocks(&self) -> BTreeMap<IWeight, Vec<usize>> {
        let mut m: BTreeMap<IWeight, Vec<usize>> = BTreeMap::new();
        for (i, w) in self.weights.iter().enumerate() {
            m.entry(w.clone()).or_default().push(i);
        }
        m
    }

    /// Checks block structure and [e_i, f_i] = h_i on every basis vector.
    pub fn check_relations(&self, rs: &RootSystem) -> Result<()> {
        for (k, &i) in self.levi.iter().enumerate() {
            let a = rs.simple_root_weight(i);
            for j in 0..self.dim() {
                for (t, _) in &self.raise[k].cols[j] {
                    let w: IWeight = self.weights[j].iter().zip(&a).map(|(x, y)| x + y).collect();
                    if self.weights[*t] != w {
                        return Err(EngineError::Consistency(format!("raising operator {i} breaks weight blocks")));
                    }
                }
                let v: SVec = vec![(j, Q::one())];
                let ef = self.raise[k].apply(&self.lower[k].apply(&v));
                let fe = self.lower[k].apply(&self.raise[k].apply(&v));
                let comm = linalg::sv_axpy(&ef, &-Q::one(), &fe);
                let expect: SVec = if self.weights[j][i] == 0 { vec![] } else { vec![(j, q(self.weights[j][i]))] };
                if comm != expect {
                    return Err(EngineError::Consistency(format!("[e,f] != h at node {i} on basis vector {j}")));
                }
            }
        }
        Ok(())
    }
}

/// The socle g_{-1} with its decomposition into the pieces h_alpha.
#[derive(Clone, Debug)]
pub struct Socle {
    pub module: ExplicitModule,
    /// Positive root index beta with basis vector e_{-beta}.
    pub roots: Vec<usize>,
    /// Position in sigma0 of the component of each basis vector.
    pub component: Vec<usize>,
}

impl Socle {
    /// Basis vectors of h_alpha, alpha given as a position in sigma0.
    pub fn component_basis(&self, pos: usize) -> Vec<usize> {
        (0..self.roots.len()).filter(|&p| self.component[p] == pos).collect()
    }

    /// Index of the Levi highest weight vector e_{-alpha} of a component.
    pub fn top_of(&self, alg: &ChevalleyAlgebra, alpha: usize) -> usize {
        let mut simple = vec![0; alg.rs.rank()];
        simple[alpha] = 1;
        let k = alg.rs.root_index(&simple).unwrap();
        self.roots.iter().position(|&r| r == k).unwrap()
    }
}

pub fn socle_module(alg: &ChevalleyAlgebra, pd: &ParabolicData) -> Socle {
    let rs = &alg.rs;
    let roots: Vec<usize> = (0..rs.positive_roots.len())
        .filter(|&k| sigma_height(&rs.positive_roots[k], &pd.sigma0) == 1)
        .collect();
    let pos_of: HashMap<usize, usize> = roots.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let component = roots
        .iter()
        .map(|&k| pd.sigma0.iter().position(|&a| rs.positive_roots[k][a] == 1).unwrap())
        .collect();
    let weights: Vec<IWeight> = roots.iter().map(|&k| rs.root_weights[k].iter().map(|x| -x).collect()).collect();
    let mut raise = Vec::new();
    let mut lower = Vec::new();
    for &i in &pd.levi {
        let ai = rs.root_index(&{
            let mut v = vec![0; rs.rank()];
            v[i] = 1;
            v
        })
        .unwrap() as i64
            + 1;
        let mut up = SMat { cols: Vec::new() };
        let mut down = SMat { cols: Vec::new() };
        for &k in &roots {
            let r = -(k as i64 + 1);
            for (sign, m) in [(1i64, &mut up), (-1, &mut down)] {
                let g = sign * ai;
                let col = match alg.sum_root(g, r) {
                    Some(t) => {
                        let p = pos_of[&pos_index(t)];
                        vec![(p, alg.n(g, r))]
                    }
                    None => Vec::new(),
                };
                m.cols.push(col);
            }
        }
        raise.push(up);
        lower.push(down);
    }
    Socle {
        module: ExplicitModule { weights, levi: pd.levi.clone(), raise, lower },
        roots,
        component,
    }
}

pub fn dual_module(m: &ExplicitModule) -> ExplicitModule {
    ExplicitModule {
        weights: m.weights.iter().map(|w| w.iter().map(|x| -x).collect()).collect(),
        levi: m.levi.clone(),
        raise: m.raise.iter().map(SMat::neg_transpose).collect(),
        lower: m.lower.iter().map(SMat::neg_transpose).collect(),
    }
}

/// Index of u_p . u_q (p <= q) in the standard basis of S^2 of an n-dim module.
pub fn sym2_index(n: usize, p: usize, q: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    p * n - p * (p.max(1) - 1) / 2 + (q - p)
}

/// Pair (p, q), p <= q, for each basis index of S^2.
pub fn sym2_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for p in 0..n {
        for q in p..n {
            v.push((p, q));
        }
    }
    v
}

pub fn sym2_module(m: &ExplicitModule) -> ExplicitModule {
    let n = m.dim();
    let pairs = sym2_pairs(n);
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &pq)| (pq, i)).collect();
    let key = |a: usize, b: usize| if a <= b { index[&(a, b)] } else { index[&(b, a)] };
    let weights = pairs
        .iter()
        .map(|&(p, q)| m.weights[p].iter().zip(&m.weights[q]).map(|(x, y)| x + y).collect())
        .collect();
    let lift = |op: &SMat| SMat {
        cols: pairs
            .iter()
            .map(|&(p, q)| {
                elem_collect(
                    op.cols[p]
                        .iter()
                        .map(|&(r, c)| (key(r, q), c))
                        .chain(op.cols[q].iter().map(|&(r, c)| (key(p, r), c))),
                )
            })
            .collect(),
    };
    ExplicitModule {
        weights,
        levi: m.levi.clone(),
        raise: m.raise.iter().map(lift).collect(),
        lower: m.lower.iter().map(lift).collect(),
    }
}

pub fn tensor_module(a: &ExplicitModule, b: &ExplicitModule) -> ExplicitModule {
    let (na, nb) = (a.dim(), b.dim());
    let mut weights = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            weights.push(a.weights[i].iter().zip(&b.weights[j]).map(|(x, y)| x + y).collect());
        }
    }
    let lift = |oa: &SMat, ob: &SMat| SMat {
        cols: (0..na * nb)
            .map(|ij| {
                let (i, j) = (ij / nb, ij % nb);
                elem_collect(
                    oa.cols[i]
                        .iter()
                        .map(|&(r, c)| (r * nb + j, c))
                        .chain(ob.cols[j].iter().map(|&(r, c)| (i * nb + r, c))),
                )
            })
            .collect(),
    };
    ExplicitModule {
        weights,
        levi: a.levi.clone(),
        raise: a.raise.iter().zip(&b.raise).map(|(x, y)| lift(x, y)).collect(),
        lower: a.lower.iter().zip(&b.lower).map(|(x, y)| lift(x, y)).collect(),
    }
}

/// Levi raising and lowering operators on some coordinate space.
pub trait ModuleOps {
    fn levi(&self) -> &[usize];
    fn ambient_dim(&self) -> usize;
    fn raise(&self, k: usize, v: &SVec) -> SVec;
    fn lower(&self, k: usize, v: &SVec) -> SVec;
}

impl ModuleOps for ExplicitModule {
    fn levi(&self) -> &[usize] {
        &self.levi
    }
    fn ambient_dim(&self) -> usize {
        self.dim()
    }
    fn raise(&self, k: usize, v: &SVec) -> SVec {
        self.raise[k].apply(v)
    }
    fn lower(&self, k: usize, v: &SVec) -> SVec {
        self.lower[k].apply(v)
    }
}

/// A (x) B acting on coordinates i * dim(B) + j without materialising the operators.
pub struct TensorView<'a> {
    pub a: &'a ExplicitModule,
    pub b: &'a ExplicitModule,
}

impl TensorView<'_> {
    fn lift(&self, oa: &SMat, ob: &SMat, v: &SVec) -> SVec {
        let nb = self.b.dim();
        let mut terms = Vec::new();
        for (ij, x) in v {
            let (i, j) = (ij / nb, ij % nb);
            for (r, c) in &oa.cols[i] {
                terms.push((r * nb + j, x * q(*c)));
            }
            for (r, c) in &ob.cols[j] {
                terms.push((i * nb + r, x * q(*c)));
            }
        }
        sv_collect(terms)
    }

    pub fn weight(&self, ij: usize) -> IWeight {
        let nb = self.b.dim();
        self.a.weights[ij / nb].iter().zip(&self.b.weights[ij % nb]).map(|(x, y)| x + y).collect()
    }
}

impl ModuleOps for TensorView<'_> {
    fn levi(&self) -> &[usize] {
        &self.a.levi
    }
    fn ambient_dim(&self) -> usize {
        self.a.dim() * self.b.dim()
    }
    fn raise(&self, k: usize, v: &SVec) -> SVec {
        self.lift(&self.a.raise[k], &self.b.raise[k], v)
    }
    fn lower(&self, k: usize, v: &SVec) -> SVec {
        self.lift(&self.a.lower[k], &self.b.lower[k], v)
    }
}

/// Invariant subspace of an explicit module, basis grouped by weight.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub blocks: BTreeMap<IWeight, Vec<SVec>>,
    pub highest: IWeight,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.blocks.values().map(|v| v.len()).sum()
    }

    pub fn basis(&self) -> Vec<(IWeight, SVec)> {
        self.blocks
            .iter()
            .flat_map(|(w, vs)| vs.iter().map(move |v| (w.clone(), v.clone())))
            .collect()
    }

    /// Irreducible submodule generated by a highest weight vector, by lowering.
    pub fn generated<M: ModuleOps>(m: &M, rs: &RootSystem, hw: &IWeight, v: SVec) -> Result<Subspace> {
        let mut blocks: BTreeMap<IWeight, Vec<SVec>> = BTreeMap::new();
        blocks.insert(hw.clone(), vec![v]);
        let mut level = vec![hw.clone()];
        while !level.is_empty() {
            let mut next: BTreeMap<IWeight, Echelon> = BTreeMap::new();
            let mut next_vecs: BTreeMap<IWeight, Vec<SVec>> = BTreeMap::new();
            for w in &level {
                for (k, &i) in m.levi().iter().enumerate() {
                    let a = rs.simple_root_weight(i);
                    let target: IWeight = w.iter().zip(&a).map(|(x, y)| x - y).collect();
                    for v in &blocks[w] {
                        let img = m.lower(k, v);
                        if img.is_empty() {
                            continue;
                        }
                        let e = next.entry(target.clone()).or_default();
                        if e.insert(img.clone()) {
                            next_vecs.entry(target.clone()).or_default().push(img);
                        }
                    }
                }
            }
            level = next_vecs.keys().cloned().collect();
            for (w, vs) in next_vecs {
                blocks.insert(w, vs);
            }
        }
        let s = Subspace { blocks, highest: hw.clone() };
        s.check_invariant(m, rs)?;
        Ok(s)
    }

    /// Every generator maps the subspace into itself.
    pub fn check_invariant<M: ModuleOps>(&self, m: &M, rs: &RootSystem) -> Result<()> {
        let spans: BTreeMap<&IWeight, Echelon> = self
            .blocks
            .iter()
            .map(|(w, vs)| {
                let mut e = Echelon::new();
                for v in vs {
                    e.insert(v.clone());
                }
                (w, e)
            })
            .collect();
        for (w, vs) in &self.blocks {
            for (k, &i) in m.levi().iter().enumerate() {
                let a = rs.simple_root_weight(i);
                for sign in [1i64, -1] {
                    let t: IWeight = w.iter().zip(&a).map(|(x, y)| x + sign * y).collect();
                    for v in vs {
                        let img = if sign > 0 { m.raise(k, v) } else { m.lower(k, v) };
                        if img.is_empty() {
                            continue;
                        }
                        let ok = spans.get(&t).map(|e| e.contains(&img)).unwrap_or(false);
                        if !ok {
                            return Err(EngineError::Consistency(format!("subspace not invariant under node {}", i + 1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Joint kernel of the raising operators on a list of weight-`w` vectors.
pub fn hwv_in_span<M: ModuleOps>(m: &M, vecs: &[SVec]) -> Vec<SVec> {
    let n = m.ambient_dim();
    let images: Vec<SVec> = vecs
        .iter()
        .map(|v| sv_collect((0..m.levi().len()).flat_map(|k| m.raise(k, v).into_iter().map(move |(i, x)| (k * n + i, x)))))
        .collect();
    linalg::kernel_of_columns(&images)
        .into_iter()
        .map(|x| sv_collect(x.iter().flat_map(|(j, c)| vecs[*j].iter().map(move |(i, y)| (*i, c * y)))))
        .collect()
}

/// Highest weight vectors of the whole module, by weight block.
pub fn highest_weight_vectors(m: &ExplicitModule) -> Vec<(IWeight, SVec)> {
    let mut out = Vec::new();
    for (w, idx) in m.weight_blocks() {
        if m.levi.iter().any(|&j| w[j] < 0) {
            continue;
        }
        let vecs: Vec<SVec> = idx.iter().map(|&i| vec![(i, Q::one())]).collect();
        for v in hwv_in_span(m, &vecs) {
            out.push((w.clone(), v));
        }
    }
    out
}

/// Highest weight vectors inside an invariant subspace.
pub fn subspace_hwv<M: ModuleOps>(m: &M, s: &Subspace) -> Vec<(IWeight, SVec)> {
    let mut out = Vec::new();
    for (w, vs) in &s.blocks {
        if m.levi().iter().any(|&j| w[j] < 0) {
            continue;
        }
        for v in hwv_in_span(m, vs) {
            out.push((w.clone(), v));
        }
    }
    out
}

pub fn decompose_explicit(pd: &ParabolicData, m: &ExplicitModule) -> Decomposition {
    let mut d = Decomposition::default();
    for (w, _) in highest_weight_vectors(m) {
        d.add(IrrepLabel::new(pd, w), 1);
    }
    d
}

/// Dense rational matrices of the basis elements in a faithful representation,
/// built from images of the Chevalley generators.
pub struct MatrixRealization {
    pub mats: Vec<Vec<Vec<Q>>>,
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &[Vec<Q>], b: &[Vec<Q>], s: &Q) -> Vec<Vec<Q>> {
    a.iter().zip(b).map(|(r, t)| r.iter().zip(t).map(|(x, y)| x + s * y).collect()).collect()
}

pub fn mat_comm(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    mat_add(&mat_mul(a, b), &mat_mul(b, a), &-Q::one())
}

pub fn mat_scale(a: &[Vec<Q>], s: &Q) -> Vec<Vec<Q>> {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

impl MatrixRealization {
    /// `e[i]` and `f[i]` are candidate images of the simple generators; each `f[i]`
    /// is rescaled so that [[e_i, f_i], e_i] = 2 e_i.
    pub fn from_generators(alg: &ChevalleyAlgebra, e: Vec<Vec<Vec<Q>>>, f: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let rs = &alg.rs;
        let l = rs.rank();
        let n = e[0].len();
        let zero = vec![vec![Q::zero(); n]; n];
        let mut mats = vec![zero; alg.dim()];
        let simple_idx: Vec<usize> = (0..l)
            .map(|i| {
                let mut v = vec![0; l];
                v[i] = 1;
                rs.root_index(&v).unwrap()
            })
            .collect();
        for i in 0..l {
            let h = mat_comm(&e[i], &f[i]);
            let he = mat_comm(&h, &e[i]);
            let (r, c) = (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .find(|&(r, c)| !e[i][r][c].is_zero())
                .ok_or_else(|| EngineError::Consistency("zero generator".into()))?;
            let lam = &he[r][c] / &e[i][r][c];
            if lam.is_zero() {
                return Err(EngineError::Consistency(format!("generator {i} is not an sl2 triple")));
            }
            let fi = mat_scale(&f[i], &(q(2) / lam));
            mats[alg.root_basis(simple_idx[i] as i64 + 1)] = e[i].clone();
            mats[alg.root_basis(-(simple_idx[i] as i64 + 1))] = fi.clone();
            mats[alg.cartan_basis(i)] = mat_comm(&e[i], &fi);
        }
        for k in 0..rs.positive_roots.len() {
            if let Some(&(a, b)) = alg.extraspecial.get(&k) {
                let (ra, rb) = (a as i64 + 1, b as i64 + 1);
                let plus = mat_comm(&mats[alg.root_basis(ra)], &mats[alg.root_basis(rb)]);
                mats[alg.root_basis(k as i64 + 1)] = mat_scale(&plus, &(Q::one() / q(alg.n(ra, rb))));
                let minus = mat_comm(&mats[alg.root_basis(-ra)], &mats[alg.root_basis(-rb)]);
                mats[alg.root_basis(-(k as i64 + 1))] = mat_scale(&minus, &(Q::one() / q(alg.n(-ra, -rb))));
            }
        }
        let real = MatrixRealization { mats };
        real.check_homomorphism(alg)?;
        Ok(real)
    }

    pub fn image(&self, e: &Elem) -> Vec<Vec<Q>> {
        let n = self.mats[0].len();
        let mut out = vec![vec![Q::zero(); n]; n];
        for (i, c) in e {
            out = mat_add(&out, &self.mats[*i], &q(*c));
        }
        out
    }

    fn check_homomorphism(&self, alg: &ChevalleyAlgebra) -> Result<()> {
        for x in 0..alg.dim() {
            for y in 0..alg.dim() {
                let lhs = mat_comm(&self.mats[x], &self.mats[y]);
                let rhs = self.image(&alg.bracket_basis(x, y));
                if lhs != rhs {
                    return Err(EngineError::Consistency(format!("realization is not a homomorphism on ({x},{y})")));
                }
            }
        }
        Ok(())
    }
}

fn unit(n: usize, r: usize, c: usize) -> Vec<Vec<Q>> {
    let mut m = vec![vec![Q::zero(); n]; n];
    m[r][c] = Q::one();
    m
}

/// sl(n+1) via elementary matrices.
pub fn sl_realization(alg: &ChevalleyAlgebra) -> Result<MatrixRealization> {
    let l = alg.rs.rank();
    let n = l + 1;
    let e = (0..l).map(|i| unit(n, i, i + 1)).collect();
    let f = (0..l).map(|i| unit(n, i + 1, i)).collect();
    MatrixRealization::from_generators(alg, e, f)
}

/// so(n+1, n) in the block form with blocks (n, 1, n):
/// [[-A^T, -xi^T, B], [-gamma^T, 0, xi], [C, gamma, A]].
pub fn so_block(n: usize, a: &[Vec<Q>], xi: &[Q], gamma: &[Q]) -> Vec<Vec<Q>> {
    let d = 2 * n + 1;
    let mut m = vec![vec![Q::zero(); d]; d];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = -a[j][i].clone();
            m[n + 1 + i][n + 1 + j] = a[i][j].clone();
        }
        m[i][n] = -xi[i].clone();
        m[n][n + 1 + i] = xi[i].clone();
        m[n][i] = -gamma[i].clone();
        m[n + 1 + i][n] = gamma[i].clone();
    }
    m
}

/// The xi and gamma blocks of an element in `so_block` form.
pub fn so_xi_gamma(m: &[Vec<Q>], n: usize) -> (Vec<Q>, Vec<Q>) {
    let xi = (0..n).map(|i| m[n][n + 1 + i].clone()).collect();
    let gamma = (0..n).map(|i| m[n + 1 + i][n].clone()).collect();
    (xi, gamma)
}

pub fn so_odd_realization(alg: &ChevalleyAlgebra) -> Result<MatrixRealization> {
    let n = alg.rs.rank();
    let zero_v = vec![Q::zero(); n];
    let zero_m = vec![vec![Q::zero(); n]; n];
    let mut e = Vec::new();
    let mut f = Vec::new();
    for i in 0..n - 1 {
        e.push(so_block(n, &unit(n, i, i + 1), &zero_v, &zero_v));
        f.push(so_block(n, &unit(n, i + 1, i), &zero_v, &zero_v));
    }
    let mut last = zero_v.clone();
    last[n - 1] = Q::one();
    e.push(so_block(n, &zero_m, &zero_v, &last));
    f.push(so_block(n, &zero_m, &last, &zero_v));
    MatrixRealization::from_generators(alg, e, f)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FormulaReport {
    pub name: String,
    pub diagram: String,
    pub triples: usize,
    pub passed: bool,
    pub failure: Option<String>,
}

fn grade_basis(alg: &ChevalleyAlgebra, sigma0: &[usize], h: i64) -> Vec<usize> {
    (0..alg.npos())
        .filter(|&k| sigma_height(&alg.rs.positive_roots[k], sigma0) == h.abs())
        .map(|k| alg.root_basis(if h > 0 { k as i64 + 1 } else { -(k as i64 + 1) }))
        .collect()
}

fn trace(a: &[Vec<Q>]) -> Q {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

/// Checks the three change-of-connection identities on all basis triples
/// (Z, Upsilon, Y) in g_{-1} x g_1 x g_{-1}.
pub fn verify_bracket_formulas() -> Result<Vec<FormulaReport>> {
    let mut out = Vec::new();
    let build = |s: &str| -> Result<ChevalleyAlgebra> {
        let rs = Arc::new(crate::rootsys::build_root_system(s.parse()?)?);
        build_chevalley(rs)
    };
    type Closed = dyn Fn(&[Vec<Q>], &[Vec<Q>], &[Vec<Q>]) -> Vec<Vec<Q>>;
    let cases: Vec<(&str, &str, Vec<usize>, Box<Closed>)> = vec![
        (
            "projective: Upsilon(Z)Y + Upsilon(Y)Z",
            "A3",
            vec![0],
            Box::new(|z, u, y| {
                let uz = trace(&mat_mul(u, z));
                let uy = trace(&mat_mul(u, y));
                mat_add(&mat_scale(y, &uz), z, &uy)
            }),
        ),
        (
            "grassmannian: d^{B'}_{A'} U^A_{C'} Y^{C'}_B + d^A_B U^C_{A'} Y^{B'}_C",
            "A4",
            vec![1],
            Box::new(|z, u, y| mat_add(&mat_mul(&mat_mul(z, u), y), &mat_mul(&mat_mul(y, u), z), &Q::one())),
        ),
        (
            "free distribution: Upsilon(Y)Z",
            "B3",
            vec![2],
            Box::new(|z, u, y| {
                let n = (z.len() - 1) / 2;
                let (xi, _) = so_xi_gamma(y, n);
                let (_, gamma) = so_xi_gamma(u, n);
                let uy: Q = xi.iter().zip(&gamma).map(|(a, b)| a * b).sum();
                mat_scale(z, &uy)
            }),
        ),
    ];
    for (name, ty, sigma0, closed) in cases {
        let alg = build(ty)?;
        let real = if ty.starts_with('B') { so_odd_realization(&alg)? } else { sl_realization(&alg)? };
        let minus = grade_basis(&alg, &sigma0, -1);
        let plus = grade_basis(&alg, &sigma0, 1);
        let mut failure = None;
        let mut triples = 0;
        'outer: for &z in &minus {
            for &u in &plus {
                for &y in &minus {
                    triples += 1;
                    let inner = alg.bracket_basis(z, u);
                    let outer = alg.bracket(&inner, &vec![(y, 1)]);
                    let lhs = real.image(&outer);
                    let rhs = closed(&real.mats[z], &real.mats[u], &real.mats[y]);
                    if lhs != rhs {
                        failure = Some(format!("basis triple (Z={z}, Upsilon={u}, Y={y})"));
                        break 'outer;
                    }
                }
            }
        }
        out.push(FormulaReport {
            name: name.to_string(),
            diagram: format!("{ty}:x@{}", sigma0[0] + 1),
            triples,
            passed: failure.is_none(),
            failure,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build_root_system;

    fn alg(s: &str) -> ChevalleyAlgebra {
        build_chevalley(Arc::new(build_root_system(s.parse().unwrap()).unwrap())).unwrap()
    }

    #[test]
    fn jacobi_small_types() {
        for t in ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "G2", "F4"] {
            alg(t).check_jacobi(0, 1).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }

    #[test]
    fn jacobi_sampled_large() {
        for t in ["A6", "D6", "E6", "E7", "E8", "B6", "C6"] {
            alg(t).check_jacobi(3000, 7).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }

    #[test]
    fn sym2_index_matches_pairs() {
        let n = 5;
        for (i, (p, q)) in sym2_pairs(n).into_iter().enumerate() {
            assert_eq!(sym2_index(n, p, q), i);
            assert_eq!(sym2_index(n, q, p), i);
        }
    }

    #[test]
    fn killing_is_proportional_to_pairing() {
        let a = alg("B2");
        let k = a.killing(0, a.npos());
        let p = a.pairing(0, a.npos());
        for r in 0..a.npos() {
            let x = a.root_basis(r as i64 + 1);
            let y = a.root_basis(-(r as i64 + 1));
            assert_eq!(q(a.killing(x, y)) * &p, q(k) * a.pairing(x, y));
        }
    }

    #[test]
    fn bracket_formulas_hold() {
        for r in verify_bracket_formulas().unwrap() {
            assert!(r.passed, "{}: {:?}", r.name, r.failure);
        }
    }

    #[test]
    fn socle_relations_and_decomposition() {
        for (t, s0) in [("B3", vec![2]), ("A5", vec![1, 3]), ("F4", vec![1, 3]), ("G2", vec![0]), ("E6", vec![0, 5])] {
            let a = alg(t);
            let pd = crate::parabolic::grading(a.rs.clone(), &s0).unwrap();
            let soc = socle_module(&a, &pd);
            soc.module.check_relations(&a.rs).unwrap();
            let d = decompose_explicit(&pd, &soc.module);
            assert_eq!(d.count() as usize, s0.len(), "{t}");
            assert_eq!(d.dim(&pd) as usize, soc.module.dim());
            let s2 = sym2_module(&soc.module);
            s2.check_relations(&a.rs).unwrap();
            let ds = decompose_explicit(&pd, &s2);
            assert_eq!(ds.dim(&pd) as usize, s2.dim());
            dual_module(&soc.module).check_relations(&a.rs).unwrap();
        }
    }
}
