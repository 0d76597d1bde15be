//! Candidate metric modules B, nondegeneracy, the contraction map and the
//! algebraic linearization condition.

use std::collections::{BTreeMap, HashMap};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charalg::{self, Decomposition, IrrepLabel};
use crate::chevalley::{
    self, dual_module, socle_module, sym2_module, sym2_pairs, ChevalleyAlgebra, Elem, ExplicitModule, ModuleOps,
    Socle, Subspace, TensorView,
};
use crate::error::{EngineError, Result};
use crate::linalg::{self, sv_collect, Echelon, SVec};
use crate::parabolic::{self, ParabolicData};
use crate::rational::{q, to_i64, Q};
use crate::rootsys::IWeight;

#[derive(Clone, Debug)]
pub struct AlcOptions {
    pub sample_box: i64,
    pub rounds: u32,
    pub seed: u64,
    /// Largest dim(V_alpha (x) W) handled by explicit kernel computation.
    pub explicit_limit: usize,
}

impl Default for AlcOptions {
    fn default() -> Self {
        AlcOptions { sample_box: 10, rounds: 8, seed: 0x5eed, explicit_limit: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SummandKind {
    /// Inside S^2 h_alpha; the index is a position in sigma0.
    Sym2(usize),
    /// Inside h_alpha (x) h_beta.
    Mixed(usize, usize),
}

/// Irreducible summand of S^2 of the socle.
#[derive(Clone, Debug)]
pub struct Summand {
    pub kind: SummandKind,
    /// Actual highest weight in S^2 h.
    pub weight: IWeight,
    pub space: Subspace,
}

impl Summand {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Positions in sigma0 of the socle components involved.
    pub fn support(&self) -> Vec<usize> {
        match self.kind {
            SummandKind::Sym2(a) => vec![a],
            SummandKind::Mixed(a, b) => vec![a, b],
        }
    }

    pub fn display(&self, pd: &ParabolicData) -> IWeight {
        pd.dual_label(&self.weight)
    }

    /// Display label restricted to the uncrossed nodes.
    pub fn levi_label(&self, pd: &ParabolicData) -> Vec<i64> {
        let d = self.display(pd);
        pd.levi.iter().map(|&j| d[j]).collect()
    }
}

/// Everything needed to test candidate modules for one crossed diagram.
pub struct AlcContext {
    pub pd: Arc<ParabolicData>,
    pub alg: Arc<ChevalleyAlgebra>,
    pub socle: Socle,
    pub dual: ExplicitModule,
    pub sym2: ExplicitModule,
    pub pairs: Vec<(usize, usize)>,
    pub summands: Vec<Summand>,
    /// Actual highest weight of h_alpha, per position in sigma0.
    pub h_weight: Vec<IWeight>,
    /// Actual highest weight of V_alpha = h_alpha^*.
    pub v_weight: Vec<IWeight>,
    /// Character and explicit decompositions of S^2 h, kept for the oracle check.
    pub sym2_character: Decomposition,
    pub sym2_explicit: Decomposition,
    /// Socle basis index of each g basis index in g_{-1}.
    socle_pos: HashMap<usize, usize>,
}

impl AlcContext {
    pub fn new(alg: Arc<ChevalleyAlgebra>, pd: Arc<ParabolicData>) -> Result<Self> {
        let socle = socle_module(&alg, &pd);
        socle.module.check_relations(&alg.rs)?;
        let dual = dual_module(&socle.module);
        let sym2 = sym2_module(&socle.module);
        let pairs = sym2_pairs(socle.module.dim());
        let h_weight: Vec<IWeight> = pd.sigma0.iter().map(|&a| alg.rs.simple_root_weight(a).iter().map(|x| -x).collect()).collect();
        let v_weight: Vec<IWeight> = h_weight.iter().map(|w| pd.dual_label(w)).collect();
        let mut summands = Vec::new();
        let mut sym2_explicit = Decomposition::default();
        for (w, v) in chevalley::highest_weight_vectors(&sym2) {
            let mut comps: Vec<usize> = v
                .iter()
                .flat_map(|(i, _)| {
                    let (p, q) = pairs[*i];
                    [socle.component[p], socle.component[q]]
                })
                .collect();
            comps.sort_unstable();
            comps.dedup();
            let kind = match comps.as_slice() {
                [a] => SummandKind::Sym2(*a),
                [a, b] => SummandKind::Mixed(*a, *b),
                _ => return Err(EngineError::Consistency("highest weight vector spans three socle components".into())),
            };
            if let SummandKind::Mixed(a, b) = kind {
                // a genuine mixed vector never touches S^2 h_a or S^2 h_b
                if v.iter().any(|(i, _)| {
                    let (p, q) = pairs[*i];
                    socle.component[p] == socle.component[q]
                }) {
                    return Err(EngineError::Consistency(format!("mixed summand leaks into S^2 at {a},{b}")));
                }
            }
            let space = Subspace::generated(&sym2, &alg.rs, &w, v)?;
            sym2_explicit.add(IrrepLabel::new(&pd, w.clone()), 1);
            summands.push(Summand { kind, weight: w, space });
        }
        summands.sort_by(|a, b| (a.kind, &a.weight).cmp(&(b.kind, &b.weight)));
        let total: usize = summands.iter().map(|s| s.dim()).sum();
        if total != sym2.dim() {
            return Err(EngineError::Consistency(format!("summands of S^2 h cover {total} of {}", sym2.dim())));
        }
        let sym2_character = charalg::sym2_decompose(&pd, &h_weight)?;
        let socle_pos = socle
            .roots
            .iter()
            .enumerate()
            .map(|(p, &k)| (alg.root_basis(-(k as i64 + 1)), p))
            .collect();
        Ok(AlcContext { pd, alg, socle, dual, sym2, pairs, summands, h_weight, v_weight, sym2_character, sym2_explicit, socle_pos })
    }

    pub fn from_diagram(s: &str) -> Result<Self> {
        let (t, sigma0) = parabolic::parse_diagram(s)?;
        let rs = Arc::new(crate::rootsys::build_root_system(t)?);
        let pd = Arc::new(parabolic::grading(rs.clone(), &sigma0)?);
        let alg = Arc::new(chevalley::build_chevalley(rs)?);
        Self::new(alg, pd)
    }

    pub fn socle_dim(&self) -> usize {
        self.socle.module.dim()
    }

    /// Contraction h^* (x) S^2 h -> h on a basis tensor phi_t (x) (u_r . u_s).
    pub fn contract_basis(&self, t: usize, s2: usize) -> Vec<(usize, i64)> {
        let (r, s) = self.pairs[s2];
        let mut out = Vec::new();
        if t == r {
            out.push((s, 1));
        }
        if t == s {
            out.push((r, 1));
        }
        if r == s && t == r {
            out = vec![(r, 2)];
        }
        out
    }

    /// Contraction on a vector of h^* (x) S^2 h in coordinates t * dim S^2 + s.
    pub fn contract(&self, v: &SVec) -> SVec {
        let ns = self.sym2.dim();
        sv_collect(v.iter().flat_map(|(idx, x)| {
            self.contract_basis(idx / ns, idx % ns).into_iter().map(move |(i, c)| (i, x * q(c)))
        }))
    }

    /// phi_t (x) eta for eta in S^2 coordinates.
    pub fn contract_with(&self, t: usize, eta: &SVec) -> SVec {
        let ns = self.sym2.dim();
        self.contract(&eta.iter().map(|(s, x)| (t * ns + s, x.clone())).collect())
    }

    /// Dense matrix of the contraction restricted to h^* (x) W.
    pub fn contraction_matrix(&self, summand: usize) -> Vec<Vec<Q>> {
        let n = self.socle_dim();
        let basis = self.summands[summand].space.basis();
        let mut cols = Vec::new();
        for t in 0..n {
            for (_, b) in &basis {
                cols.push(linalg::sv_to_dense(&self.contract_with(t, b), n));
            }
        }
        (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }

    /// Residual of c . rho(x) - rho(x) . c over all Levi generators and basis tensors.
    pub fn contraction_equivariant(&self) -> bool {
        let ns = self.sym2.dim();
        let view = TensorView { a: &self.dual, b: &self.sym2 };
        for k in 0..self.pd.levi.len() {
            for t in 0..self.socle_dim() {
                for s in 0..ns {
                    let v: SVec = vec![(t * ns + s, Q::one())];
                    for up in [true, false] {
                        let lhs = self.contract(&if up { view.raise(k, &v) } else { view.lower(k, &v) });
                        let cv = self.contract(&v);
                        let rhs = if up { self.socle.module.raise[k].apply(&cv) } else { self.socle.module.lower[k].apply(&cv) };
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn summand_by_weight(&self, kind: SummandKind, w: &[i64]) -> Option<usize> {
        self.summands.iter().position(|s| s.kind == kind && s.weight == w)
    }

    /// Summand with the given display label over the uncrossed nodes.
    pub fn summand_by_levi_label(&self, support: &[usize], label: &[i64]) -> Option<usize> {
        self.summands.iter().position(|s| s.support() == support && s.levi_label(&self.pd) == label)
    }

    fn case_seed(&self, opts: &AlcOptions, extra: &str) -> u64 {
        let mut h = DefaultHasher::new();
        self.pd.notation().hash(&mut h);
        extra.hash(&mut h);
        opts.seed.hash(&mut h);
        h.finish()
    }

    /// Action of a g_0 element on S^2 h, with the Cartan part also acting on a
    /// line of weight `line` (fundamental coordinates).
    pub fn act_g0(&self, x: &Elem, eta: &SVec, line: &[Q]) -> Result<SVec> {
        let mut terms: Vec<(usize, Q)> = Vec::new();
        for (b, c) in x {
            match self.alg.basis_root(*b) {
                Some(_) => {
                    for (s2, val) in eta {
                        let (r, s) = self.pairs[*s2];
                        for (from, other) in [(r, s), (s, r)] {
                            let img = self.alg.bracket_basis(*b, self.alg.root_basis(-(self.socle.roots[from] as i64 + 1)));
                            for (g, m) in img {
                                let p = *self.socle_pos.get(&g).ok_or_else(|| {
                                    EngineError::Consistency("g_0 element does not preserve the socle".into())
                                })?;
                                let idx = chevalley::sym2_index(self.socle_dim(), p, other);
                                terms.push((idx, val * q(c * m)));
                            }
                        }
                        if r == s {
                            // u_r . u_r was counted twice above; Leibniz already gives 2 (x u_r) . u_r
                        }
                    }
                }
                None => {
                    let i = b - 2 * self.alg.npos();
                    for (s2, val) in eta {
                        let wt = self.sym2.weights[*s2][i];
                        terms.push((*s2, val * (q(wt) + &line[i]) * q(*c)));
                    }
                }
            }
        }
        Ok(sv_collect(terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CandidateKind {
    SingleSummand,
    SymmetricPair,
    ExplicitSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateB {
    pub kind: CandidateKind,
    /// Indices into `AlcContext::summands`.
    pub summands: Vec<usize>,
}

impl CandidateB {
    /// Display labels over uncrossed nodes, joined by "+".
    pub fn label(&self, ctx: &AlcContext) -> String {
        self.summands
            .iter()
            .map(|&i| {
                let l = ctx.summands[i].levi_label(&ctx.pd);
                format!("({})", l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn dim(&self, ctx: &AlcContext) -> usize {
        self.summands.iter().map(|&i| ctx.summands[i].dim()).sum()
    }
}

pub fn enumerate_candidates(ctx: &AlcContext) -> Result<Vec<CandidateB>> {
    let pd = &ctx.pd;
    let mut out = Vec::new();
    let nontrivial = |s: &Summand| s.dim() > 1;
    match pd.sigma0.len() {
        1 => {
            for (i, s) in ctx.summands.iter().enumerate() {
                if nontrivial(s) {
                    out.push(CandidateB { kind: CandidateKind::SingleSummand, summands: vec![i] });
                }
            }
        }
        2 => {
            for (i, s) in ctx.summands.iter().enumerate() {
                if nontrivial(s) && matches!(s.kind, SummandKind::Mixed(..)) {
                    out.push(CandidateB { kind: CandidateKind::SingleSummand, summands: vec![i] });
                }
            }
            let (a, b) = (pd.sigma0[0], pd.sigma0[1]);
            if parabolic::strong_alc_symmetry(pd, a, b)? {
                let sigma = parabolic::diagram_automorphisms(&pd.rs)
                    .into_iter()
                    .find(|p| p[a] == b && p[b] == a && pd.sigma0.iter().all(|x| pd.sigma0.contains(&p[*x])))
                    .expect("symmetry checked");
                for (i, s) in ctx.summands.iter().enumerate() {
                    if s.kind != SummandKind::Sym2(0) || !nontrivial(s) {
                        continue;
                    }
                    let image = parabolic::permute_weight(&s.weight, &sigma);
                    let j = ctx.summand_by_weight(SummandKind::Sym2(1), &image).ok_or_else(|| {
                        EngineError::Consistency(format!("no image of summand {:?} under the diagram symmetry", s.weight))
                    })?;
                    out.push(CandidateB { kind: CandidateKind::SymmetricPair, summands: vec![i, j] });
                }
            }
        }
        n => {
            return Err(EngineError::InvalidNodes(format!(
                "automatic enumeration needs one or two crossed nodes, got {n}; use an explicit sum"
            )))
        }
    }
    Ok(out)
}

/// Builds an explicit-sum candidate from summand display labels.
pub fn explicit_sum(ctx: &AlcContext, parts: &[(Vec<usize>, Vec<i64>)]) -> Result<CandidateB> {
    let mut idx = Vec::new();
    for (support, label) in parts {
        let i = ctx
            .summand_by_levi_label(support, label)
            .ok_or_else(|| EngineError::Rejected(format!("no summand with label {label:?} on components {support:?}")))?;
        idx.push(i);
    }
    Ok(CandidateB { kind: CandidateKind::ExplicitSum, summands: idx })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Nondegeneracy {
    Yes,
    No,
    /// All trials degenerate; `confidence` bounds the chance that a generic element
    /// is nondegenerate yet every sample missed.
    ProbableNo { trials: u32, confidence: f64 },
}

impl Nondegeneracy {
    pub fn is_yes(&self) -> bool {
        *self == Nondegeneracy::Yes
    }
}

/// Symmetric matrix of eta in S^2 h viewed as a map h^* -> h.
pub fn eta_matrix(ctx: &AlcContext, eta: &SVec) -> Vec<Vec<Q>> {
    let n = ctx.socle_dim();
    let mut m = vec![vec![Q::zero(); n]; n];
    for (s, x) in eta {
        let (p, r) = ctx.pairs[*s];
        if p == r {
            m[p][p] += x * q(2);
        } else {
            m[p][r] += x;
            m[r][p] += x;
        }
    }
    m
}

fn integer_matrix(m: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    let flat: Vec<Q> = m.iter().flatten().cloned().collect();
    let mut den = BigInt::one();
    for x in &flat {
        den = num::integer::lcm(den, x.denom().clone());
    }
    m.iter().map(|r| r.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect()).collect()
}

fn random_element(ctx: &AlcContext, b: &CandidateB, rng: &mut ChaCha8Rng, bound: i64) -> SVec {
    let mut terms = Vec::new();
    for &i in &b.summands {
        for (_, v) in ctx.summands[i].space.basis() {
            let c = q(rng.gen_range(-bound..=bound));
            terms.extend(v.into_iter().map(|(k, x)| (k, x * &c)));
        }
    }
    sv_collect(terms)
}

pub fn nondegenerate_exists(ctx: &AlcContext, b: &CandidateB, opts: &AlcOptions) -> Nondegeneracy {
    let n = ctx.socle_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.case_seed(opts, &b.label(ctx)));
    let dim_b = b.dim(ctx);
    let mut miss = 1.0f64;
    let mut bound = opts.sample_box.max(1);
    for round in 0..opts.rounds {
        let eta = random_element(ctx, b, &mut rng, bound);
        let m = integer_matrix(&eta_matrix(ctx, &eta));
        if linalg::det_mod_p(&m, linalg::PRIME) != 0 || !linalg::det_bareiss(m.clone()).is_zero() {
            return Nondegeneracy::Yes;
        }
        if dim_b == 1 && !eta.is_empty() {
            // det(c v) = c^n det(v): one nonzero sample decides
            return Nondegeneracy::No;
        }
        let _ = round;
        miss *= (n as f64 / (2 * bound + 1) as f64).min(1.0);
        bound *= 2;
    }
    Nondegeneracy::ProbableNo { trials: opts.rounds, confidence: 1.0 - miss }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pathway {
    Explicit,
    Character,
}

/// Kernel data for one (alpha, W).
#[derive(Clone, Debug, Serialize)]
pub struct PairCount {
    /// Crossed node, 0-based.
    pub alpha: usize,
    pub summand: usize,
    /// Whether alpha's socle component meets the support of W.
    pub own: bool,
    pub count: u64,
    pub pathway: Pathway,
    /// Actual highest weights of the kernel components.
    pub kernel: Vec<IWeight>,
    pub kernel_dim: u64,
    pub image_dim: u64,
    pub tensor_dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AlcStatus {
    Pass,
    Fail { alpha: usize, summand: usize, count: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StrongAlc {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlcVerdict {
    pub nondegenerate: Nondegeneracy,
    /// Over alpha in the support of each summand.
    pub alc: AlcStatus,
    /// Over every alpha in sigma0.
    pub alc_all_alpha: AlcStatus,
    pub strong_alc: StrongAlc,
    pub counts: Vec<PairCount>,
    /// Explicit and character pathways agreed wherever both ran.
    pub pathways_agree: bool,
    pub precondition_failed: bool,
}

impl AlcVerdict {
    pub fn passes(&self) -> bool {
        self.nondegenerate.is_yes() && self.alc == AlcStatus::Pass
    }
}

/// Character pathway: Klimyk minus the socle components reached by the contraction.
fn count_by_character(ctx: &AlcContext, pos: usize, summand: usize) -> Result<(Decomposition, Vec<usize>, Decomposition)> {
    let pd = &ctx.pd;
    let w = &ctx.summands[summand];
    let full = charalg::tensor_decompose(pd, &ctx.v_weight[pos], &w.weight)?;
    let top = w.space.blocks[&w.weight][0].clone();
    let mut hit = vec![false; pd.sigma0.len()];
    for t in ctx.socle.component_basis(pos) {
        for (i, _) in ctx.contract_with(t, &top) {
            hit[ctx.socle.component[i]] = true;
        }
    }
    let hits: Vec<usize> = (0..hit.len()).filter(|&b| hit[b]).collect();
    let mut kernel = full.clone();
    for &b in &hits {
        let l = IrrepLabel::new(pd, ctx.h_weight[b].clone());
        match kernel.entries.get_mut(&l) {
            Some(m) if *m > 0 => {
                *m -= 1;
                if *m == 0 {
                    kernel.entries.remove(&l);
                }
            }
            _ => {
                return Err(EngineError::Consistency(format!(
                    "contraction hits h at node {} but it is absent from the tensor product",
                    pd.sigma0[b] + 1
                )))
            }
        }
    }
    Ok((kernel, hits, full))
}

/// Explicit pathway: highest weight vectors of V_alpha (x) W, with and without
/// the contraction constraint.
fn count_explicit(ctx: &AlcContext, pos: usize, summand: usize) -> Result<(Decomposition, Decomposition)> {
    let pd = &ctx.pd;
    let w = &ctx.summands[summand];
    let ns = ctx.sym2.dim();
    let n = ctx.socle_dim();
    let view = TensorView { a: &ctx.dual, b: &ctx.sym2 };
    let comp = ctx.socle.component_basis(pos);
    let mut targets: BTreeMap<IWeight, Vec<SVec>> = BTreeMap::new();
    for &t in &comp {
        for (wt, vs) in &w.space.blocks {
            let mu: IWeight = ctx.dual.weights[t].iter().zip(wt).map(|(x, y)| x + y).collect();
            if !pd.is_levi_dominant(&mu) {
                continue;
            }
            for v in vs {
                targets.entry(mu.clone()).or_default().push(v.iter().map(|(s, x)| (t * ns + s, x.clone())).collect());
            }
        }
    }
    let mut kernel = Decomposition::default();
    let mut full = Decomposition::default();
    let amb = n * ns;
    let nl = pd.levi.len();
    for (mu, vecs) in targets {
        let raised: Vec<SVec> = vecs
            .iter()
            .map(|v| sv_collect((0..nl).flat_map(|k| view.raise(k, v).into_iter().map(move |(i, x)| (k * amb + i, x)))))
            .collect();
        let full_hw = linalg::kernel_of_columns(&raised).len() as u64;
        let with_c: Vec<SVec> = vecs
            .iter()
            .zip(&raised)
            .map(|(v, r)| {
                let mut c = r.clone();
                c.extend(ctx.contract(v).into_iter().map(|(i, x)| (nl * amb + i, x)));
                c
            })
            .collect();
        let ker_hw = linalg::kernel_of_columns(&with_c).len() as u64;
        if full_hw > 0 {
            full.add(IrrepLabel::new(pd, mu.clone()), full_hw);
        }
        if ker_hw > 0 {
            kernel.add(IrrepLabel::new(pd, mu), ker_hw);
        }
    }
    Ok((kernel, full))
}

fn expand_labels(d: &Decomposition) -> Vec<IWeight> {
    d.entries.iter().flat_map(|(l, m)| std::iter::repeat_n(l.weight.clone(), *m as usize)).collect()
}

/// Kernel components of the contraction on V_alpha (x) W.
pub fn pair_count(ctx: &AlcContext, pos: usize, summand: usize, opts: &AlcOptions) -> Result<(PairCount, bool)> {
    let pd = &ctx.pd;
    let w = &ctx.summands[summand];
    let tensor_dim = (ctx.socle.component_basis(pos).len() * w.dim()) as u64;
    let (kernel, hits, full) = count_by_character(ctx, pos, summand)?;
    let image_dim: u64 = hits.iter().map(|&b| ctx.socle.component_basis(b).len() as u64).sum();
    let kernel_dim = kernel.dim(pd);
    if kernel_dim + image_dim != tensor_dim {
        return Err(EngineError::Consistency(format!(
            "rank-nullity fails: {kernel_dim} + {image_dim} != {tensor_dim}"
        )));
    }
    let mut agree = true;
    let mut pathway = Pathway::Character;
    if tensor_dim as usize <= opts.explicit_limit {
        let (ek, ef) = count_explicit(ctx, pos, summand)?;
        agree = ek == kernel && ef == full;
        pathway = Pathway::Explicit;
        if !agree {
            return Err(EngineError::Consistency(format!(
                "explicit and character pathways disagree for node {} and summand {:?}",
                pd.sigma0[pos] + 1,
                w.weight
            )));
        }
    }
    let own = w.support().contains(&pos);
    Ok((
        PairCount {
            alpha: pd.sigma0[pos],
            summand,
            own,
            count: kernel.count(),
            pathway,
            kernel: expand_labels(&kernel),
            kernel_dim,
            image_dim,
            tensor_dim,
        },
        agree,
    ))
}

pub fn check_alc(ctx: &AlcContext, b: &CandidateB, opts: &AlcOptions) -> Result<AlcVerdict> {
    let pd = &ctx.pd;
    let nondegenerate = nondegenerate_exists(ctx, b, opts);
    let mut counts = Vec::new();
    let mut agree = true;
    for &i in &b.summands {
        for pos in 0..pd.sigma0.len() {
            let (c, a) = pair_count(ctx, pos, i, opts)?;
            agree &= a;
            counts.push(c);
        }
    }
    let first_fail = |own_only: bool| {
        counts
            .iter()
            .find(|c| (!own_only || c.own) && c.count > 1)
            .map(|c| AlcStatus::Fail { alpha: c.alpha, summand: c.summand, count: c.count })
            .unwrap_or(AlcStatus::Pass)
    };
    let mut strong = StrongAlc::NotApplicable;
    for &i in &b.summands {
        if let SummandKind::Mixed(x, y) = ctx.summands[i].kind {
            let ok = parabolic::strong_alc_symmetry(pd, pd.sigma0[x], pd.sigma0[y])?;
            strong = match (strong, ok) {
                (StrongAlc::Fail, _) | (_, false) => StrongAlc::Fail,
                _ => StrongAlc::Pass,
            };
        }
    }
    let alc = first_fail(true);
    if strong == StrongAlc::NotApplicable && alc != AlcStatus::Pass {
        strong = StrongAlc::Fail;
    } else if strong == StrongAlc::NotApplicable {
        strong = StrongAlc::Pass;
    } else if alc != AlcStatus::Pass {
        strong = StrongAlc::Fail;
    }
    Ok(AlcVerdict {
        precondition_failed: !nondegenerate.is_yes(),
        nondegenerate,
        alc,
        alc_all_alpha: first_fail(false),
        strong_alc: strong,
        counts,
        pathways_agree: agree,
    })
}

/// Number of Levi components of h_alpha (x) h_alpha^*.
pub fn hermitian_count(ctx: &AlcContext, pos: usize) -> Result<u64> {
    Ok(charalg::tensor_decompose(&ctx.pd, &ctx.h_weight[pos], &ctx.v_weight[pos])?.count())
}

#[derive(Clone, Debug, Serialize)]
pub enum EllValue {
    Scalar(#[serde(with = "crate::rational::serde_q")] Q),
    /// dim W = 1: the operator is zero and no scalar is defined.
    ZeroOperator,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllReport {
    pub alpha: usize,
    pub summand: usize,
    pub value: EllValue,
    /// The splitting zeta was determined uniquely by the module structure.
    pub zeta_unique: bool,
}

/// Splitting of b on the socle components hit from h^* (x) W: the submodules
/// generated by highest weight vectors mapping onto the top of each h_beta.
fn zeta_image(ctx: &AlcContext, summand: usize) -> Result<(BTreeMap<IWeight, Echelon>, bool)> {
    let pd = &ctx.pd;
    let w = &ctx.summands[summand];
    let ns = ctx.sym2.dim();
    let view = TensorView { a: &ctx.dual, b: &ctx.sym2 };
    let mut blocks: BTreeMap<IWeight, Echelon> = BTreeMap::new();
    let mut unique = true;
    for beta in 0..pd.sigma0.len() {
        let target = &ctx.h_weight[beta];
        let mut vecs = Vec::new();
        for t in 0..ctx.socle_dim() {
            for (wt, vs) in &w.space.blocks {
                let mu: IWeight = ctx.dual.weights[t].iter().zip(wt).map(|(x, y)| x + y).collect();
                if &mu == target {
                    for v in vs {
                        vecs.push(v.iter().map(|(s, x)| (t * ns + s, x.clone())).collect::<SVec>());
                    }
                }
            }
        }
        let hw = chevalley::hwv_in_span(&view, &vecs);
        let top = ctx.socle.top_of(&ctx.alg, pd.sigma0[beta]);
        let mapped: Vec<&SVec> = hw.iter().filter(|x| !ctx.contract(x).is_empty()).collect();
        if mapped.is_empty() {
            continue;
        }
        if hw.len() > 1 {
            unique = false;
        }
        let x = mapped[0];
        let bx = ctx.contract(x);
        if bx.len() != 1 || bx[0].0 != top {
            return Err(EngineError::Consistency("splitting does not map onto the top of h".into()));
        }
        let sub = Subspace::generated(&view, &ctx.alg.rs, target, x.clone())?;
        for (wt, vs) in sub.blocks {
            let e = blocks.entry(wt).or_default();
            for v in vs {
                e.insert(v);
            }
        }
    }
    Ok((blocks, unique))
}

/// Scalars l_alpha with [., Upsilon] . eta = l_alpha zeta(b(Upsilon (x) eta)) for
/// Upsilon = e_alpha, eta a random element of W twisted by a line of weight `line`.
pub fn ell_scalars(ctx: &AlcContext, b: &CandidateB, lines: &[Vec<Q>], opts: &AlcOptions) -> Result<Vec<EllReport>> {
    let pd = &ctx.pd;
    let alg = &ctx.alg;
    let ns = ctx.sym2.dim();
    let view = TensorView { a: &ctx.dual, b: &ctx.sym2 };
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.case_seed(opts, "ell"));
    for (slot, &i) in b.summands.iter().enumerate() {
        let w = &ctx.summands[i];
        for pos in w.support() {
            let alpha = pd.sigma0[pos];
            if w.dim() == 1 {
                out.push(EllReport { alpha, summand: i, value: EllValue::ZeroOperator, zeta_unique: true });
                continue;
            }
            let (zeta, unique) = zeta_image(ctx, i)?;
            let p = ctx.socle.top_of(alg, alpha);
            let root = ctx.socle.roots[p];
            let d_alpha = alg.rs.root_length2(root) / 2;
            let e_alpha = alg.root_basis(root as i64 + 1);
            let mut value = None;
            for _ in 0..8 {
                let single = CandidateB { kind: CandidateKind::SingleSummand, summands: vec![i] };
                let eta = random_element(ctx, &single, &mut rng, opts.sample_box);
                let mut t_vec: Vec<(usize, Q)> = Vec::new();
                for t in 0..ctx.socle_dim() {
                    let u = alg.root_basis(-(ctx.socle.roots[t] as i64 + 1));
                    let x = alg.bracket_basis(u, e_alpha);
                    let acted = ctx.act_g0(&x, &eta, &lines[slot])?;
                    t_vec.extend(acted.into_iter().map(|(s, v)| (t * ns + s, v)));
                }
                let t_vec = sv_collect(t_vec);
                let bt = ctx.contract(&t_vec);
                let bu = linalg::sv_scale(&ctx.contract_with(p, &eta), &(Q::one() / q(d_alpha)));
                if bu.is_empty() {
                    continue;
                }
                let (k0, x0) = &bu[0];
                let ell = linalg::sv_get(&bt, *k0) / x0;
                if linalg::sv_axpy(&bt, &-ell.clone(), &bu).iter().any(|(_, x)| !x.is_zero()) {
                    return Err(EngineError::Consistency(format!("b(T) is not proportional to b(Upsilon (x) eta) at node {}", alpha + 1)));
                }
                // T must lie in the image of zeta
                let mut by_weight: BTreeMap<IWeight, SVec> = BTreeMap::new();
                for (idx, x) in t_vec {
                    by_weight.entry(view.weight(idx)).or_default().push((idx, x));
                }
                for (wt, v) in by_weight {
                    let v = sv_collect(v);
                    if v.is_empty() {
                        continue;
                    }
                    if !zeta.get(&wt).map(|e| e.contains(&v)).unwrap_or(false) {
                        return Err(EngineError::Consistency(format!(
                            "[., Upsilon].eta leaves the image of zeta at node {}",
                            alpha + 1
                        )));
                    }
                }
                value = Some(ell);
                break;
            }
            let ell = value.ok_or_else(|| EngineError::Singular("no sample with b(Upsilon (x) eta) != 0".into()))?;
            if ell.is_zero() {
                return Err(EngineError::Consistency(format!("l vanishes at node {}", alpha + 1)));
            }
            out.push(EllReport { alpha, summand: i, value: EllValue::Scalar(ell), zeta_unique: unique });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub enum Rescaling {
    /// a[i][j] with sum_j a_ij w_j = -wt(L_i).
    Solved(Vec<Vec<String>>),
    Unsolvable(String),
}

/// Exponents a_ij expressing each line bundle through the weights
/// w_j = wt(Lambda^top h_j) + (m_j / 2) wt(L_j), all in central coordinates.
/// `lines[i]` is the actual weight of L_i, `parts[i]` the socle components of B_i.
pub fn weight_rescaling_system(ctx: &AlcContext, parts: &[Vec<usize>], lines: &[Vec<Q>]) -> Result<Rescaling> {
    let pd = &ctx.pd;
    let r = parts.len();
    let mut ws: Vec<Vec<Q>> = Vec::new();
    for (j, comps) in parts.iter().enumerate() {
        let hs: Vec<IWeight> = comps.iter().map(|&c| ctx.h_weight[c].clone()).collect();
        let m: usize = comps.iter().map(|&c| ctx.socle.component_basis(c).len()).sum();
        let top = charalg::top_exterior_weight(pd, &hs)?;
        let mut w = pd.central_coords_int(&top);
        let lc = pd.central_coords(&lines[j]);
        for (a, b) in w.iter_mut().zip(&lc) {
            *a += b * Q::new(BigInt::from(m), BigInt::from(2));
        }
        ws.push(w);
    }
    if ws.iter().any(|w| w.iter().all(|x| x.is_zero())) {
        return Ok(Rescaling::Unsolvable("a top-degree weight is zero".into()));
    }
    let k = pd.sigma0.len();
    // columns are w_j
    let a: Vec<Vec<Q>> = (0..k).map(|row| ws.iter().map(|w| w[row].clone()).collect()).collect();
    if linalg::rank_dense(&a) < r {
        return Ok(Rescaling::Unsolvable("top-degree weights are linearly dependent".into()));
    }
    let mut rows = Vec::new();
    for line in lines {
        let rhs: Vec<Q> = pd.central_coords(line).into_iter().map(|x| -x).collect();
        match linalg::solve(&a, &rhs) {
            Some(x) => rows.push(x.iter().map(crate::rational::fmt_q).collect()),
            None => return Ok(Rescaling::Unsolvable("a line bundle weight is outside the span".into())),
        }
    }
    Ok(Rescaling::Solved(rows))
}

/// Integer value of an ell scalar, when it is one.
pub fn ell_as_i64(e: &EllValue) -> Option<i64> {
    match e {
        EllValue::Scalar(x) => to_i64(x),
        EllValue::ZeroOperator => None,
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}
