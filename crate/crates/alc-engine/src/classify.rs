//! Enumeration over crossed diagrams, per-candidate verdicts and comparison
//! against the golden rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alc::{
    self, AlcContext, AlcOptions, AlcStatus, CandidateB, CandidateKind, EllValue, Nondegeneracy, Rescaling, StrongAlc,
    SummandKind,
};
use crate::bgg1;
use crate::chevalley::{self, ChevalleyAlgebra};
use crate::config::Config;
use crate::error::{EngineError, Result};
use crate::fixture::{self, FixtureInstance, FixtureRow, SumClass};
use crate::parabolic::{self, ParabolicData};
use crate::rational::{fmt_q, fmt_qvec};
use crate::rootsys::{build_root_system, DynkinType, Family, IWeight, RootSystem};

const CACHE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossMode {
    Single,
    Pair,
    Both,
}

impl std::str::FromStr for CrossMode {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(CrossMode::Single),
            "pair" => Ok(CrossMode::Pair),
            "both" => Ok(CrossMode::Both),
            _ => Err(EngineError::Parse(format!("cross mode {s:?}"))),
        }
    }
}

/// Which diagrams a sweep visits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scope {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub exceptional: bool,
    /// Largest rank for two-cross diagrams.
    pub pair_max_rank: usize,
    pub crosses: CrossMode,
}

impl Scope {
    pub fn from_max_rank(m: usize, crosses: CrossMode) -> Self {
        Scope { a: m, b: m, c: m, d: m, exceptional: true, pair_max_rank: m, crosses }
    }

    fn max_rank(&self, f: Family) -> usize {
        match f {
            Family::A => self.a,
            Family::B => self.b,
            Family::C => self.c,
            Family::D => self.d,
            _ if self.exceptional => 8,
            _ => 0,
        }
    }

    /// A1 and C2 are left out: A1 has no nontrivial B and C2 repeats B2.
    fn types(&self) -> Vec<DynkinType> {
        let mut out = Vec::new();
        let mut push = |f, lo: usize, hi: usize| {
            for r in lo..=hi {
                out.push(DynkinType::new(f, r).expect("valid rank"));
            }
        };
        push(Family::A, 2, self.a);
        push(Family::B, 2, self.b);
        push(Family::C, 3, self.c);
        push(Family::D, 4, self.d);
        if self.exceptional {
            push(Family::E, 6, 8);
            push(Family::F, 4, 4);
            push(Family::G, 2, 2);
        }
        out
    }

    /// Canonical crossed node sets in sweep order.
    pub fn diagrams(&self) -> Vec<(DynkinType, Vec<usize>)> {
        let mut out = BTreeSet::new();
        for t in self.types() {
            let rs = root_system(t);
            let l = t.rank;
            if self.crosses != CrossMode::Pair {
                for a in 0..l {
                    out.insert((t, parabolic::canonical_sigma0(&rs, &[a]).0));
                }
            }
            if self.crosses != CrossMode::Single && l <= self.pair_max_rank {
                let autos = parabolic::diagram_automorphisms(&rs);
                for a in 0..l {
                    for b in a + 1..l {
                        if autos.iter().any(|p| p[a] == b && p[b] == a) {
                            out.insert((t, parabolic::canonical_sigma0(&rs, &[a, b]).0));
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

fn root_system(t: DynkinType) -> Arc<RootSystem> {
    static C: OnceLock<Mutex<HashMap<DynkinType, Arc<RootSystem>>>> = OnceLock::new();
    let m = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rs) = m.lock().expect("lock").get(&t) {
        return rs.clone();
    }
    let rs = Arc::new(build_root_system(t).expect("valid type"));
    m.lock().expect("lock").entry(t).or_insert(rs).clone()
}

fn algebra(t: DynkinType) -> Result<Arc<ChevalleyAlgebra>> {
    static C: OnceLock<Mutex<HashMap<DynkinType, Arc<ChevalleyAlgebra>>>> = OnceLock::new();
    let m = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = m.lock().expect("lock").get(&t) {
        return Ok(a.clone());
    }
    let a = Arc::new(chevalley::build_chevalley(root_system(t))?);
    Ok(m.lock().expect("lock").entry(t).or_insert(a).clone())
}

pub fn context(t: DynkinType, sigma0: &[usize]) -> Result<AlcContext> {
    let pd = Arc::new(parabolic::grading(root_system(t), sigma0)?);
    AlcContext::new(algebra(t)?, pd)
}

// ---------------------------------------------------------------------------
// Records

/// Summand label class and Levi label (crossed entries zero).
pub type Signature = Vec<(SumClass, IWeight)>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummandRecord {
    pub kind: SumClass,
    /// Crossed-node components the summand lives in (1-based nodes).
    pub support: Vec<usize>,
    pub display: IWeight,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountRecord {
    pub alpha: usize,
    pub summand: usize,
    pub own: bool,
    pub count: u64,
    pub pathway: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseRecord {
    pub dynkin: String,
    pub sigma0: Vec<usize>,
    pub candidate: String,
    pub kind: String,
    pub summands: Vec<SummandRecord>,
    pub dim: usize,
    pub nondegenerate: String,
    pub alc: String,
    pub alc_all_alpha: String,
    pub strong_alc: String,
    pub counts: Vec<CountRecord>,
    pub oracle_agree: bool,
    /// Display labels of the line bundles, one per summand.
    pub line_bundles: Vec<String>,
    pub line_bundle_error: Option<String>,
    pub rescaling: Option<String>,
    pub ell: Vec<String>,
    pub growth: Vec<usize>,
    pub pass: bool,
    pub paper_case_id: Vec<String>,
}

impl CaseRecord {
    pub fn alc_pass(&self) -> bool {
        self.alc == "pass"
    }

    pub fn nondegenerate_yes(&self) -> bool {
        self.nondegenerate == "yes"
    }

    pub fn signature(&self) -> Signature {
        let mut s: Signature = self.summands.iter().map(|x| (x.kind, levi_only(&x.display, &self.sigma0))).collect();
        s.sort();
        s
    }
}

fn levi_only(w: &[i64], sigma0_1based: &[usize]) -> IWeight {
    w.iter().enumerate().map(|(i, &x)| if sigma0_1based.contains(&(i + 1)) { 0 } else { x }).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramRecord {
    pub dynkin: String,
    /// 1-based crossed nodes.
    pub sigma0: Vec<usize>,
    pub growth: Vec<usize>,
    pub socle_dim: usize,
    /// Components of V_alpha (x) V_alpha^* for a single cross.
    pub hermitian_count: Option<u64>,
    pub oracle_agree: bool,
    pub candidates: Vec<CaseRecord>,
    /// "ok", "skipped(budget)" or an error message.
    pub status: String,
}

impl DiagramRecord {
    pub fn dynkin_type(&self) -> DynkinType {
        self.dynkin.parse().expect("recorded type")
    }

    pub fn sigma0_zero(&self) -> Vec<usize> {
        self.sigma0.iter().map(|x| x - 1).collect()
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn nd_str(n: &Nondegeneracy) -> String {
    match n {
        Nondegeneracy::Yes => "yes".into(),
        Nondegeneracy::No => "no".into(),
        Nondegeneracy::ProbableNo { trials, confidence } => format!("probable-no({trials} trials, {confidence:.6})"),
    }
}

fn alc_str(ctx: &AlcContext, s: &AlcStatus) -> String {
    match s {
        AlcStatus::Pass => "pass".into(),
        AlcStatus::Fail { alpha, summand, count } => format!(
            "fail(node {}, {}, {count} components)",
            alpha + 1,
            CandidateB { kind: CandidateKind::SingleSummand, summands: vec![*summand] }.label(ctx)
        ),
    }
}

fn kind_str(k: &CandidateKind) -> &'static str {
    match k {
        CandidateKind::SingleSummand => "single",
        CandidateKind::SymmetricPair => "pair",
        CandidateKind::ExplicitSum => "explicit",
    }
}

/// Runs every check on one candidate.
pub fn evaluate(ctx: &AlcContext, cand: &CandidateB, opts: &AlcOptions) -> Result<CaseRecord> {
    let pd = &ctx.pd;
    let v = alc::check_alc(ctx, cand, opts)?;
    let summands = cand
        .summands
        .iter()
        .map(|&i| {
            let s = &ctx.summands[i];
            SummandRecord {
                kind: match s.kind {
                    SummandKind::Sym2(_) => SumClass::Sym,
                    SummandKind::Mixed(..) => SumClass::Mixed,
                },
                support: s.support().iter().map(|&p| pd.sigma0[p] + 1).collect(),
                display: s.display(pd),
                dim: s.dim(),
            }
        })
        .collect();
    let own_pass = v.alc == AlcStatus::Pass;
    let mut lines = Vec::new();
    let mut line_bundles = Vec::new();
    let mut line_bundle_error = None;
    if own_pass {
        for &i in &cand.summands {
            match bgg1::line_bundle_weight(ctx, i, cand.dim(ctx), &v.counts) {
                Ok(l) => {
                    line_bundles.push(fmt_qvec(&l.display));
                    lines.push(l.actual);
                }
                Err(e) => {
                    line_bundle_error = Some(e.to_string());
                    break;
                }
            }
        }
    } else {
        line_bundle_error = Some("ALC fails".into());
    }
    let mut rescaling = None;
    let mut ell = Vec::new();
    if line_bundle_error.is_none() {
        let parts: Vec<Vec<usize>> = cand.summands.iter().map(|&i| ctx.summands[i].support()).collect();
        rescaling = Some(match alc::weight_rescaling_system(ctx, &parts, &lines)? {
            Rescaling::Solved(rows) => format!(
                "solved [{}]",
                rows.iter().map(|r| format!("({})", r.join(","))).collect::<Vec<_>>().join(", ")
            ),
            Rescaling::Unsolvable(why) => format!("unsolvable: {why}"),
        });
        if v.nondegenerate.is_yes() {
            match alc::ell_scalars(ctx, cand, &lines, opts) {
                Ok(rs) => {
                    for r in rs {
                        ell.push(match r.value {
                            EllValue::Scalar(x) => format!("node {}: {}", r.alpha + 1, fmt_q(&x)),
                            EllValue::ZeroOperator => format!("node {}: zero operator", r.alpha + 1),
                        })
                    }
                }
                Err(e) => ell.push(format!("error: {e}")),
            }
        }
    }
    let pass = v.nondegenerate.is_yes() && own_pass && line_bundle_error.is_none();
    Ok(CaseRecord {
        dynkin: pd.dynkin().to_string(),
        sigma0: one_based(&pd.sigma0),
        candidate: cand.label(ctx),
        kind: kind_str(&cand.kind).into(),
        summands,
        dim: cand.dim(ctx),
        nondegenerate: nd_str(&v.nondegenerate),
        alc: alc_str(ctx, &v.alc),
        alc_all_alpha: alc_str(ctx, &v.alc_all_alpha),
        strong_alc: match v.strong_alc {
            StrongAlc::Pass => "pass",
            StrongAlc::Fail => "fail",
            StrongAlc::NotApplicable => "n/a",
        }
        .into(),
        counts: v
            .counts
            .iter()
            .map(|c| CountRecord {
                alpha: c.alpha + 1,
                summand: c.summand,
                own: c.own,
                count: c.count,
                pathway: format!("{:?}", c.pathway).to_lowercase(),
            })
            .collect(),
        oracle_agree: v.pathways_agree,
        line_bundles,
        line_bundle_error,
        rescaling,
        ell,
        growth: pd.growth_vector(),
        pass,
        paper_case_id: Vec::new(),
    })
}

fn cache_path(t: DynkinType, sigma0: &[usize], cfg: &Config) -> Option<PathBuf> {
    let dir = std::env::var_os("ALC_ENGINE_CACHE")?;
    let nodes: Vec<String> = sigma0.iter().map(|x| (x + 1).to_string()).collect();
    Some(PathBuf::from(dir).join(format!(
        "v{CACHE_VERSION}-{t}-{}-{:x}-{}.json",
        nodes.join("_"),
        cfg.seed,
        cfg.sample_box
    )))
}

/// Verdicts for every automatically enumerated candidate of one diagram.
pub fn run_diagram(t: DynkinType, sigma0: &[usize], cfg: &Config) -> DiagramRecord {
    let cache = cache_path(t, sigma0, cfg);
    if let Some(p) = &cache {
        if let Ok(s) = std::fs::read_to_string(p) {
            if let Ok(r) = serde_json::from_str::<DiagramRecord>(&s) {
                return r;
            }
        }
    }
    let rec = compute_diagram(t, sigma0, cfg);
    if let Some(p) = &cache {
        if rec.status == "ok" {
            if let Some(dir) = p.parent() {
                let _ = std::fs::create_dir_all(dir);
            }
            let _ = std::fs::write(p, serde_json::to_string(&rec).expect("serializable"));
        }
    }
    rec
}

fn compute_diagram(t: DynkinType, sigma0: &[usize], cfg: &Config) -> DiagramRecord {
    let mut rec = DiagramRecord {
        dynkin: t.to_string(),
        sigma0: one_based(sigma0),
        growth: Vec::new(),
        socle_dim: 0,
        hermitian_count: None,
        oracle_agree: true,
        candidates: Vec::new(),
        status: "ok".into(),
    };
    let pd = match parabolic::grading(root_system(t), sigma0) {
        Ok(pd) => pd,
        Err(e) => {
            rec.status = format!("error: {e}");
            return rec;
        }
    };
    rec.growth = pd.growth_vector();
    let h = pd.grading.get(&1).copied().unwrap_or(0);
    rec.socle_dim = h;
    if h * (h + 1) / 2 > cfg.max_sym2_dim {
        rec.status = "skipped(budget)".into();
        return rec;
    }
    let mut run = || -> Result<()> {
        let ctx = context(t, sigma0)?;
        if sigma0.len() == 1 {
            rec.hermitian_count = Some(alc::hermitian_count(&ctx, 0)?);
        }
        rec.oracle_agree = ctx.sym2_character == ctx.sym2_explicit;
        let opts = cfg.alc_options();
        for cand in alc::enumerate_candidates(&ctx)? {
            let c = evaluate(&ctx, &cand, &opts)?;
            rec.oracle_agree &= c.oracle_agree;
            rec.candidates.push(c);
        }
        Ok(())
    };
    if let Err(e) = run() {
        rec.status = format!("error: {e}");
    }
    rec
}

// ---------------------------------------------------------------------------
// Fixture comparison

type Key = (String, Vec<usize>, Signature);

/// Lexicographically least form of (sigma0, signature) under diagram automorphisms.
pub fn canonical_key(rs: &RootSystem, sigma0: &[usize], sig: &Signature) -> (Vec<usize>, Signature) {
    let (canon, autos) = parabolic::canonical_sigma0(rs, sigma0);
    let best = autos
        .iter()
        .map(|p| {
            let mut s: Signature = sig.iter().map(|(c, w)| (*c, parabolic::permute_weight(w, p))).collect();
            s.sort();
            s
        })
        .min()
        .unwrap_or_default();
    (canon, best)
}

fn instance_key(inst: &FixtureInstance) -> Key {
    let rs = root_system(inst.dynkin);
    let mut sig = inst.summands.clone();
    sig.sort();
    let (c, s) = canonical_key(&rs, &inst.sigma0, &sig);
    (inst.dynkin.to_string(), c, s)
}

fn record_key(d: &DiagramRecord, c: &CaseRecord) -> Key {
    let rs = root_system(d.dynkin_type());
    let (s0, sig) = canonical_key(&rs, &d.sigma0_zero(), &c.signature());
    (d.dynkin.clone(), s0, sig)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mismatch {
    /// "missing-pass", "unexpected-pass", "negative", "hermitian", "growth", "explicit", "orphan", "oracle", "error".
    pub kind: String,
    pub case: String,
    pub detail: String,
    /// Set when the disagreement is a known, analysed one.
    pub documented: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Comparison {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl Comparison {
    pub fn undocumented(&self) -> Vec<&Mismatch> {
        self.mismatches.iter().filter(|m| m.documented.is_none()).collect()
    }

    pub fn documented(&self) -> Vec<&Mismatch> {
        self.mismatches.iter().filter(|m| m.documented.is_some()).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitRecord {
    pub instance: String,
    pub table: String,
    pub record: Option<CaseRecord>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub scope: Scope,
    pub diagrams: Vec<DiagramRecord>,
    pub explicit: Vec<ExplicitRecord>,
    pub comparison: Comparison,
}

fn diagram_name(t: &str, sigma0_1: &[usize]) -> String {
    let n: Vec<String> = sigma0_1.iter().map(|x| x.to_string()).collect();
    format!("{t}:x@{}", n.join(","))
}

fn fmt_sig(sig: &Signature) -> String {
    sig.iter()
        .map(|(c, w)| {
            let l: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            format!("{}({})", if *c == SumClass::Sym { "S" } else { "M" }, l.join(","))
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Resolves fixture summands to summands of `ctx`, each used once.
pub fn resolve_summands(ctx: &AlcContext, parts: &[(SumClass, IWeight)]) -> Result<CandidateB> {
    let pd = &ctx.pd;
    let sigma1 = one_based(&pd.sigma0);
    let mut used: Vec<usize> = Vec::new();
    for (class, label) in parts {
        let found = ctx.summands.iter().enumerate().find(|(i, s)| {
            let c = match s.kind {
                SummandKind::Sym2(_) => SumClass::Sym,
                SummandKind::Mixed(..) => SumClass::Mixed,
            };
            !used.contains(i)
                && c == *class
                && levi_only(&s.display(pd), &sigma1) == *label
                && used.iter().all(|&j| ctx.summands[j].support() != s.support())
        });
        match found {
            Some((i, _)) => used.push(i),
            None => return Err(EngineError::Rejected(format!("no summand {}", fmt_sig(&vec![(*class, label.clone())])))),
        }
    }
    Ok(CandidateB { kind: CandidateKind::ExplicitSum, summands: used })
}

/// Checks a fixture row that names B explicitly, on its own crossed nodes.
pub fn run_explicit(inst: &FixtureInstance, cfg: &Config) -> ExplicitRecord {
    let go = || -> Result<CaseRecord> {
        let ctx = context(inst.dynkin, &inst.sigma0)?;
        let cand = resolve_summands(&ctx, &inst.summands)?;
        evaluate(&ctx, &cand, &cfg.alc_options())
    };
    match go() {
        Ok(r) => ExplicitRecord { instance: inst.name(), table: inst.table.clone(), record: Some(r), error: None },
        Err(e) => ExplicitRecord { instance: inst.name(), table: inst.table.clone(), record: None, error: Some(e.to_string()) },
    }
}

fn reason_holds(reason: Option<&str>, c: &CaseRecord) -> bool {
    match reason {
        Some("nondegeneracy") => !c.nondegenerate_yes(),
        Some("alc") => !c.alc_pass(),
        _ => !c.pass,
    }
}

/// Compares sweep results with every fixture instance whose diagram was swept.
pub fn compare(rows: &[FixtureRow], diagrams: &mut [DiagramRecord], explicit: &[ExplicitRecord], scope: &Scope) -> Result<Comparison> {
    let mut cmp = Comparison::default();
    let swept: BTreeMap<(String, Vec<usize>), usize> = diagrams
        .iter()
        .enumerate()
        .map(|(i, d)| ((d.dynkin.clone(), d.sigma0_zero()), i))
        .collect();
    let mut instances = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        instances.extend(fixture::instantiate(i, r, &|f| scope.max_rank(f))?);
    }
    let mut exercised = vec![false; rows.len()];
    let in_sweep = |inst: &FixtureInstance| -> Option<usize> {
        let rs = root_system(inst.dynkin);
        let canon = parabolic::canonical_sigma0(&rs, &inst.sigma0).0;
        swept.get(&(inst.dynkin.to_string(), canon)).copied()
    };

    for d in diagrams.iter() {
        if d.status != "ok" {
            cmp.mismatches.push(Mismatch {
                kind: "error".into(),
                case: diagram_name(&d.dynkin, &d.sigma0),
                detail: d.status.clone(),
                documented: None,
            });
        }
        if !d.oracle_agree {
            cmp.mismatches.push(Mismatch {
                kind: "oracle".into(),
                case: diagram_name(&d.dynkin, &d.sigma0),
                detail: "character and explicit decompositions differ".into(),
                documented: None,
            });
        }
    }

    // passes
    let mut expected: BTreeMap<Key, Vec<&FixtureInstance>> = BTreeMap::new();
    for inst in instances.iter().filter(|i| matches!(i.table.as_str(), "2" | "3" | "more")) {
        if in_sweep(inst).is_some() {
            expected.entry(instance_key(inst)).or_default().push(inst);
            exercised[inst.row] = true;
        }
    }
    // Candidates related by a diagram automorphism fixing the crosses share a key.
    let mut keyed: BTreeMap<Key, Vec<(usize, usize)>> = BTreeMap::new();
    for (di, d) in diagrams.iter().enumerate() {
        for (ci, c) in d.candidates.iter().enumerate() {
            keyed.entry(record_key(d, c)).or_default().push((di, ci));
        }
    }
    for (key, insts) in &expected {
        cmp.checked += 1;
        let names: Vec<String> = insts.iter().map(|i| i.name()).collect();
        let documented = insts.iter().find_map(|i| i.deviation.clone());
        let Some(hits) = keyed.get(key) else {
            cmp.mismatches.push(Mismatch {
                kind: "missing-pass".into(),
                case: format!("{} {}", key.0, fmt_sig(&key.2)),
                detail: format!("{}: candidate not enumerated", names.join(", ")),
                documented,
            });
            continue;
        };
        for &(di, ci) in hits {
            let c = &mut diagrams[di].candidates[ci];
            c.paper_case_id.extend(insts.iter().map(|i| i.id.clone()));
            c.paper_case_id.sort();
            c.paper_case_id.dedup();
            if !c.pass {
                cmp.mismatches.push(Mismatch {
                    kind: "missing-pass".into(),
                    case: format!("{} {}", diagram_name(&c.dynkin, &c.sigma0), c.candidate),
                    detail: format!(
                        "{}: nondegenerate {}, ALC {}, line bundle {}",
                        names.join(", "),
                        c.nondegenerate,
                        c.alc,
                        c.line_bundle_error.as_deref().unwrap_or("ok")
                    ),
                    documented: documented.clone(),
                });
            }
        }
    }
    for d in diagrams.iter() {
        for c in d.candidates.iter().filter(|c| c.pass) {
            cmp.checked += 1;
            if !expected.contains_key(&record_key(d, c)) {
                cmp.mismatches.push(Mismatch {
                    kind: "unexpected-pass".into(),
                    case: format!("{} {}", diagram_name(&d.dynkin, &d.sigma0), c.candidate),
                    detail: "passes but no golden row lists it".into(),
                    documented: None,
                });
            }
        }
    }

    // negatives
    for inst in instances.iter().filter(|i| i.table == "negative") {
        let Some(di) = in_sweep(inst) else { continue };
        exercised[inst.row] = true;
        cmp.checked += 1;
        let d = &mut diagrams[di];
        let dname = diagram_name(&d.dynkin, &d.sigma0);
        if inst.summands.is_empty() {
            for c in d.candidates.iter_mut() {
                c.paper_case_id.push(inst.id.clone());
            }
            for c in d.candidates.iter().filter(|c| !reason_holds(inst.reason.as_deref(), c)) {
                cmp.mismatches.push(Mismatch {
                    kind: "negative".into(),
                    case: format!("{dname} {}", c.candidate),
                    detail: format!("{}: expected failure ({})", inst.name(), inst.reason.as_deref().unwrap_or("any")),
                    documented: inst.deviation.clone(),
                });
            }
            continue;
        }
        let key = instance_key(inst);
        let rs = root_system(d.dynkin_type());
        let s0 = d.sigma0_zero();
        let dn = d.dynkin.clone();
        let mut found = false;
        for c in d.candidates.iter_mut() {
            let (cs, sig) = canonical_key(&rs, &s0, &c.signature());
            if (dn.clone(), cs, sig) != key {
                continue;
            }
            found = true;
            c.paper_case_id.push(inst.id.clone());
            if !reason_holds(inst.reason.as_deref(), c) {
                cmp.mismatches.push(Mismatch {
                    kind: "negative".into(),
                    case: format!("{dname} {}", c.candidate),
                    detail: format!("{}: expected failure ({})", inst.name(), inst.reason.as_deref().unwrap_or("any")),
                    documented: inst.deviation.clone(),
                });
            }
        }
        if !found {
            cmp.mismatches.push(Mismatch {
                kind: "negative".into(),
                case: dname,
                detail: format!("{}: candidate {} not enumerated", inst.name(), fmt_sig(&key.2)),
                documented: inst.deviation.clone(),
            });
        }
    }

    // hermitian positions
    let herm: BTreeSet<(String, Vec<usize>)> = instances
        .iter()
        .filter(|i| i.table == "1")
        .filter_map(|i| {
            let di = in_sweep(i)?;
            exercised[i.row] = true;
            Some((diagrams[di].dynkin.clone(), diagrams[di].sigma0_zero()))
        })
        .collect();
    for d in diagrams.iter() {
        let Some(n) = d.hermitian_count else { continue };
        cmp.checked += 1;
        let listed = herm.contains(&(d.dynkin.clone(), d.sigma0_zero()));
        if (n == 2) != listed {
            cmp.mismatches.push(Mismatch {
                kind: "hermitian".into(),
                case: diagram_name(&d.dynkin, &d.sigma0),
                detail: format!("{n} components, listed: {listed}"),
                documented: None,
            });
        }
    }

    // growth vectors
    for inst in instances.iter().filter(|i| !i.growth.is_empty()) {
        if in_sweep(inst).is_none() {
            continue;
        }
        cmp.checked += 1;
        let pd = parabolic::grading(root_system(inst.dynkin), &inst.sigma0)?;
        let factor = if inst.real_growth { 2 } else { 1 };
        let got: Vec<usize> = pd.growth_vector().iter().map(|x| x * factor).collect();
        if got != inst.growth {
            cmp.mismatches.push(Mismatch {
                kind: "growth".into(),
                case: inst.name(),
                detail: format!("grading gives {got:?}, row gives {:?}", inst.growth),
                documented: None,
            });
        }
    }

    // explicit rows
    for e in explicit {
        cmp.checked += 1;
        let inst = instances.iter().find(|i| i.name() == e.instance);
        let documented = inst.and_then(|i| i.deviation.clone());
        if let Some(i) = inst {
            exercised[i.row] = true;
        }
        let problem = match (&e.record, &e.error) {
            (_, Some(err)) => Some(err.clone()),
            (Some(r), None) if e.table == "paths" => match &r.rescaling {
                Some(s) if s.starts_with("unsolvable") => None,
                other => Some(format!("rescaling {other:?}")),
            },
            (Some(r), None) => {
                if r.nondegenerate_yes() && r.alc_pass() {
                    None
                } else {
                    Some(format!("nondegenerate {}, ALC {}", r.nondegenerate, r.alc))
                }
            }
            (None, None) => Some("no record".into()),
        };
        if let Some(p) = problem {
            cmp.mismatches.push(Mismatch { kind: "explicit".into(), case: e.instance.clone(), detail: p, documented });
        }
    }

    for (i, r) in rows.iter().enumerate() {
        let fam = r.family.chars().next().and_then(Family::from_letter);
        let family_swept = fam.is_some_and(|f| scope.max_rank(f) > 0);
        if !exercised[i] && family_swept && has_instance_in(&instances, i, scope) {
            cmp.mismatches.push(Mismatch {
                kind: "orphan".into(),
                case: r.id.clone(),
                detail: "row never exercised by this sweep".into(),
                documented: None,
            });
        }
    }
    for d in diagrams.iter_mut() {
        for c in d.candidates.iter_mut() {
            if c.paper_case_id.is_empty() && c.pass {
                c.paper_case_id.push("novel".into());
            }
        }
    }
    Ok(cmp)
}

fn has_instance_in(instances: &[FixtureInstance], row: usize, scope: &Scope) -> bool {
    instances.iter().any(|i| {
        i.row == row
            && match scope.crosses {
                CrossMode::Single => i.sigma0.len() == 1,
                CrossMode::Pair => i.sigma0.len() == 2 && i.dynkin.rank <= scope.pair_max_rank,
                CrossMode::Both => i.sigma0.len() == 1 || i.dynkin.rank <= scope.pair_max_rank,
            }
    })
}

/// Explicit rows whose diagrams fall inside `scope`.
pub fn explicit_instances(rows: &[FixtureRow], scope: &Scope) -> Result<Vec<FixtureInstance>> {
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if !matches!(r.table.as_str(), "final" | "paths") {
            continue;
        }
        for inst in fixture::instantiate(i, r, &|f| scope.max_rank(f))? {
            let pair_ok = inst.sigma0.len() == 1 || inst.dynkin.rank <= scope.pair_max_rank;
            if scope.crosses != CrossMode::Single && pair_ok {
                out.push(inst);
            }
        }
    }
    Ok(out)
}

/// Full sweep plus comparison.
pub fn classify(scope: &Scope, cfg: &Config) -> Result<Report> {
    let rows = fixture::load_embedded()?;
    let work = || -> Result<Report> {
        let diagrams_todo = scope.diagrams();
        let mut diagrams: Vec<DiagramRecord> =
            diagrams_todo.par_iter().map(|(t, s)| run_diagram(*t, s, cfg)).collect();
        diagrams.sort_by(|a, b| {
            (a.dynkin_type(), a.sigma0.len(), &a.sigma0).cmp(&(b.dynkin_type(), b.sigma0.len(), &b.sigma0))
        });
        let explicit: Vec<ExplicitRecord> =
            explicit_instances(&rows, scope)?.par_iter().map(|i| run_explicit(i, cfg)).collect();
        let comparison = compare(&rows, &mut diagrams, &explicit, scope)?;
        Ok(Report { scope: scope.clone(), diagrams, explicit, comparison })
    };
    if cfg.worker_count > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.worker_count)
            .build()
            .map_err(|e| EngineError::Io(e.to_string()))?;
        pool.install(work)
    } else {
        work()
    }
}

// ---------------------------------------------------------------------------
// Output

pub fn to_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("serializable")
}

fn picture(d: &DiagramRecord, c: Option<&CaseRecord>) -> String {
    let t = d.dynkin_type();
    let Ok(pd) = parabolic::grading(root_system(t), &d.sigma0_zero()) else {
        return String::new();
    };
    let labels: Option<Vec<num::BigRational>> = c.map(|c| {
        let mut w = vec![0i64; t.rank];
        for s in &c.summands {
            for (i, x) in levi_only(&s.display, &d.sigma0).iter().enumerate() {
                w[i] += x;
            }
        }
        w.into_iter().map(crate::rational::q).collect()
    });
    parabolic::render(&pd, labels.as_deref())
}

pub fn to_markdown(r: &Report) -> String {
    let mut s = String::new();
    s.push_str("# Classification sweep\n\n");
    let passes = r.diagrams.iter().flat_map(|d| &d.candidates).filter(|c| c.pass).count();
    s.push_str(&format!(
        "{} diagrams, {} candidates, {} passing. {} comparisons, {} mismatches ({} documented).\n\n",
        r.diagrams.len(),
        r.diagrams.iter().map(|d| d.candidates.len()).sum::<usize>(),
        passes,
        r.comparison.checked,
        r.comparison.mismatches.len(),
        r.comparison.documented().len()
    ));
    if !r.comparison.mismatches.is_empty() {
        s.push_str("## Mismatches\n\n| kind | case | detail | documented |\n|---|---|---|---|\n");
        for m in &r.comparison.mismatches {
            s.push_str(&format!(
                "| {} | `{}` | {} | {} |\n",
                m.kind,
                m.case,
                m.detail,
                m.documented.as_deref().unwrap_or("**no**")
            ));
        }
        s.push('\n');
    }
    for d in &r.diagrams {
        s.push_str(&format!("## {}\n\n", diagram_name(&d.dynkin, &d.sigma0)));
        s.push_str(&format!(
            "growth {:?}, dim h = {}{}, status {}\n\n",
            d.growth,
            d.socle_dim,
            d.hermitian_count.map(|n| format!(", V(x)V* components {n}")).unwrap_or_default(),
            d.status
        ));
        if d.candidates.is_empty() {
            continue;
        }
        s.push_str("| B | dim | nondegenerate | ALC | L | ell | verdict | case |\n|---|---|---|---|---|---|---|---|\n");
        for c in &d.candidates {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                c.candidate,
                c.dim,
                c.nondegenerate,
                c.alc,
                if c.line_bundles.is_empty() {
                    c.line_bundle_error.clone().unwrap_or_default()
                } else {
                    c.line_bundles.join(" ")
                },
                c.ell.join("; "),
                if c.pass { "**pass**" } else { "fail" },
                c.paper_case_id.join(", ")
            ));
        }
        for c in d.candidates.iter().filter(|c| c.pass) {
            s.push_str(&format!("\n```\n{}\n```\n", picture(d, Some(c))));
        }
        s.push('\n');
    }
    if !r.explicit.is_empty() {
        s.push_str("## Explicit sums\n\n| row | B | nondegenerate | ALC | L | rescaling |\n|---|---|---|---|---|---|\n");
        for e in &r.explicit {
            match &e.record {
                Some(c) => s.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    e.instance,
                    c.candidate,
                    c.nondegenerate,
                    c.alc,
                    if c.line_bundles.is_empty() {
                        c.line_bundle_error.clone().unwrap_or_default()
                    } else {
                        c.line_bundles.join(" ")
                    },
                    c.rescaling.clone().unwrap_or_default()
                )),
                None => s.push_str(&format!("| {} | | | | {} | |\n", e.instance, e.error.clone().unwrap_or_default())),
            }
        }
    }
    s
}

/// Report for a single diagram over all candidates.
pub fn check_diagram(spec: &str, cfg: &Config) -> Result<DiagramRecord> {
    let (t, sigma0) = parabolic::parse_diagram(spec)?;
    let rec = run_diagram(t, &sigma0, cfg);
    if rec.status.starts_with("error") {
        return Err(EngineError::Rejected(rec.status));
    }
    Ok(rec)
}

/// Verdict for a hand-picked sum of summands, e.g. `[(Sym, [0,0,2,0])]`.
pub fn check_explicit(spec: &str, parts: &[(SumClass, IWeight)], cfg: &Config) -> Result<CaseRecord> {
    let (t, sigma0) = parabolic::parse_diagram(spec)?;
    let ctx = context(t, &sigma0)?;
    let cand = resolve_summands(&ctx, parts)?;
    evaluate(&ctx, &cand, &cfg.alc_options())
}

pub fn parabolic_data(spec: &str) -> Result<ParabolicData> {
    let (t, sigma0) = parabolic::parse_diagram(spec)?;
    parabolic::grading(root_system(t), &sigma0)
}
