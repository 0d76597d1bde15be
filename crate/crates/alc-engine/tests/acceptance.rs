//! Ten acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always shown.
//!
//! A criterion that fails only through a documented deviation prints FAIL and
//! does not fail the process; anything else does.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use alc_engine::alc::{self, AlcContext, AlcOptions, EllValue};
use alc_engine::bgg1;
use alc_engine::chevalley;
use alc_engine::classify::{self, CrossMode, Report, Scope};
use alc_engine::config::Config;
use alc_engine::rational::{q, Q};
use alc_engine::tractor;

enum Outcome {
    Pass(String),
    /// Fails for a reason recorded as a deviation; checked precisely.
    Documented(String),
    Fail(String),
}

fn kinds(r: &Report, ks: &[&str]) -> Vec<String> {
    r.comparison
        .mismatches
        .iter()
        .filter(|m| ks.contains(&m.kind.as_str()))
        .map(|m| format!("[{}] {} {}", m.kind, m.case, m.detail))
        .collect()
}

fn verdict(bad: Vec<String>, ok: String) -> Outcome {
    if bad.is_empty() {
        Outcome::Pass(ok)
    } else {
        Outcome::Fail(bad.join("; "))
    }
}

fn single_sweep(cfg: &Config) -> Report {
    let scope = Scope { a: 6, b: 6, c: 6, d: 7, exceptional: true, pair_max_rank: 0, crosses: CrossMode::Single };
    classify::classify(&scope, cfg).expect("single sweep")
}

fn pair_sweep(cfg: &Config) -> Report {
    let scope = Scope { a: 7, b: 7, c: 7, d: 7, exceptional: true, pair_max_rank: 7, crosses: CrossMode::Pair };
    classify::classify(&scope, cfg).expect("pair sweep")
}

fn crit1(single: &Report, secs: f64) -> Outcome {
    let passing = single.diagrams.iter().flat_map(|d| &d.candidates).filter(|c| c.pass).count();
    let mut bad = kinds(single, &["missing-pass", "unexpected-pass", "error", "orphan"]);
    if secs > 600.0 {
        bad.push(format!("took {secs:.0}s"));
    }
    verdict(bad, format!("{} diagrams, {passing} passing candidates, {secs:.1}s", single.diagrams.len()))
}

fn crit2(single: &Report) -> Outcome {
    let listed = single.diagrams.iter().filter(|d| d.hermitian_count == Some(2)).count();
    let mut bad = kinds(single, &["hermitian"]);
    if listed == 0 {
        bad.push("no hermitian positions found".into());
    }
    verdict(bad, format!("{listed} positions with two components"))
}

/// The A_l^{2,h}, A_{2k+1}^{2,s}, final-ii (even l) and final-iii (even k) rows.
fn crit3(pairs: &Report) -> Outcome {
    let und: Vec<String> = pairs
        .comparison
        .undocumented()
        .into_iter()
        .filter(|m| matches!(m.kind.as_str(), "missing-pass" | "unexpected-pass" | "explicit" | "error"))
        .map(|m| format!("[{}] {}", m.kind, m.case))
        .collect();
    if !und.is_empty() {
        return Outcome::Fail(und.join("; "));
    }
    let paths_ok = pairs.explicit.iter().filter(|e| e.table == "paths").all(|e| {
        e.record.as_ref().and_then(|r| r.rescaling.as_deref()).is_some_and(|s| s.starts_with("unsolvable"))
    });
    let f4 = pairs
        .explicit
        .iter()
        .find(|e| e.instance.starts_with("final-i["))
        .and_then(|e| e.record.as_ref())
        .is_some_and(|r| r.alc_pass() && r.nondegenerate_yes());
    if !paths_ok || !f4 {
        return Outcome::Fail(format!("paths unsolvable: {paths_ok}, F4 pair ALC: {f4}"));
    }
    let doc = pairs.comparison.documented();
    let ids: BTreeSet<String> = doc
        .iter()
        .map(|m| {
            let src = if m.kind == "explicit" { &m.case } else { &m.detail };
            src.split([':', '[']).next().unwrap_or("").trim().to_string()
        })
        .collect();
    let allowed: BTreeSet<&str> = ["A_l^{2,h}", "A_{2k+1}^{2,s}", "final-ii", "final-iii"].into();
    if let Some(other) = ids.iter().find(|i| !allowed.contains(i.as_str())) {
        return Outcome::Fail(format!("unexpected deviation {other}"));
    }
    let summary = format!(
        "{} checks; paths unsolvable; F4 pair ALC pass",
        pairs.comparison.checked
    );
    if doc.is_empty() {
        Outcome::Pass(summary)
    } else {
        let cases: Vec<String> = doc.iter().map(|m| m.case.clone()).collect();
        Outcome::Documented(format!("{summary}; {} documented deviations: {}", doc.len(), cases.join(", ")))
    }
}

fn crit4(single: &Report, pairs: &Report) -> Outcome {
    let mut bad = kinds(single, &["negative"]);
    bad.extend(kinds(pairs, &["negative"]));
    let n: usize = [single, pairs]
        .iter()
        .flat_map(|r| &r.diagrams)
        .flat_map(|d| &d.candidates)
        .filter(|c| !c.pass && !c.paper_case_id.is_empty())
        .count();
    verdict(bad, format!("{n} rejected candidates matched to negative rows"))
}

fn projective_ell(n: usize) -> Result<Q, String> {
    let ctx = AlcContext::from_diagram(&format!("A{n}:x@1")).map_err(|e| e.to_string())?;
    let opts = AlcOptions::default();
    for c in alc::enumerate_candidates(&ctx).map_err(|e| e.to_string())? {
        let v = alc::check_alc(&ctx, &c, &opts).map_err(|e| e.to_string())?;
        if !v.passes() {
            continue;
        }
        let mut lines = Vec::new();
        for &i in &c.summands {
            let lb = bgg1::line_bundle_weight(&ctx, i, c.dim(&ctx), &v.counts).map_err(|e| e.to_string())?;
            lines.push(lb.actual);
        }
        let ell = alc::ell_scalars(&ctx, &c, &lines, &opts).map_err(|e| e.to_string())?;
        return match ell.first().map(|e| &e.value) {
            Some(EllValue::Scalar(x)) => Ok(x.clone()),
            other => Err(format!("{other:?}")),
        };
    }
    Err("no passing candidate".into())
}

fn crit5() -> Outcome {
    let mut bad = Vec::new();
    let mut got = Vec::new();
    for n in 2..=6 {
        match projective_ell(n) {
            Ok(x) if x == q(n as i64 + 1) => got.push(format!("A{n}:{x}")),
            Ok(x) => bad.push(format!("A{n}: ell = {x}")),
            Err(e) => bad.push(format!("A{n}: {e}")),
        }
    }
    verdict(bad, got.join(" "))
}

fn crit6(single: &Report) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in &single.diagrams {
        for c in d.candidates.iter().filter(|c| c.pass) {
            let spec = format!(
                "{}:x@{}",
                d.dynkin,
                d.sigma0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            );
            let pd = classify::parabolic_data(&spec).expect("diagram");
            for s in &c.summands {
                let disp: Vec<Q> = s.display.iter().map(|&x| q(x)).collect();
                let (lam_levi, _) = pd.central_projection(&disp);
                for &a in &pd.sigma0 {
                    // Cartan product of V_alpha and the summand
                    let va = bgg1::v_alpha_label(&pd, a);
                    let mu: Vec<Q> = pd.levi_part(&disp.iter().zip(&va).map(|(x, y)| x + y).collect::<Vec<_>>());
                    match bgg1::solve_central_weight(&pd, &lam_levi, &[(a, mu)], &[]) {
                        Ok(cw) => {
                            let lam: Vec<Q> = lam_levi.iter().zip(&cw.weight).map(|(x, y)| x + y).collect();
                            let alpha: Vec<Q> = pd.rs.simple_root_weight(a).iter().map(|&x| q(x)).collect();
                            if !pd.rs.ip(&lam, &alpha).is_zero() {
                                bad.push(format!("{spec} {}: (lam, alpha) != 0", c.candidate));
                            }
                            checked += 1;
                        }
                        Err(e) => bad.push(format!("{spec} {}: {e}", c.candidate)),
                    }
                }
            }
        }
    }
    let cfg = Config::default();
    let twist = |spec: &str| -> Vec<String> {
        classify::check_diagram(spec, &cfg)
            .map(|r| r.candidates.into_iter().filter(|c| c.pass).flat_map(|c| c.line_bundles).collect())
            .unwrap_or_default()
    };
    for n in 2..=6 {
        let mut expect = vec!["0"; n];
        expect[0] = "-2";
        let expect = format!("({})", expect.join(","));
        let got = twist(&format!("A{n}:x@1"));
        if got != [expect.clone()] {
            bad.push(format!("A{n} projective twist {got:?}, expected {expect}"));
        }
    }
    for l in 2..=6 {
        let zero = format!("({})", vec!["0"; l].join(","));
        let got = twist(&format!("B{l}:x@{l}"));
        if got.is_empty() || got.iter().any(|g| *g != zero) {
            bad.push(format!("B{l} free twist {got:?}"));
        }
    }
    verdict(bad, format!("{checked} central solves; projective -2w1; free 0"))
}

fn crit7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ac7);
    let mut agree = 0;
    let mut total = 0;
    let mut residual_ok = true;
    let mut fifth_ok = true;
    // displayed coefficients, with x^a x^b psi^c_c at 1 instead of 1/2
    let mut corrected = tractor::closed_form_coefficients();
    corrected[5] = q(1);
    for n in 2..=6 {
        for _ in 0..100 {
            let p = tractor::random_param(&mut rng, n, 3);
            let f = tractor::random_s2v(&mut rng, n, 3, true);
            let it = tractor::iterates(&p, &f, 5).expect("iterates");
            fifth_ok &= it[5].is_zero();
            let eta = tractor::normal_solution(&p, &f).expect("exp");
            total += 1;
            if eta == tractor::closed_form(&p, &f) {
                agree += 1;
            }
            residual_ok &= eta == tractor::closed_form_with(&p, &f, &corrected);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("exp equals displayed polynomial on {agree}/{total}; fifth iterate zero: {fifth_ok}; {secs:.1}s");
    if !fifth_ok || secs > 30.0 {
        Outcome::Fail(msg)
    } else if agree == total {
        Outcome::Pass(msg)
    } else if residual_ok {
        Outcome::Documented(format!("{msg}; all agree once x^a x^b psi^c_c has coefficient 1"))
    } else {
        Outcome::Fail(msg)
    }
}

fn crit8(single: &Report, pairs: &Report) -> Outcome {
    let mut bad = kinds(single, &["oracle"]);
    bad.extend(kinds(pairs, &["oracle"]));
    let mut n = 0;
    for r in [single, pairs] {
        for d in &r.diagrams {
            n += 1;
            for c in &d.candidates {
                if !c.oracle_agree {
                    bad.push(format!("{} {}: pathways disagree", d.dynkin, c.candidate));
                }
            }
        }
    }
    verdict(bad, format!("S^2 h and V_alpha (x) W agree on {n} diagrams"))
}

fn crit9(single: &Report, pairs: &Report) -> Outcome {
    let mut bad = kinds(single, &["growth"]);
    bad.extend(kinds(pairs, &["growth"]));
    verdict(bad, "every listed growth vector matches".into())
}

fn crit10() -> Outcome {
    match chevalley::verify_bracket_formulas() {
        Ok(rs) => {
            let bad: Vec<String> = rs
                .iter()
                .filter(|r| !r.passed)
                .map(|r| format!("{} on {}: {}", r.name, r.diagram, r.failure.as_deref().unwrap_or("")))
                .collect();
            let triples: usize = rs.iter().map(|r| r.triples).sum();
            verdict(bad, format!("{} formula instances, {triples} triples", rs.len()))
        }
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored; a name filter skips everything.
    if std::env::args().skip(1).any(|a| !a.starts_with('-')) {
        return ExitCode::SUCCESS;
    }
    let cfg = Config::default();
    let t = Instant::now();
    let single = single_sweep(&cfg);
    let single_secs = t.elapsed().as_secs_f64();
    let pairs = pair_sweep(&cfg);
    let results = [
        ("single-cross sweep", crit1(&single, single_secs)),
        ("hermitian positions", crit2(&single)),
        ("pairs and explicit rows", crit3(&pairs)),
        ("negative rows", crit4(&single, &pairs)),
        ("projective ell = n + 1", crit5()),
        ("central weight and twists", crit6(&single)),
        ("tractor normal solution", crit7()),
        ("oracle agreement", crit8(&single, &pairs)),
        ("growth vectors", crit9(&single, &pairs)),
        ("bracket formulas", crit10()),
    ];
    let mut hard = false;
    for (i, (name, o)) in results.iter().enumerate() {
        match o {
            Outcome::Pass(m) => println!("criterion {:>2} PASS {name}: {m}", i + 1),
            Outcome::Documented(m) => println!("criterion {:>2} FAIL {name} (documented): {m}", i + 1),
            Outcome::Fail(m) => {
                hard = true;
                println!("criterion {:>2} FAIL {name}: {m}", i + 1);
            }
        }
    }
    if hard {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
