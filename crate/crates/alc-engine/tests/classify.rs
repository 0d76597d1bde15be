use std::process::Command;

use alc_engine::classify::{self, CrossMode, Report, Scope};
use alc_engine::config::Config;
use alc_engine::fixture;

fn small_scope() -> Scope {
    Scope { a: 4, b: 3, c: 3, d: 4, exceptional: false, pair_max_rank: 4, crosses: CrossMode::Both }
}

#[test]
fn json_is_byte_identical_across_runs() {
    let cfg = Config::default();
    let a = classify::to_json(&classify::classify(&small_scope(), &cfg).unwrap());
    let b = classify::to_json(&classify::classify(&small_scope(), &Config { worker_count: 1, ..cfg }).unwrap());
    assert_eq!(a, b);
}

#[test]
fn small_sweep_matches_fixtures() {
    let r = classify::classify(&small_scope(), &Config::default()).unwrap();
    let bad = r.comparison.undocumented();
    assert!(bad.is_empty(), "{bad:?}");
    // ordering is by type, then number of crosses, then crosses
    let names: Vec<(String, usize, Vec<usize>)> =
        r.diagrams.iter().map(|d| (d.dynkin.clone(), d.sigma0.len(), d.sigma0.clone())).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn flipped_fixture_is_reported() {
    let cfg = Config::default();
    let scope = small_scope();
    let mut report: Report = classify::classify(&scope, &cfg).unwrap();
    let mut rows = fixture::load_embedded().unwrap();
    let row = rows.iter_mut().find(|r| r.id == "A_l^{1,1}").unwrap();
    row.verdict = "fail".into();
    row.table = "negative".into();
    row.reason = Some("alc".into());
    for d in &mut report.diagrams {
        for c in &mut d.candidates {
            c.paper_case_id.clear();
        }
    }
    let cmp = classify::compare(&rows, &mut report.diagrams, &report.explicit, &scope).unwrap();
    let bad = cmp.undocumented();
    assert!(bad.iter().any(|m| m.kind == "negative" && m.detail.contains("A_l^{1,1}")), "{bad:?}");
    assert!(bad.iter().any(|m| m.kind == "unexpected-pass"), "{bad:?}");
}

#[test]
fn empty_report_renders() {
    let r = Report {
        scope: Scope::from_max_rank(0, CrossMode::Single),
        diagrams: vec![],
        explicit: vec![],
        comparison: Default::default(),
    };
    let md = classify::to_markdown(&r);
    assert!(md.contains("0 diagrams"), "{md}");
    let v: serde_json::Value = serde_json::from_str(&classify::to_json(&r)).unwrap();
    assert!(v["diagrams"].as_array().unwrap().is_empty());
}

#[test]
fn g2_record_shows_growth() {
    let rec = classify::check_diagram("G2:x@1", &Config::default()).unwrap();
    assert_eq!(rec.growth, vec![2, 3, 5]);
    let r = Report { scope: Scope::from_max_rank(0, CrossMode::Single), diagrams: vec![rec], explicit: vec![], comparison: Default::default() };
    assert!(classify::to_markdown(&r).contains("[2, 3, 5]"));
}

#[test]
fn budget_skips_are_reported() {
    let cfg = Config { max_sym2_dim: 10, ..Config::default() };
    let rec = classify::check_diagram("B4:x@1", &cfg);
    match rec {
        Ok(r) => assert_eq!(r.status, "skipped(budget)"),
        Err(e) => panic!("{e}"),
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alc-engine"))
}

#[test]
fn cli_classify_exit_code() {
    let out = cli().args(["classify", "--max-rank", "4", "--crosses", "single", "--format", "json"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["comparison"]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn cli_subcommands() {
    let out = cli().args(["growth", "F4:x@2,4"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("growth 6,11,17,19,21,22"));
    let out = cli().args(["check", "B3:x@3", "--B", "all"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("**pass**"));
    let out = cli().args(["bgg", "A3:x@1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("total = 0"));
    let out = cli().args(["tractor", "--n", "3", "--symbolic"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("psi^c_c"));
    let out = cli().args(["growth", "Q3:x@1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_reads_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cfg.toml");
    std::fs::write(&p, "max_rank = 3\nworker_count = 2\n").unwrap();
    let out = cli().args(["--config", p.to_str().unwrap(), "classify", "--crosses", "single"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("## A3:x@1"));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("## A4:x@1"));
    std::fs::write(&p, "colour = 3\n").unwrap();
    let out = cli().args(["--config", p.to_str().unwrap(), "growth", "A2:x@1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cache_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = cli().env("ALC_ENGINE_CACHE", dir.path()).args(["check", "B3:x@1", "--format", "json"]).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert_eq!(first, run());
}
