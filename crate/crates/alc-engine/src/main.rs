use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use alc_engine::alc::AlcContext;
use alc_engine::bgg1;
use alc_engine::classify::{self, CrossMode, Scope};
use alc_engine::config::Config;
use alc_engine::fixture::SumClass;
use alc_engine::parabolic;
use alc_engine::rational::{fmt_q, fmt_qvec, q};
use alc_engine::tractor;
use alc_engine::Result;

#[derive(Parser)]
#[command(name = "alc-engine", version, about = "Parabolic geometry classification engine")]
struct Cli {
    /// TOML file with max_rank, worker_count, sample_box, seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Crosses {
    Single,
    Pair,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep crossed diagrams and compare with the golden rows.
    Classify {
        #[arg(long)]
        max_rank: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        crosses: Crosses,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// All verdicts for one diagram, e.g. `B3:x@3`.
    Check {
        diagram: String,
        /// `all`, or summands like `S:2@1+S:2@4` (S = symmetric, M = mixed).
        #[arg(long = "B", default_value = "all")]
        b: String,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// Central weights, line bundles and Casimir coefficients.
    Bgg { diagram: String },
    /// Growth vector and graded dimensions.
    Growth { diagram: String },
    /// Exponential of the nilpotent action versus the closed form.
    Tractor {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        symbolic: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn parse_b(spec: &str, pd: &parabolic::ParabolicData) -> Result<Vec<(SumClass, Vec<i64>)>> {
    let mut out = Vec::new();
    for part in spec.split('+') {
        let (kind, rest) = part.split_once(':').unwrap_or((part, ""));
        let class = match kind.trim() {
            "S" | "s" | "sym" => SumClass::Sym,
            "M" | "m" | "mixed" => SumClass::Mixed,
            k => return Err(alc_engine::EngineError::Parse(format!("summand kind {k:?}"))),
        };
        let mut w = vec![0i64; pd.rank()];
        for e in rest.split(',').filter(|e| !e.trim().is_empty()) {
            let (v, n) = e
                .split_once('@')
                .ok_or_else(|| alc_engine::EngineError::Parse(format!("label entry {e:?}")))?;
            let v: i64 = v.trim().parse().map_err(|_| alc_engine::EngineError::Parse(e.into()))?;
            let n: usize = n.trim().parse().map_err(|_| alc_engine::EngineError::Parse(e.into()))?;
            if n == 0 || n > pd.rank() {
                return Err(alc_engine::EngineError::InvalidNodes(format!("node {n}")));
            }
            w[n - 1] += v;
        }
        out.push((class, w));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.cmd {
        Cmd::Classify { max_rank, crosses, format } => {
            if let Some(m) = max_rank {
                cfg.max_rank = m;
            }
            let mode = match crosses {
                Crosses::Single => CrossMode::Single,
                Crosses::Pair => CrossMode::Pair,
                Crosses::Both => CrossMode::Both,
            };
            let report = classify::classify(&Scope::from_max_rank(cfg.max_rank, mode), &cfg)?;
            match format {
                Format::Json => println!("{}", classify::to_json(&report)),
                Format::Markdown => println!("{}", classify::to_markdown(&report)),
            }
            let bad = report.comparison.undocumented();
            for m in &bad {
                eprintln!("mismatch [{}] {}: {}", m.kind, m.case, m.detail);
            }
            Ok(if bad.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Check { diagram, b, format } => {
            if b == "all" {
                let rec = classify::check_diagram(&diagram, &cfg)?;
                match format {
                    Format::Json => println!("{}", serde_json::to_string_pretty(&rec).expect("serializable")),
                    Format::Markdown => {
                        let report = classify::Report {
                            scope: Scope::from_max_rank(0, CrossMode::Both),
                            diagrams: vec![rec],
                            explicit: vec![],
                            comparison: Default::default(),
                        };
                        println!("{}", classify::to_markdown(&report));
                    }
                }
            } else {
                let pd = classify::parabolic_data(&diagram)?;
                let parts = parse_b(&b, &pd)?;
                let rec = classify::check_explicit(&diagram, &parts, &cfg)?;
                println!("{}", serde_json::to_string_pretty(&rec).expect("serializable"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bgg { diagram } => {
            let ctx = AlcContext::from_diagram(&diagram)?;
            let rec = classify::check_diagram(&diagram, &cfg)?;
            let pd = &ctx.pd;
            println!("{}", parabolic::render(pd, None));
            for c in rec.candidates.iter().filter(|c| c.alc_pass()) {
                println!("\nB = {}  (dim {})", c.candidate, c.dim);
                if let Some(e) = &c.line_bundle_error {
                    println!("  no line bundle: {e}");
                    continue;
                }
                for (s, lb) in c.summands.iter().zip(&c.line_bundles) {
                    println!("  summand {:?}: L = {lb}", s.display);
                }
                // Casimir coefficients for each kernel component, with the recovered central weight.
                for (si, s) in c.summands.iter().enumerate() {
                    let idx = ctx
                        .summands
                        .iter()
                        .position(|w| w.display(pd) == s.display && w.dim() == s.dim)
                        .expect("summand present");
                    let v = alc_engine::alc::check_alc(
                        &ctx,
                        &alc_engine::alc::CandidateB {
                            kind: alc_engine::alc::CandidateKind::ExplicitSum,
                            summands: vec![idx],
                        },
                        &cfg.alc_options(),
                    )?;
                    let lb = bgg1::line_bundle_weight(&ctx, idx, c.dim, &v.counts)?;
                    println!("  summand {si}: lambda0 coordinates {}", fmt_qvec(&lb.lambda0.coords));
                    let disp: Vec<_> = s.display.iter().map(|&x| q(x)).collect();
                    let (lam_levi, _) = pd.central_projection(&disp);
                    for pc in v.counts.iter().filter(|p| p.own) {
                        let a = bgg1::v_alpha_label(pd, pc.alpha);
                        let ap = pd.levi_part(&a);
                        let pos = pd.cross_pos(pc.alpha).expect("crossed");
                        for k in &pc.kernel {
                            let mu: Vec<_> = pd.dual_label(k).iter().map(|&x| q(x)).collect();
                            let levi = bgg1::casimir_direct(pd, &lam_levi, &pd.levi_part(&mu), &ap);
                            let central = -pd.rs.ip(&lb.lambda0.weight, &pd.central_basis[pos]);
                            println!(
                                "    node {} -> {:?}: c' = {}, (lambda0, a0) = {}, total = {}",
                                pc.alpha + 1,
                                pd.dual_label(k),
                                fmt_q(&levi),
                                fmt_q(&central),
                                fmt_q(&(levi.clone() + central.clone()))
                            );
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Growth { diagram } => {
            let pd = classify::parabolic_data(&diagram)?;
            println!("{}", parabolic::render(&pd, None));
            let dims: Vec<String> = pd.grading.iter().map(|(k, d)| format!("g_-{k}: {d}")).collect();
            println!("{}", dims.join(", "));
            let g: Vec<String> = pd.growth_vector().iter().map(|x| x.to_string()).collect();
            println!("growth {}", g.join(","));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Tractor { n, symbolic, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            if symbolic {
                let rows = tractor::symbolic_report(&mut rng, n)?;
                println!("{}", tractor::render_symbolic(&rows));
                return Ok(ExitCode::SUCCESS);
            }
            let mut agree = 0;
            for _ in 0..samples {
                let p = tractor::random_param(&mut rng, n, 3);
                let f = tractor::random_s2v(&mut rng, n, 3, true);
                if tractor::iterates(&p, &f, 5)?.last().is_some_and(|x| !x.is_zero()) {
                    println!("fifth iterate nonzero");
                    return Ok(ExitCode::from(1));
                }
                if tractor::normal_solution(&p, &f)? == tractor::closed_form(&p, &f) {
                    agree += 1;
                }
            }
            println!("n = {n}: fifth iterate zero on {samples} samples; exponential equals closed form on {agree}/{samples}");
            Ok(if agree == samples { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
