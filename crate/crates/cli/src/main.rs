//! `symspec`: analysis, sweeps, matrix export and certificate construction.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symspec::construct::{bs92_sample, sign_poly_for_with_margin};
use symspec::fourier::{level_spectrum, wht};
use symspec::harness::{any_failed, ledger_jsonl, parse_checks, run_dense, run_function, summary_csv, sweep, SweepOptions};
use symspec::liftmat::{lift, matrix_stats, plan_reduction, promise_lift, stats_json};
use symspec::optimize::{approx_l1, approx_l1_dense, mon_eps_exact, mon_eps_symmetric_upper, signmon_exact, verify_sign};
use symspec::rational::{dyadic, fmt_q, parse_q};
use symspec::{BoolFn, Config, Error, LiftKind, Mode, SymFn};

#[derive(Parser, Debug)]
#[command(name = "symspec", version, about = "Spectral analysis of symmetric Boolean functions")]
struct Cli {
    /// Config file of `key = value` lines; defaults to $SYMSPEC_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for written files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measures, spectrum, norms and optimisation quantities of one function.
    Analyze {
        #[command(flatten)]
        func: FnSpec,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file name inside the output directory.
        #[arg(long)]
        save: Option<String>,
    },
    /// Exhaustive check sweep; writes ledger.jsonl and summary.csv.
    Sweep {
        /// Range of n: `6`, `2..6` (inclusive) or `2..=6`.
        #[arg(long, default_value = "1..8")]
        n: String,
        /// Comma-separated check ids or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Replay the checks on one function instead of sweeping.
        #[command(flatten)]
        func: OptFnSpec,
    },
    /// Writes a lift matrix and its stats.
    Matrix {
        #[command(flatten)]
        func: FnSpec,
        #[arg(long, value_enum, default_value = "xor")]
        kind: KindArg,
        /// Promise `k=<k>,t=<t>`.
        #[arg(long)]
        promise: Option<String>,
        /// Also print the reduction plan.
        #[arg(long)]
        plan: bool,
    },
    /// Builds and verifies a sign polynomial, or runs the sampling approximator.
    Construct {
        #[command(flatten)]
        func: FnSpec,
        #[arg(value_enum)]
        which: Which,
        /// Approximation radius for `bs92`.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Margin constant for `signpoly`, a rational in (0, 2).
        #[arg(long)]
        margin: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
struct FnSpec {
    /// Value vector on weights 0..n, e.g. `000111`.
    #[arg(long, group = "function")]
    sym: Option<String>,
    /// Named family: and, or, parity, maj, mod<m>, threshold<t>, const0, const1.
    #[arg(long, group = "function")]
    name: Option<String>,
    /// Truth table in hex, entry x at bit x.
    #[arg(long, group = "function")]
    hex: Option<String>,
    /// Number of inputs for `--name` and `--hex`.
    #[arg(long = "n")]
    n: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct OptFnSpec {
    #[arg(long)]
    sym: Option<String>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    hex: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Xor,
    And,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Signpoly,
    Bs92,
}

/// A parsed function argument.
enum Func {
    Sym(SymFn),
    Dense(BoolFn),
}

impl Func {
    fn dense(&self, cfg: &Config) -> symspec::Result<BoolFn> {
        match self {
            Func::Sym(f) => f.expand(cfg.caps.expand),
            Func::Dense(g) => Ok(g.clone()),
        }
    }

    fn symmetric(&self) -> anyhow::Result<SymFn> {
        match self {
            Func::Sym(f) => Ok(f.clone()),
            Func::Dense(g) => g.as_symmetric().ok_or_else(|| usage("this command needs a symmetric function")),
        }
    }

    fn label(&self) -> String {
        match self {
            Func::Sym(f) => f.to_string(),
            Func::Dense(g) => format!("hex-{}", g.to_hex()),
        }
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

#[derive(Debug)]
struct ChecksFailed;

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("one or more checks failed")
    }
}

impl std::error::Error for ChecksFailed {}

fn parse_fn(args: &FnSpec) -> anyhow::Result<Func> {
    match (&args.sym, &args.name, &args.hex) {
        (Some(s), None, None) => Ok(Func::Sym(s.parse()?)),
        (None, Some(name), None) => {
            let n = args.n.ok_or_else(|| usage("--name needs --n"))?;
            Ok(Func::Sym(SymFn::named(name, n)?))
        }
        (None, None, Some(hex)) => {
            let n = args.n.ok_or_else(|| usage("--hex needs --n"))?;
            let g = BoolFn::from_hex(n, hex)?;
            Ok(match g.as_symmetric() {
                Some(f) => Func::Sym(f),
                None => Func::Dense(g),
            })
        }
        _ => Err(usage("give exactly one of --sym, --name, --hex")),
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut cfg = Config::default();
    let path = cli.config.clone().or_else(|| std::env::var_os("SYMSPEC_CONFIG").map(PathBuf::from));
    if let Some(path) = path {
        let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        cfg.apply_text(&text)?;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

/// Writes to a temporary sibling and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().ok_or_else(|| anyhow!("bad output path {}", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || usage(format!("bad range {s:?}; use 6, 2..6 or 2..=6"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn parse_promise(s: &str) -> anyhow::Result<(usize, usize)> {
    let (mut k, mut t) = (None, Some(0));
    for part in s.split(',') {
        let (key, v) = part.split_once('=').ok_or_else(|| usage(format!("bad promise {s:?}; use k=3,t=0")))?;
        let v: usize = v.trim().parse().map_err(|_| usage(format!("bad promise value {v:?}")))?;
        match key.trim() {
            "k" => k = Some(v),
            "t" => t = Some(v),
            other => return Err(usage(format!("unknown promise key {other:?}"))),
        }
    }
    Ok((k.ok_or_else(|| usage("promise needs k"))?, t.unwrap()))
}

/// Runs `f` and records a cap violation instead of failing.
fn capped<T: serde::Serialize>(r: symspec::Result<T>) -> anyhow::Result<Value> {
    match r {
        Ok(v) => Ok(serde_json::to_value(v)?),
        Err(e @ Error::CapExceeded { .. }) => Ok(json!({ "skipped": e.to_string() })),
        Err(e) => Err(e.into()),
    }
}

fn analyze(func: &Func, cfg: &Config) -> anyhow::Result<Value> {
    let mut report = serde_json::Map::new();
    let n = match func {
        Func::Sym(f) => f.n(),
        Func::Dense(g) => g.n(),
    };
    report.insert("n".into(), json!(n));
    match func {
        Func::Sym(f) => {
            report.insert("function".into(), json!(f.to_string()));
            report.insert("measures".into(), serde_json::to_value(f.measures())?);
            let levels = level_spectrum(f);
            report.insert("levels".into(), json!(levels.levels().iter().map(fmt_q).collect::<Vec<_>>()));
            report.insert("spectrum".into(), serde_json::to_value(levels.stats())?);
            report.insert("sign_encoding_linf".into(), json!(fmt_q(&dyadic(levels.sign_encoding().linf_numerator() as i64, n))));
            let terms = symspec::construct::sign_poly_for(f).term_count();
            let bound = (n as u128 + 2).pow(f.measures().rho as u32);
            report.insert("signmon_construction".into(), json!({ "terms": terms.to_string(), "bound": bound.to_string() }));
            report.insert("approx_l1".into(), json!(fmt_q(&approx_l1(f, &cfg.eps_l1)?.value)));
            report.insert("approx_l1_inner".into(), json!(fmt_q(&approx_l1(f, &cfg.eps_inner)?.value)));
            report.insert("mon_eps_symmetric_upper".into(), capped(mon_eps_symmetric_upper(f, &cfg.eps_mon, &cfg.caps))?);
            let xor = lift(f, LiftKind::Xor, &cfg.caps).and_then(|m| matrix_stats(&m, &cfg.caps));
            report.insert("xor_lift".into(), capped(xor)?);
        }
        Func::Dense(g) => {
            report.insert("function".into(), json!(format!("hex:{}", g.to_hex())));
            report.insert("spectrum".into(), capped(wht(g, Mode::Exact, &cfg.caps).map(|s| s.stats()))?);
            report.insert("approx_l1".into(), capped(approx_l1_dense(g, &cfg.eps_l1, &cfg.caps).map(|r| fmt_q(&r.value)))?);
        }
    }
    let g = func.dense(cfg)?;
    report.insert("mon_eps".into(), capped(mon_eps_exact(&g, &cfg.eps_mon, &cfg.caps))?);
    report.insert("signmon".into(), capped(signmon_exact(&g, &cfg.caps))?);
    report.insert("eps".into(), json!({ "mon": fmt_q(&cfg.eps_mon), "l1": fmt_q(&cfg.eps_l1), "inner": fmt_q(&cfg.eps_inner) }));
    Ok(Value::Object(report))
}

fn render_text(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {s}\n"));
        }
    }
    out
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = load_config(&cli)?;
    cfg.validate()?;
    match &cli.command {
        Command::Analyze { func, json, save } => {
            let func = parse_fn(func)?;
            let report = analyze(&func, &cfg)?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_text(&report));
            }
            if let Some(name) = save {
                write_atomic(&cfg.out_dir.join(name), &serde_json::to_string_pretty(&report)?)?;
            }
        }
        Command::Sweep { n, checks, func } => {
            let checks = parse_checks(checks)?;
            let rows = match (&func.sym, &func.name, &func.hex) {
                (None, None, None) => {
                    let opts = SweepOptions::new(parse_range(n)?, &checks, cfg.clone());
                    sweep(&opts)?
                }
                (Some(s), None, None) => run_function(&s.parse()?, &checks, &cfg),
                (None, Some(name), None) => run_function(&SymFn::named(name, parse_single(n)?)?, &checks, &cfg),
                (None, None, Some(hex)) => run_dense(&BoolFn::from_hex(parse_single(n)?, hex)?, &cfg),
                _ => return Err(usage("give at most one of --sym, --name, --hex")),
            };
            write_atomic(&cfg.out_dir.join("ledger.jsonl"), &ledger_jsonl(&rows))?;
            let summary = summary_csv(&rows);
            write_atomic(&cfg.out_dir.join("summary.csv"), &summary)?;
            print!("{summary}");
            if any_failed(&rows) {
                for r in rows.iter().filter(|r| r.verdict == symspec::harness::Verdict::Fail) {
                    eprintln!("fail: {} {} {} lhs={} rhs={}", r.check_id, r.item, r.instance, r.lhs, r.rhs);
                }
                return Err(anyhow!(ChecksFailed));
            }
        }
        Command::Matrix { func, kind, promise, plan } => {
            let f = parse_fn(func)?.symmetric()?;
            let kind = match kind {
                KindArg::Xor => LiftKind::Xor,
                KindArg::And => LiftKind::And,
            };
            let m = match promise {
                Some(p) => {
                    let (k, t) = parse_promise(p)?;
                    promise_lift(&f, kind, k, t, &cfg.caps)?
                }
                None => lift(&f, kind, &cfg.caps)?,
            };
            let stats = matrix_stats(&m, &cfg.caps)?;
            let tag = format!("{}-{f}", if kind == LiftKind::Xor { "xor" } else { "and" });
            write_atomic(&cfg.out_dir.join(format!("matrix-{tag}.txt")), &m.to_text())?;
            let stats = stats_json(&m, &stats);
            write_atomic(&cfg.out_dir.join(format!("matrix-{tag}.json")), &serde_json::to_string_pretty(&stats)?)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
            if *plan {
                match plan_reduction(&f) {
                    Ok(p) => println!(
                        "plan: s={} t={} k={} ell={} case={:?} reversed={} raz_applicable={}",
                        p.s, p.t, p.k, p.ell, p.case, p.reversed, p.raz_applicable
                    ),
                    Err(e) => println!("no-plan: {e}"),
                }
            }
        }
        Command::Construct { func, which, eps, trials, margin } => {
            let func = parse_fn(func)?;
            match which {
                Which::Signpoly => {
                    let f = func.symmetric()?;
                    let margin = match margin {
                        Some(m) => parse_q(m).ok_or_else(|| usage(format!("bad margin {m:?}")))?,
                        None => cfg.sign_margin.clone(),
                    };
                    let p = sign_poly_for_with_margin(&f, &margin)?;
                    let check = verify_sign(&p, &f);
                    if !check.ok {
                        return Err(Error::Verification(format!("sign polynomial for {f} does not sign-represent it")).into());
                    }
                    let text = serde_json::to_string_pretty(&p.to_json())?;
                    write_atomic(&cfg.out_dir.join(format!("signpoly-{f}.json")), &text)?;
                    println!("{text}");
                }
                Which::Bs92 => {
                    let g = func.dense(&cfg)?;
                    let eps = eps.unwrap_or_else(|| symspec::rational::to_f64(&cfg.eps_mon));
                    let report = bs92_sample(&g, eps, trials.unwrap_or(cfg.trials), cfg.seed, &cfg.caps)?;
                    let csv = report.to_csv();
                    write_atomic(&cfg.out_dir.join(format!("bs92-{}.csv", func.label())), &csv)?;
                    print!("{csv}");
                    eprintln!(
                        "samples {} median error {:.6} max support {}",
                        report.samples,
                        report.median_error(),
                        report.max_support()
                    );
                }
            }
        }
    }
    Ok(())
}

fn parse_single(n: &str) -> anyhow::Result<usize> {
    let ns = parse_range(n)?;
    if ns.len() != 1 {
        bail!(Usage("replay with --name or --hex needs a single --n".into()));
    }
    Ok(ns[0])
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Verification(_)) => 3,
        Some(
            Error::Parse { .. }
            | Error::InvalidFunction(_)
            | Error::OutOfRange(_)
            | Error::CapExceeded { .. }
            | Error::PromiseViolated(_)
            | Error::ShapeMismatch(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
