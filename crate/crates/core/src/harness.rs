//! Exhaustive sweeps over symmetric functions with a JSON-lines ledger.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::construct::{bs92_sample, sign_poly_for};
use crate::error::{Error, Result};
use crate::fourier::{level_spectrum, wht, LevelSpectrum, Mode};
use crate::func::{BoolFn, SymFn};
use crate::liftmat::{ftof_check, padding_embedding, plan_reduction, xor_to_and_identity};
use crate::optimize::{approx_l1, mon_eps_exact, signmon_exact, verify_sign};
use crate::rational::{binom, dyadic, fmt_q, log2, qi, to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::C1,
        CheckId::C2,
        CheckId::C3,
        CheckId::C4,
        CheckId::C5,
        CheckId::C6,
        CheckId::C7,
        CheckId::C8,
        CheckId::C9,
        CheckId::C10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::C1 => "C1",
            CheckId::C2 => "C2",
            CheckId::C3 => "C3",
            CheckId::C4 => "C4",
            CheckId::C5 => "C5",
            CheckId::C6 => "C6",
            CheckId::C7 => "C7",
            CheckId::C8 => "C8",
            CheckId::C9 => "C9",
            CheckId::C10 => "C10",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            CheckId::C1 => "sign construction term count <= (n+2)^rho",
            CheckId::C2 => "infinity norm >= (n+2)^-rho",
            CheckId::C3 => "signmon >= 1 / infinity norm",
            CheckId::C4 => "sampled approximator support and median error",
            CheckId::C5 => "Fourier versus XOR-lift matrix quantities",
            CheckId::C6 => "XOR/AND promise identity and planner invariants",
            CheckId::C7 => "padding embedding",
            CheckId::C8 => "input complementation invariances",
            CheckId::C9 => "approximate L1 versus approximate monomial count",
            CheckId::C10 => "trend reports",
        }
    }

    /// Largest `n` the check runs at under `cfg`.
    pub fn max_n(self, cfg: &Config) -> usize {
        let caps = &cfg.caps;
        match self {
            CheckId::C1 => 10,
            CheckId::C2 => 14,
            CheckId::C3 => 4.min(caps.lp_enum),
            CheckId::C4 => 10.min(caps.wht_exact),
            CheckId::C5 => 8.min(caps.eigen).min(caps.lift),
            CheckId::C6 => 10,
            CheckId::C7 => 5,
            CheckId::C8 => 14,
            CheckId::C9 => 4.min(caps.lp_enum),
            CheckId::C10 => 14,
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("unknown check id {s:?}") })
    }
}

impl Serialize for CheckId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Parses `C1,C3` or `all`.
pub fn parse_checks(s: &str) -> Result<Vec<CheckId>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut out: Vec<CheckId> = s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty check list".into() });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
    Skip,
    VacuousPass,
}

/// One evaluated instance of a check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    /// Sub-item of the check, e.g. `rank` or `planner`.
    pub item: &'static str,
    pub n: usize,
    /// Replayable descriptor: a value vector, `hex:<table>` or `<name>:<values>`.
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(check_id: CheckId, item: &'static str, n: usize, instance: String) -> Self {
        CheckResult {
            check_id,
            item,
            n,
            instance,
            lhs: String::new(),
            rhs: String::new(),
            verdict: Verdict::Pass,
            elapsed_ms: 0.0,
            note: None,
        }
    }

    fn with(mut self, lhs: impl ToString, rhs: impl ToString, verdict: Verdict) -> Self {
        self.lhs = lhs.to_string();
        self.rhs = rhs.to_string();
        self.verdict = verdict;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Copy with the timing removed, for byte comparisons.
    pub fn untimed(&self) -> CheckResult {
        CheckResult { elapsed_ms: 0.0, ..self.clone() }
    }
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// What a sweep covers.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub ns: Vec<usize>,
    pub checks: Vec<CheckId>,
    pub config: Config,
    /// Random non-symmetric functions at `n = 3` for the Bruck check.
    pub random_samples: usize,
}

impl SweepOptions {
    pub fn new(ns: impl IntoIterator<Item = usize>, checks: &[CheckId], config: Config) -> Self {
        SweepOptions { ns: ns.into_iter().collect(), checks: checks.to_vec(), config, random_samples: 1000 }
    }
}

/// Names of the sampling-check suite at `n`.
pub const BS92_SUITE: [&str; 5] = ["and", "or", "maj", "mod3", "threshold"];

fn suite_function(name: &str, n: usize) -> SymFn {
    if name == "threshold" {
        SymFn::threshold(n, n.div_ceil(3))
    } else {
        SymFn::named(name, n).expect("suite names parse")
    }
}

#[derive(Clone, Debug)]
enum Target {
    Sym(SymFn),
    Suite(&'static str, SymFn),
    Dense(BoolFn),
    Capped(CheckId, usize),
}

/// Runs the selected checks. Results follow the enumeration order
/// (by `n`, then by value vector, suite entries and random samples last)
/// whatever the worker count.
pub fn sweep(opts: &SweepOptions) -> Result<Vec<CheckResult>> {
    opts.config.validate()?;
    let cfg = &opts.config;
    let mut targets = Vec::new();
    for &n in &opts.ns {
        for &c in &opts.checks {
            if n > c.max_n(cfg) {
                targets.push(Target::Capped(c, n));
            }
        }
        if opts.checks.iter().any(|&c| c != CheckId::C4 && n <= c.max_n(cfg)) {
            targets.extend(SymFn::all(n).map(Target::Sym));
        }
        if opts.checks.contains(&CheckId::C4) && n <= CheckId::C4.max_n(cfg) {
            targets.extend(BS92_SUITE.iter().map(|&name| Target::Suite(name, suite_function(name, n))));
        }
        if n == 3 && opts.checks.contains(&CheckId::C3) && n <= CheckId::C3.max_n(cfg) {
            targets.extend(random_nonsymmetric(3, opts.random_samples, cfg.seed).into_iter().map(Target::Dense));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::OutOfRange(format!("worker pool: {e}")))?;
    let nested: Vec<Vec<CheckResult>> =
        pool.install(|| targets.par_iter().map(|t| run_target(t, &opts.checks, cfg)).collect());
    Ok(nested.into_iter().flatten().collect())
}

/// `count` distinct-draw truth tables on `n` bits that are not symmetric.
pub fn random_nonsymmetric(n: usize, count: usize, seed: u64) -> Vec<BoolFn> {
    assert!(n <= 6, "random tables need n <= 6");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = 1u32 << n;
    let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = BoolFn::from_u64(n, rng.random::<u64>() & mask);
        if g.as_symmetric().is_none() {
            out.push(g);
        }
    }
    out
}

fn run_target(t: &Target, checks: &[CheckId], cfg: &Config) -> Vec<CheckResult> {
    match t {
        Target::Capped(c, n) => vec![CheckResult::new(*c, "all", *n, format!("n={n}"))
            .with("", c.max_n(cfg), Verdict::Skip)
            .note(format!("n = {n} exceeds the check limit {}", c.max_n(cfg)))],
        Target::Sym(f) => {
            let sym: Vec<CheckId> =
                checks.iter().copied().filter(|&c| c != CheckId::C4 && f.n() <= c.max_n(cfg)).collect();
            run_function(f, &sym, cfg)
        }
        Target::Suite(name, f) => timed(|| vec![check_bs92(name, f, cfg)]),
        Target::Dense(g) => run_dense(g, cfg),
    }
}

/// Runs every selected check on one symmetric function; also the replay
/// entry point for a single ledger line.
pub fn run_function(f: &SymFn, checks: &[CheckId], cfg: &Config) -> Vec<CheckResult> {
    let mut ctx = Ctx::new(f, cfg);
    let mut out = Vec::new();
    for &c in checks {
        if f.n() > c.max_n(cfg) {
            out.push(
                ctx.row(c, "all")
                    .with("", c.max_n(cfg), Verdict::Skip)
                    .note(format!("n = {} exceeds the check limit {}", f.n(), c.max_n(cfg))),
            );
            continue;
        }
        out.extend(timed(|| match c {
            CheckId::C1 => vec![check_construction(&mut ctx)],
            CheckId::C2 => check_linf(&mut ctx),
            CheckId::C3 => check_bruck(&mut ctx),
            CheckId::C5 => check_ftof(&mut ctx),
            CheckId::C6 => check_reduction(&mut ctx),
            CheckId::C7 => vec![check_padding(&mut ctx)],
            CheckId::C8 => check_complement(&mut ctx),
            CheckId::C9 => vec![check_chain(&mut ctx)],
            CheckId::C10 => trend_rows(&mut ctx),
            CheckId::C4 => vec![check_bs92("sym", f, cfg)],
        }));
    }
    out
}

/// The Bruck check on an arbitrary truth table.
pub fn run_dense(g: &BoolFn, cfg: &Config) -> Vec<CheckResult> {
    timed(|| check_bruck_dense(g, cfg))
}

/// Spreads the wall time of one check evenly over its rows.
fn timed(run: impl FnOnce() -> Vec<CheckResult>) -> Vec<CheckResult> {
    let start = Instant::now();
    let mut rows = run();
    let ms = start.elapsed().as_secs_f64() * 1e3 / rows.len().max(1) as f64;
    rows.iter_mut().for_each(|r| r.elapsed_ms = ms);
    rows
}

/// Per-function cache shared by the checks.
struct Ctx<'a> {
    f: &'a SymFn,
    cfg: &'a Config,
    levels: LevelSpectrum,
    mon_eps: Option<Result<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(f: &'a SymFn, cfg: &'a Config) -> Self {
        Ctx { f, cfg, levels: level_spectrum(f), mon_eps: None }
    }

    fn n(&self) -> usize {
        self.f.n()
    }

    fn row(&self, c: CheckId, item: &'static str) -> CheckResult {
        CheckResult::new(c, item, self.n(), self.f.to_string())
    }

    fn mon_eps(&mut self) -> Result<usize> {
        if self.mon_eps.is_none() {
            let r = self
                .f
                .expand(self.cfg.caps.expand)
                .and_then(|g| mon_eps_exact(&g, &self.cfg.eps_mon, &self.cfg.caps))
                .map(|m| m.value);
            self.mon_eps = Some(r);
        }
        self.mon_eps.clone().unwrap()
    }
}

fn error_row(row: CheckResult, e: &Error) -> CheckResult {
    let verdict = if matches!(e, Error::CapExceeded { .. }) { Verdict::Skip } else { Verdict::Fail };
    row.with("", "", verdict).note(e.to_string())
}

/// `(n + 2)^rho`.
fn construction_bound(f: &SymFn) -> u128 {
    (f.n() as u128 + 2).pow(f.measures().rho as u32)
}

fn check_construction(ctx: &mut Ctx) -> CheckResult {
    let row = ctx.row(CheckId::C1, "terms");
    let p = sign_poly_for(ctx.f);
    let check = verify_sign(&p, ctx.f);
    let terms = p.term_count();
    let bound = construction_bound(ctx.f);
    let row = row.with(terms, bound, pass_if(check.ok && terms <= bound));
    if check.ok {
        row
    } else {
        row.note("certificate does not sign-represent f")
    }
}

/// `||g^||_inf >= (n+2)^-rho` decided as `linf_num * (n+2)^rho >= 2^n`.
fn linf_holds(linf_num: u64, f: &SymFn) -> bool {
    linf_num as u128 * construction_bound(f) >= 1u128 << f.n()
}

fn check_linf(ctx: &mut Ctx) -> Vec<CheckResult> {
    let n = ctx.n();
    let bound = Q::new(1.into(), construction_bound(ctx.f).into());
    let pm = ctx.levels.sign_encoding().linf_numerator();
    let zo = ctx.levels.linf_numerator();
    vec![
        ctx.row(CheckId::C2, "pm1").with(fmt_q(&dyadic(pm as i64, n)), fmt_q(&bound), pass_if(linf_holds(pm, ctx.f))),
        ctx.row(CheckId::C2, "literal01")
            .with(fmt_q(&dyadic(zo as i64, n)), fmt_q(&bound), Verdict::ReportOnly)
            .note(format!("0/1 spectrum; inequality holds: {}", linf_holds(zo, ctx.f))),
    ]
}

/// `signmon >= 1 / linf` decided as `signmon * linf_num >= 2^n`.
fn bruck_rows(n: usize, size: usize, pm: u64, zo: u64, mk: impl Fn(&'static str) -> CheckResult) -> Vec<CheckResult> {
    let full = 1u128 << n;
    let recip = |num: u64| if num == 0 { "inf".to_string() } else { fmt_q(&Q::new((full as i64).into(), (num as i64).into())) };
    let holds = |num: u64| size as u128 * num as u128 >= full;
    vec![
        mk("pm1").with(size, recip(pm), pass_if(holds(pm))),
        mk("literal01")
            .with(size, recip(zo), Verdict::ReportOnly)
            .note(format!("0/1 spectrum; inequality holds: {}", holds(zo))),
    ]
}

fn check_bruck(ctx: &mut Ctx) -> Vec<CheckResult> {
    let n = ctx.n();
    let cfg = ctx.cfg;
    let sign = ctx.f.expand(cfg.caps.expand).and_then(|g| signmon_exact(&g, &cfg.caps));
    match sign {
        Ok(cert) => {
            let pm = ctx.levels.sign_encoding().linf_numerator();
            let zo = ctx.levels.linf_numerator();
            bruck_rows(n, cert.size(), pm, zo, |item| ctx.row(CheckId::C3, item))
        }
        Err(e) => vec![error_row(ctx.row(CheckId::C3, "pm1"), &e)],
    }
}

fn check_bruck_dense(g: &BoolFn, cfg: &Config) -> Vec<CheckResult> {
    let n = g.n();
    let instance = format!("hex:{}", g.to_hex());
    let mk = |item| CheckResult::new(CheckId::C3, item, n, instance.clone());
    let run = || -> Result<Vec<CheckResult>> {
        let cert = signmon_exact(g, &cfg.caps)?;
        let sp = wht(g, Mode::Exact, &cfg.caps)?;
        let linf_num = |s: &crate::fourier::Spectrum| -> u64 {
            let v = s.stats().linf;
            let q = v.exact().expect("exact spectrum") * qi(1 << n);
            q.to_integer().try_into().expect("small numerator")
        };
        let pm = linf_num(&sp.sign_encoding().expect("exact spectrum"));
        let zo = linf_num(&sp);
        Ok(bruck_rows(n, cert.size(), pm, zo, mk))
    };
    run().unwrap_or_else(|e| vec![error_row(mk("pm1"), &e)])
}

fn check_bs92(name: &'static str, f: &SymFn, cfg: &Config) -> CheckResult {
    let n = f.n();
    let row = CheckResult::new(CheckId::C4, "sampling", n, format!("{name}:{f}"));
    let eps = to_f64(&cfg.eps_mon);
    let run = || -> Result<CheckResult> {
        let g = f.expand(cfg.caps.expand)?;
        let report = bs92_sample(&g, eps, cfg.trials, cfg.seed, &cfg.caps)?;
        let support = report.max_support() as u64;
        let median = report.median_error();
        let ok = support <= report.samples && median <= eps;
        Ok(row.clone().with(format!("support {support}; median error {median:.6}"), format!("support {}; error {eps}", report.samples), pass_if(ok)))
    };
    run().unwrap_or_else(|e| error_row(row.clone(), &e))
}

fn check_ftof(ctx: &mut Ctx) -> Vec<CheckResult> {
    match ftof_check(ctx.f, &ctx.cfg.eps_l1, &ctx.cfg.caps) {
        Ok(report) => report
            .items
            .into_iter()
            .map(|i| ctx.row(CheckId::C5, i.item).with(i.lhs, i.rhs, pass_if(i.ok)))
            .collect(),
        Err(e) => vec![error_row(ctx.row(CheckId::C5, "all"), &e)],
    }
}

/// Largest promise side exercised by the identity check.
pub const IDENTITY_SIDE: u128 = 256;

/// Every `(k, t)` with `2k + t <= n` and `C(n - t, k) <= IDENTITY_SIDE`.
pub fn identity_grid(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for t in 0..=n {
        for k in 0..=(n - t) / 2 {
            if binom(n - t, k) <= IDENTITY_SIDE {
                out.push((k, t));
            }
        }
    }
    out
}

fn check_reduction(ctx: &mut Ctx) -> Vec<CheckResult> {
    let grid = identity_grid(ctx.n());
    let mut bad = Vec::new();
    for &(k, t) in &grid {
        match xor_to_and_identity(ctx.f, k, t, &ctx.cfg.caps) {
            Ok(id) if id.equal => {}
            Ok(_) => bad.push(format!("k={k},t={t}")),
            Err(e) => bad.push(format!("k={k},t={t}: {e}")),
        }
    }
    let mut identity = ctx.row(CheckId::C6, "identity").with(grid.len() - bad.len(), grid.len(), pass_if(bad.is_empty()));
    if !bad.is_empty() {
        identity = identity.note(bad.join("; "));
    }
    let planner = match plan_reduction(ctx.f) {
        Ok(p) => ctx
            .row(CheckId::C6, "planner")
            .with(format!("s={} t={} k={} ell={}", p.s, p.t, p.k, p.ell), "parity; 4k <= n-t; 4 ell <= k", pass_if(p.invariants_hold()))
            .note(format!("raz_applicable={} k/n={:.4} ell/n={:.4}", p.raz_applicable, p.k_over_n, p.ell_over_n)),
        Err(e) => ctx.row(CheckId::C6, "planner").with("no-plan", "", Verdict::VacuousPass).note(e.to_string()),
    };
    vec![identity, planner]
}

fn check_padding(ctx: &mut Ctx) -> CheckResult {
    let row = ctx.row(CheckId::C7, "embedding");
    match padding_embedding(ctx.f, &ctx.cfg.caps) {
        Ok(p) => {
            let side = 1usize << ctx.n();
            row.with(format!("{side}x{side}"), format!("3m={}, k=m", 3 * ctx.n()), pass_if(p.verified))
        }
        Err(e) => error_row(row, &e),
    }
}

fn check_complement(ctx: &mut Ctx) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let cfg = ctx.cfg;
    if ctx.n() <= 4.min(cfg.caps.lp_enum) {
        let row = ctx.row(CheckId::C8, "mon");
        let other = ctx
            .f
            .expand(cfg.caps.expand)
            .and_then(|g| mon_eps_exact(&g.complement_inputs(), &cfg.eps_mon, &cfg.caps));
        out.push(match (ctx.mon_eps(), other) {
            (Ok(a), Ok(b)) => row.with(a, b.value, pass_if(a == b.value)),
            (Err(e), _) | (_, Err(e)) => error_row(row, &e),
        });
    }
    let m = ctx.f.measures();
    let row = ctx.row(CheckId::C8, "r0");
    if m.r1 == 0 {
        out.push(row.with("", 0, Verdict::VacuousPass).note("r1 = 0"));
    } else {
        let r0 = ctx.f.reverse().measures().r0;
        out.push(row.with(r0, m.r1, pass_if(r0 >= m.r1)));
    }
    out
}

/// `log ||f^||_{1,eps_l1} >= 1/2 log mon_eps(f) - 1/2 log n - log 40`,
/// decided exactly as `1600 n L^2 >= mon`.
fn check_chain(ctx: &mut Ctx) -> CheckResult {
    let row = ctx.row(CheckId::C9, "chain");
    let n = ctx.n();
    if n == 0 {
        return row.with("", "", Verdict::Skip).note("log n undefined at n = 0");
    }
    let mon = match ctx.mon_eps() {
        Ok(m) => m,
        Err(e) => return error_row(row, &e),
    };
    if mon == 0 {
        return row.with("degenerate", "degenerate", Verdict::VacuousPass).note("mon = 0");
    }
    let l1 = match approx_l1(ctx.f, &ctx.cfg.eps_l1) {
        Ok(r) => r.value,
        Err(e) => return error_row(row, &e),
    };
    let rhs = 0.5 * (mon as f64).log2() - 0.5 * (n as f64).log2() - 40f64.log2();
    if l1.is_zero() {
        return row.with("-inf", rhs, Verdict::Fail).note("approximate L1 is zero but mon is positive");
    }
    let ok = qi(1600 * n as i64) * l1.clone().pow(2u32) >= qi(mon as i64);
    row.with(log2(&l1), rhs, pass_if(ok)).note(format!("L1 = {}, mon = {mon}", fmt_q(&l1)))
}

fn trend_rows(ctx: &mut Ctx) -> Vec<CheckResult> {
    let n = ctx.n();
    let m = ctx.f.measures();
    let mut out = Vec::new();
    let stats = ctx.levels.stats();
    let l1 = stats.l1.exact().cloned().unwrap_or_else(Q::zero);
    if m.r > 1 && m.r < n && !l1.is_zero() {
        let scale = m.r as f64 * (n as f64 / m.r as f64).log2();
        let lhs = log2(&l1);
        out.push(
            ctx.row(CheckId::C10, "l1-scaling")
                .with(lhs, scale, Verdict::ReportOnly)
                .note(format!("log2 L1 / (r log2(n/r)) = {:.6}", lhs / scale)),
        );
    }
    if n <= ctx.cfg.caps.lp_enum && m.r >= 1 {
        if let Ok(mon) = ctx.mon_eps() {
            if mon > 0 {
                let lhs = (mon as f64).log2();
                let rhs = m.r as f64 * (n as f64 / m.r as f64).log2().max(1.0);
                out.push(
                    ctx.row(CheckId::C10, "mon-scaling")
                        .with(lhs, m.r, Verdict::ReportOnly)
                        .note(format!("log2 mon / r = {:.6}; log2 mon / (r log2(n/r)) = {:.6}", lhs / m.r as f64, lhs / rhs)),
                );
            }
        }
    }
    if n >= 2 {
        let pm = ctx.levels.sign_encoding().linf_numerator();
        let forster = n as f64 - (pm as f64).log2();
        let terms = sign_poly_for(ctx.f).term_count();
        let upper = (terms as f64).log2();
        let scale = 1.0 + m.rho as f64 * (n as f64).log2();
        out.push(
            ctx.row(CheckId::C10, "signrank-scaling")
                .with(forster, upper, Verdict::ReportOnly)
                .note(format!("log2 sign-rank in [{forster:.6}, {upper:.6}]; 1 + rho log2 n = {scale:.6}")),
        );
    }
    out
}

/// One JSON object per line.
pub fn ledger_jsonl(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&serde_json::to_string(r).expect("results serialize"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub check_id: String,
    pub instances: usize,
    pub passes: usize,
    pub fails: usize,
    pub skips: usize,
}

/// Counts per check id in check order. Vacuous passes count as passes;
/// report-only rows count only as instances.
pub fn summarize(results: &[CheckResult]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for c in CheckId::ALL {
        let mut row = SummaryRow { check_id: c.to_string(), ..Default::default() };
        for r in results.iter().filter(|r| r.check_id == c) {
            row.instances += 1;
            match r.verdict {
                Verdict::Pass | Verdict::VacuousPass => row.passes += 1,
                Verdict::Fail => row.fails += 1,
                Verdict::Skip => row.skips += 1,
                Verdict::ReportOnly => {}
            }
        }
        if row.instances > 0 {
            rows.push(row);
        }
    }
    rows
}

/// CSV with header `check_id,instances,passes,fails,skips`.
pub fn summary_csv(results: &[CheckResult]) -> String {
    let mut out = String::from("check_id,instances,passes,fails,skips\n");
    for r in summarize(results) {
        out.push_str(&format!("{},{},{},{},{}\n", r.check_id, r.instances, r.passes, r.fails, r.skips));
    }
    out
}

pub fn any_failed(results: &[CheckResult]) -> bool {
    results.iter().any(|r| r.verdict == Verdict::Fail)
}
