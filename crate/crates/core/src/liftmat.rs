//! Two-party matrices built from symmetric functions.
//!
//! `F^xor(x, y) = f(|x xor y|)` and `F^and(x, y) = f(|x and y|)`, either over
//! all of `{0,1}^n` or restricted to a promise `|x| = |y| = k` on the last
//! `n - t` coordinates. Rows and columns are enumerated lexicographically by
//! bitstring, reading `x_1` as the most significant bit of the mask, so the
//! full lifts are indexed by mask value.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::config::Caps;
use crate::error::{cap_check, Error, Result};
use crate::fourier::{butterfly, level_spectrum};
use crate::func::SymFn;
use crate::linalg::{rank_exact, singular_values};
use crate::optimize::{approx_l1, approx_l1_dual, mon_eps_exact, signmon_exact};
use crate::rational::{binom, dyadic, fmt_q, qi, serde_q, to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftKind {
    Xor,
    And,
}

impl std::str::FromStr for LiftKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xor" => Ok(LiftKind::Xor),
            "and" => Ok(LiftKind::And),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown lift kind {other:?}") }),
        }
    }
}

/// `|x| = |y| = k` on strings of length `n - t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Promise {
    pub k: usize,
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftMatrix {
    pub kind: LiftKind,
    pub n: usize,
    pub promise: Option<Promise>,
    /// Bitstring (as a mask over the string length) for each row / column.
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    /// Row-major 0/1 entries.
    #[serde(skip)]
    pub data: Vec<i8>,
}

impl LiftMatrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.cols.len() + j]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.data.iter().map(|&v| v as i64).collect()
    }

    /// The `+-1` matrix `2F - 1`.
    pub fn sign_matrix(&self) -> Vec<i8> {
        self.data.iter().map(|&v| 2 * v - 1).collect()
    }

    /// Plain text: `rows cols`, then one line of space-separated entries per row.
    pub fn to_text(&self) -> String {
        let c = self.num_cols();
        let mut out = format!("{} {}\n", self.num_rows(), c);
        for row in self.data.chunks(c.max(1)).take(self.num_rows()) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`LiftMatrix::to_text`]; returns `(rows, cols, entries)`.
    pub fn parse_text(text: &str) -> Result<(usize, usize, Vec<i64>)> {
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| Error::Parse { pos: 1, msg: "empty matrix file".into() })?;
        let dims: Vec<usize> = head.split_whitespace().map(|t| t.parse()).collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { pos: 1, msg: "bad dimension line".into() })?;
        let [r, c] = dims[..] else {
            return Err(Error::Parse { pos: 1, msg: "expected `rows cols`".into() });
        };
        let mut data = Vec::with_capacity(r * c);
        for (i, line) in lines.enumerate() {
            for tok in line.split_whitespace() {
                data.push(tok.parse().map_err(|_| Error::Parse { pos: i + 2, msg: format!("bad entry {tok:?}") })?);
            }
        }
        if data.len() != r * c {
            return Err(Error::ShapeMismatch(format!("expected {} entries, found {}", r * c, data.len())));
        }
        Ok((r, c, data))
    }
}

fn combine(kind: LiftKind, x: u32, y: u32) -> usize {
    match kind {
        LiftKind::Xor => (x ^ y).count_ones() as usize,
        LiftKind::And => (x & y).count_ones() as usize,
    }
}

/// Full `2^n x 2^n` lift.
pub fn lift(f: &SymFn, kind: LiftKind, caps: &Caps) -> Result<LiftMatrix> {
    let n = f.n();
    cap_check("lift", n, caps.lift)?;
    let idx: Vec<u32> = (0..1u32 << n).collect();
    let mut data = Vec::with_capacity(idx.len() * idx.len());
    for &x in &idx {
        data.extend(idx.iter().map(|&y| f.value_u8(combine(kind, x, y)) as i8));
    }
    Ok(LiftMatrix { kind, n, promise: None, rows: idx.clone(), cols: idx, data })
}

/// Weight-`k` masks over `m` bits in lexicographic bitstring order.
pub fn weight_strings(m: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(binom(m, k) as usize);
    if k > m {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack enumerates same-weight masks in increasing order.
    let mut v: u64 = (1u64 << k) - 1;
    while v < 1u64 << m {
        out.push(v as u32);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Promise submatrix on weight-`k` strings of length `n - t`.
///
/// XOR kind: `f(|x xor y| + t)`, the submatrix of the full XOR lift whose
/// first `t` bits are fixed to one on both sides. AND kind: `f(|x and y|)`.
pub fn promise_lift(f: &SymFn, kind: LiftKind, k: usize, t: usize, caps: &Caps) -> Result<LiftMatrix> {
    let n = f.n();
    if 2 * k + t > n {
        return Err(Error::PromiseViolated(format!("2k + t = {} exceeds n = {n}", 2 * k + t)));
    }
    let side = binom(n - t, k);
    if side > caps.promise_side as u128 {
        return Err(Error::PromiseViolated(format!(
            "C({}, {k}) = {side} exceeds the promise side cap {}",
            n - t,
            caps.promise_side
        )));
    }
    let idx = weight_strings(n - t, k);
    let shift = if kind == LiftKind::Xor { t } else { 0 };
    let mut data = Vec::with_capacity(idx.len() * idx.len());
    for &x in &idx {
        data.extend(idx.iter().map(|&y| f.value_u8(combine(kind, x, y) + shift) as i8));
    }
    Ok(LiftMatrix { kind, n, promise: Some(Promise { k, t }), rows: idx.clone(), cols: idx, data })
}

/// `f'_k(i) = f(2k - 2i + t)` for `i <= k`, as a function on `n - t` bits
/// (zero beyond `k`, where the promise never looks).
pub fn and_side_function(f: &SymFn, k: usize, t: usize) -> Result<SymFn> {
    let n = f.n();
    if 2 * k + t > n {
        return Err(Error::PromiseViolated(format!("2k + t = {} exceeds n = {n}", 2 * k + t)));
    }
    Ok(SymFn::from_fn(n - t, |i| i <= k && f.at(2 * k - 2 * i + t)))
}

/// XOR promise matrix, the equal AND promise matrix, and whether they agree
/// entrywise under the shared enumeration (the bijection is the identity).
#[derive(Clone, Debug)]
pub struct XorAndIdentity {
    pub xor: LiftMatrix,
    pub and: LiftMatrix,
    pub and_function: SymFn,
    pub equal: bool,
}

pub fn xor_to_and_identity(f: &SymFn, k: usize, t: usize, caps: &Caps) -> Result<XorAndIdentity> {
    let xor = promise_lift(f, LiftKind::Xor, k, t, caps)?;
    let g = and_side_function(f, k, t)?;
    let and = promise_lift(&g, LiftKind::And, k, 0, caps)?;
    let equal = xor.rows == and.rows && xor.cols == and.cols && xor.data == and.data;
    Ok(XorAndIdentity { xor, and, and_function: g, equal })
}

/// Injections embedding the AND lift of `g` on `m` bits into the AND promise
/// matrix on `3m` bits with `k = m`.
#[derive(Clone, Debug, Serialize)]
pub struct PaddingEmbedding {
    pub m: usize,
    /// Row index in the promise matrix for each `x` in `{0,1}^m`.
    pub row_map: Vec<usize>,
    pub col_map: Vec<usize>,
    pub verified: bool,
}

/// `x' = x | ones(m - |x|) << m` and `y' = y | ones(m - |y|) << 2m`: both have
/// weight `m` and the padding blocks are disjoint, so `|x' & y'| = |x & y|`.
pub fn padding_embedding(g: &SymFn, caps: &Caps) -> Result<PaddingEmbedding> {
    let m = g.n();
    cap_check("padding_embedding", 3 * m, 3 * caps.lift.min(10))?;
    let small = lift(g, LiftKind::And, caps)?;
    let big_g = SymFn::from_fn(3 * m, |i| i <= m && g.at(i));
    let big = promise_lift(&big_g, LiftKind::And, m, 0, caps)?;
    let ones = |c: usize| ((1u64 << c) - 1) as u32;
    let pad_x = |x: u32| x | ones(m - x.count_ones() as usize) << m;
    let pad_y = |y: u32| y | ones(m - y.count_ones() as usize) << (2 * m);
    let find = |v: u32| big.rows.binary_search(&v).expect("padded string has weight m");
    let row_map: Vec<usize> = small.rows.iter().map(|&x| find(pad_x(x))).collect();
    let col_map: Vec<usize> = small.cols.iter().map(|&y| find(pad_y(y))).collect();
    let mut verified = true;
    for (i, &x) in small.rows.iter().enumerate() {
        for (j, &y) in small.cols.iter().enumerate() {
            let same_overlap = (pad_x(x) & pad_y(y)).count_ones() == (x & y).count_ones();
            verified &= same_overlap && small.entry(i, j) == big.entry(row_map[i], col_map[j]);
        }
    }
    Ok(PaddingEmbedding { m, row_map, col_map, verified })
}

/// How a stat was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatMethod {
    /// Characters diagonalise full XOR lifts.
    Character,
    Eigensolver,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixStats {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub trace_norm: f64,
    pub frobenius: f64,
    pub spectral: f64,
    pub method: StatMethod,
    #[serde(skip)]
    pub singular_values: Vec<f64>,
}

/// Rank, trace, Frobenius and spectral norms. Full XOR lifts use the exact
/// character spectrum; everything else the eigensolver (side `<= 2^eigen`)
/// and exact integer elimination.
pub fn matrix_stats(m: &LiftMatrix, caps: &Caps) -> Result<MatrixStats> {
    let (r, c) = (m.num_rows(), m.num_cols());
    if m.kind == LiftKind::Xor && m.promise.is_none() {
        let cert = xor_character_spectrum(m)?;
        let mut sv: Vec<f64> = cert.iter().map(|v| to_f64(&v.abs())).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let rank = cert.iter().filter(|v| !v.is_zero()).count();
        return Ok(stats_from(r, c, rank, sv, StatMethod::Character));
    }
    let side = r.max(c);
    if side > 1usize << caps.eigen {
        return Err(Error::CapExceeded { op: "matrix_stats", n: side.ilog2() as usize, cap: caps.eigen });
    }
    let sv = singular_values(&m.to_f64(), r, c)?;
    let rank = rank_exact(&m.to_i64(), r, c);
    Ok(stats_from(r, c, rank, sv, StatMethod::Eigensolver))
}

fn stats_from(rows: usize, cols: usize, rank: usize, sv: Vec<f64>, method: StatMethod) -> MatrixStats {
    let trace_norm = sv.iter().sum();
    let frobenius = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
    let spectral = sv.first().copied().unwrap_or(0.0);
    MatrixStats { rows, cols, rank, trace_norm, frobenius, spectral, method, singular_values: sv }
}

/// Eigenvalues of a full XOR lift read off `H M H`, which must be diagonal.
/// Entry `S` is the eigenvalue of the character `chi_S`.
pub fn xor_character_spectrum(m: &LiftMatrix) -> Result<Vec<Q>> {
    if m.kind != LiftKind::Xor || m.promise.is_some() {
        return Err(Error::ShapeMismatch("character spectrum needs a full XOR lift".into()));
    }
    let n = m.n;
    let size = 1usize << n;
    let mut a: Vec<i64> = m.to_i64();
    for row in a.chunks_exact_mut(size) {
        butterfly(row);
    }
    let mut col = vec![0i64; size];
    for j in 0..size {
        for i in 0..size {
            col[i] = a[i * size + j];
        }
        butterfly(&mut col);
        for i in 0..size {
            a[i * size + j] = col[i];
        }
    }
    for i in 0..size {
        for j in 0..size {
            if i != j && a[i * size + j] != 0 {
                return Err(Error::Verification(format!("H M H has off-diagonal entry at ({i}, {j})")));
            }
        }
    }
    // H M H = 2^n diag(lambda).
    Ok((0..size).map(|s| dyadic(a[s * size + s], n)).collect())
}

/// Duality bound `(<M, Psi> - eps ||Psi||_1) / ||Psi||` on the approximate
/// trace norm; zero for `Psi = 0`.
pub fn trace_witness_bound(m: &[f64], psi: &[f64], rows: usize, cols: usize, eps: f64) -> Result<f64> {
    if m.len() != rows * cols || psi.len() != rows * cols {
        return Err(Error::ShapeMismatch("M and Psi must have the same shape".into()));
    }
    let spectral = singular_values(psi, rows, cols)?.first().copied().unwrap_or(0.0);
    if spectral == 0.0 {
        return Ok(0.0);
    }
    let inner: f64 = m.iter().zip(psi).map(|(a, b)| a * b).sum();
    let l1: f64 = psi.iter().map(|v| v.abs()).sum();
    Ok((inner - eps * l1) / spectral)
}

/// `(||M||_{tr,eps} / (k (1 + eps)))^2` for a `k x k` matrix.
pub fn trace_rank_bound(k: usize, trace_eps: &Q, eps: &Q) -> Result<Q> {
    if k == 0 {
        return Err(Error::ShapeMismatch("empty matrix".into()));
    }
    let d = qi(k as i64) * (qi(1) + eps);
    let r = trace_eps / d;
    Ok(&r * &r)
}

/// `N / ||M||` for an `N x N` sign matrix.
pub fn forster_bound(m: &[i8], n: usize) -> Result<f64> {
    if m.len() != n * n {
        return Err(Error::ShapeMismatch(format!("expected {n}x{n} entries")));
    }
    if m.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::OutOfRange("sign matrix entries must be +-1".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let a: Vec<f64> = m.iter().map(|&v| v as f64).collect();
    let s = singular_values(&a, n, n)?;
    Ok(n as f64 / s[0])
}

/// One line of the Fourier-to-matrix comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtoFItem {
    pub item: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtoFReport {
    pub f: SymFn,
    pub items: Vec<FtoFItem>,
}

impl FtoFReport {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }
}

/// Relative tolerance for float-versus-exact comparisons.
pub const FTOF_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FTOF_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Compares Fourier quantities of `f` with matrix quantities of its XOR
/// lift. Items `a`, `d`, `e` are exact (elimination rank, character
/// spectrum); the `eps` items run for `n <= caps.lp_enum`.
pub fn ftof_check(f: &SymFn, eps: &Q, caps: &Caps) -> Result<FtoFReport> {
    let n = f.n();
    cap_check("ftof_check", n, caps.eigen.min(8))?;
    let m = lift(f, LiftKind::Xor, caps)?;
    let side = 1usize << n;
    let levels = level_spectrum(f);
    let stats = levels.stats();
    let mut items = Vec::new();

    let rank = rank_exact(&m.to_i64(), side, side);
    items.push(FtoFItem { item: "a", lhs: stats.mon.to_string(), rhs: rank.to_string(), ok: stats.mon == rank as u128 });

    let eig = xor_character_spectrum(&m)?;
    let spectral = eig.iter().map(|v| v.abs()).max().unwrap_or_else(Q::zero);
    let trace: Q = eig.iter().map(|v| v.abs()).sum();
    let scale = qi(side as i64);
    let linf = stats.linf.exact().unwrap() * &scale;
    let l1 = stats.l1.exact().unwrap() * &scale;
    items.push(FtoFItem { item: "d", lhs: fmt_q(&linf), rhs: fmt_q(&spectral), ok: linf == spectral });
    items.push(FtoFItem { item: "e", lhs: fmt_q(&l1), rhs: fmt_q(&trace), ok: l1 == trace });

    if n <= caps.lp_enum {
        let eps_f = to_f64(eps);
        let primal = approx_l1(f, eps)?;
        let target = to_f64(&(&primal.value * &scale));
        // Upper bound: the approximator's own lift is entrywise eps-close.
        let phi: Vec<f64> = (0..side as u32).map(|z| to_f64(&primal.eval_point(z))).collect();
        let phi_lift: Vec<f64> = (0..side * side).map(|i| phi[(i / side) ^ (i % side)]).collect();
        let upper: f64 = singular_values(&phi_lift, side, side)?.iter().sum();
        // Lower bound: the dual weights give a witness Psi(x, y) = psi(x xor y).
        let dual = approx_l1_dual(f, eps)?;
        let psi: Vec<f64> = (0..side * side).map(|i| to_f64(dual.psi(((i / side) ^ (i % side)) as u32))).collect();
        let lower = trace_witness_bound(&m.to_f64(), &psi, side, side, eps_f)?;
        items.push(FtoFItem {
            item: "f",
            lhs: format!("{target}"),
            rhs: format!("[{lower}, {upper}]"),
            ok: close(lower, target) && close(upper, target),
        });

        // rank_eps >= trace bound, and mon_eps >= rank_eps.
        let g = f.expand(caps.expand)?;
        let mon = mon_eps_exact(&g, eps, caps)?;
        let bound = trace_rank_bound(side, &(&primal.value * &scale), eps)?;
        items.push(FtoFItem {
            item: "b",
            lhs: mon.value.to_string(),
            rhs: fmt_q(&bound),
            ok: qi(mon.value as i64) >= bound,
        });
        // signrank >= Forster bound, and signmon >= signrank.
        let sign = signmon_exact(&g, caps)?;
        let forster = forster_bound(&m.sign_matrix(), side)?;
        items.push(FtoFItem {
            item: "c",
            lhs: sign.size().to_string(),
            rhs: format!("{forster}"),
            ok: sign.size() as f64 >= forster - FTOF_TOL,
        });
    }
    Ok(FtoFReport { f: f.clone(), items })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanCase {
    SmallS,
    LargeS,
}

/// Parameters of the XOR-to-AND reduction for a witness `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionPlan {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub k: usize,
    /// `k + (t - s - 1) / 2`; `f'_k(ell) = f(s + 1)` and `f'_k(ell + 1) = f(s - 1)`.
    pub ell: i64,
    pub case: PlanCase,
    /// The plan was computed for `reverse(f)`.
    pub reversed: bool,
    /// The flip sits inside `0..=k` and both `k <= (n - t)/4` and
    /// `ell + 1 <= k/4` hold, with `ell + 1` the index whose predecessor differs.
    pub raz_applicable: bool,
    pub k_over_n: f64,
    pub ell_over_n: f64,
}

impl ReductionPlan {
    /// `(t - s - 1)` even, `4k <= n - t`, and `4 ell <= k` when `k >= 4`.
    pub fn invariants_hold(&self) -> bool {
        let parity = (self.t as i64 - self.s as i64 - 1).rem_euclid(2) == 0;
        let ell_formula = self.ell == self.k as i64 + (self.t as i64 - self.s as i64 - 1) / 2;
        let k_ok = 4 * self.k <= self.n - self.t;
        let ell_ok = self.k < 4 || 4 * self.ell <= self.k as i64;
        parity && ell_formula && k_ok && ell_ok
    }
}

/// Plan for a given witness `s` (with `f(s-1) != f(s+1)` assumed).
pub fn plan_for_witness(n: usize, s: usize) -> Result<ReductionPlan> {
    if s == 0 || s + 1 > n {
        return Err(Error::NoPlan(format!("witness s = {s} needs 1 <= s <= n - 1 (n = {n})")));
    }
    let (ni, si) = (n as i64, s as i64);
    let (case, t, k) = if 8 * si <= 3 * (ni - 1) {
        let t = if s % 2 == 1 { 0 } else { 1 };
        (PlanCase::SmallS, t, 2 * si / 3)
    } else {
        let q4 = ni / 4;
        let t = if (q4 - si - 1).rem_euclid(2) == 0 { q4 } else { q4 - 1 };
        // floor(2 (s - 1 - n/4) / 3) = floor((4 (s - 1) - n) / 6)
        (PlanCase::LargeS, t, (4 * (si - 1) - ni).div_euclid(6))
    };
    if t < 0 || k < 0 || 2 * k + t > ni {
        return Err(Error::NoPlan(format!("degenerate parameters t = {t}, k = {k} for n = {n}, s = {s}")));
    }
    let ell = k + (t - si - 1) / 2;
    let raz_applicable = ell >= 0 && ell < k && 4 * k <= ni - t && 4 * (ell + 1) <= k;
    Ok(ReductionPlan {
        n,
        s,
        t: t as usize,
        k: k as usize,
        ell,
        case,
        reversed: false,
        raz_applicable,
        k_over_n: k as f64 / n as f64,
        ell_over_n: ell as f64 / n as f64,
    })
}

/// Chooses the side where `r(f)` is attained (reversing if it is `r1`), takes
/// the witness `s = r0` there and plans for it.
pub fn plan_reduction(f: &SymFn) -> Result<ReductionPlan> {
    let m = f.measures();
    let reversed = m.r1 > m.r0;
    let g = if reversed { f.reverse() } else { f.clone() };
    let n = g.n();
    let half = n.div_ceil(2);
    let s = (1..=half)
        .rev()
        .filter(|&s| s < n && s >= m.r)
        .find(|&s| g.at(s - 1) != g.at(s + 1))
        .ok_or_else(|| Error::NoPlan(format!("{f} has no witness s >= r(f) = {}", m.r)))?;
    let mut plan = plan_for_witness(n, s)?;
    plan.reversed = reversed;
    Ok(plan)
}

/// Approximate trace norm of a full XOR lift, `2^n ||f^||_{1,eps}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XorTraceEps {
    #[serde(with = "serde_q")]
    pub value: Q,
    #[serde(with = "serde_q")]
    pub rank_lower_bound: Q,
}

pub fn xor_trace_eps(f: &SymFn, eps: &Q) -> Result<XorTraceEps> {
    let side = 1usize << f.n();
    let value = approx_l1(f, eps)?.value * qi(side as i64);
    let rank_lower_bound = trace_rank_bound(side, &value, eps)?;
    Ok(XorTraceEps { value, rank_lower_bound })
}

/// JSON view of a lift with its stats, for export.
pub fn stats_json(m: &LiftMatrix, stats: &MatrixStats) -> serde_json::Value {
    serde_json::json!({
        "kind": m.kind,
        "n": m.n,
        "promise": m.promise,
        "rows": m.num_rows(),
        "cols": m.num_cols(),
        "stats": stats,
    })
}
