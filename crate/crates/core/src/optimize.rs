//! Quantities defined by optimisation: approximate Fourier `L1` norm,
//! approximate monomial complexity, sign monomial complexity.
//!
//! Every routine reduces to small LPs over a fixed set of basis columns
//! (characters or level sums) evaluated at a fixed set of points (cube points
//! or weight classes). Enumeration runs in floating point; anything close to
//! a decision boundary and every returned witness is settled in exact
//! rationals.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::config::Caps;
use crate::construct::{PolyTerms, SignPoly};
use crate::error::{cap_check, Error, Result};
use crate::fourier::level_character_sum;
use crate::func::{BoolFn, SymFn};
use crate::lp::{lp_solve, LpOutcome, LpProblem, LpScalar, Sense};
use crate::rational::{binom, q, qi, rationalize, serde_mask, serde_q, to_f64, Q};

/// Float decisions closer than this to a threshold are re-solved exactly.
const BORDERLINE: f64 = 1e-9;
/// Float sign-feasibility residuals above this are treated as infeasible.
const SIGN_INFEASIBLE: f64 = 1e-6;
const RATIONALIZE_DEN: i64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ansatz {
    /// One coefficient per level `|S| = k`.
    SymmetricLevels,
    /// One coefficient per subset mask.
    Dense,
}

/// Optimal approximator for the approximate `L1` norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    pub n: usize,
    #[serde(with = "serde_q")]
    pub value: Q,
    /// Level coefficients (`n + 1`) or mask coefficients (`2^n`).
    #[serde(with = "serde_q::vec")]
    pub witness: Vec<Q>,
    #[serde(with = "serde_q")]
    pub eps: Q,
    pub ansatz: Ansatz,
}

impl ApproxResult {
    /// `sum |c_S|` recomputed from the witness.
    pub fn witness_l1(&self) -> Q {
        match self.ansatz {
            Ansatz::SymmetricLevels => {
                self.witness.iter().enumerate().map(|(k, c)| c.abs() * qi(binom(self.n, k) as i64)).sum()
            }
            Ansatz::Dense => self.witness.iter().map(|c| c.abs()).sum(),
        }
    }

    /// Value of the approximator at a point.
    pub fn eval_point(&self, x: u32) -> Q {
        match self.ansatz {
            Ansatz::SymmetricLevels => eval_levels(&self.witness, x.count_ones() as usize),
            Ansatz::Dense => self.witness.iter().enumerate().fold(Q::zero(), |acc, (s, c)| {
                if (s as u32 & x).count_ones().is_multiple_of(2) {
                    acc + c
                } else {
                    acc - c
                }
            }),
        }
    }

    /// Largest pointwise error against a truth table.
    pub fn max_error(&self, g: &BoolFn) -> Q {
        (0..1u32 << g.n()).fold(Q::zero(), |m, x| {
            let e = (self.eval_point(x) - qi(g.at(x) as i64)).abs();
            if e > m {
                e
            } else {
                m
            }
        })
    }
}

fn eval_levels(levels: &[Q], j: usize) -> Q {
    let n = levels.len() - 1;
    levels
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| c * Q::from_integer(level_character_sum(n, k, j).into()))
        .sum()
}

/// A minimum-support approximator or sign representation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonResult {
    pub n: usize,
    pub value: usize,
    #[serde(with = "serde_mask::vec")]
    pub support: Vec<u32>,
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<Q>,
    /// Exact `L_inf` error of the witness.
    #[serde(with = "serde_q")]
    pub error: Q,
    #[serde(with = "serde_q")]
    pub eps: Q,
}

/// Level-restricted upper bound on `mon_eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymMonResult {
    pub n: usize,
    pub value: u128,
    pub levels: Vec<usize>,
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<Q>,
    #[serde(with = "serde_q")]
    pub error: Q,
    #[serde(with = "serde_q")]
    pub eps: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignCertificate {
    pub n: usize,
    #[serde(with = "serde_mask::vec")]
    pub support: Vec<u32>,
    /// Normalised so that `sum |coeffs| = 1`.
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<Q>,
    #[serde(with = "serde_q")]
    pub margin: Q,
}

impl SignCertificate {
    pub fn size(&self) -> usize {
        self.support.len()
    }

    pub fn to_sign_poly(&self) -> SignPoly {
        SignPoly::from_sparse(self.n, self.support.iter().copied().zip(self.coeffs.iter().cloned()))
    }
}

/// Optimal dual solution of the approximate `L1` LP, as a weight per
/// Hamming weight class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate {
    pub n: usize,
    #[serde(with = "serde_q::vec")]
    pub weights: Vec<Q>,
    #[serde(with = "serde_q")]
    pub value: Q,
    #[serde(with = "serde_q")]
    pub eps: Q,
}

impl DualCertificate {
    /// `psi(x) = weights[|x|]`.
    pub fn psi(&self, x: u32) -> &Q {
        &self.weights[x.count_ones() as usize]
    }
}

fn check_eps(eps: &Q) -> Result<()> {
    if eps.is_negative() || *eps >= q(1, 2) {
        return Err(Error::OutOfRange(format!("eps = {} not in [0, 1/2)", crate::rational::fmt_q(eps))));
    }
    Ok(())
}

fn chi(s: u32, x: u32) -> i64 {
    if (s & x).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `min sum_i w_i |c_i|` with `|sum_i c_i col_i(p) - target(p)| <= eps`.
/// Columns hold basis values at each point; `c_i = pos_i - neg_i`.
fn weighted_l1_fit(cols: &[Vec<i64>], weights: &[Q], targets: &[Q], eps: &Q) -> Result<(Q, Vec<Q>)> {
    let m = cols.len();
    let mut obj = Vec::with_capacity(2 * m);
    obj.extend(weights.iter().cloned());
    obj.extend(weights.iter().cloned());
    let mut lp = LpProblem::<Q>::new(2 * m).minimize(obj);
    for (p, t) in targets.iter().enumerate() {
        let row: Vec<Q> = cols.iter().map(|c| qi(c[p])).chain(cols.iter().map(|c| qi(-c[p]))).collect();
        lp.constraint(row.clone(), Sense::Le, t + eps);
        lp.constraint(row, Sense::Ge, t - eps);
    }
    match lp_solve(&lp)? {
        LpOutcome::Optimal { value, x } => {
            let c = (0..m).map(|i| &x[i] - &x[m + i]).collect();
            Ok((value, c))
        }
        other => Err(Error::Verification(format!("L1 fit LP returned {other:?}"))),
    }
}

fn level_columns(n: usize) -> Vec<Vec<i64>> {
    (0..=n).map(|k| (0..=n).map(|j| level_character_sum(n, k, j) as i64).collect()).collect()
}

/// Exact approximate Fourier `L1` norm of a symmetric function through the
/// level ansatz (averaging over coordinate permutations loses nothing).
pub fn approx_l1(f: &SymFn, eps: &Q) -> Result<ApproxResult> {
    check_eps(eps)?;
    let n = f.n();
    let cols = level_columns(n);
    let weights: Vec<Q> = (0..=n).map(|k| Q::from_integer(binom(n, k).into())).collect();
    let targets: Vec<Q> = (0..=n).map(|j| qi(f.at(j) as i64)).collect();
    let (value, witness) = weighted_l1_fit(&cols, &weights, &targets, eps)?;
    Ok(ApproxResult { n, value, witness, eps: eps.clone(), ansatz: Ansatz::SymmetricLevels })
}

/// Same quantity over all `2^n` characters, for any truth table.
pub fn approx_l1_dense(g: &BoolFn, eps: &Q, caps: &Caps) -> Result<ApproxResult> {
    check_eps(eps)?;
    let n = g.n();
    cap_check("approx_l1_dense", n, caps.lp_enum)?;
    let size = 1u32 << n;
    let cols: Vec<Vec<i64>> = (0..size).map(|s| (0..size).map(|x| chi(s, x)).collect()).collect();
    let weights = vec![qi(1); size as usize];
    let targets: Vec<Q> = g.table().iter().map(|&b| qi(b as i64)).collect();
    let (value, witness) = weighted_l1_fit(&cols, &weights, &targets, eps)?;
    Ok(ApproxResult { n, value, witness, eps: eps.clone(), ansatz: Ansatz::Dense })
}

/// Dual of the level LP: maximise `sum_j C(n,j) (w_j f(j) - eps |w_j|)`
/// subject to `|sum_j w_j K_k(j)| <= 1` for every level `k`, where `K_k(j)`
/// sums `chi_S` over weight-`j` inputs for `|S| = k`. Any feasible `w` gives
/// `psi(x) = w_{|x|}` with `<psi, chi_S> <= 1`, hence a lower bound.
pub fn approx_l1_dual(f: &SymFn, eps: &Q) -> Result<DualCertificate> {
    check_eps(eps)?;
    let n = f.n();
    let m = n + 1;
    // w_j = a_j - b_j; minimise the negated objective.
    let mut obj = Vec::with_capacity(2 * m);
    for j in 0..m {
        let c = qi(binom(n, j) as i64);
        obj.push(-(&c * qi(f.at(j) as i64) - &c * eps));
    }
    for j in 0..m {
        let c = qi(binom(n, j) as i64);
        obj.push(&c * qi(f.at(j) as i64) + &c * eps);
    }
    let mut lp = LpProblem::<Q>::new(2 * m).minimize(obj);
    for k in 0..m {
        let kr: Vec<Q> = (0..m).map(|j| qi(crate::fourier::krawtchouk(n, k, j) as i64)).collect();
        let row: Vec<Q> = kr.iter().cloned().chain(kr.iter().map(|v| -v)).collect();
        lp.constraint(row.clone(), Sense::Le, qi(1));
        lp.constraint(row, Sense::Ge, qi(-1));
    }
    let (_, x) = lp_solve(&lp)?.optimal().ok_or_else(|| Error::Verification("dual LP not optimal".into()))?;
    let weights: Vec<Q> = (0..m).map(|j| &x[j] - &x[m + j]).collect();
    let value = dual_value(f, &weights, eps);
    Ok(DualCertificate { n, weights, value, eps: eps.clone() })
}

fn dual_value(f: &SymFn, w: &[Q], eps: &Q) -> Q {
    let n = f.n();
    (0..=n)
        .map(|j| qi(binom(n, j) as i64) * (&w[j] * qi(f.at(j) as i64) - eps * w[j].abs()))
        .sum()
}

/// Checks dual feasibility exactly: `|<psi, chi_S>| <= 1` for every level.
pub fn dual_is_feasible(d: &DualCertificate) -> bool {
    (0..=d.n).all(|k| {
        let s: Q = (0..=d.n).map(|j| &d.weights[j] * qi(crate::fourier::krawtchouk(d.n, k, j) as i64)).sum();
        s.abs() <= qi(1)
    })
}

// ---------------------------------------------------------------------------
// Support enumeration
// ---------------------------------------------------------------------------

/// `min t` with `|sum_i a_i col_i(p) - target(p)| <= t`; variables `a` free,
/// then `t >= 0`.
fn minmax_lp<T: LpScalar>(cols: &[&[i64]], targets: &[T]) -> LpProblem<T> {
    let k = cols.len();
    let mut obj = vec![T::zero(); k + 1];
    obj[k] = T::one();
    let mut lp = LpProblem::<T>::new(k + 1).minimize(obj);
    for i in 0..k {
        lp.free(i);
    }
    for (p, t) in targets.iter().enumerate() {
        let mut row: Vec<T> = cols.iter().map(|c| T::from_i64(c[p])).collect();
        row.push(T::one().neg_r());
        lp.constraint(row.clone(), Sense::Le, t.clone());
        row[k] = T::one();
        lp.constraint(row, Sense::Ge, t.clone());
    }
    lp
}

fn minmax_exact(cols: &[&[i64]], targets: &[Q]) -> Result<(Q, Vec<Q>)> {
    if cols.is_empty() {
        let t = targets.iter().map(|v| v.abs()).max().unwrap_or_else(Q::zero);
        return Ok((t, Vec::new()));
    }
    let (t, mut x) = lp_solve(&minmax_lp(cols, targets))?
        .optimal()
        .ok_or_else(|| Error::Verification("min-max LP not optimal".into()))?;
    x.pop();
    Ok((t, x))
}

fn eval_cols(cols: &[&[i64]], a: &[Q], p: usize) -> Q {
    cols.iter().zip(a).map(|(c, v)| v * qi(c[p])).sum()
}

fn exact_error(cols: &[&[i64]], a: &[Q], targets: &[Q]) -> Q {
    (0..targets.len()).fold(Q::zero(), |m, p| {
        let e = (eval_cols(cols, a, p) - &targets[p]).abs();
        if e > m {
            e
        } else {
            m
        }
    })
}

/// Whether the columns admit an `eps`-approximation of the targets.
fn approx_feasible(cols: &[&[i64]], targets: &[Q], targets_f: &[f64], eps: &Q) -> Result<bool> {
    if cols.is_empty() {
        return Ok(targets.iter().all(|t| t.abs() <= *eps));
    }
    let eps_f = to_f64(eps);
    let float = lp_solve(&minmax_lp(cols, targets_f));
    if let Ok(LpOutcome::Optimal { value, x }) = float {
        if value < eps_f - BORDERLINE {
            let a: Vec<Q> = x[..cols.len()].iter().map(|v| rationalize(*v, RATIONALIZE_DEN)).collect();
            if exact_error(cols, &a, targets) <= *eps {
                return Ok(true);
            }
        } else if value > eps_f + BORDERLINE {
            return Ok(false);
        }
    }
    let (t, _) = minmax_exact(cols, targets)?;
    Ok(t <= *eps)
}

/// `min sum_p v_p` with `s_p sum_i a_i col_i(p) + v_p >= 1`, `v >= 0`.
/// Zero exactly when the columns sign-represent `s`.
fn sign_residual_lp<T: LpScalar>(cols: &[&[i64]], signs: &[i64]) -> LpProblem<T> {
    let k = cols.len();
    let np = signs.len();
    let mut obj = vec![T::zero(); k + np];
    obj[k..].iter_mut().for_each(|v| *v = T::one());
    let mut lp = LpProblem::<T>::new(k + np).minimize(obj);
    for i in 0..k {
        lp.free(i);
    }
    for (p, s) in signs.iter().enumerate() {
        let mut row: Vec<T> = cols.iter().map(|c| T::from_i64(s * c[p])).collect();
        row.resize(k + np, T::zero());
        row[k + p] = T::one();
        lp.constraint(row, Sense::Ge, T::one());
    }
    lp
}

fn strictly_signs(cols: &[&[i64]], a: &[Q], signs: &[i64]) -> bool {
    signs.iter().enumerate().all(|(p, s)| {
        let v = eval_cols(cols, a, p);
        if *s > 0 {
            v.is_positive()
        } else {
            v.is_negative()
        }
    })
}

fn sign_feasible(cols: &[&[i64]], signs: &[i64]) -> Result<bool> {
    if cols.is_empty() {
        return Ok(false);
    }
    if let Ok(LpOutcome::Optimal { value, x }) = lp_solve(&sign_residual_lp::<f64>(cols, signs)) {
        if value < BORDERLINE {
            let a: Vec<Q> = x[..cols.len()].iter().map(|v| rationalize(*v, RATIONALIZE_DEN)).collect();
            if strictly_signs(cols, &a, signs) {
                return Ok(true);
            }
        } else if value > SIGN_INFEASIBLE {
            return Ok(false);
        }
    }
    let (v, _) = lp_solve(&sign_residual_lp::<Q>(cols, signs))?
        .optimal()
        .ok_or_else(|| Error::Verification("sign residual LP not optimal".into()))?;
    Ok(v.is_zero())
}

/// Margin LP: `max delta` with `s_p phi(p) >= delta`, `sum |a_i| <= 1`.
fn margin_exact(cols: &[&[i64]], signs: &[i64]) -> Result<(Q, Vec<Q>)> {
    let k = cols.len();
    // Variables: pos_0..pos_k, neg_0..neg_k, delta (free).
    let mut obj = vec![Q::zero(); 2 * k + 1];
    obj[2 * k] = qi(-1);
    let mut lp = LpProblem::<Q>::new(2 * k + 1).minimize(obj);
    lp.free(2 * k);
    for (p, s) in signs.iter().enumerate() {
        let mut row: Vec<Q> = cols.iter().map(|c| qi(s * c[p])).collect();
        row.extend(cols.iter().map(|c| qi(-s * c[p])));
        row.push(qi(-1));
        lp.constraint(row, Sense::Ge, Q::zero());
    }
    let mut norm = vec![qi(1); 2 * k];
    norm.push(Q::zero());
    lp.constraint(norm, Sense::Le, qi(1));
    let (neg_delta, x) =
        lp_solve(&lp)?.optimal().ok_or_else(|| Error::Verification("margin LP not optimal".into()))?;
    let a = (0..k).map(|i| &x[i] - &x[k + i]).collect();
    Ok((-neg_delta, a))
}

/// Coordinate permutations acting on subset masks.
fn mask_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut perms);
    perms
        .into_iter()
        .map(|p| {
            (0..1u32 << n)
                .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).fold(0u32, |acc, i| acc | 1 << p[i]))
                .collect()
        })
        .collect()
}

fn permute(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == p.len() {
        out.push(p.clone());
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, out);
        p.swap(i, j);
    }
}

/// Lexicographically next `k`-subset of `0..n`.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Smallest support in its orbit under coordinate permutations.
fn is_canonical(support: &[usize], perms: &[Vec<u32>], buf: &mut Vec<usize>) -> bool {
    for p in perms {
        buf.clear();
        buf.extend(support.iter().map(|&s| p[s] as usize));
        buf.sort_unstable();
        if buf.as_slice() < support {
            return false;
        }
    }
    true
}

/// Visits supports by ascending size, then lexicographically, and returns the
/// first accepted one. With `symmetric`, only orbit representatives are
/// tested; the first accepted support is unchanged because a feasible
/// support's representative is feasible and never comes later.
fn first_support(
    n: usize,
    min_size: usize,
    symmetric: bool,
    mut accept: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<Option<Vec<usize>>> {
    let size = 1usize << n;
    let perms = if symmetric && n > 1 { mask_permutations(n) } else { Vec::new() };
    let mut buf = Vec::new();
    for k in min_size..=size {
        let mut c: Vec<usize> = (0..k).collect();
        loop {
            if (perms.is_empty() || is_canonical(&c, &perms, &mut buf)) && accept(&c)? {
                return Ok(Some(c));
            }
            if !next_combination(&mut c, size) {
                break;
            }
        }
    }
    Ok(None)
}

fn character_columns(n: usize) -> Vec<Vec<i64>> {
    let size = 1u32 << n;
    (0..size).map(|s| (0..size).map(|x| chi(s, x)).collect()).collect()
}

fn depends_on_weight_only<T: PartialEq>(n: usize, values: &[T]) -> bool {
    let mut rep: Vec<Option<&T>> = vec![None; n + 1];
    (0..1u32 << n).all(|x| {
        let w = x.count_ones() as usize;
        match rep[w] {
            None => {
                rep[w] = Some(&values[x as usize]);
                true
            }
            Some(v) => *v == values[x as usize],
        }
    })
}

/// Exact `mon_eps` of a truth table by support enumeration.
pub fn mon_eps_exact(g: &BoolFn, eps: &Q, caps: &Caps) -> Result<MonResult> {
    let targets: Vec<Q> = g.table().iter().map(|&b| qi(b as i64)).collect();
    mon_eps_real(g.n(), &targets, eps, caps)
}

/// Exact `mon_eps` of a real-valued function on `{0,1}^n` (values by point).
pub fn mon_eps_real(n: usize, targets: &[Q], eps: &Q, caps: &Caps) -> Result<MonResult> {
    cap_check("mon_eps_exact", n, caps.lp_enum)?;
    if eps.is_negative() {
        return Err(Error::OutOfRange("eps must be nonnegative".into()));
    }
    if targets.len() != 1 << n {
        return Err(Error::ShapeMismatch(format!("expected {} values, got {}", 1u32 << n, targets.len())));
    }
    let all = character_columns(n);
    let targets_f: Vec<f64> = targets.iter().map(to_f64).collect();
    let symmetric = depends_on_weight_only(n, targets);
    let found = first_support(n, 0, symmetric, |sup| {
        let cols: Vec<&[i64]> = sup.iter().map(|&s| all[s].as_slice()).collect();
        approx_feasible(&cols, targets, &targets_f, eps)
    })?
    .expect("the full support represents every function");
    let cols: Vec<&[i64]> = found.iter().map(|&s| all[s].as_slice()).collect();
    let (error, coeffs) = minmax_exact(&cols, targets)?;
    if error > *eps {
        return Err(Error::Verification("accepted support fails exact re-solve".into()));
    }
    Ok(MonResult {
        n,
        value: found.len(),
        support: found.iter().map(|&s| s as u32).collect(),
        coeffs,
        error,
        eps: eps.clone(),
    })
}

/// Exact sign monomial complexity with a normalised margin certificate.
pub fn signmon_exact(g: &BoolFn, caps: &Caps) -> Result<SignCertificate> {
    let n = g.n();
    cap_check("signmon_exact", n, caps.lp_enum)?;
    let all = character_columns(n);
    let signs: Vec<i64> = g.table().iter().map(|&b| if b { 1 } else { -1 }).collect();
    let symmetric = depends_on_weight_only(n, &signs);
    let found = first_support(n, 1, symmetric, |sup| {
        let cols: Vec<&[i64]> = sup.iter().map(|&s| all[s].as_slice()).collect();
        sign_feasible(&cols, &signs)
    })?
    .expect("2f - 1 sign-represents f");
    let cols: Vec<&[i64]> = found.iter().map(|&s| all[s].as_slice()).collect();
    let (delta, coeffs) = margin_exact(&cols, &signs)?;
    if !delta.is_positive() || !strictly_signs(&cols, &coeffs, &signs) {
        return Err(Error::Verification("accepted support has no positive margin".into()));
    }
    let margin = (0..signs.len()).map(|p| eval_cols(&cols, &coeffs, p).abs()).min().unwrap();
    Ok(SignCertificate { n, support: found.iter().map(|&s| s as u32).collect(), coeffs, margin })
}

/// Cheapest level set (by `sum C(n,k)`) carrying an `eps`-approximator; an
/// upper bound on `mon_eps`, never a substitute for it.
pub fn mon_eps_symmetric_upper(f: &SymFn, eps: &Q, caps: &Caps) -> Result<SymMonResult> {
    let n = f.n();
    cap_check("mon_eps_symmetric_upper", n, caps.sym_mon)?;
    if eps.is_negative() {
        return Err(Error::OutOfRange("eps must be nonnegative".into()));
    }
    let all = level_columns(n);
    let targets: Vec<Q> = (0..=n).map(|j| qi(f.at(j) as i64)).collect();
    let targets_f: Vec<f64> = targets.iter().map(to_f64).collect();
    let cost = |mask: u32| -> u128 { (0..=n).filter(|k| mask >> k & 1 == 1).map(|k| binom(n, k)).sum() };
    let mut order: Vec<u32> = (0..1u32 << (n + 1)).collect();
    order.sort_by_key(|&m| (cost(m), m));
    for mask in order {
        let levels: Vec<usize> = (0..=n).filter(|k| mask >> k & 1 == 1).collect();
        let cols: Vec<&[i64]> = levels.iter().map(|&k| all[k].as_slice()).collect();
        if approx_feasible(&cols, &targets, &targets_f, eps)? {
            let (error, coeffs) = minmax_exact(&cols, &targets)?;
            return Ok(SymMonResult { n, value: cost(mask), levels, coeffs, error, eps: eps.clone() });
        }
    }
    unreachable!("all levels represent f exactly")
}

/// Outcome of a sign check: strict agreement and `min |phi|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignCheck {
    pub ok: bool,
    #[serde(with = "serde_q")]
    pub margin: Q,
}

/// Checks that `p` is positive exactly where `f = 1`. Symmetric polynomials
/// are evaluated per weight class; others pointwise (`n <= 20`).
pub fn verify_sign(p: &SignPoly, f: &SymFn) -> SignCheck {
    assert_eq!(p.n, f.n(), "polynomial and function disagree on n");
    let values: Vec<(Q, bool)> = match &p.terms {
        PolyTerms::Levels(_) => (0..=f.n()).map(|j| (p.eval_weight(j).unwrap(), f.at(j))).collect(),
        PolyTerms::Sparse(_) => {
            let vals = dense_values(p);
            vals.into_iter().enumerate().map(|(x, v)| (v, f.at((x as u32).count_ones() as usize))).collect()
        }
    };
    sign_check(values)
}

/// Pointwise sign check against an arbitrary truth table.
pub fn verify_sign_table(p: &SignPoly, g: &BoolFn) -> SignCheck {
    assert_eq!(p.n, g.n(), "polynomial and function disagree on n");
    let vals = dense_values(p);
    sign_check(vals.into_iter().zip(g.table().iter().copied()).collect())
}

fn sign_check(values: Vec<(Q, bool)>) -> SignCheck {
    let ok = values.iter().all(|(v, b)| if *b { v.is_positive() } else { v.is_negative() });
    let margin = values.into_iter().map(|(v, _)| v.abs()).min().unwrap_or_else(Q::zero);
    SignCheck { ok, margin }
}

/// Values at every point via the rational butterfly.
fn dense_values(p: &SignPoly) -> Vec<Q> {
    assert!(p.n <= 20, "pointwise evaluation needs n <= 20");
    let size = 1usize << p.n;
    let mut v = vec![Q::zero(); size];
    match &p.terms {
        PolyTerms::Levels(l) => {
            for (s, slot) in v.iter_mut().enumerate() {
                *slot = l[s.count_ones() as usize].clone();
            }
        }
        PolyTerms::Sparse(m) => {
            for (s, c) in m {
                v[*s as usize] = c.clone();
            }
        }
    }
    let mut h = 1;
    while h < size {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let sum = &*a + &*b;
                let diff = &*a - &*b;
                *a = sum;
                *b = diff;
            }
        }
        h *= 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::level_spectrum;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn parity_approx_l1() {
        for n in 1..=8 {
            let r = approx_l1(&SymFn::parity(n), &q(1, 5)).unwrap();
            assert_eq!(r.value, q(4, 5), "n={n}");
            assert_eq!(r.witness_l1(), r.value);
            let g = SymFn::parity(n).expand(20).unwrap();
            assert!(r.max_error(&g) <= q(1, 5));
        }
    }

    #[test]
    fn approx_l1_trivial_cases() {
        assert_eq!(approx_l1(&SymFn::constant(5, false), &q(1, 4)).unwrap().value, qi(0));
        for f in SymFn::all(4) {
            let exact = level_spectrum(&f).stats().l1.exact().unwrap().clone();
            assert_eq!(approx_l1(&f, &Q::zero()).unwrap().value, exact, "{f}");
        }
        assert!(approx_l1(&SymFn::and(3), &q(1, 2)).is_err());
        assert!(approx_l1(&SymFn::and(3), &q(-1, 8)).is_err());
    }

    #[test]
    fn approx_l1_monotone_in_eps() {
        let eps = [qi(0), q(1, 20), q(1, 5), q(1, 4), q(9, 20)];
        for f in SymFn::all(5) {
            let vals: Vec<Q> = eps.iter().map(|e| approx_l1(&f, e).unwrap().value).collect();
            assert!(vals.windows(2).all(|w| w[0] >= w[1]), "{f}");
        }
    }

    #[test]
    fn dense_ansatz_agrees_at_small_n() {
        for n in 0..=3 {
            for f in SymFn::all(n) {
                let g = f.expand(20).unwrap();
                for e in [q(1, 5), q(1, 20)] {
                    let a = approx_l1(&f, &e).unwrap();
                    let d = approx_l1_dense(&g, &e, &caps()).unwrap();
                    assert_eq!(a.value, d.value, "{f}");
                    assert!(d.max_error(&g) <= e);
                }
            }
        }
    }

    #[test]
    fn dual_matches_primal() {
        for n in 0..=6 {
            for f in SymFn::all(n) {
                let p = approx_l1(&f, &q(1, 5)).unwrap();
                let d = approx_l1_dual(&f, &q(1, 5)).unwrap();
                assert!(dual_is_feasible(&d));
                assert_eq!(p.value, d.value, "{f}");
            }
        }
    }

    #[test]
    fn mon_eps_examples() {
        let c = caps();
        assert_eq!(mon_eps_exact(&BoolFn::from_fn(3, |_| false), &q(1, 4), &c).unwrap().value, 0);
        let par2 = SymFn::parity(2).expand(20).unwrap();
        let r = mon_eps_exact(&par2, &q(1, 4), &c).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.support, vec![0, 3]);
        assert!(r.error <= q(1, 4));
        assert!(mon_eps_exact(&BoolFn::from_fn(5, |_| false), &q(1, 4), &c).is_err());
    }

    #[test]
    fn mon_eps_zero_is_mon() {
        let c = caps();
        for f in SymFn::all(3) {
            let g = f.expand(20).unwrap();
            let r = mon_eps_exact(&g, &Q::zero(), &c).unwrap();
            assert_eq!(r.value as u128, level_spectrum(&f).mon(), "{f}");
            assert!(r.error.is_zero());
        }
        for bits in [0x6du64, 0x17, 0xe8, 0x01] {
            let g = BoolFn::from_u64(3, bits);
            let sp = crate::fourier::wht(&g, crate::Mode::Exact, &c).unwrap();
            assert_eq!(mon_eps_exact(&g, &Q::zero(), &c).unwrap().value as u128, sp.stats().mon);
        }
    }

    #[test]
    fn orbit_pruning_does_not_change_result() {
        let c = caps();
        let all = character_columns(3);
        for f in SymFn::all(3) {
            let g = f.expand(20).unwrap();
            let targets: Vec<Q> = g.table().iter().map(|&b| qi(b as i64)).collect();
            let tf: Vec<f64> = targets.iter().map(to_f64).collect();
            let plain = first_support(3, 0, false, |sup| {
                let cols: Vec<&[i64]> = sup.iter().map(|&s| all[s].as_slice()).collect();
                approx_feasible(&cols, &targets, &tf, &q(1, 4))
            })
            .unwrap()
            .unwrap();
            let r = mon_eps_exact(&g, &q(1, 4), &c).unwrap();
            assert_eq!(r.support, plain.iter().map(|&s| s as u32).collect::<Vec<_>>(), "{f}");
        }
    }

    #[test]
    fn signmon_examples() {
        let c = caps();
        for n in 1..=4 {
            let cert = signmon_exact(&SymFn::parity(n).expand(20).unwrap(), &c).unwrap();
            assert_eq!(cert.size(), 1);
            assert_eq!(cert.support, vec![(1u32 << n) - 1]);
            assert_eq!(cert.coeffs, vec![qi(-1)]);
            assert_eq!(cert.margin, qi(1));
        }
        let and2 = signmon_exact(&SymFn::and(2).expand(20).unwrap(), &c).unwrap();
        assert_eq!(and2.size(), 3);
        assert!(verify_sign_table(&and2.to_sign_poly(), &SymFn::and(2).expand(20).unwrap()).ok);
        let one = signmon_exact(&SymFn::constant(3, true).expand(20).unwrap(), &c).unwrap();
        assert_eq!((one.support.clone(), one.coeffs.clone()), (vec![0], vec![qi(1)]));
    }

    #[test]
    fn and2_needs_three_terms() {
        // Every 1- and 2-element support fails the residual LP exactly.
        let signs = vec![-1, -1, -1, 1];
        let all = character_columns(2);
        for k in 1..=2 {
            let mut c: Vec<usize> = (0..k).collect();
            loop {
                let cols: Vec<&[i64]> = c.iter().map(|&s| all[s].as_slice()).collect();
                let (v, _) = lp_solve(&sign_residual_lp::<Q>(&cols, &signs)).unwrap().optimal().unwrap();
                assert!(v.is_positive());
                if !next_combination(&mut c, 4) {
                    break;
                }
            }
        }
    }

    #[test]
    fn symmetric_upper_examples() {
        let c = caps();
        for n in 2..=8 {
            let r = mon_eps_symmetric_upper(&SymFn::parity(n), &q(1, 4), &c).unwrap();
            assert_eq!(r.value, 2, "n={n}");
            assert_eq!(r.levels, vec![0, n]);
        }
        assert_eq!(mon_eps_symmetric_upper(&SymFn::constant(6, true), &q(1, 4), &c).unwrap().value, 1);
    }

    #[test]
    fn symmetric_upper_dominates_exact() {
        let c = caps();
        for n in 1..=3 {
            for f in SymFn::all(n) {
                let up = mon_eps_symmetric_upper(&f, &q(1, 4), &c).unwrap();
                let ex = mon_eps_exact(&f.expand(20).unwrap(), &q(1, 4), &c).unwrap();
                assert!(up.value >= ex.value as u128, "{f}");
            }
        }
    }

    #[test]
    fn verify_sign_examples() {
        for n in 1..=6 {
            let f = SymFn::parity(n);
            let mut neg = vec![Q::zero(); n + 1];
            neg[n] = qi(-1);
            let p = SignPoly::from_levels(neg);
            assert_eq!(verify_sign(&p, &f), SignCheck { ok: true, margin: qi(1) });
            assert!(!verify_sign(&p.scale(&qi(-1)), &f).ok);
            assert!(verify_sign(&p.to_sparse(), &f).ok);
        }
    }

    #[test]
    fn json_shapes() {
        let r = approx_l1(&SymFn::parity(3), &q(1, 5)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"], "4/5");
        assert_eq!(v["ansatz"], "symmetric-levels");
        let cert = signmon_exact(&SymFn::parity(2).expand(20).unwrap(), &caps()).unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["support"][0], "0x3");
        assert_eq!(v["margin"], "1");
    }
}
