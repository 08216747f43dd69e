//! Explicit constructions: the inductive sign-representing polynomial and the
//! importance-sampling approximator.
//!
//! Every polynomial built here is symmetric (its coefficient on `chi_S` only
//! depends on `|S|`), so [`SignPoly`] keeps it in level form and multiplies
//! level vectors directly. Sparse mask form is available for small `n` and for
//! certificates coming out of the LP enumeration.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{butterfly, level_character_sum, Mode};
use crate::func::{BoolFn, SymFn};
use crate::rational::{binom, fmt_q, q, qi, serde_mask, Q};

/// Coefficients of a polynomial over characters.
#[derive(Clone, Debug, PartialEq)]
pub enum PolyTerms {
    /// `levels[k]` multiplies every `chi_S` with `|S| = k`.
    Levels(Vec<Q>),
    /// Explicit masks; no zero coefficients stored.
    Sparse(BTreeMap<u32, Q>),
}

/// A real polynomial over characters with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SignPoly {
    pub n: usize,
    pub terms: PolyTerms,
    /// Flattened factors whose product is `terms`, when built as a product.
    pub factors: Option<Vec<SignPoly>>,
}

/// Number of pairs `(S, T)` with `|S| = a`, `|T| = b` and `S xor T = U` for a
/// fixed `|U| = u`, as a function of the level of `S` and `U`.
fn level_product_count(n: usize, a: usize, u: usize, i: usize) -> u128 {
    // |S & U| = i
    binom(u, i) * binom(n - u, a - i)
}

impl SignPoly {
    pub fn zero(n: usize) -> Self {
        SignPoly { n, terms: PolyTerms::Levels(vec![Q::zero(); n + 1]), factors: None }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        let mut levels = vec![Q::zero(); n + 1];
        levels[0] = c;
        SignPoly { n, terms: PolyTerms::Levels(levels), factors: None }
    }

    pub fn from_levels(levels: Vec<Q>) -> Self {
        assert!(!levels.is_empty());
        SignPoly { n: levels.len() - 1, terms: PolyTerms::Levels(levels), factors: None }
    }

    pub fn from_sparse(n: usize, terms: impl IntoIterator<Item = (u32, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            assert!(m < (1u32 << n) || n >= 32);
            let e: &mut Q = map.entry(m).or_insert_with(Q::zero);
            *e += c;
        }
        map.retain(|_, c| !c.is_zero());
        SignPoly { n, terms: PolyTerms::Sparse(map), factors: None }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.terms, PolyTerms::Levels(_))
    }

    /// Number of characters with a nonzero coefficient.
    pub fn term_count(&self) -> u128 {
        match &self.terms {
            PolyTerms::Levels(l) => {
                l.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, _)| binom(self.n, k)).sum()
            }
            PolyTerms::Sparse(m) => m.len() as u128,
        }
    }

    /// Value at any input of Hamming weight `j`. Only for symmetric polynomials.
    pub fn eval_weight(&self, j: usize) -> Option<Q> {
        let PolyTerms::Levels(l) = &self.terms else { return None };
        let mut acc = Q::zero();
        for (k, c) in l.iter().enumerate() {
            if !c.is_zero() {
                acc += c * Q::from_integer(level_character_sum(self.n, k, j).into());
            }
        }
        Some(acc)
    }

    pub fn eval_point(&self, x: u32) -> Q {
        match &self.terms {
            PolyTerms::Levels(_) => self.eval_weight(x.count_ones() as usize).unwrap(),
            PolyTerms::Sparse(m) => m.iter().fold(Q::zero(), |acc, (s, c)| {
                if (s & x).count_ones().is_multiple_of(2) {
                    acc + c
                } else {
                    acc - c
                }
            }),
        }
    }

    /// Explicit mask form (`n <= 20`).
    pub fn to_sparse(&self) -> SignPoly {
        match &self.terms {
            PolyTerms::Sparse(_) => SignPoly { factors: None, ..self.clone() },
            PolyTerms::Levels(l) => {
                assert!(self.n <= 20, "mask expansion needs n <= 20");
                let terms = (0..1u32 << self.n).filter_map(|s| {
                    let c = &l[s.count_ones() as usize];
                    (!c.is_zero()).then(|| (s, c.clone()))
                });
                SignPoly::from_sparse(self.n, terms)
            }
        }
    }

    /// Product of two polynomials on the same number of variables.
    pub fn mul(&self, other: &SignPoly) -> SignPoly {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let terms = match (&self.terms, &other.terms) {
            (PolyTerms::Levels(a), PolyTerms::Levels(b)) => {
                let mut out = vec![Q::zero(); n + 1];
                for (ka, ca) in a.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (u, slot) in out.iter_mut().enumerate() {
                        // chi_S chi_T = chi_U with |T| = ka + u - 2 |S & U|.
                        for i in 0..=ka.min(u) {
                            let cnt = level_product_count(n, ka, u, i);
                            if cnt == 0 {
                                continue;
                            }
                            let kb = ka + u - 2 * i;
                            if kb > n || b[kb].is_zero() {
                                continue;
                            }
                            *slot += ca * &b[kb] * Q::from_integer(cnt.into());
                        }
                    }
                }
                PolyTerms::Levels(out)
            }
            _ => {
                let (a, b) = (self.to_sparse(), other.to_sparse());
                let (PolyTerms::Sparse(a), PolyTerms::Sparse(b)) = (&a.terms, &b.terms) else { unreachable!() };
                let mut out: BTreeMap<u32, Q> = BTreeMap::new();
                for (sa, ca) in a {
                    for (sb, cb) in b {
                        *out.entry(sa ^ sb).or_insert_with(Q::zero) += ca * cb;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                PolyTerms::Sparse(out)
            }
        };
        let mut factors = Vec::new();
        for p in [self, other] {
            match &p.factors {
                Some(fs) => factors.extend(fs.iter().cloned()),
                None => factors.push(SignPoly { factors: None, ..p.clone() }),
            }
        }
        SignPoly { n, terms, factors: Some(factors) }
    }

    pub fn scale(&self, c: &Q) -> SignPoly {
        let terms = match &self.terms {
            PolyTerms::Levels(l) => PolyTerms::Levels(l.iter().map(|v| v * c).collect()),
            PolyTerms::Sparse(m) => {
                PolyTerms::Sparse(m.iter().map(|(s, v)| (*s, v * c)).filter(|(_, v)| !v.is_zero()).collect())
            }
        };
        SignPoly { n: self.n, terms, factors: None }
    }

    /// `p'(x) = p(complement of x)`: `chi_S -> (-1)^{|S|} chi_S`.
    pub fn complement_inputs(&self) -> SignPoly {
        let terms = match &self.terms {
            PolyTerms::Levels(l) => PolyTerms::Levels(
                l.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c }).collect(),
            ),
            PolyTerms::Sparse(m) => PolyTerms::Sparse(
                m.iter()
                    .map(|(s, c)| (*s, if s.count_ones() % 2 == 0 { c.clone() } else { -c }))
                    .collect(),
            ),
        };
        SignPoly { n: self.n, terms, factors: None }
    }

    pub fn to_json(&self) -> SignPolyJson {
        let expanded = match &self.terms {
            PolyTerms::Levels(l) => l
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| TermJson::Level { level: k, count: binom(self.n, k) as u64, coeff: fmt_q(c) })
                .collect(),
            PolyTerms::Sparse(m) => {
                m.iter().map(|(s, c)| TermJson::Mask { mask: serde_mask::fmt(*s), coeff: fmt_q(c) }).collect()
            }
        };
        SignPolyJson {
            n: self.n,
            term_count: self.term_count() as u64,
            symmetric: self.is_symmetric(),
            expanded,
            factored: self.factors.as_ref().map(|fs| fs.iter().map(|f| f.to_json()).collect()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TermJson {
    Level { level: usize, count: u64, coeff: String },
    Mask { mask: String, coeff: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct SignPolyJson {
    pub n: usize,
    pub term_count: u64,
    pub symmetric: bool,
    pub expanded: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factored: Option<Vec<SignPolyJson>>,
}

/// Which side of the flip behaves like a parity function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipSide {
    ParityBelow,
    ParityAbove,
}

/// The single-flip pattern selected by `(n, j, phase, side)`.
///
/// The parity-like side takes value 1 on weights `w` with `w % 2 == phase`.
/// `ParityBelow`: parity-like on `0..=j-1`, constant (equal to its value at
/// `j - 1`) on `j-1..=n`. `ParityAbove`: constant on `0..=j-1`, parity-like on
/// `j-1..=n`. In both cases `f(j) != f(j-2)` is the only flip.
pub fn one_flip_target(n: usize, j: usize, phase: usize, side: FlipSide) -> Result<SymFn> {
    if j < 2 || j > n {
        return Err(Error::OutOfRange(format!(
            "flip index j = {j} must satisfy 2 <= j <= n = {n}; smaller patterns are constant or parity"
        )));
    }
    if phase > 1 {
        return Err(Error::OutOfRange(format!("phase must be 0 or 1, got {phase}")));
    }
    let par = |w: usize| w % 2 == phase;
    let c = par(j - 1);
    Ok(match side {
        FlipSide::ParityBelow => SymFn::from_fn(n, |w| if w < j { par(w) } else { c }),
        FlipSide::ParityAbove => SymFn::from_fn(n, |w| if w < j { c } else { par(w) }),
    })
}

/// Sign polynomial with at most `n + 2` terms for a single-flip pattern.
///
/// Parity below the flip: `s (2j - margin) chi_[n] + c (n - sum_i chi_{i})`,
/// where `s = +1` when the parity side is 1 on even weights and `c = +1` when
/// the constant side is 1. On weights below `j` the first term dominates
/// (`|2w| <= 2j - 2`), from `j` on the second does (`2w >= 2j`). Parity above
/// is the reversed pattern with inputs complemented.
pub fn one_flip_sign_poly(n: usize, j: usize, phase: usize, side: FlipSide, margin: &Q) -> Result<SignPoly> {
    if !margin.is_positive() || *margin >= qi(2) {
        return Err(Error::OutOfRange(format!("margin {} must lie in (0, 2)", fmt_q(margin))));
    }
    one_flip_target(n, j, phase, side)?;
    match side {
        FlipSide::ParityBelow => {
            let s = if phase == 0 { qi(1) } else { qi(-1) };
            let c = if (j - 1) % 2 == phase { qi(1) } else { qi(-1) };
            let dominant = s * (qi(2 * j as i64) - margin);
            let mut levels = vec![Q::zero(); n + 1];
            levels[0] = &c * qi(n as i64);
            levels[1] -= &c;
            levels[n] += dominant;
            Ok(SignPoly::from_levels(levels))
        }
        FlipSide::ParityAbove => {
            // Reversal maps a flip at j to a flip at n - j + 2 and the residue
            // class `phase` to `(n - phase) mod 2`.
            let rj = n + 2 - j;
            let rphase = (n + 2 - phase) % 2;
            let below = one_flip_sign_poly(n, rj, rphase, FlipSide::ParityBelow, margin)?;
            Ok(below.complement_inputs())
        }
    }
}

/// Sign-representing polynomial with at most `(n + 2)^rho(f)` terms, using
/// the default margin 1/10.
pub fn sign_poly_for(f: &SymFn) -> SignPoly {
    sign_poly_for_with_margin(f, &q(1, 10)).expect("default margin is valid")
}

/// Recursive construction: strip the largest flip `j`, sign-represent the
/// remainder `f'`, and multiply by a single-flip polynomial `p''` that is
/// positive below `j` and corrects the parity of `f'` from `j` on.
pub fn sign_poly_for_with_margin(f: &SymFn, margin: &Q) -> Result<SignPoly> {
    let n = f.n();
    let flips = f.flips();
    match flips.len() {
        0 => {
            // Constant, parity, or negated parity.
            let poly = if f.is_constant() {
                SignPoly::constant(n, if f.at(0) { qi(1) } else { qi(-1) })
            } else {
                // f(0) = 1 means negated parity, represented by +chi_[n].
                let mut levels = vec![Q::zero(); n + 1];
                levels[n] = if f.at(0) { qi(1) } else { qi(-1) };
                SignPoly::from_levels(levels)
            };
            Ok(poly)
        }
        1 => {
            let j = flips[0];
            if f.at(0) != f.at(1) {
                let phase = if f.at(0) { 0 } else { 1 };
                one_flip_sign_poly(n, j, phase, FlipSide::ParityBelow, margin)
            } else {
                let phase = if f.at(j) { j % 2 } else { (j + 1) % 2 };
                one_flip_sign_poly(n, j, phase, FlipSide::ParityAbove, margin)
            }
        }
        _ => {
            let (reduced, j) = strip_last_flip(f);
            let p1 = sign_poly_for_with_margin(&reduced, margin)?;
            let p2 = one_flip_sign_poly(n, j, (j + 1) % 2, FlipSide::ParityAbove, margin)?;
            Ok(p1.mul(&p2))
        }
    }
}

/// `(f', j)`: `j` is the largest flip and `f'` continues `f` 2-periodically
/// from `j` on, so `rho(f') = rho(f) - 1`.
pub fn strip_last_flip(f: &SymFn) -> (SymFn, usize) {
    let j = *f.flips().last().expect("function has a flip");
    let mut v = f.values().to_vec();
    for i in j..v.len() {
        v[i] = v[i - 2];
    }
    (SymFn::new(v).unwrap(), j)
}

/// The correcting factor's target: 1 below `j`, then 1 exactly where `f` and
/// `f'` agree.
pub fn correction_target(n: usize, j: usize) -> SymFn {
    SymFn::from_fn(n, |i| i < j || (i - j) % 2 == 1)
}

/// Sampled approximator and its error statistics.
#[derive(Clone, Debug, Serialize)]
pub struct Bs92Trial {
    pub trial: usize,
    pub support: usize,
    pub linf_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bs92Report {
    pub n: usize,
    pub eps: f64,
    pub l1: f64,
    /// Number of samples `ceil(4 n ||f^||_1^2 / eps^2)`.
    pub samples: u64,
    pub trials: Vec<Bs92Trial>,
    pub best_trial: usize,
    /// Coefficients of the best trial's approximator (mask, value).
    #[serde(skip)]
    pub best: Vec<(u32, f64)>,
}

impl Bs92Report {
    pub fn median_error(&self) -> f64 {
        let mut e: Vec<f64> = self.trials.iter().map(|t| t.linf_error).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if e.is_empty() {
            return 0.0;
        }
        let mid = e.len() / 2;
        if e.len() % 2 == 1 {
            e[mid]
        } else {
            (e[mid - 1] + e[mid]) / 2.0
        }
    }

    pub fn max_support(&self) -> usize {
        self.trials.iter().map(|t| t.support).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,support,linf_error\n");
        for t in &self.trials {
            out.push_str(&format!("{},{},{:.12}\n", t.trial, t.support, t.linf_error));
        }
        out
    }
}

/// Number of samples the sampling bound prescribes.
pub fn bs92_sample_count(n: usize, l1: f64, eps: f64) -> u64 {
    (4.0 * n as f64 * l1 * l1 / (eps * eps) - 1e-9).ceil().max(0.0) as u64
}

/// Draws characters with probability `|f^(S)| / ||f^||_1` and averages
/// `||f^||_1 sign(f^(S)) chi_S`. Trial `i` uses seed `seed + i`.
pub fn bs92_sample(g: &BoolFn, eps: f64, trials: usize, seed: u64, caps: &crate::Caps) -> Result<Bs92Report> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfRange(format!("eps = {eps} not in (0, 1/2)")));
    }
    let n = g.n();
    let sp = crate::fourier::wht(g, Mode::Exact, caps)?;
    let coeffs = sp.coeffs_f64();
    let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let target: Vec<f64> = g.table().iter().map(|&b| b as u8 as f64).collect();
    if l1 == 0.0 {
        let trials = (0..trials).map(|trial| Bs92Trial { trial, support: 0, linf_error: 0.0 }).collect();
        return Ok(Bs92Report { n, eps, l1, samples: 0, trials, best_trial: 0, best: Vec::new() });
    }
    let samples = bs92_sample_count(n, l1, eps);
    let dist = WeightedIndex::new(coeffs.iter().map(|c| c.abs())).expect("nonzero spectrum");

    let mut out = Vec::with_capacity(trials);
    type Best = (f64, usize, Vec<(u32, f64)>);
    let mut best: Option<Best> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let mut counts = vec![0u64; coeffs.len()];
        for _ in 0..samples {
            counts[dist.sample(&mut rng)] += 1;
        }
        let scale = l1 / samples as f64;
        let mut approx: Vec<f64> = counts
            .iter()
            .zip(&coeffs)
            .map(|(&c, f)| if c == 0 { 0.0 } else { c as f64 * scale * f.signum() })
            .collect();
        let terms: Vec<(u32, f64)> =
            approx.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(s, c)| (s as u32, *c)).collect();
        butterfly(&mut approx);
        let err = approx.iter().zip(&target).fold(0.0f64, |m, (a, t)| m.max((a - t).abs()));
        out.push(Bs92Trial { trial, support: terms.len(), linf_error: err });
        if best.as_ref().is_none_or(|(e, _, _)| err < *e) {
            best = Some((err, trial, terms));
        }
    }
    let (_, best_trial, best) = best.unwrap_or((0.0, 0, Vec::new()));
    Ok(Bs92Report { n, eps, l1, samples, trials: out, best_trial, best })
}

/// Expectation of one importance-weighted sample, per character:
/// `P(S) * ||f^||_1 * sign(f^(S)) = f^(S)`.
pub fn bs92_expectation(coeffs: &[Q]) -> Vec<Q> {
    let l1: Q = coeffs.iter().map(|c| c.abs()).sum();
    if l1.is_zero() {
        return vec![Q::zero(); coeffs.len()];
    }
    coeffs
        .iter()
        .map(|c| {
            let p = c.abs() / &l1;
            let sign = if c.is_negative() { -Q::one() } else { Q::one() };
            if c.is_zero() {
                Q::zero()
            } else {
                p * &l1 * sign
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Caps;

    fn weight_values(p: &SignPoly) -> Vec<Q> {
        (0..=p.n).map(|j| p.eval_weight(j).unwrap()).collect()
    }

    fn represents(p: &SignPoly, f: &SymFn) -> bool {
        (0..=f.n()).all(|j| {
            let v = p.eval_weight(j).unwrap();
            if f.at(j) {
                v.is_positive()
            } else {
                v.is_negative()
            }
        })
    }

    #[test]
    fn displayed_polynomial_example() {
        // f = (1, 0, 0, 0): negated parity below the flip at j = 2, then 0.
        let f: SymFn = "1000".parse().unwrap();
        assert_eq!(one_flip_target(3, 2, 0, FlipSide::ParityBelow).unwrap(), f);
        let p = one_flip_sign_poly(3, 2, 0, FlipSide::ParityBelow, &q(1, 10)).unwrap();
        assert_eq!(p.terms, PolyTerms::Levels(vec![qi(-3), qi(1), qi(0), q(39, 10)]));
        assert_eq!(p.term_count(), 5);
        assert_eq!(weight_values(&p), vec![q(39, 10), q(-59, 10), q(-1, 10), q(-99, 10)]);
        assert!(represents(&p, &f));
    }

    #[test]
    fn one_flip_rejects_degenerate_patterns() {
        for j in [0, 1] {
            assert!(one_flip_sign_poly(5, j, 0, FlipSide::ParityBelow, &q(1, 10)).is_err());
        }
        assert!(one_flip_sign_poly(5, 6, 0, FlipSide::ParityAbove, &q(1, 10)).is_err());
        assert!(one_flip_sign_poly(5, 3, 2, FlipSide::ParityAbove, &q(1, 10)).is_err());
        assert!(one_flip_sign_poly(5, 3, 0, FlipSide::ParityAbove, &qi(2)).is_err());
    }

    #[test]
    fn one_flip_family_is_correct_and_small() {
        for n in 2..=12 {
            for j in 2..=n {
                for phase in 0..2 {
                    for side in [FlipSide::ParityBelow, FlipSide::ParityAbove] {
                        let f = one_flip_target(n, j, phase, side).unwrap();
                        assert_eq!(f.flips(), vec![j]);
                        for margin in [q(1, 10), qi(1), q(19, 10)] {
                            let p = one_flip_sign_poly(n, j, phase, side, &margin).unwrap();
                            assert!(represents(&p, &f), "n={n} j={j} phase={phase} {side:?}");
                            assert!(p.term_count() <= n as u128 + 2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn base_cases() {
        for n in 1..8 {
            for f in [SymFn::parity(n), SymFn::parity(n).reverse(), SymFn::constant(n, true)] {
                if f.flips().is_empty() {
                    let p = sign_poly_for(&f);
                    assert_eq!(p.term_count(), 1);
                    assert!(represents(&p, &f));
                }
            }
        }
        let p = sign_poly_for(&SymFn::parity(4));
        assert_eq!(p.terms, PolyTerms::Levels(vec![qi(0), qi(0), qi(0), qi(0), qi(-1)]));
    }

    #[test]
    fn named_constructions() {
        let and5 = sign_poly_for(&SymFn::and(5));
        assert!(represents(&and5, &SymFn::and(5)));
        assert!(and5.term_count() <= 7);
        let maj5 = sign_poly_for(&SymFn::maj(5));
        assert!(represents(&maj5, &SymFn::maj(5)));
        assert!(maj5.term_count() <= 49);
    }

    #[test]
    fn construction_bound_exhaustive() {
        for n in 0..=9 {
            for f in SymFn::all(n) {
                let rho = f.measures().rho as u32;
                let p = sign_poly_for(&f);
                assert!(represents(&p, &f), "{f}");
                assert!(p.term_count() <= (n as u128 + 2).pow(rho), "{f}");
            }
        }
    }

    #[test]
    fn product_step_soundness() {
        for n in 2..=9 {
            for f in SymFn::all(n).filter(|f| f.flips().len() >= 2) {
                let (reduced, j) = strip_last_flip(&f);
                assert_eq!(reduced.flips().len() + 1, f.flips().len());
                let corr = correction_target(n, j);
                let p1 = sign_poly_for(&reduced);
                let p2 = one_flip_sign_poly(n, j, (j + 1) % 2, FlipSide::ParityAbove, &q(1, 10)).unwrap();
                assert_eq!(one_flip_target(n, j, (j + 1) % 2, FlipSide::ParityAbove).unwrap(), corr);
                for w in 0..=n {
                    let s1 = p1.eval_weight(w).unwrap().is_positive();
                    let s2 = p2.eval_weight(w).unwrap().is_positive();
                    assert_eq!(s1 == s2, f.at(w), "{f} at {w}");
                    assert_eq!(f.at(w), reduced.at(w) == corr.at(w));
                }
            }
        }
    }

    #[test]
    fn factored_form_expands_to_terms() {
        let f: SymFn = "0110100110".parse().unwrap();
        let p = sign_poly_for(&f);
        let fs = p.factors.as_ref().unwrap();
        assert_eq!(fs.len(), f.measures().rho);
        let prod = fs[1..].iter().fold(fs[0].clone(), |acc, x| acc.mul(x));
        assert_eq!(prod.terms, p.terms);
        let bound: u128 = fs.iter().map(|x| x.term_count()).product();
        assert!(p.term_count() <= bound);
    }

    #[test]
    fn level_product_matches_mask_product() {
        for n in 1..=6 {
            for f in SymFn::all(n).step_by(5) {
                let p = sign_poly_for(&f);
                let r = sign_poly_for(&f.reverse());
                let lv = p.mul(&r);
                let sp = p.to_sparse().mul(&r.to_sparse());
                assert_eq!(lv.to_sparse().terms, sp.terms, "{f}");
            }
        }
    }

    #[test]
    fn complement_matches_pointwise() {
        let p = one_flip_sign_poly(5, 3, 1, FlipSide::ParityBelow, &q(1, 10)).unwrap();
        let c = p.complement_inputs();
        for x in 0..32u32 {
            assert_eq!(c.eval_point(x), p.eval_point(x ^ 31));
            assert_eq!(c.to_sparse().eval_point(x), c.eval_point(x));
        }
    }

    #[test]
    fn json_has_both_forms() {
        let p = sign_poly_for(&SymFn::maj(5));
        let js = serde_json::to_value(p.to_json()).unwrap();
        assert_eq!(js["n"], 5);
        assert!(!js["expanded"].as_array().unwrap().is_empty());
        assert_eq!(js["factored"].as_array().unwrap().len(), 2);
        let sparse = SignPoly::from_sparse(2, [(3, q(1, 2)), (0, qi(-1))]);
        let js = serde_json::to_value(sparse.to_json()).unwrap();
        assert_eq!(js["expanded"][0]["mask"], "0x0");
        assert_eq!(js["expanded"][1]["coeff"], "1/2");
    }

    #[test]
    fn bs92_parity() {
        let g = SymFn::parity(4).expand(20).unwrap();
        let rep = bs92_sample(&g, 0.25, 50, 11, &Caps::default()).unwrap();
        assert_eq!(rep.samples, 64 * 4);
        assert!(rep.trials.iter().all(|t| t.support <= 2));
        let good = rep.trials.iter().filter(|t| t.linf_error <= 0.25).count();
        assert!(good >= 45, "{good}");
    }

    #[test]
    fn bs92_zero_function() {
        let g = SymFn::constant(4, false).expand(20).unwrap();
        let rep = bs92_sample(&g, 0.25, 5, 0, &Caps::default()).unwrap();
        assert!(rep.trials.iter().all(|t| t.support == 0 && t.linf_error == 0.0));
        assert!(bs92_sample(&g, 0.5, 5, 0, &Caps::default()).is_err());
    }

    #[test]
    fn bs92_is_reproducible() {
        let g = SymFn::maj(7).expand(20).unwrap();
        let a = bs92_sample(&g, 0.25, 5, 7, &Caps::default()).unwrap();
        let b = bs92_sample(&g, 0.25, 5, 7, &Caps::default()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.max_support() as u64 <= a.samples);
    }

    #[test]
    fn bs92_estimator_unbiased_on_parity() {
        let half = q(1, 2);
        let coeffs = vec![half.clone(), qi(0), qi(0), -half];
        assert_eq!(bs92_expectation(&coeffs), coeffs);
    }
}
