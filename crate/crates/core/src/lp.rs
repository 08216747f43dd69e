//! Dense two-phase simplex with Bland's rule.
//!
//! The solver is generic over [`LpScalar`]; `f64` is used for the bulk of the
//! support enumeration and [`Q`] for exact re-solves. Bland's rule makes every
//! run deterministic and cycle-free. Problems here have at most a few hundred
//! rows and columns, so the tableau is stored dense.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{from_f64_exact, to_f64, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("malformed problem: {0}")]
    Malformed(String),
}

/// Field operations the simplex needs, plus a zero tolerance.
pub trait LpScalar: Clone + PartialOrd + Debug + Zero + One + Send + Sync {
    const EXACT: bool;
    fn tol() -> Self;
    fn add_r(&self, o: &Self) -> Self;
    fn sub_r(&self, o: &Self) -> Self;
    fn mul_r(&self, o: &Self) -> Self;
    fn div_r(&self, o: &Self) -> Self;
    fn neg_r(&self) -> Self;
    fn is_finite_r(&self) -> bool;
    fn from_q(q: &Q) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_q(&self) -> Q;
    fn to_f64_r(&self) -> f64;

    fn is_pos(&self) -> bool {
        *self > Self::tol()
    }

    fn is_neg(&self) -> bool {
        *self < Self::tol().neg_r()
    }
}

impl LpScalar for f64 {
    const EXACT: bool = false;
    fn tol() -> Self {
        1e-9
    }
    fn add_r(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_r(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_r(&self, o: &Self) -> Self {
        self * o
    }
    fn div_r(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_r(&self) -> Self {
        -self
    }
    fn is_finite_r(&self) -> bool {
        self.is_finite()
    }
    fn from_q(q: &Q) -> Self {
        to_f64(q)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_q(&self) -> Q {
        from_f64_exact(*self)
    }
    fn to_f64_r(&self) -> f64 {
        *self
    }
}

impl LpScalar for Q {
    const EXACT: bool = true;
    fn tol() -> Self {
        Q::zero()
    }
    fn add_r(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_r(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_r(&self, o: &Self) -> Self {
        self * o
    }
    fn div_r(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_r(&self) -> Self {
        -self
    }
    fn is_finite_r(&self) -> bool {
        true
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(v.into())
    }
    fn to_q(&self) -> Q {
        self.clone()
    }
    fn to_f64_r(&self) -> f64 {
        to_f64(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// `minimize objective . x` subject to rows and per-variable bounds.
///
/// Variables default to `x >= 0`; `None` bounds are infinite.
#[derive(Clone, Debug)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<T>,
    pub bounds: Vec<(Option<T>, Option<T>)>,
}

impl<T: LpScalar> LpProblem<T> {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![T::zero(); num_vars],
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(Some(T::zero()), None); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(mut self, objective: Vec<T>) -> Self {
        assert_eq!(objective.len(), self.num_vars());
        self.objective = objective;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<T>, sense: Sense, rhs: T) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, var: usize, lo: Option<T>, hi: Option<T>) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, None, None)
    }

    pub fn map<U: LpScalar>(&self, f: impl Fn(&T) -> U) -> LpProblem<U> {
        LpProblem {
            objective: self.objective.iter().map(&f).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            senses: self.senses.clone(),
            rhs: self.rhs.iter().map(&f).collect(),
            bounds: self.bounds.iter().map(|(l, h)| (l.as_ref().map(&f), h.as_ref().map(&f))).collect(),
        }
    }

    fn validate(&self) -> Result<(), LpError> {
        let nv = self.num_vars();
        if self.bounds.len() != nv || self.senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(LpError::Malformed("inconsistent dimensions".into()));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != nv) {
            return Err(LpError::Malformed(format!("row {i} has wrong length")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { value: T, x: Vec<T> },
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<(T, Vec<T>)> {
        match self {
            LpOutcome::Optimal { value, x } => Some((value, x)),
            _ => None,
        }
    }
}

/// How an original variable is recovered from the nonnegative columns.
#[derive(Clone, Debug)]
enum VarMap<T> {
    /// `x = offset + y[col]`
    Shift { col: usize, offset: T },
    /// `x = offset - y[col]`
    Mirror { col: usize, offset: T },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

struct Tableau<T> {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        let p = self.rows[r][c].clone();
        let pivot_row: Vec<T> = self.rows[r].iter().map(|v| v.div_r(&p)).collect();
        if !T::EXACT && pivot_row.iter().any(|v| !v.is_finite_r()) {
            return Err(LpError::NumericalFailure("non-finite pivot row".into()));
        }
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.sub_r(&factor.mul_r(pv));
                }
            }
            // Exact zero in the pivot column keeps float drift out of later ratios.
            row[c] = T::zero();
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        Ok(())
    }

    /// Loads `cost` into the objective row as reduced costs.
    fn set_objective(&mut self, cost: &[T]) {
        let m = self.m();
        let mut obj: Vec<T> = cost.iter().cloned().chain(std::iter::once(T::zero())).collect();
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                *o = o.sub_r(&cb.mul_r(v));
            }
        }
        self.rows[m] = obj;
    }

    /// Primal simplex on the current objective row. `Ok(false)` means unbounded.
    fn run(&mut self, allowed: usize, max_iter: usize) -> Result<bool, LpError> {
        let m = self.m();
        for _ in 0..max_iter {
            let obj = &self.rows[m];
            let Some(c) = (0..allowed).find(|&j| obj[j].is_neg()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rows[i][self.ncols].div_r(a);
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = best else { return Ok(false) };
            self.pivot(r, c)?;
        }
        Err(LpError::NumericalFailure(format!("no convergence in {max_iter} pivots")))
    }
}

/// Solves the problem; deterministic for a given input.
pub fn lp_solve<T: LpScalar>(p: &LpProblem<T>) -> Result<LpOutcome<T>, LpError> {
    p.validate()?;
    let nv = p.num_vars();

    // Map each variable onto nonnegative columns.
    let mut maps = Vec::with_capacity(nv);
    let mut ny = 0;
    let mut extra_rows: Vec<(usize, T)> = Vec::new();
    for (lo, hi) in &p.bounds {
        match (lo, hi) {
            (Some(l), h) => {
                if let Some(h) = h {
                    if h < l {
                        return Ok(LpOutcome::Infeasible);
                    }
                    extra_rows.push((ny, h.sub_r(l)));
                }
                maps.push(VarMap::Shift { col: ny, offset: l.clone() });
                ny += 1;
            }
            (None, Some(h)) => {
                maps.push(VarMap::Mirror { col: ny, offset: h.clone() });
                ny += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ny, neg: ny + 1 });
                ny += 2;
            }
        }
    }

    // Rows over y, with rhs shifted by the offsets.
    let mut rows: Vec<(Vec<T>, Sense, T)> = Vec::new();
    for ((coeffs, &sense), b) in p.rows.iter().zip(&p.senses).zip(&p.rhs) {
        let mut r = vec![T::zero(); ny];
        let mut rhs = b.clone();
        for (a, map) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, offset } => {
                    r[*col] = a.clone();
                    rhs = rhs.sub_r(&a.mul_r(offset));
                }
                VarMap::Mirror { col, offset } => {
                    r[*col] = a.neg_r();
                    rhs = rhs.sub_r(&a.mul_r(offset));
                }
                VarMap::Split { pos, neg } => {
                    r[*pos] = a.clone();
                    r[*neg] = a.neg_r();
                }
            }
        }
        rows.push((r, sense, rhs));
    }
    for (col, width) in extra_rows {
        let mut r = vec![T::zero(); ny];
        r[col] = T::one();
        rows.push((r, Sense::Le, width));
    }
    for (r, sense, rhs) in rows.iter_mut() {
        if *rhs < T::zero() {
            r.iter_mut().for_each(|v| *v = v.neg_r());
            *rhs = rhs.neg_r();
            *sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|(_, s, _)| *s != Sense::Eq).count();
    let n_art = rows.iter().filter(|(_, s, _)| *s != Sense::Le).count();
    let ncols = ny + n_slack + n_art;
    let art_start = ny + n_slack;

    let mut tab = Tableau { rows: Vec::with_capacity(m + 1), basis: Vec::with_capacity(m), ncols };
    let (mut next_slack, mut next_art) = (ny, art_start);
    for (r, sense, rhs) in rows {
        let mut row = r;
        row.resize(ncols + 1, T::zero());
        row[ncols] = rhs;
        match sense {
            Sense::Le => {
                row[next_slack] = T::one();
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Sense::Ge => {
                row[next_slack] = T::one().neg_r();
                next_slack += 1;
                row[next_art] = T::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
            Sense::Eq => {
                row[next_art] = T::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }
    tab.rows.push(vec![T::zero(); ncols + 1]);

    let max_iter = 50 * (m + ncols) + 1000;

    if n_art > 0 {
        let mut cost = vec![T::zero(); ncols];
        cost[art_start..].iter_mut().for_each(|c| *c = T::one());
        tab.set_objective(&cost);
        if !tab.run(ncols, max_iter)? {
            return Err(LpError::NumericalFailure("phase one reported unbounded".into()));
        }
        // Objective row holds -(sum of artificials).
        let infeas = tab.rows[m][ncols].neg_r();
        let feas_tol = if T::EXACT { T::zero() } else { T::from_q(&Q::new(1.into(), 10_000_000.into())) };
        if infeas > feas_tol {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| tab.rows[i][j].abs_ne_zero()) {
                    tab.pivot(i, c)?;
                }
            }
        }
    }

    let mut cost = vec![T::zero(); ncols];
    for (j, c) in p.objective.iter().enumerate() {
        match &maps[j] {
            VarMap::Shift { col, .. } => cost[*col] = c.clone(),
            VarMap::Mirror { col, .. } => cost[*col] = c.neg_r(),
            VarMap::Split { pos, neg } => {
                cost[*pos] = c.clone();
                cost[*neg] = c.neg_r();
            }
        }
    }
    tab.set_objective(&cost);
    if !tab.run(art_start, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![T::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rows[i][ncols].clone();
    }
    let x: Vec<T> = maps
        .iter()
        .map(|map| match map {
            VarMap::Shift { col, offset } => offset.add_r(&y[*col]),
            VarMap::Mirror { col, offset } => offset.sub_r(&y[*col]),
            VarMap::Split { pos, neg } => y[*pos].sub_r(&y[*neg]),
        })
        .collect();
    let value = p.objective.iter().zip(&x).fold(T::zero(), |acc, (c, v)| acc.add_r(&c.mul_r(v)));
    if !T::EXACT && !value.is_finite_r() {
        return Err(LpError::NumericalFailure("non-finite objective".into()));
    }
    Ok(LpOutcome::Optimal { value, x })
}

trait AbsNeZero {
    fn abs_ne_zero(&self) -> bool;
}

impl<T: LpScalar> AbsNeZero for T {
    fn abs_ne_zero(&self) -> bool {
        self.is_pos() || self.is_neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn single_lower_bound() {
        let mut p = LpProblem::<Q>::new(1).minimize(vec![qi(1)]);
        p.free(0);
        p.constraint(vec![qi(1)], Sense::Ge, qi(3));
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Optimal { value: qi(3), x: vec![qi(3)] });
    }

    #[test]
    fn infeasible_pair() {
        let mut p = LpProblem::<f64>::new(1).minimize(vec![1.0]);
        p.free(0);
        p.constraint(vec![1.0], Sense::Le, 0.0);
        p.constraint(vec![1.0], Sense::Ge, 1.0);
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut p = LpProblem::<Q>::new(1).minimize(vec![qi(-1)]);
        p.constraint(vec![qi(1)], Sense::Ge, qi(1));
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    /// Min-max fit of a constant to the points {0, 1}: `min t` s.t.
    /// `|c - v_i| <= t`; optimum `t = 1/2` at `c = 1/2`.
    #[test]
    fn chebyshev_center_two_points() {
        let mut p = LpProblem::<Q>::new(2).minimize(vec![qi(0), qi(1)]);
        p.free(0);
        for v in [0, 1] {
            p.constraint(vec![qi(1), qi(-1)], Sense::Le, qi(v));
            p.constraint(vec![qi(1), qi(1)], Sense::Ge, qi(v));
        }
        let (val, x) = lp_solve(&p).unwrap().optimal().unwrap();
        assert_eq!(val, q(1, 2));
        assert_eq!(x, vec![q(1, 2), q(1, 2)]);
    }

    /// Best line through (0,0), (1,1), (2,0) in the max norm: the hand solution
    /// is `y = 1/2` with error 1/2, slope 0.
    #[test]
    fn chebyshev_line_fit() {
        let pts = [(0, 0), (1, 1), (2, 0)];
        let mut p = LpProblem::<Q>::new(3).minimize(vec![qi(0), qi(0), qi(1)]);
        p.free(0).free(1);
        for (x, y) in pts {
            p.constraint(vec![qi(1), qi(x), qi(-1)], Sense::Le, qi(y));
            p.constraint(vec![qi(1), qi(x), qi(1)], Sense::Ge, qi(y));
        }
        let (val, x) = lp_solve(&p).unwrap().optimal().unwrap();
        assert_eq!(val, q(1, 2));
        assert_eq!(x, vec![q(1, 2), qi(0), q(1, 2)]);
        let pf = p.map(to_f64);
        let (vf, _) = lp_solve(&pf).unwrap().optimal().unwrap();
        assert!((vf - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounded_and_mirrored_variables() {
        // max x + y with x in [1, 3], y <= 2 (no lower bound), x + y <= 4.
        let mut p = LpProblem::<Q>::new(2).minimize(vec![qi(-1), qi(-1)]);
        p.set_bounds(0, Some(qi(1)), Some(qi(3)));
        p.set_bounds(1, None, Some(qi(2)));
        p.constraint(vec![qi(1), qi(1)], Sense::Le, qi(4));
        let (val, x) = lp_solve(&p).unwrap().optimal().unwrap();
        assert_eq!(val, qi(-4));
        assert_eq!(&x[0] + &x[1], qi(4));
        assert!(x[0] >= qi(1) && x[0] <= qi(3) && x[1] <= qi(2));
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // x + y = 2, 2x + 2y = 4 (redundant), minimize x - y, x, y >= 0.
        let mut p = LpProblem::<Q>::new(2).minimize(vec![qi(1), qi(-1)]);
        p.constraint(vec![qi(1), qi(1)], Sense::Eq, qi(2));
        p.constraint(vec![qi(2), qi(2)], Sense::Eq, qi(4));
        let (val, x) = lp_solve(&p).unwrap().optimal().unwrap();
        assert_eq!(val, qi(-2));
        assert_eq!(x, vec![qi(0), qi(2)]);
    }

    #[test]
    fn malformed_rejected() {
        let mut p = LpProblem::<f64>::new(2);
        p.constraint(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(lp_solve(&p), Err(LpError::Malformed(_))));
    }

    #[test]
    fn deterministic() {
        let mut p = LpProblem::<f64>::new(3).minimize(vec![-1.0, -1.0, -1.0]);
        p.constraint(vec![1.0, 1.0, 0.0], Sense::Le, 1.0);
        p.constraint(vec![0.0, 1.0, 1.0], Sense::Le, 1.0);
        p.constraint(vec![1.0, 0.0, 1.0], Sense::Le, 1.0);
        let a = lp_solve(&p).unwrap();
        let b = lp_solve(&p).unwrap();
        assert_eq!(a, b);
        let (v, _) = a.optimal().unwrap();
        assert!((v + 1.5).abs() < 1e-12);
    }
}
