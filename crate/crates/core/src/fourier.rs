//! Exact Fourier analysis over `{0,1}^n`.
//!
//! Characters are `chi_S(x) = (-1)^{|x & S|}` and coefficients
//! `f^(S) = 2^-n sum_x f(x) chi_S(x)`. Dense spectra come from the in-place
//! butterfly; symmetric functions use the Krawtchouk level transform, which
//! returns one coefficient per level `|S| = k`.

use std::fmt::Write as _;
use std::ops::{Add, Sub};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{cap_check, Result};
use crate::func::{BoolFn, SymFn};
use crate::rational::{binom, dyadic, fmt_q, log2, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

/// Absolute tolerance for float-mode zero tests.
pub const FLOAT_ZERO_TOL: f64 = 1e-10;

/// Unnormalised Walsh-Hadamard butterfly: `v[S] <- sum_x v[x] chi_S(x)`.
///
/// Applying it twice multiplies the input by `v.len()`.
pub fn butterfly<T: Copy + Add<Output = T> + Sub<Output = T>>(v: &mut [T]) {
    let len = v.len();
    assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumData {
    /// Numerators over the common denominator `2^n`.
    Exact(Vec<i64>),
    Float(Vec<f64>),
}

/// Dense Fourier spectrum indexed by subset mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub data: SpectrumData,
}

/// Fourier transform of a truth table.
pub fn wht(g: &BoolFn, mode: Mode, caps: &crate::Caps) -> Result<Spectrum> {
    let n = g.n();
    match mode {
        Mode::Exact => {
            cap_check("wht (exact)", n, caps.wht_exact)?;
            let mut v: Vec<i64> = g.table().iter().map(|&b| b as i64).collect();
            butterfly(&mut v);
            Ok(Spectrum { n, data: SpectrumData::Exact(v) })
        }
        Mode::Float => {
            cap_check("wht (float)", n, caps.wht_float)?;
            let mut v: Vec<f64> = g.table().iter().map(|&b| b as u8 as f64).collect();
            butterfly(&mut v);
            let scale = (n as f64).exp2();
            v.iter_mut().for_each(|c| *c /= scale);
            Ok(Spectrum { n, data: SpectrumData::Float(v) })
        }
    }
}

impl Spectrum {
    pub fn mode(&self) -> Mode {
        match self.data {
            SpectrumData::Exact(_) => Mode::Exact,
            SpectrumData::Float(_) => Mode::Float,
        }
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff_f64(&self, s: u32) -> f64 {
        match &self.data {
            SpectrumData::Exact(v) => v[s as usize] as f64 / (self.n as f64).exp2(),
            SpectrumData::Float(v) => v[s as usize],
        }
    }

    pub fn coeff_exact(&self, s: u32) -> Option<Q> {
        match &self.data {
            SpectrumData::Exact(v) => Some(dyadic(v[s as usize], self.n)),
            SpectrumData::Float(_) => None,
        }
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        (0..self.len() as u32).map(|s| self.coeff_f64(s)).collect()
    }

    fn is_zero_at(&self, s: usize) -> bool {
        match &self.data {
            SpectrumData::Exact(v) => v[s] == 0,
            SpectrumData::Float(v) => v[s].abs() <= FLOAT_ZERO_TOL,
        }
    }

    pub fn stats(&self) -> SpectralStats {
        let mut degree = Degree::Undefined;
        let mut mon = 0u128;
        for s in 0..self.len() {
            if !self.is_zero_at(s) {
                mon += 1;
                degree = degree.max(Degree::Finite(s.count_ones() as usize));
            }
        }
        let (l1, linf) = match &self.data {
            SpectrumData::Exact(v) => {
                let l1: i64 = v.iter().map(|c| c.abs()).sum();
                let linf = v.iter().map(|c| c.abs()).max().unwrap_or(0);
                (Number::Exact(dyadic(l1, self.n)), Number::Exact(dyadic(linf, self.n)))
            }
            SpectrumData::Float(v) => {
                let l1 = v.iter().map(|c| c.abs()).sum();
                let linf = v.iter().fold(0.0f64, |a, c| a.max(c.abs()));
                (Number::Float(l1), Number::Float(linf))
            }
        };
        SpectralStats { degree, mon, l1, linf }
    }

    /// Spectrum of the `+1/-1` encoding `1 - 2f`; exact spectra only.
    pub fn sign_encoding(&self) -> Option<Spectrum> {
        let SpectrumData::Exact(v) = &self.data else { return None };
        let full = 1i64 << self.n;
        let w = v.iter().enumerate().map(|(s, &c)| if s == 0 { full - 2 * c } else { -2 * c }).collect();
        Some(Spectrum { n: self.n, data: SpectrumData::Exact(w) })
    }

    /// The level spectrum, if the coefficients are constant on every level.
    pub fn as_levels(&self) -> Option<LevelSpectrum> {
        let SpectrumData::Exact(v) = &self.data else { return None };
        let mut levels: Vec<Option<i64>> = vec![None; self.n + 1];
        for (s, &c) in v.iter().enumerate() {
            let k = s.count_ones() as usize;
            match levels[k] {
                None => levels[k] = Some(c),
                Some(d) if d != c => return None,
                _ => {}
            }
        }
        Some(LevelSpectrum { n: self.n, numerators: levels.into_iter().map(|c| c.unwrap()).collect() })
    }

    /// CSV with header `mask,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,coefficient\n");
        for s in 0..self.len() as u32 {
            let c = match self.coeff_exact(s) {
                Some(q) => fmt_q(&q),
                None => format!("{:e}", self.coeff_f64(s)),
            };
            let _ = writeln!(out, "{s:#x},{c}");
        }
        out
    }
}

/// `sum over |x| = j of chi_S(x)` for any fixed `|S| = k`:
/// `sum_m (-1)^m C(k, m) C(n-k, j-m)`.
pub fn krawtchouk(n: usize, k: usize, j: usize) -> i128 {
    if k > n || j > n {
        return 0;
    }
    (0..=k.min(j))
        .map(|m| {
            let t = binom(k, m) as i128 * binom(n - k, j - m) as i128;
            if m % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Value of `sum over |S| = k of chi_S(x)` at any `|x| = j`.
pub fn level_character_sum(n: usize, k: usize, j: usize) -> i128 {
    krawtchouk(n, j, k)
}

/// Fourier coefficients of a symmetric function, one per level.
///
/// `levels[k] = numerators[k] / 2^n` is the coefficient of every `|S| = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpectrum {
    pub n: usize,
    pub numerators: Vec<i64>,
}

pub fn level_spectrum(f: &SymFn) -> LevelSpectrum {
    let n = f.n();
    assert!(n <= 60, "level spectrum needs n <= 60");
    let numerators = (0..=n)
        .map(|k| {
            let s: i128 = (0..=n).filter(|&j| f.at(j)).map(|j| krawtchouk(n, k, j)).sum();
            i64::try_from(s).expect("level numerator overflow")
        })
        .collect();
    LevelSpectrum { n, numerators }
}

impl LevelSpectrum {
    pub fn level(&self, k: usize) -> Q {
        dyadic(self.numerators[k], self.n)
    }

    pub fn levels(&self) -> Vec<Q> {
        (0..=self.n).map(|k| self.level(k)).collect()
    }

    /// `2^n * ||f^||_1 = sum_k C(n,k) |num_k|`.
    pub fn l1_numerator(&self) -> u128 {
        self.numerators
            .iter()
            .enumerate()
            .map(|(k, c)| binom(self.n, k) * c.unsigned_abs() as u128)
            .sum()
    }

    /// `2^n * ||f^||_inf`.
    pub fn linf_numerator(&self) -> u64 {
        self.numerators.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn mon(&self) -> u128 {
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, _)| binom(self.n, k))
            .sum()
    }

    pub fn stats(&self) -> SpectralStats {
        let degree = self
            .numerators
            .iter()
            .rposition(|c| *c != 0)
            .map_or(Degree::Undefined, Degree::Finite);
        SpectralStats {
            degree,
            mon: self.mon(),
            l1: Number::Exact(Q::new(self.l1_numerator().into(), num_bigint::BigInt::from(1) << self.n)),
            linf: Number::Exact(dyadic(self.linf_numerator() as i64, self.n)),
        }
    }

    /// Level spectrum of the `+1/-1` encoding `1 - 2f`.
    pub fn sign_encoding(&self) -> LevelSpectrum {
        let full = 1i64 << self.n;
        let numerators = self
            .numerators
            .iter()
            .enumerate()
            .map(|(k, &c)| if k == 0 { full - 2 * c } else { -2 * c })
            .collect();
        LevelSpectrum { n: self.n, numerators }
    }

    /// Dense exact spectrum with the level value on every subset.
    pub fn to_dense(&self) -> Spectrum {
        let v = (0..1u32 << self.n).map(|s| self.numerators[s.count_ones() as usize]).collect();
        Spectrum { n: self.n, data: SpectrumData::Exact(v) }
    }

    /// CSV with header `k,binom,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,binom,coefficient\n");
        for k in 0..=self.n {
            let _ = writeln!(out, "{k},{},{}", binom(self.n, k), fmt_q(&self.level(k)));
        }
        out
    }
}

/// Degree of a spectrum; the zero function has no degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degree {
    Undefined,
    Finite(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Q),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => crate::rational::to_f64(q),
            Number::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Number::Exact(q) => Some(q),
            Number::Float(_) => None,
        }
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(q) => f.write_str(&fmt_q(q)),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Number {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Degree, monomial count and Fourier norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralStats {
    pub degree: Degree,
    pub mon: u128,
    pub l1: Number,
    pub linf: Number,
}

/// One row of the `log ||f^||_1` versus `r log(n/r)` trend table.
#[derive(Clone, Debug, Serialize)]
pub struct TrendRow {
    pub n: usize,
    pub f: SymFn,
    pub r: usize,
    pub log_l1: f64,
    pub scale: f64,
    pub ratio: f64,
}

/// Trend table for every symmetric `f` with `r(f) > 1`; report only.
pub fn afh_trend_report(ns: impl IntoIterator<Item = usize>) -> Vec<TrendRow> {
    let mut rows = Vec::new();
    for n in ns {
        for f in SymFn::all(n) {
            let r = f.measures().r;
            if r <= 1 {
                continue;
            }
            let l1 = level_spectrum(&f).stats().l1;
            let l1 = l1.exact().expect("level stats are exact");
            if l1.is_zero() || !l1.is_positive() {
                continue;
            }
            let log_l1 = log2(l1);
            let scale = r as f64 * (n as f64 / r as f64).log2();
            rows.push(TrendRow { n, f, r, log_l1, scale, ratio: log_l1 / scale });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::Caps;

    /// Direct double sum, independent of the butterfly.
    fn naive(g: &BoolFn) -> Vec<Q> {
        let n = g.n();
        (0..1u32 << n)
            .map(|s| {
                let sum: i64 = (0..1u32 << n)
                    .filter(|&x| g.at(x))
                    .map(|x| if (x & s).count_ones() % 2 == 0 { 1 } else { -1 })
                    .sum();
                dyadic(sum, n)
            })
            .collect()
    }

    fn exact(g: &BoolFn) -> Vec<Q> {
        let sp = wht(g, Mode::Exact, &Caps::default()).unwrap();
        (0..1u32 << g.n()).map(|s| sp.coeff_exact(s).unwrap()).collect()
    }

    #[test]
    fn wht_examples() {
        let one = SymFn::constant(3, true).expand(20).unwrap();
        let c = exact(&one);
        assert_eq!(c[0], q(1, 1));
        assert!(c[1..].iter().all(|x| x.is_zero()));

        for n in 1..6 {
            let c = exact(&SymFn::parity(n).expand(20).unwrap());
            let full = (1usize << n) - 1;
            for (s, v) in c.iter().enumerate() {
                let want = if s == 0 { q(1, 2) } else if s == full { q(-1, 2) } else { q(0, 1) };
                assert_eq!(*v, want);
            }
        }

        let and2 = SymFn::and(2).expand(20).unwrap();
        assert_eq!(exact(&and2), vec![q(1, 4), q(-1, 4), q(-1, 4), q(1, 4)]);
        assert_eq!(naive(&and2), exact(&and2));
    }

    #[test]
    fn sign_encoding_matches_transform_of_complement() {
        for n in 0..6 {
            for f in SymFn::all(n) {
                let g = f.expand(20).unwrap();
                let pm: Vec<i64> = g.table().iter().map(|&b| if b { -1 } else { 1 }).collect();
                let mut direct = pm.clone();
                butterfly(&mut direct);
                let sp = wht(&g, Mode::Exact, &Caps::default()).unwrap().sign_encoding().unwrap();
                let SpectrumData::Exact(v) = &sp.data else { unreachable!() };
                assert_eq!(v, &direct);
                let lv = level_spectrum(&f).sign_encoding();
                assert_eq!(lv.to_dense().data, sp.data);
            }
        }
    }

    #[test]
    fn butterfly_matches_naive_sum() {
        for bits in 0..256u64 {
            let g = BoolFn::from_u64(3, bits);
            assert_eq!(exact(&g), naive(&g));
            let fl = wht(&g, Mode::Float, &Caps::default()).unwrap();
            for (s, v) in naive(&g).iter().enumerate() {
                assert!((fl.coeff_f64(s as u32) - crate::rational::to_f64(v)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn butterfly_twice_scales_by_length() {
        let orig: Vec<i64> = (0..32).map(|i| (i * 7 % 11) - 5).collect();
        let mut v = orig.clone();
        butterfly(&mut v);
        butterfly(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| *a == 32 * b));
    }

    #[test]
    fn level_spectrum_examples() {
        assert_eq!(level_spectrum(&SymFn::and(2)).levels(), vec![q(1, 4), q(-1, 4), q(1, 4)]);
        for n in 1..8 {
            let lv = level_spectrum(&SymFn::parity(n)).levels();
            assert_eq!(lv[0], q(1, 2));
            assert_eq!(lv[n], q(-1, 2));
            assert!(lv[1..n].iter().all(|x| x.is_zero()));
        }
        assert!(level_spectrum(&SymFn::constant(5, false)).numerators.iter().all(|&c| c == 0));
    }

    #[test]
    fn level_spectrum_matches_dense_transform() {
        for n in 0..=10 {
            for f in SymFn::all(n) {
                let dense = wht(&f.expand(20).unwrap(), Mode::Exact, &Caps::default()).unwrap();
                assert_eq!(dense.as_levels(), Some(level_spectrum(&f)), "{f}");
            }
        }
    }

    #[test]
    fn stats_examples() {
        let p = level_spectrum(&SymFn::parity(6)).stats();
        assert_eq!(p.degree, Degree::Finite(6));
        assert_eq!(p.mon, 2);
        assert_eq!(p.l1, Number::Exact(q(1, 1)));
        assert_eq!(p.linf, Number::Exact(q(1, 2)));

        let a = level_spectrum(&SymFn::and(2)).stats();
        assert_eq!((a.degree, a.mon), (Degree::Finite(2), 4));
        assert_eq!(a.l1, Number::Exact(q(1, 1)));
        assert_eq!(a.linf, Number::Exact(q(1, 4)));

        let z = level_spectrum(&SymFn::constant(4, false)).stats();
        assert_eq!((z.degree, z.mon), (Degree::Undefined, 0));
        assert_eq!(z.l1, Number::Exact(q(0, 1)));

        // Dense and level statistics agree, in both modes.
        let f = SymFn::maj(7);
        let g = f.expand(20).unwrap();
        let ex = wht(&g, Mode::Exact, &Caps::default()).unwrap().stats();
        let fl = wht(&g, Mode::Float, &Caps::default()).unwrap().stats();
        assert_eq!(ex, level_spectrum(&f).stats());
        assert_eq!((fl.degree, fl.mon), (ex.degree, ex.mon));
        assert!((fl.l1.to_f64() - ex.l1.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn parseval_in_both_modes() {
        for bits in 0..(1u64 << 16) {
            if bits % 97 != 0 {
                continue;
            }
            let g = BoolFn::from_fn(4, |x| (bits >> x) & 1 == 1);
            let ones = g.table().iter().filter(|&&b| b).count() as i64;
            let SpectrumData::Exact(v) = wht(&g, Mode::Exact, &Caps::default()).unwrap().data else {
                unreachable!()
            };
            // sum (v/16)^2 = ones/16  <=>  sum v^2 = 16 * ones
            assert_eq!(v.iter().map(|c| c * c).sum::<i64>(), 16 * ones);
            let fl = wht(&g, Mode::Float, &Caps::default()).unwrap().coeffs_f64();
            let s: f64 = fl.iter().map(|c| c * c).sum();
            assert!((s - ones as f64 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complementing_inputs_preserves_magnitudes() {
        for bits in 0..256u64 {
            let g = BoolFn::from_u64(3, bits);
            let a = exact(&g);
            let b = exact(&g.complement_inputs());
            assert!(a.iter().zip(&b).all(|(x, y)| x.abs() == y.abs()));
        }
    }

    #[test]
    fn caps_enforced() {
        let caps = Caps { wht_exact: 3, ..Caps::default() };
        let g = SymFn::and(4).expand(20).unwrap();
        assert!(wht(&g, Mode::Exact, &caps).is_err());
        assert!(wht(&g, Mode::Float, &caps).is_ok());
    }

    #[test]
    fn trend_rows_respect_precondition() {
        let rows = afh_trend_report(2..=7);
        assert!(rows.iter().all(|r| r.r > 1));
        assert!(rows.iter().all(|r| r.f != SymFn::parity(r.n)));
        let maj5 = rows.iter().find(|r| r.f == SymFn::maj(5)).unwrap();
        assert_eq!(maj5.r, 3);
        let l1 = level_spectrum(&SymFn::maj(5)).stats().l1;
        assert!((maj5.log_l1 - l1.to_f64().log2()).abs() < 1e-12);
    }

    #[test]
    fn csv_exports() {
        let lv = level_spectrum(&SymFn::and(2));
        assert_eq!(lv.to_csv(), "k,binom,coefficient\n0,1,1/4\n1,2,-1/4\n2,1,1/4\n");
        let sp = lv.to_dense();
        assert!(sp.to_csv().starts_with("mask,coefficient\n0x0,1/4\n0x1,-1/4\n"));
    }
}
