//! Function representations, combinatorial measures and the elementary
//! transforms (reversal, restriction, input complementation).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{cap_check, Error, Result};

/// A symmetric Boolean function, stored as its value on each Hamming weight.
///
/// `values[j] = f(j)` for `j` in `0..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymFn {
    values: Vec<bool>,
}

impl SymFn {
    /// Builds a function from its weight values; `n = values.len() - 1`.
    pub fn new(values: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFunction("value vector must have n+1 >= 1 entries".into()));
        }
        Ok(SymFn { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        SymFn { values: (0..=n).map(f).collect() }
    }

    /// The function whose value on weight `j` is bit `j` of `bits`.
    /// Enumerating `bits` over `0..2^(n+1)` visits every symmetric function.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self::from_fn(n, |j| (bits >> j) & 1 == 1)
    }

    pub fn bits(&self) -> u64 {
        self.values.iter().enumerate().fold(0, |acc, (j, &v)| acc | ((v as u64) << j))
    }

    /// All `2^(n+1)` symmetric functions on `n` bits in `from_bits` order.
    pub fn all(n: usize) -> impl Iterator<Item = SymFn> {
        assert!(n < 63);
        (0..(1u64 << (n + 1))).map(move |b| SymFn::from_bits(n, b))
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    #[inline]
    pub fn at(&self, j: usize) -> bool {
        self.values[j]
    }

    pub fn value_u8(&self, j: usize) -> u8 {
        self.values[j] as u8
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    // Named families.

    pub fn constant(n: usize, b: bool) -> Self {
        Self::from_fn(n, |_| b)
    }

    pub fn and(n: usize) -> Self {
        Self::from_fn(n, |j| j == n)
    }

    pub fn or(n: usize) -> Self {
        Self::from_fn(n, |j| j > 0)
    }

    pub fn parity(n: usize) -> Self {
        Self::from_fn(n, |j| j % 2 == 1)
    }

    /// Strict majority: `f(j) = 1` iff `j > n/2`.
    pub fn maj(n: usize) -> Self {
        Self::threshold(n, n / 2 + 1)
    }

    /// `f(j) = 1` iff `j ≡ 0 (mod m)`.
    pub fn modm(n: usize, m: usize) -> Self {
        assert!(m > 0);
        Self::from_fn(n, |j| j % m == 0)
    }

    /// `f(j) = 1` iff `j >= t`.
    pub fn threshold(n: usize, t: usize) -> Self {
        Self::from_fn(n, |j| j >= t)
    }

    /// Parses a named family: `and`, `or`, `parity`, `maj`, `mod<m>`,
    /// `threshold<t>`, `const0`, `const1`.
    pub fn named(name: &str, n: usize) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {name:?}") };
        let lower = name.trim().to_ascii_lowercase();
        let f = match lower.as_str() {
            "and" => Self::and(n),
            "or" => Self::or(n),
            "parity" | "xor" => Self::parity(n),
            "maj" | "majority" => Self::maj(n),
            "const0" | "zero" => Self::constant(n, false),
            "const1" | "one" => Self::constant(n, true),
            s if s.starts_with("mod") => {
                let m: usize = s[3..].parse().map_err(|_| bad("bad modulus"))?;
                if m == 0 {
                    return Err(bad("modulus must be positive"));
                }
                Self::modm(n, m)
            }
            s if s.starts_with("threshold") => {
                let t: usize = s[9..].parse().map_err(|_| bad("bad threshold"))?;
                Self::threshold(n, t)
            }
            _ => return Err(bad("unknown function family")),
        };
        Ok(f)
    }

    /// Computes `(r0, r1, r, lambda, rho)`.
    pub fn measures(&self) -> Measures {
        let n = self.n();
        let half_up = n.div_ceil(2);
        let f = &self.values;
        // f(i) = f(i+2), with pairs that fall off the end counting as equal.
        let periodic_at = |i: usize| i + 2 > n || f[i] == f[i + 2];

        let r0 = (0..=half_up)
            .find(|&r| (r..half_up).all(periodic_at))
            .unwrap_or(half_up);

        let r1_cap = (n / 2).saturating_sub(1);
        let r1 = (0..=r1_cap)
            .find(|&r| {
                let hi = n as isize - r as isize - 2;
                (half_up as isize..=hi).all(|i| periodic_at(i as usize))
            })
            .unwrap_or(r1_cap);

        let lambda = (0..n).filter(|&i| f[i] != f[i + 1]).count();
        let rho = (0..n.saturating_sub(1)).filter(|&i| f[i] != f[i + 2]).count();
        Measures { r0, r1, r: r0.max(r1), lambda, rho }
    }

    /// Indices `j >= 2` with `f(j) != f(j-2)`, ascending.
    pub fn flips(&self) -> Vec<usize> {
        (2..=self.n()).filter(|&j| self.values[j] != self.values[j - 2]).collect()
    }

    /// `f'(j) = f(n - j)`.
    pub fn reverse(&self) -> SymFn {
        SymFn { values: self.values.iter().rev().copied().collect() }
    }

    /// Fixes one input to 1: `g(j) = f(j + 1)` on `n - 1` bits.
    pub fn restrict_one(&self) -> Result<SymFn> {
        if self.n() == 0 {
            return Err(Error::OutOfRange("restrict_one needs n >= 1".into()));
        }
        Ok(SymFn { values: self.values[1..].to_vec() })
    }

    /// `f_i(j) = f(j)` for `j` in `0..=i`.
    pub fn prefix_restrict(&self, i: usize) -> Result<SymFn> {
        if i > self.n() {
            return Err(Error::OutOfRange(format!("prefix index {i} exceeds n = {}", self.n())));
        }
        Ok(SymFn { values: self.values[..=i].to_vec() })
    }

    /// Materialises `f(|x|)` as a truth table.
    pub fn expand(&self, cap: usize) -> Result<BoolFn> {
        let n = self.n();
        cap_check("expand", n, cap)?;
        let table = (0..1u32 << n).map(|x| self.values[x.count_ones() as usize]).collect();
        Ok(BoolFn { n, table })
    }
}

impl fmt::Display for SymFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.values {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SymFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse { pos, msg: format!("expected '0' or '1', found {c:?}") }),
            })
            .collect::<Result<Vec<_>>>()?;
        SymFn::new(values)
    }
}

impl Serialize for SymFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The combinatorial measures of a symmetric function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measures {
    pub r0: usize,
    pub r1: usize,
    pub r: usize,
    pub lambda: usize,
    pub rho: usize,
}

/// A general Boolean function as a truth table; bit `i` of the index is input
/// variable `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoolFn {
    n: usize,
    table: Vec<bool>,
}

impl BoolFn {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n > 30 || table.len() != 1usize << n {
            return Err(Error::InvalidFunction(format!(
                "truth table has {} entries, expected 2^{n}",
                table.len()
            )));
        }
        Ok(BoolFn { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> bool) -> Self {
        BoolFn { n, table: (0..1u32 << n).map(f).collect() }
    }

    /// Table entries are the bits of `bits` (entry `x` is bit `x`); `n <= 6`.
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 6);
        Self::from_fn(n, |x| (bits >> x) & 1 == 1)
    }

    /// Parses a hex truth table. Hex digits are read most significant first,
    /// so the last digit holds entries `0..4` (entry `x` is bit `x`).
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        let size = 1usize << n;
        let digits = size.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("expected {digits} hex digits for n = {n}, found {}", hex.len()),
            });
        }
        let mut table = vec![false; size];
        for (pos, c) in hex.chars().enumerate() {
            let d = c.to_digit(16).ok_or_else(|| Error::Parse { pos, msg: format!("bad hex digit {c:?}") })?;
            let base = (digits - 1 - pos) * 4;
            for b in 0..4 {
                if (d >> b) & 1 == 1 {
                    if base + b >= size {
                        return Err(Error::Parse { pos, msg: "bits set beyond the table".into() });
                    }
                    table[base + b] = true;
                }
            }
        }
        Ok(BoolFn { n, table })
    }

    pub fn to_hex(&self) -> String {
        let size = self.table.len();
        let digits = size.div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let v = (0..4)
                    .filter(|b| d * 4 + b < size && self.table[d * 4 + b])
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    #[inline]
    pub fn at(&self, x: u32) -> bool {
        self.table[x as usize]
    }

    /// `g'(x) = g(complement of x)`.
    pub fn complement_inputs(&self) -> BoolFn {
        let full = (1u32 << self.n) - 1;
        Self::from_fn(self.n, |x| self.table[(x ^ full) as usize])
    }

    /// The weight-value vector if the table only depends on Hamming weight.
    pub fn as_symmetric(&self) -> Option<SymFn> {
        let mut vals: Vec<Option<bool>> = vec![None; self.n + 1];
        for (x, &v) in self.table.iter().enumerate() {
            let w = x.count_ones() as usize;
            match vals[w] {
                None => vals[w] = Some(v),
                Some(u) if u != v => return None,
                _ => {}
            }
        }
        Some(SymFn { values: vals.into_iter().map(|v| v.unwrap()).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> SymFn {
        s.parse().unwrap()
    }

    fn m(r0: usize, r1: usize, lambda: usize, rho: usize) -> Measures {
        Measures { r0, r1, r: r0.max(r1), lambda, rho }
    }

    #[test]
    fn measures_of_named_functions() {
        assert_eq!(SymFn::parity(5).measures(), m(0, 0, 5, 0));
        assert_eq!(SymFn::and(5).measures(), m(0, 1, 1, 1));
        assert_eq!(SymFn::maj(5).measures(), m(3, 0, 1, 2));
        assert_eq!(sym("000111"), SymFn::maj(5));
    }

    #[test]
    fn measures_on_tiny_inputs() {
        assert_eq!(sym("0").measures(), m(0, 0, 0, 0));
        assert_eq!(sym("01").measures(), m(0, 0, 1, 0));
        assert_eq!(sym("001").measures(), m(1, 0, 1, 1));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(SymFn::and(5).reverse(), sym("100000"));
        assert_eq!(SymFn::parity(5).reverse(), sym("101010"));
        let pal = sym("0110110");
        assert_eq!(pal.reverse(), pal);
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(SymFn::and(5).restrict_one().unwrap(), sym("00001"));
        assert_eq!(SymFn::parity(5).restrict_one().unwrap(), sym("10101"));
        assert_eq!(SymFn::constant(5, false).restrict_one().unwrap(), SymFn::constant(4, false));
        assert!(sym("1").restrict_one().is_err());

        assert_eq!(SymFn::and(5).prefix_restrict(3).unwrap(), sym("0000"));
        assert_eq!(SymFn::maj(5).prefix_restrict(4).unwrap(), sym("00011"));
        let f = SymFn::maj(7);
        assert_eq!(f.prefix_restrict(7).unwrap(), f);
        assert!(matches!(f.prefix_restrict(8), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn expand_examples() {
        assert_eq!(SymFn::parity(2).expand(20).unwrap().table(), &[false, true, true, false]);
        assert_eq!(SymFn::and(2).expand(20).unwrap().table(), &[false, false, false, true]);
        assert!(SymFn::constant(3, true).expand(20).unwrap().table().iter().all(|&b| b));
        assert!(matches!(SymFn::and(21).expand(20), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn complement_examples() {
        let and2 = SymFn::and(2).expand(20).unwrap();
        assert_eq!(and2.complement_inputs().table(), &[true, false, false, false]);
        assert_eq!(and2.complement_inputs().complement_inputs(), and2);
        let p3 = SymFn::parity(3).expand(20).unwrap();
        let np3 = SymFn::from_fn(3, |j| j % 2 == 0).expand(20).unwrap();
        assert_eq!(p3.complement_inputs(), np3);
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(
            "0102".parse::<SymFn>(),
            Err(Error::Parse { pos: 3, msg: "expected '0' or '1', found '2'".into() })
        );
        assert!("".parse::<SymFn>().is_err());
    }

    #[test]
    fn named_families() {
        assert_eq!(SymFn::named("mod3", 6).unwrap(), sym("1001001"));
        assert_eq!(SymFn::named("threshold2", 4).unwrap(), sym("00111"));
        assert_eq!(SymFn::named("or", 3).unwrap(), sym("0111"));
        assert!(SymFn::named("mod0", 3).is_err());
        assert!(SymFn::named("nand", 3).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let g = BoolFn::from_hex(3, "e8").unwrap();
        // 0xe8: entries 3, 5, 6, 7 set: three-bit majority.
        assert_eq!(g, SymFn::maj(3).expand(20).unwrap());
        assert_eq!(g.to_hex(), "e8");
        assert_eq!(BoolFn::from_hex(2, "8").unwrap(), SymFn::and(2).expand(20).unwrap());
        assert!(BoolFn::from_hex(2, "18").is_err());
        assert!(BoolFn::from_hex(2, "g").is_err());
    }

    #[test]
    fn as_symmetric_detects_symmetry() {
        let f = SymFn::maj(4);
        assert_eq!(f.expand(20).unwrap().as_symmetric(), Some(f));
        assert_eq!(BoolFn::from_u64(2, 0b0010).as_symmetric(), None);
    }

    fn all_up_to(n_max: usize) -> impl Iterator<Item = SymFn> {
        (0..=n_max).flat_map(SymFn::all)
    }

    #[test]
    fn reversal_preserves_lambda_and_rho() {
        for f in all_up_to(12) {
            let (a, b) = (f.measures(), f.reverse().measures());
            assert_eq!((a.lambda, a.rho), (b.lambda, b.rho), "{f}");
        }
    }

    #[test]
    fn reversal_moves_r1_into_r0() {
        for f in all_up_to(14) {
            let r1 = f.measures().r1;
            if r1 >= 1 {
                assert!(f.reverse().measures().r0 >= r1, "{f}");
            }
        }
    }

    #[test]
    fn two_periodic_between_r0_and_n_minus_r1() {
        for f in all_up_to(14) {
            let ms = f.measures();
            let n = f.n() as isize;
            for i in ms.r0 as isize..=n - ms.r1 as isize - 2 {
                let i = i as usize;
                assert_eq!(f.at(i), f.at(i + 2), "{f} at {i}");
            }
        }
    }

    #[test]
    fn measure_ranges() {
        for f in all_up_to(12) {
            let n = f.n();
            let ms = f.measures();
            assert!(ms.r0 <= n.div_ceil(2));
            assert!(ms.r1 <= (n / 2).saturating_sub(1));
            assert!(ms.lambda <= n);
            assert!(ms.rho <= n.saturating_sub(1));
            assert_eq!(ms.rho, f.flips().len());
        }
    }

    #[test]
    fn restrictions_commute_with_reverse() {
        for f in all_up_to(12).filter(|f| f.n() >= 1) {
            let n = f.n();
            assert_eq!(
                f.restrict_one().unwrap().reverse(),
                f.reverse().prefix_restrict(n - 1).unwrap()
            );
            for i in 0..=n {
                // Truncating the reversal keeps the top weights of f.
                let g = f.reverse().prefix_restrict(i).unwrap().reverse();
                assert_eq!(g.values(), &f.values()[n - i..]);
            }
        }
    }

    #[test]
    fn expansion_of_reverse_is_complemented_expansion() {
        for f in all_up_to(8) {
            assert_eq!(f.reverse().expand(20).unwrap(), f.expand(20).unwrap().complement_inputs());
        }
    }
}
