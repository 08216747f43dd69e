//! Exact rational helpers shared across the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `num / 2^n`, reduced.
pub fn dyadic(num: i64, n: usize) -> Q {
    Q::new(BigInt::from(num), BigInt::one() << n)
}

pub fn to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        // Huge numerators/denominators: shift both down before dividing.
        _ => {
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let a = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let b = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

/// Exact value of a finite float.
pub fn from_f64_exact(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// A short rational close to `x`: continued fraction with denominators bounded
/// by `max_den`. Falls back to the exact float value.
pub fn rationalize(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return from_f64_exact(x);
    }
    let r = Q::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// `"p/q"` or `"p"` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(Q::new(a, b))
    } else if let Ok(i) = s.parse::<BigInt>() {
        Some(Q::from_integer(i))
    } else {
        let f: f64 = s.parse().ok()?;
        if !f.is_finite() {
            return None;
        }
        Some(rationalize(f, 1_000_000))
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Binomial coefficient as `u128` (exact for every size used here).
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binom_i64(n: usize, k: usize) -> i64 {
    binom(n, k) as i64
}

/// `log2` of a positive rational, accurate for very large or small values.
pub fn log2(x: &Q) -> f64 {
    let num = x.numer().abs();
    let den = x.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let a = (&num >> shift_n).to_f64().unwrap();
    let b = (den >> shift_d).to_f64().unwrap();
    a.log2() - b.log2() + shift_n as f64 - shift_d as f64
}

/// Reduce a small rational into `Ratio<i64>` when it fits.
pub fn to_small(x: &Q) -> Option<Ratio<i64>> {
    let n = x.numer().to_i64()?;
    let d = x.denom().to_i64()?;
    let g = n.gcd(&d);
    Some(Ratio::new_raw(n / g, d / g))
}

pub mod serde_q {
    //! Serialize rationals as `"p/q"` strings.
    use super::{fmt_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::super::{fmt_q, parse_q, Q};
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(fmt_q))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }
}

pub mod serde_mask {
    //! Subset masks as `"0x.."` hex strings.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn fmt(m: u32) -> String {
        format!("{m:#x}")
    }

    pub fn parse(s: &str) -> Option<u32> {
        let s = s.trim();
        let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
        u32::from_str_radix(s, 16).ok()
    }

    pub mod vec {
        use super::{fmt, parse};
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[u32], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|&m| fmt(m)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u32>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse(s).ok_or_else(|| serde::de::Error::custom(format!("bad mask {s:?}"))))
                .collect()
        }
    }

    pub fn serialize<S: Serializer>(m: &u32, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt(*m))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad mask {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_short_fractions() {
        assert_eq!(rationalize(0.8, 1000), q(4, 5));
        assert_eq!(rationalize(-2.0 / 3.0, 1000), q(-2, 3));
        assert_eq!(rationalize(3.9, 1000), q(39, 10));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("4/5"), Some(q(4, 5)));
        assert_eq!(parse_q("-3"), Some(qi(-3)));
        assert_eq!(parse_q("0.25"), Some(q(1, 4)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&q(-6, 4)), "-3/2");
        assert_eq!(fmt_q(&qi(7)), "7");
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(10, 5), 252);
        assert_eq!(binom(3, 4), 0);
        assert_eq!(binom(0, 0), 1);
        assert_eq!(binom(60, 30), 118264581564861424);
    }

    #[test]
    fn log2_of_large_values() {
        let big = Q::from_integer(BigInt::one() << 2000usize);
        assert!((log2(&big) - 2000.0).abs() < 1e-9);
        assert!((log2(&q(1, 8)) + 3.0).abs() < 1e-12);
    }
}
