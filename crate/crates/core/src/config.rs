//! Caps, default epsilons and run settings.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, q, serde_q, Q};

/// Largest `n` each operation accepts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub expand: usize,
    pub wht_float: usize,
    pub wht_exact: usize,
    /// Dense support enumeration for `mon_eps_exact` / `signmon_exact`.
    pub lp_enum: usize,
    /// Level-set enumeration for `mon_eps_symmetric_upper`.
    pub sym_mon: usize,
    pub eigen: usize,
    /// Full `2^n x 2^n` lifts.
    pub lift: usize,
    /// Side length of promise matrices.
    pub promise_side: usize,
    /// Pointwise sign verification of non-symmetric polynomials.
    pub pointwise_verify: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            expand: 20,
            wht_float: 20,
            wht_exact: 16,
            lp_enum: 4,
            sym_mon: 14,
            eigen: 10,
            lift: 12,
            promise_side: 4096,
            pointwise_verify: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub caps: Caps,
    /// Approximation radius of the monomial-complexity characterisation.
    #[serde(with = "serde_q")]
    pub eps_mon: Q,
    /// Outer radius of the approximate `L1` chain.
    #[serde(with = "serde_q")]
    pub eps_l1: Q,
    /// Inner radius of the approximate `L1` chain.
    #[serde(with = "serde_q")]
    pub eps_inner: Q,
    /// Margin constant of the one-flip sign polynomial, in `(0, 2)`.
    #[serde(with = "serde_q")]
    pub sign_margin: Q,
    pub seed: u64,
    pub trials: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            caps: Caps::default(),
            eps_mon: q(1, 4),
            eps_l1: q(1, 5),
            eps_inner: q(1, 20),
            sign_margin: q(1, 10),
            seed: 0,
            trials: 50,
            workers: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let c = &self.caps;
        let caps = [
            ("expand", c.expand),
            ("wht_float", c.wht_float),
            ("wht_exact", c.wht_exact),
            ("lp_enum", c.lp_enum),
            ("sym_mon", c.sym_mon),
            ("eigen", c.eigen),
            ("lift", c.lift),
            ("promise_side", c.promise_side),
            ("pointwise_verify", c.pointwise_verify),
        ];
        if let Some((name, _)) = caps.iter().find(|(_, v)| *v == 0) {
            return Err(Error::OutOfRange(format!("cap {name} must be positive")));
        }
        if c.lp_enum > 5 {
            return Err(Error::OutOfRange("cap lp_enum above 5 makes support enumeration intractable".into()));
        }
        if c.wht_exact > 30 || c.wht_float > 30 || c.expand > 30 || c.lift > 14 || c.eigen > 14 {
            return Err(Error::OutOfRange("caps exceed the dense-storage limits".into()));
        }
        let half = q(1, 2);
        for (name, e) in [("eps_mon", &self.eps_mon), ("eps_l1", &self.eps_l1), ("eps_inner", &self.eps_inner)] {
            if *e < q(0, 1) || *e >= half {
                return Err(Error::OutOfRange(format!("{name} = {} not in [0, 1/2)", fmt_q(e))));
            }
        }
        if self.sign_margin <= q(0, 1) || self.sign_margin >= q(2, 1) {
            return Err(Error::OutOfRange("sign_margin must lie in (0, 2)".into()));
        }
        if self.workers == 0 || self.trials == 0 {
            return Err(Error::OutOfRange("workers and trials must be positive".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Parse { pos: 0, msg: format!("bad value {value:?} for {key}") };
        let num = || value.trim().parse::<usize>().map_err(|_| bad());
        let rat = || parse_q(value).ok_or_else(bad);
        match key.trim() {
            "cap.expand" => self.caps.expand = num()?,
            "cap.wht_float" => self.caps.wht_float = num()?,
            "cap.wht_exact" => self.caps.wht_exact = num()?,
            "cap.lp_enum" => self.caps.lp_enum = num()?,
            "cap.sym_mon" => self.caps.sym_mon = num()?,
            "cap.eigen" => self.caps.eigen = num()?,
            "cap.lift" => self.caps.lift = num()?,
            "cap.promise_side" => self.caps.promise_side = num()?,
            "cap.pointwise_verify" => self.caps.pointwise_verify = num()?,
            "eps_mon" => self.eps_mon = rat()?,
            "eps_l1" => self.eps_l1 = rat()?,
            "eps_inner" => self.eps_inner = rat()?,
            "sign_margin" => self.sign_margin = rat()?,
            "seed" => self.seed = value.trim().parse().map_err(|_| bad())?,
            "trials" => self.trials = num()?,
            "workers" => self.workers = num()?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            other => {
                return Err(Error::Parse { pos: 0, msg: format!("unknown config key {other:?}") });
            }
        }
        Ok(())
    }

    /// Parses a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                pos: lineno + 1,
                msg: format!("expected key = value, found {line:?}"),
            })?;
            self.set(k, v).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { pos: lineno + 1, msg },
                e => e,
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn text_overrides() {
        let mut c = Config::default();
        c.apply_text("# sweep settings\nseed = 7\neps_mon = 1/8\ncap.eigen=8\n\nout_dir = /tmp/x # trailing\n")
            .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.eps_mon, q(1, 8));
        assert_eq!(c.caps.eigen, 8);
        assert_eq!(c.out_dir, PathBuf::from("/tmp/x"));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_settings() {
        let mut c = Config::default();
        assert!(matches!(c.apply_text("seed 7"), Err(Error::Parse { pos: 1, .. })));
        assert!(c.set("colour", "blue").is_err());
        c.set("eps_l1", "1/2").unwrap();
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.set("cap.lift", "0").unwrap();
        assert!(c.validate().is_err());
    }
}
