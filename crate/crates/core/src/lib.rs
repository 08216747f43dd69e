//! Executable spectral analysis of symmetric Boolean functions.
//!
//! A symmetric function `f: {0,1}^n -> {0,1}` is stored as its value vector on
//! Hamming weights `0..=n` ([`SymFn`]); arbitrary functions are stored as truth
//! tables ([`BoolFn`]). On top of these the crate provides
//!
//! * the combinatorial measures `r0, r1, r, lambda, rho` ([`Measures`]),
//! * exact Fourier analysis, both the dense Walsh-Hadamard transform and the
//!   Krawtchouk level transform for symmetric functions ([`fourier`]),
//! * a small dense simplex solver and every quantity defined by optimisation:
//!   approximate Fourier `L1` norm, approximate and sign monomial complexity
//!   ([`lp`], [`optimize`]),
//! * explicit sign-representing polynomials and the sampling approximator
//!   ([`construct`]),
//! * XOR/AND two-party matrix lifts, matrix norms and ranks, and the
//!   reduction identities relating them ([`liftmat`]),
//! * an exhaustive sweep harness that checks every explicit-constant
//!   inequality and produces a JSON-lines ledger ([`harness`]).

pub mod config;
pub mod construct;
pub mod error;
pub mod fourier;
pub mod func;
pub mod harness;
pub mod liftmat;
pub mod linalg;
pub mod lp;
pub mod optimize;
pub mod rational;

pub use config::{Caps, Config};
pub use construct::{FlipSide, PolyTerms, SignPoly};
pub use error::{Error, Result};
pub use fourier::{Degree, LevelSpectrum, Mode, Spectrum, SpectralStats};
pub use func::{BoolFn, Measures, SymFn};
pub use liftmat::{LiftKind, LiftMatrix, Promise, ReductionPlan};
pub use optimize::{Ansatz, ApproxResult, SignCertificate};
pub use rational::Q;
