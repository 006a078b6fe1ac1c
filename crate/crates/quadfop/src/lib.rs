//! Unlimited, deduplicated lists of quadratic integers of given norm.
//!
//! The central primitive is the *first-occurrence sweep*: walk a parameter
//! `t = 1..B` over a polynomial family `m(t)`, split each value as
//! `m(t) = M r²` with `M` square-free (the Kummer radical), and keep only the
//! first `t` producing each radical. Sorted by radical, the surviving records
//! enumerate fundamental units (`m(t) = t² ∓ 4`), fundamental solutions of
//! norm equations `u² − M v² = 4sν`, families of units that are local p-th
//! powers (hence certificates of non-p-rationality), and radicals whose
//! mirror fields have p-divisible class numbers.
//!
//! Modules:
//! - [`arith`] — primality, factorization, square-free cores, modular roots.
//! - [`quadfield`] — quadratic integers in halved coordinates, fundamental
//!   units by continued fractions, unit power decomposition.
//! - [`fop`] — the generic sweep engine with deterministic parallel merge.
//! - [`normeq`] — norm-equation records and the minimal-trace oracle.
//! - [`prationality`] — local p-th power unit families and regulator
//!   valuations.
//! - [`imagclass`] — reduced-form class numbers of imaginary quadratic
//!   fields and mirror defining polynomials.
//! - [`mclaughlin`] — the ten McLaughlin polynomial unit families.

pub mod arith;
pub mod fop;
pub mod imagclass;
pub mod mclaughlin;
pub mod normeq;
pub(crate) mod poly;
pub mod prationality;
pub mod quadfield;

use std::fmt;

/// Sign of a norm, `−1` or `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Neg => -1,
            Sign::Pos => 1,
        }
    }

    pub fn from_i64(s: i64) -> Result<Self> {
        match s {
            -1 => Ok(Sign::Neg),
            1 => Ok(Sign::Pos),
            other => Err(Error::Invalid(format!("sign must be -1 or 1, got {other}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("continued fraction budget of {budget} steps exceeded for radical {radical}")]
    CfBudget { radical: String, budget: u64 },
    #[error("factorization budget exceeded for {0}")]
    FactorBudget(String),
    #[error("mixed radicals {0} and {1}")]
    MixedRadicals(String, String),
    #[error("unit power decomposition failed: {0}")]
    PowerDecompose(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
