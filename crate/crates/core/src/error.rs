use std::fmt;

use thiserror::Error;

/// The congruence that rules out a vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Congruence {
    /// `n + 1` does not divide `v`.
    DivisibleByStarOrder,
    /// `n` does not divide `v - 2`.
    TwoModN,
    /// Both of the above fail.
    Both,
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Congruence::DivisibleByStarOrder => f.write_str("(n+1) does not divide v"),
            Congruence::TwoModN => f.write_str("n does not divide v-2"),
            Congruence::Both => f.write_str("(n+1) does not divide v and n does not divide v-2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no decomposition for n = {n}, v = {v}: v is not 2(n+1) mod n(n+1), since {failing}")]
    Inadmissible { n: u32, v: u32, failing: Congruence },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("balanced star array for residue {residue} cannot be completed: {reason}")]
    Imbalance { residue: u32, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! internal {
    ($($arg:tt)*) => {
        $crate::error::Error::Internal(format!($($arg)*))
    };
}
pub(crate) use internal;
