use thiserror::Error;

use crate::Nat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the slice of size {0} is empty")]
    EmptySlice(usize),

    #[error("the language is empty")]
    EmptyLanguage,

    #[error("rank {rank} exceeds the language size {size}")]
    RankOutOfRange { rank: Nat, size: Nat },

    #[error("ambiguity {found} exceeds the declared bound {bound} at size {size}")]
    AmbiguityExceeded { found: Nat, bound: u64, size: usize },

    #[error("source census {census} is above the ceiling {ceiling}")]
    CeilingExceeded { census: Nat, ceiling: Nat },

    #[error("the grammar derives the empty word")]
    EpsilonInLanguage,

    #[error("input too large: {0}")]
    SizeGuard(String),

    #[error("derivation counts are infinite: {0}")]
    InfiniteAmbiguity(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
