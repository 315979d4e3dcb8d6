use thiserror::Error;

use crate::words::CanonicalMoment;

/// Errors raised by the exact and statistical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radicand mismatch: {left} vs {right}")]
    RadicandMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("element {0} is not invertible (zero norm over a square radicand)")]
    NotInvertible(String),

    #[error("series base point mismatch: t2 = {left} vs t2 = {right}")]
    BasePointMismatch { left: String, right: String },

    #[error("series constant term {0} is not the square of a nonzero rational")]
    NotARationalSquare(String),

    #[error("series has a pole at t4 = 0: coefficient of t4^{power} is {value}")]
    PoleAtOrigin { power: usize, value: String },

    #[error("coefficient t4^{requested} requested beyond truncation order {order}")]
    BeyondTruncation { requested: usize, order: usize },

    #[error("series division by a series with zero constant term")]
    SeriesNotInvertible,

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("invalid word {0:?}: expected letters A/B with optional ^n exponents")]
    ParseWord(String),

    #[error("no assignment for moment {0}")]
    MissingMoment(CanonicalMoment),

    #[error("no closed form for moment {0} (degree above 8)")]
    UnknownMoment(CanonicalMoment),

    #[error("no closed form for Dirac moment d_{0}; available: 2, 4, 6")]
    UnknownDiracMoment(u32),

    #[error("no word expansion for Dirac moment d_{0}")]
    NoWordExpansion(u32),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("inconsistent determinations of {moment} at order {order}: {first} vs {second}")]
    InconsistentDetermination {
        moment: CanonicalMoment,
        order: usize,
        first: String,
        second: String,
    },

    #[error("invalid sampler configuration: {0}")]
    Config(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
