use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Reciprocal of a series whose constant term vanishes.
    #[error("series has zero constant term; it has no reciprocal as a power series")]
    ZeroConstantTerm,

    #[error("logarithm needs constant term 1, got {0}")]
    ConstantTermNotOne(String),

    #[error("exponential needs constant term 0, got {0}")]
    NonzeroConstantTerm(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    /// The certified sign change of `D_θ` was not observed at a bracket.
    #[error(
        "bracket {index} ]{lo}, {hi}[: endpoint signs of D_theta are ({sign_lo}, {sign_hi}), \
         expected opposite signs; q-product evaluation is unreliable here"
    )]
    BracketSign {
        index: usize,
        lo: f64,
        hi: f64,
        sign_lo: i8,
        sign_hi: i8,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("density evaluation failed: {0}")]
    Density(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}
