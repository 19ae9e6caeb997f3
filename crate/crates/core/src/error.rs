use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("gcd undefined: both polynomials are zero")]
    GcdUndefined,

    #[error("zero polynomial is not a valid input to {0}")]
    ZeroPolynomial(&'static str),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("identity {identity} undefined at parameters (n={n}, alpha={alpha}, beta={beta}): {reason}")]
    IdentityUndefined {
        identity: &'static str,
        n: usize,
        alpha: String,
        beta: String,
        reason: &'static str,
    },

    #[error("ratio undefined: {0}")]
    RatioUndefined(&'static str),

    #[error("pole at alpha = {0}")]
    Pole(String),

    #[error("bracket does not straddle: both ends are {0}")]
    BracketDoesNotStraddle(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
