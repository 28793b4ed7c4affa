use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("exponent tuple has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{count} tuples exceed the materialization cap {cap}; use count_positive instead")]
    CapExceeded { count: String, cap: u64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("integer overflow in fixed-width fast path: {0}")]
    Overflow(&'static str),

    #[error("invalid moduli point: {0}")]
    InvalidPoint(String),

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("leading coefficient of x{var}^{exp} is not 1")]
    NotMonic { var: usize, exp: u32 },

    #[error("missing monomial x{var}^{exp}")]
    MissingPower { var: usize, exp: u32 },

    #[error("polynomial is not in normal form: {0}")]
    NotNormalizable(String),

    #[error("crepant ray is not integral: {0}")]
    NonIntegralRay(String),

    #[error("fan simplex is not reflexive: dual vertex {0} is not integral")]
    NotReflexive(usize),

    #[error("no unimodular self-duality witness found")]
    NoWitness,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("all coefficients of the family vanish identically")]
    ZeroFamily,

    #[error("normalized minimum valuation {0} exceeds 1; outside theorem hypotheses")]
    VbarAboveOne(String),

    #[error("point is interior (no place with normalized minimum valuation 1)")]
    Interior,

    #[error("boundary place is irrational: {0}")]
    IrrationalPlace(String),

    #[error("fiber already lies in the lower moduli space; evaluate directly")]
    VbarZero,

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("verification failure: {0}")]
    Violation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
