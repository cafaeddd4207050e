use thiserror::Error;

use crate::fock::OccupationVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("could not split {value} into square and squarefree parts with trial division up to {bound}")]
    FactorBound { value: String, bound: u64 },

    #[error("square root of negative rational {0}")]
    NegativeRadicand(String),

    #[error("polynomial has a non-rational coefficient or a half-integer exponent: {0}")]
    NonRational(String),

    #[error("gamma = {0} is outside [0, 1]")]
    GammaOutOfRange(String),

    #[error("length mismatch: {left} modes vs {right} modes")]
    LengthMismatch { left: usize, right: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("codeword {codeword}: weights sum to {sum}, expected 1")]
    Normalization { codeword: usize, sum: String },

    #[error("codeword {codeword}: QCS {qcs} appears more than once")]
    DuplicateQcs { codeword: usize, qcs: OccupationVector },

    #[error("codeword {codeword}: non-positive weight {weight}")]
    NonPositiveWeight { codeword: usize, weight: String },

    #[error("code has no codewords")]
    EmptyCode,

    #[error("codeword {0} has no rows")]
    EmptyCodeword(usize),

    #[error("unknown catalog entry {0} (valid ids are 1..=11)")]
    UnknownCatalogId(u32),

    #[error("reversed orbit of {0} coincides with its forward orbit")]
    Palindrome(OccupationVector),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("criteria violated: {0}")]
    CriteriaViolated(String),

    #[error("input coefficients are not normalized: squared norm is {0}")]
    NotNormalized(String),
}
