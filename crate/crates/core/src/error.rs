use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient of {var}^{exp} requested but the series is only known through order {order}")]
    BeyondOrder { var: String, exp: i64, order: i64 },

    #[error("series has a nonzero constant term {0}; factor it out before exponentiating")]
    NonzeroConstant(String),

    #[error("logarithm needs constant term 1, found {0}")]
    ConstantNotOne(String),

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("denominator has the irreducible factor {0} of degree above one")]
    NonLinearFactor(String),

    #[error("the formal constant log(-1) survives with coefficient {0}")]
    LogDoesNotCancel(String),

    #[error("{0} cannot be expanded at this center")]
    NotExpandable(String),

    #[error("order budget exceeded: {what} needs order {required}, budget is {budget}")]
    Budget {
        what: String,
        required: i64,
        budget: i64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unstable correlator without a base value: {0}")]
    UnstableCorrelator(String),

    #[error("a residue survives in slot {slot}: integrating would produce a logarithm")]
    LogInPrimitive { slot: usize },

    #[error("the form is not spanned by the basis: {0}")]
    BasisDoesNotClose(String),
}

pub type Result<T> = std::result::Result<T, Error>;
