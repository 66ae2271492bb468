use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("moment system is singular (pivot {pivot:e}) for moment order {order}")]
    SingularMomentSystem { order: usize, pivot: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    QuadratureNoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("generalized functions built from different mollifiers cannot be combined")]
    MixedMollifiers,

    #[error("delta derivative order {0} is outside the supported range")]
    DeltaOrderOutOfRange(usize),

    #[error("smooth side provides {available} derivatives but {requested} were requested")]
    MissingDerivative { available: usize, requested: usize },

    #[error("supplied derivative d{order} disagrees with finite differences at x = {x}: {supplied} vs {estimated}")]
    InconsistentDerivative {
        order: usize,
        x: f64,
        supplied: f64,
        estimated: f64,
    },

    #[error("square root family: sign condition violated at eps = {eps:e}, x = {x}")]
    SignViolation { eps: f64, x: f64 },

    #[error("too many sign changes ({0}) while splitting the negative part")]
    TooManySignChanges(usize),

    #[error("no quadrature breakpoints for an integrand containing embedded nodes")]
    MissingBreakpoints,

    #[error("radius {r} lies inside the throat radius {a}")]
    InsideThroat { r: f64, a: f64 },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("substitution ansatz cannot handle term: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
