use thiserror::Error;

/// Errors raised by the discretisation, symbol, norm, solver and oracle routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fractional order {0} is not supported here: {1}")]
    UnsupportedOrder(f64, String),

    #[error("shift {0} is not an integer")]
    NonIntegerShift(f64),

    #[error("scheme term (scale {scale}, shift {shift}) does not land on the grid")]
    GridMisalignment { scale: f64, shift: f64 },

    #[error("coefficient system is singular (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("(1 - e^-z)/z lies on the branch cut at z = {re} + {im}i")]
    BranchCut { re: f64, im: f64 },

    #[error("symbol vanishes identically")]
    DegenerateSymbol,

    #[error("symbol is not stable: {0}")]
    UnstableSymbol(String),

    #[error(
        "Fourier coefficients did not converge up to n = {n} (last relative change {change:e})"
    )]
    NonConvergent { n: usize, change: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("time-stepping matrix is singular")]
    SingularFactorization,

    #[error("explicit step outside stability region: tau * |A| = {0} > 2.5")]
    StabilityViolation(f64),

    #[error(
        "adaptive quadrature failed to reach tolerance (estimate {estimate:e}, error {error:e})"
    )]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("samples do not decay at the grid ends (|f| = {0:e})")]
    InsufficientDecay(f64),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::UnsupportedOrder(..)
                | Error::NonIntegerShift(_)
                | Error::GridMisalignment { .. }
                | Error::UnstableSymbol(_)
                | Error::InsufficientDecay(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
