use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: rational coefficient denominator vanishes at alpha = {0}")]
    Pole(String),
    #[error("fractional derivative undefined for t-exponent {exponent} (requires p > -1)")]
    UndefinedDerivative { exponent: String },
    #[error("unsupported operand: {0}")]
    UnsupportedOperand(String),
    #[error("field is not in the span of the basis: {0}")]
    NotInSpan(String),
    #[error("basis is not closed under the bracket: [{0}, {1}]")]
    NotClosed(String, String),
    #[error("invalid classification case: {0}")]
    InvalidCase(String),
    #[error("degenerate denominator: 2m*alpha + alpha - m = 0")]
    DegenerateDenominator,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("non-real root: {0}")]
    NonrealRoot(String),
    #[error("singular parameter: gamma pole at argument {0}")]
    SingularParameter(String),
    #[error("x(psi) is not strictly monotone on the tabulated range")]
    NonMonotone,
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("instability: {0}")]
    Instability(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by bad parameters or evaluation outside a domain
    /// (as opposed to a failed verification).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Instability(_) | Error::QuadratureFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
