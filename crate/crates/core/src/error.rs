use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid dimensions or side lengths out of range.
    InvalidGrid(&'static str),
    /// A field was built from data of the wrong length or with non-finite entries.
    InvalidField(&'static str),
    /// Model or scheme parameters violate their invariants.
    InvalidParams(&'static str),
    /// Input to a solver violates its precondition.
    InvalidInput(&'static str),
    /// An iterative linear solve exhausted its budget.
    NonConvergence { iterations: usize, residual: f64, target: f64 },
    /// The sensitivity `v^{−λ}` was requested at a nonpositive `v`.
    SingularSensitivity { min_v: f64 },
    /// A time step exceeded the positivity limit of the explicit part.
    CflViolation { dt: f64, limit: f64 },
    /// A threshold formula was evaluated outside its domain.
    DomainViolation(&'static str),
    /// The logarithmic energy needs `min u > 1e-14`.
    UndefinedEnergy { min_u: f64 },
    /// Too few points in the fitting window.
    InsufficientData { points: usize },
    /// Eigenmode amplitude would make `u` nonpositive.
    InvalidAmplitude,
    /// The requested evaluation is not implemented for these arguments.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidField(msg) => write!(f, "invalid field: {msg}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NonConvergence { iterations, residual, target } => write!(
                f,
                "linear solve did not converge after {iterations} iterations \
                 (residual {residual:e}, target {target:e})"
            ),
            Error::SingularSensitivity { min_v } => {
                write!(f, "singular sensitivity: min v = {min_v:e} is not positive")
            }
            Error::CflViolation { dt, limit } => {
                write!(f, "time step {dt:e} exceeds the positivity limit {limit:e}")
            }
            Error::DomainViolation(msg) => write!(f, "domain violation: {msg}"),
            Error::UndefinedEnergy { min_u } => {
                write!(f, "energy undefined: min u = {min_u:e} is not above 1e-14")
            }
            Error::InsufficientData { points } => {
                write!(f, "insufficient data: {points} points in window, need at least 5")
            }
            Error::InvalidAmplitude => write!(f, "amplitude must be smaller than the mean value"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
