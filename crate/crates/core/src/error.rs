use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A quadrature exhausted its panel budget before meeting the tolerance.
    ToleranceNotMet { value: f64, error: f64, tolerance: f64 },
    /// `(λ, α)` is not in the region an operation requires.
    Region(String),
    /// The operation is not defined for this field variant.
    Unsupported(String),
    /// A parameter search ran out of room.
    SearchExhausted(String),
    /// A sequence failed its Cauchy test.
    NonConvergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::ToleranceNotMet {
                value,
                error,
                tolerance,
            } => write!(
                f,
                "tolerance not met: value {value:e}, error estimate {error:e} > {tolerance:e}"
            ),
            Error::Region(m) => write!(f, "region error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::SearchExhausted(m) => write!(f, "parameter search exhausted: {m}"),
            Error::NonConvergence(m) => write!(f, "no convergence: {m}"),
        }
    }
}

impl core::error::Error for Error {}
