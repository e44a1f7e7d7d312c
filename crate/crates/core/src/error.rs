//! Error type shared by all toolkit modules.

use std::fmt;

/// Toolkit-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter lies outside its mathematical domain (e.g. rho outside (-1, 1]).
    Domain(String),
    /// An input distribution is not compatible with the channel family.
    Incompatible(String),
    /// A rate is outside the invertible capacity range of the family.
    Range(String),
    /// A resource cap was exceeded (e.g. SPN ideal recursion K cap).
    Capacity(String),
    /// The SPN simulator only bundles the 8x8 AES S-box.
    UnsupportedGeometry(String),
    /// The requested quantity does not exist for these inputs
    /// (unreachable threshold, undefined security gap, ...).
    Infeasible(String),
    /// An internal numerical guard tripped (optimizer inconsistency,
    /// distribution drift, quadrature failure).
    Numerical(String),
    /// A Monte-Carlo scenario produced no usable samples.
    Scenario(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Incompatible(m) => write!(f, "incompatible input: {m}"),
            Error::Range(m) => write!(f, "range error: {m}"),
            Error::Capacity(m) => write!(f, "capacity error: {m}"),
            Error::UnsupportedGeometry(m) => write!(f, "unsupported geometry: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible: {m}"),
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Scenario(m) => write!(f, "scenario error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for validation-class
    /// errors, 3 for infeasible/failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Incompatible(_)
            | Error::Range(_)
            | Error::Capacity(_)
            | Error::UnsupportedGeometry(_) => 2,
            Error::Infeasible(_) | Error::Numerical(_) | Error::Scenario(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
