//! Error types shared across the crate.

use alloc::string::String;
use core::fmt;

/// Unified error type for the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Expression text failed to parse.
    Parse { at: usize, message: String },
    /// An evaluation hit a pole, a log of a non-positive value, or a fractional
    /// power of a negative value.
    Domain { message: String },
    /// The sampler exhausted its resample budget without finding enough valid
    /// evaluation points.
    SamplingExhausted { attempts: u32 },
    /// An expression refers to lattice points that cannot be reached from the
    /// given initial-data set using the equation.
    NotReachable { message: String },
    /// A transform is not in the supported unimodular family, or does not map
    /// the stencil onto a Kovalevskaya stencil.
    UnsupportedTransform { message: String },
    /// The equation is not in (or convertible to) the form an operation needs.
    UnsupportedEquation { message: String },
    /// A transformed stencil is not in Kovalevskaya form (single solved point on
    /// the top row, right-hand side confined to lower rows).
    NotKovalevskaya { message: String },
    /// A proposed characteristic is not a variational symmetry of the Lagrangian.
    NotVariational { message: String },
    /// A power series passed to log(1+s) has a nonzero constant term.
    NonzeroConstantTerm,
    /// An antiderivative left the supported function class.
    IntegrationUnsupported { message: String },
    /// A reconstruction integrand hit a pole on the integration path.
    SingularIntegrand { message: String },
    /// Negative shifts of the equation right-hand side could not be removed by
    /// second-kind trivial corrections.
    NegativeShiftIrremovable { message: String },
    /// The supplied unknown-function ansatz cannot absorb the residual.
    AnsatzInsufficient { message: String },
    /// A candidate root is inconsistent: no first integral / density completion
    /// exists for it.
    InconsistentRoot { message: String },
    /// Input violated a structural precondition (wrong variable family, stray
    /// symbols, fractional powers outside the O∆E subsystem, ...).
    Invalid { message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { at, message } => write!(f, "parse error at byte {at}: {message}"),
            Error::Domain { message } => write!(f, "domain error: {message}"),
            Error::SamplingExhausted { attempts } => {
                write!(f, "sampling exhausted after {attempts} attempts")
            }
            Error::NotReachable { message } => write!(f, "not reachable: {message}"),
            Error::UnsupportedTransform { message } => {
                write!(f, "unsupported transform: {message}")
            }
            Error::UnsupportedEquation { message } => write!(f, "unsupported equation: {message}"),
            Error::NotKovalevskaya { message } => write!(f, "not Kovalevskaya: {message}"),
            Error::NotVariational { message } => write!(f, "not a variational symmetry: {message}"),
            Error::NonzeroConstantTerm => {
                write!(f, "series has a nonzero constant term where zero is required")
            }
            Error::IntegrationUnsupported { message } => {
                write!(f, "integration unsupported: {message}")
            }
            Error::SingularIntegrand { message } => write!(f, "singular integrand: {message}"),
            Error::NegativeShiftIrremovable { message } => {
                write!(f, "negative shift irremovable: {message}")
            }
            Error::AnsatzInsufficient { message } => write!(f, "ansatz insufficient: {message}"),
            Error::InconsistentRoot { message } => write!(f, "inconsistent root: {message}"),
            Error::Invalid { message } => write!(f, "invalid input: {message}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain { message: message.into() }
    }
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid { message: message.into() }
    }
    pub fn not_reachable(message: impl Into<String>) -> Self {
        Error::NotReachable { message: message.into() }
    }
    pub fn unsupported_equation(message: impl Into<String>) -> Self {
        Error::UnsupportedEquation { message: message.into() }
    }
    pub fn integration_unsupported(message: impl Into<String>) -> Self {
        Error::IntegrationUnsupported { message: message.into() }
    }
    pub fn singular_integrand(message: impl Into<String>) -> Self {
        Error::SingularIntegrand { message: message.into() }
    }
    pub fn not_kovalevskaya(message: impl Into<String>) -> Self {
        Error::NotKovalevskaya { message: message.into() }
    }
    pub fn negative_shift_irremovable(message: impl Into<String>) -> Self {
        Error::NegativeShiftIrremovable { message: message.into() }
    }
    pub fn ansatz_insufficient(message: impl Into<String>) -> Self {
        Error::AnsatzInsufficient { message: message.into() }
    }
    pub fn inconsistent_root(message: impl Into<String>) -> Self {
        Error::InconsistentRoot { message: message.into() }
    }
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
