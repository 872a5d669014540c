use std::fmt;

/// Error type shared by the solver library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SfmError {
    /// Malformed instance data or an input the library refuses to process.
    InvalidInput(String),
    /// A subset refers to elements outside the oracle's ground set.
    InvalidSubset(String),
    /// A well-formed but unacceptable argument to a library operation.
    InvalidArgument(String),
    /// A caller-supplied guarantee did not hold at run time.
    PreconditionViolation(String),
    /// An internal consistency check failed; indicates a solver bug.
    InternalInvariant(String),
    /// File or stream access failed.
    Io(String),
}

impl fmt::Display for SfmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SfmError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            SfmError::InvalidSubset(msg) => write!(f, "invalid subset: {msg}"),
            SfmError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            SfmError::PreconditionViolation(msg) => write!(f, "precondition violated: {msg}"),
            SfmError::InternalInvariant(msg) => write!(f, "internal invariant broken: {msg}"),
            SfmError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for SfmError {}
