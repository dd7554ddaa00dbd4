//! Crate-wide error type.
//!
//! Every fallible operation reports through [`Error`]. Variants carry enough
//! context to be printed to an end user as a one-line diagnostic; none of the
//! verification routines panic on malformed input.

use std::fmt;

/// Errors produced by construction, parsing and verification routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A numeric or structural argument was outside the accepted range.
    InvalidArgument(String),
    /// A label referenced by an ordering or query is not a member of the family.
    UnknownLabel(String),
    /// The same label occurs twice in a family or ordering.
    DuplicateLabel(String),
    /// A check that needs a total order was run on a family without one.
    MissingOrdering,
    /// Textual input (rational, scalar, function or family) failed to parse.
    Parse(String),
    /// An interval-arithmetic certification could not decide a comparison
    /// within the configured precision budget.
    Undecided(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::UnknownLabel(label) => write!(f, "unknown label: {label}"),
            Error::DuplicateLabel(label) => write!(f, "duplicate label: {label}"),
            Error::MissingOrdering => {
                write!(f, "family has no total order on its labels; type III needs one")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Undecided(msg) => write!(f, "undecided comparison: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
