use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// [`Error::is_domain`] separates errors caused by the caller's input (bad
/// parameters, unsupported instances) from internal failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("map is not unimodular (determinant {0})")]
    NonUnimodular(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("insufficient p-adic precision: re-lift to at least {needed} digits")]
    NeedsRelift { needed: u32 },
    #[error("comparison undecided after refinement: {0}")]
    Undecided(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
