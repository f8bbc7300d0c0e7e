use thiserror::Error as ThisError;

use crate::syntax::{Formula, Nominal, ParseError, SignatureError};

#[derive(Debug, ThisError)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("nominal {0} has no value in the model")]
    UnboundNominal(Nominal),
    #[error("operator `{op}` has no interpretation over {functor}")]
    UnsupportedOperator { functor: String, op: String },
    #[error("axiom `{0}` is not pure")]
    NotPure(Formula),
    #[error("operator `{0}` is not bounded")]
    UnboundedOperator(String),
    #[error("resource bound exhausted: {0}")]
    ResourceBound(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format { line, msg: msg.into() }
    }

    pub fn is_resource_bound(&self) -> bool {
        matches!(self, Error::ResourceBound(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
