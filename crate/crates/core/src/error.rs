//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("line {line}: unknown value '{value}' for nominal attribute '{attribute}'")]
    UnknownNominalValue {
        line: usize,
        attribute: String,
        value: String,
    },

    #[error("line {line}: expected {expected} values, found {found}")]
    ArityMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: duplicate attribute name '{name}'")]
    DuplicateAttribute { line: usize, name: String },

    #[error("line {line}: class value is missing")]
    MissingClassValue { line: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("attribute '{attribute}' has no present values")]
    NoPresentValues { attribute: String },

    #[error("numeric attribute '{attribute}' is not supported by this algorithm")]
    NumericAttribute { attribute: String },

    #[error("missing values are not supported by this algorithm")]
    MissingValues,

    #[error("model schema does not match: {0}")]
    SchemaMismatch(String),

    #[error("malformed model document: {0}")]
    Model(String),
}
