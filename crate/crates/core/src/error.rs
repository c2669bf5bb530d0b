use thiserror::Error;

use crate::arith::GaussianInt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported root order q={0} (supported: 1, 2, 4)")]
    UnsupportedOrder(u8),

    /// Rows are 1-based.
    #[error("rows {0} and {1} are not orthogonal: inner product {2}")]
    NotHadamard(usize, usize, GaussianInt),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fingerprint is defined for order n >= 4, got n={0}")]
    OrderTooSmall(usize),

    #[error("unsupported search parameters q={q}, n={n}: {reason}")]
    UnsupportedSearch { q: u8, n: usize, reason: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("family {family}: {msg}")]
    Family { family: String, msg: String },

    #[error("catalog record {id}: {msg}")]
    CorruptCatalog { id: u32, msg: String },

    #[error("malformed catalog: {0}")]
    MalformedCatalog(String),

    #[error("matrix is not equivalent to any catalog class")]
    NotInCatalog,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
