use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid machine class: {0}")]
    InvalidClass(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("machine range {start}..{end} outside [0, {total})")]
    RangeOutOfBounds { start: u64, end: u64, total: u64 },

    #[error("cannot merge shards: {0}")]
    Merge(String),

    #[error("empty block")]
    EmptyBlock,

    #[error("invalid block shape: {0}")]
    BlockShape(String),

    #[error("table required for BDM scoring")]
    MissingTable,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("corrupt compressed stream: {0}")]
    Decode(String),

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("table file line {line}: {msg}")]
    TableFormat { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than an internal failure.
    pub fn is_input_error(&self) -> bool {
        use std::io::ErrorKind::*;
        match self {
            Error::Io(e) => matches!(
                e.kind(),
                NotFound | PermissionDenied | InvalidInput | InvalidData
            ),
            _ => true,
        }
    }
}
