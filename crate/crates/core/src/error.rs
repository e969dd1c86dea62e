use thiserror::Error;

/// Errors raised by the index, the generators and the file parsers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("node {0} already exists")]
    DuplicateNode(u32),
    #[error("node id {0} is out of range")]
    NodeOutOfRange(u64),
    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(u32, u32),
    #[error("operation not allowed in a batch: {0}")]
    NotBatchable(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("workload generation failed: {0}")]
    Generation(String),
    /// The caller violated a precondition of an internal operation.
    #[error("logic error: {0}")]
    Logic(String),
    /// The index detected a broken internal invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A workload op failed during replay.
    #[error("op {index}: {source}")]
    Op {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by bad input (files, ids, workloads) rather
    /// than by a defect in the index.
    pub fn is_input(&self) -> bool {
        match self {
            Error::Logic(_) | Error::Invariant(_) => false,
            Error::Op { source, .. } => source.is_input(),
            _ => true,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
