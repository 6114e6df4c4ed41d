use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("generator budget exceeded: {requested} generators requested, capacity is {capacity}")]
    Capacity { requested: usize, capacity: usize },
    #[error("elements belong to different algebra contexts")]
    ContextMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("partition function vanishes; normalised quantity undefined")]
    DegenerateNormalisation,
    #[error("source generators are not enabled in this algebra")]
    SourcesDisabled,
}

pub type Result<T> = core::result::Result<T, Error>;
