use thiserror::Error;

/// Errors produced while parsing, building or analysing groups.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("group closure exceeds the element cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("budget exceeded during {stage}: {progress}")]
    BudgetExceeded { stage: &'static str, progress: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
