use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unsafe variable {variable} in {statement}")]
    Unsafe { variable: String, statement: String },

    #[error("constraint program is not stratified")]
    NotStratified,

    #[error("global weak constraint mentions {atom}, which is outside the base of the first block")]
    GlobalOutsideBase { atom: String },

    #[error("invalid program: {0}")]
    Invalid(String),

    #[error("resource cap exceeded: {cap} (limit {limit})")]
    Resource { cap: &'static str, limit: u64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }

    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Unsafe { .. }
                | Error::NotStratified
                | Error::GlobalOutsideBase { .. }
                | Error::Invalid(_)
                | Error::Usage(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
