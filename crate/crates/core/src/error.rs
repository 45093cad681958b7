use std::path::PathBuf;

/// Syntax error with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Parse(ParseError),
    #[error("{0}")]
    Validation(String),
    #[error("unknown query `{0}`")]
    UnknownQuery(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{what} has size {size}, above the cap of {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
    #[error("{}: {inner}", path.display())]
    InFile { path: PathBuf, inner: Box<Error> },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attaches the offending file to a parse or validation error.
    pub fn in_file(self, path: &std::path::Path) -> Error {
        match self {
            e @ (Error::Parse(_) | Error::Validation(_)) => {
                Error::InFile { path: path.to_path_buf(), inner: Box::new(e) }
            }
            other => other,
        }
    }

    /// The error with any file context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { inner, .. } => inner.root(),
            e => e,
        }
    }
}
