use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Degenerate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series has a gap at {0}")]
    Gap(String),
    #[error("no common periods between the aligned series")]
    EmptyIntersection,
    #[error("no articles passed the filters")]
    NoArticles,
    #[error("singular or rank-deficient matrix: {0}")]
    Singular(String),
    #[error("design matrix is ill-conditioned (condition number {0:.3e} exceeds 1e12)")]
    IllConditioned(f64),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Failed(String),
    /// A pipeline step failed; `trail` records what had been established.
    #[error("{step}: {source}{}", fmt_trail(trail))]
    Step {
        step: String,
        trail: Vec<String>,
        #[source]
        source: Box<Error>,
    },
}

fn fmt_trail(trail: &[String]) -> String {
    if trail.is_empty() {
        String::new()
    } else {
        format!(" (completed: {})", trail.join("; "))
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Lexicon(_)
            | Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::Gap(_)
            | Error::EmptyIntersection
            | Error::TooShort { .. } => ErrorKind::Input,
            Error::Singular(_) | Error::IllConditioned(_) | Error::Failed(_) => {
                ErrorKind::Numerical
            }
            Error::NoArticles | Error::Degenerate(_) => ErrorKind::Degenerate,
            Error::Step { source, .. } => source.kind(),
        }
    }
}
