use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the waveform design library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition (dimensions, ranges,
    /// Hermitian symmetry, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The clutter denominator `s^H B s` fell below the degeneracy floor, so the
    /// SINR criterion is undefined.
    #[error("degenerate denominator: s^H B s = {denominator:e} is below the floor {floor:e}")]
    DegenerateDenominator { denominator: f64, floor: f64 },

    #[error("shift offset {offset} is out of range for dimension {n}")]
    InvalidOffset { n: usize, offset: isize },

    /// Configuration file problems. `line` is 1-based when known.
    #[error("config error{}: {message}", fmt_location(.key, .line))]
    Config {
        key: Option<String>,
        line: Option<usize>,
        message: String,
    },

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),
}

fn fmt_location(key: &Option<String>, line: &Option<usize>) -> String {
    match (key, line) {
        (Some(k), Some(l)) => format!(" (key `{k}`, line {l})"),
        (Some(k), None) => format!(" (key `{k}`)"),
        (None, Some(l)) => format!(" (line {l})"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
