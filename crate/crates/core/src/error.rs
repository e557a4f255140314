use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Register widths or table shapes that cannot be simulated together.
    #[error("configuration error: {0}")]
    Config(String),

    /// A basis value or parameter outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A function table whose contents violate the table invariants.
    #[error("validation error at index {index}: {reason}")]
    Validation { index: usize, reason: String },

    /// A malformed table file.
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// The searched value has no preimage under the table.
    #[error(
        "no solution: g=0{}",
        .f0.map(|f| format!(", no argument maps to F0={f}")).unwrap_or_default()
    )]
    NoSolution { f0: Option<u64> },

    /// A state whose norm has drifted away from one.
    #[error("state corruption: norm is {norm}, expected 1")]
    StateCorruption { norm: f64 },

    /// A request that would exceed a size cap.
    #[error("resource error: {0}")]
    Resource(String),

    /// The selective pulse cannot address the target value alone.
    #[error("unresolvable pulse: resonance for F={f0} collides with F={other} (omega={omega})")]
    UnresolvablePulse { f0: u64, other: u64, omega: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
