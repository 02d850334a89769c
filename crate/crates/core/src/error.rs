use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("coordinate ({x}, {y}) is more than one step outside a {width}x{height} image")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("gray value {0} outside [0, 255]")]
    GrayOutOfRange(i64),

    #[error("angle {0} outside [0, pi]")]
    AngleOutOfRange(f64),

    #[error("vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("expected {expected} angles, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("qubit {index} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("clbit {index} out of range for {n_clbits} classical bits")]
    ClbitOutOfRange { index: usize, n_clbits: usize },

    #[error("gate {0} is not unitary")]
    NotUnitary(&'static str),

    #[error("cannot decompose {gate} with {controls} controls")]
    UnsupportedArity { gate: &'static str, controls: usize },

    #[error("counts are empty")]
    EmptyCounts,

    #[error("duplicate bit index {0}")]
    DuplicateBit(usize),

    #[error("circuit {index} needs {measurements} measurements but a job allows {limit}")]
    CircuitExceedsJob {
        index: usize,
        measurements: usize,
        limit: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
