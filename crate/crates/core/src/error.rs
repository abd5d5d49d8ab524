use std::fmt;
use std::path::PathBuf;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {}", join(.0))]
    Config(Vec<Violation>),

    #[error("failed to parse configuration {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("cannot distribute {cells} cells over {workers} workers")]
    TooManyWorkers { workers: usize, cells: usize },

    #[error("particle {id} escaped the domain at step {step} (position {position:?})")]
    EscapedParticle { id: u64, step: u64, position: [f64; 3] },

    #[error("coincident particles {a} and {b}")]
    CoincidentParticles { a: u64, b: u64 },

    #[error("time step {dt:.6e} exceeds the {condition} limit {limit:.6e}")]
    StepLimit { dt: f64, limit: f64, condition: &'static str },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![Violation(msg.into())])
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the command line driver: 2 for configuration
    /// problems, 3 for runtime assertions, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::UnknownPreset(_)
            | Error::TooManyWorkers { .. } => 2,
            Error::EscapedParticle { .. }
            | Error::CoincidentParticles { .. }
            | Error::StepLimit { .. } => 3,
            Error::Io { .. } => 1,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.0.as_str()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
