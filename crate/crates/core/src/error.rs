use thiserror::Error;

/// Errors raised by the line geometry, dynamics, observers and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate line: passes through the optical center (|p x d| = {0:e})")]
    DegenerateLine(f64),
    #[error("line at infinity: inverse depth norm {0:e} is too small")]
    LineAtInfinity(f64),
    #[error("spherical singularity: moment too close to a pole (m_z = {0})")]
    SphericalSingularity(f64),
    #[error("invalid line: {0}")]
    InvalidLine(String),
    #[error("objective returned a non-finite value ({value}) at evaluation {evaluation}")]
    NonFiniteObjective { value: f64, evaluation: usize },
    #[error("solver failed: cost {achieved} exceeds prediction cost {prediction}")]
    SolverFailed { achieved: f64, prediction: f64 },
    #[error("window not warm: {have} of {need} measurements")]
    WindowNotWarm { have: usize, need: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
