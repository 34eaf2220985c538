use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids ({0}x{1} vs {2}x{3})")]
    GridMismatch(usize, usize, usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The density perturbation left the small-data regime (ρ+1 too close to vacuum).
    #[error("smallness ansatz violated: {0}")]
    SmallnessViolation(String),

    #[error("CFL violation: dt = {dt:.3e} exceeds bound {bound:.3e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("eigensolver failure at k = ({0}, {1})")]
    Eigensolver(i64, i64),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
