use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("field shape mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("empty region")]
    EmptyRegion,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("support touches the window boundary (edge max {edge:.3e} vs interior max {interior:.3e})")]
    Support { edge: f64, interior: f64 },
    #[error("weight ratio undefined: omega = 0 where omega_tilde = {0:.3e}")]
    WeightRatio(f64),
    #[error("lattice order {have} below required {need}")]
    Order { have: usize, need: usize },
    #[error("non-positive value {value} at t = {t} in fit window")]
    NonPositive { t: f64, value: f64 },
    #[error("fit window holds {0} samples, need at least 6")]
    FitWindow(usize),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
