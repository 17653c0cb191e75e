use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({0}, {1}, {2}) lies outside the domain")]
    OutsideDomain(f64, f64, f64),
    #[error("fields live on different backends or domains")]
    BackendMismatch,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("axis mismatch: both factors must belong to the same axial algebra")]
    AxisMismatch,
    #[error("axis vector is not a unit vector (|omega| = {0})")]
    NonUnitAxis(f64),
    #[error("pole {0:?} is inside the domain or too close to it (distance {1})")]
    PoleTooClose([f64; 3], f64),
    #[error("stereographic chart is singular on the projected domain")]
    ChartSingular,
    #[error("inconsistent readings: max inconsistency {0} exceeds tolerance {1}")]
    Inconsistent(f64, f64),
    #[error("empty probe set")]
    EmptyProbeSet,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
