use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("sector charge {charge} exceeds the maximum {max} allowed by the photon caps")]
    ChargeTooLarge { charge: u32, max: u32 },

    #[error("state {0} is not in the Hilbert space")]
    UnknownState(String),

    #[error("cannot parse basis label {label:?}: {reason}")]
    BadLabel { label: String, reason: String },

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),

    #[error(
        "norm drift {drift:.3e} at t = {time:.3} exceeds tolerance {tolerance:.1e}; \
         retry with a smaller dt (current {dt:.3e})"
    )]
    NormDrift {
        drift: f64,
        tolerance: f64,
        time: f64,
        dt: f64,
    },

    #[error("initial state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("phase undefined: amplitude {magnitude:.3e} of {state} is below the floor {floor:.1e}")]
    UndefinedPhase {
        state: String,
        magnitude: f64,
        floor: f64,
    },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular case: {0}")]
    Singular(String),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("invalid override {key:?}: {reason}")]
    InvalidOverride { key: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
