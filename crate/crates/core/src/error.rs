use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    Domain(String),

    #[error("rho is not bounded away from zero: min rho = {min:e} < {floor:e}")]
    Positivity { min: f64, floor: f64 },

    #[error("integrability check failed for {quantity}: running sum {value:e} exceeds guard")]
    Integrability { quantity: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("spectral point outside the admissible half-plane: {0}")]
    HalfPlane(String),

    #[error("|mu| = {mu_abs} is below the mu_min guard {mu_min}")]
    MuGuard { mu_abs: f64, mu_min: f64 },

    #[error("picard iteration did not converge after {iterations} sweeps (increment {increment:e})")]
    NoConvergence { iterations: usize, increment: f64 },

    #[error("leading term underflows at x = {x}: |exp| = {magnitude:e}")]
    Normalization { x: f64, magnitude: f64 },

    #[error("reference integrator step size collapsed to {step:e} at x = {x}")]
    Stiffness { x: f64, step: f64 },

    #[error("invariant {name} breached: defect {defect:e} > tolerance {tol:e}")]
    Invariant { name: &'static str, defect: f64, tol: f64 },

    #[error("invalid problem specification: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Positivity { .. } => "PositivityError",
            Error::Integrability { .. } => "IntegrabilityError",
            Error::Grid(_) => "GridError",
            Error::HalfPlane(_) => "HalfPlaneError",
            Error::MuGuard { .. } => "HalfPlaneError(mu_min)",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::Normalization { .. } => "NormalizationError",
            Error::Stiffness { .. } => "StiffnessError",
            Error::Invariant { .. } => "InvariantBreach",
            Error::Spec(_) => "SpecError",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
            Error::Csv(_) => "CsvError",
        }
    }
}
