use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature did not converge: best estimate {estimate:e} with error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    #[error("density profile reached {rho:e} at z = {z}: no positive solution for this psi/entropy pair")]
    VacuumBreach { z: f64, rho: f64 },

    #[error(
        "ODE step {step:e} too coarse: Richardson error estimate {estimate:e} exceeds {tolerance:e}; use a smaller step"
    )]
    OdeAccuracy {
        step: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("seed ingestion failed: {0}")]
    Ingest(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("inadmissible state at t = {time}: {what} in cell ({i}, {j})")]
    Admissibility {
        time: f64,
        i: usize,
        j: usize,
        what: String,
    },
}

impl Error {
    /// True for errors caused by invalid inputs or configuration (as opposed
    /// to numerical failures at runtime).
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidInterval(_)
                | Error::Domain(_)
                | Error::Config(_)
                | Error::Ingest(_)
                | Error::GridTooSmall(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
