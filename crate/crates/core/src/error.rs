use thiserror::Error;

/// Errors raised by the lattice solver and its diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("matrix is not positive definite enough for a logarithm (min eigenvalue {min_eigenvalue:e}, max {max_eigenvalue:e})")]
    Conditioning { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown scenario tag `{0}`")]
    UnknownScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time step {dt:e} exceeds the stable bound {dt_stable:e}")]
    Cfl { dt: f64, dt_stable: f64 },

    #[error("non-finite value at node ({ix}, {iy}) after step {step}")]
    NonFinite { ix: usize, iy: usize, step: usize },

    #[error("flow did not converge: t = {t}, sup residual = {sup_residual:e}")]
    NotConverged { t: f64, sup_residual: f64 },

    #[error("exhaustion stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<HeError>,
    },

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("misuse: {0}")]
    Misuse(String),
}

pub type Result<T> = std::result::Result<T, HeError>;
