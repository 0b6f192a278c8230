use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("blow-up at t = {t}: max |u_hat| = {max_coeff}")]
    BlowUp { t: f64, max_coeff: f64 },

    #[error("overflow guard: sigma*|xi| = {0} exceeds 700")]
    Overflow(f64),

    #[error("precision budget exceeded: sigma*xi_max = {product} > {budget}")]
    PrecisionBudget { product: f64, budget: f64 },

    #[error("radius estimation failed: {0}")]
    Estimation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series tolerance {tol} not reached within {max_terms} terms")]
    Truncation { tol: f64, max_terms: usize },

    #[error("identity violation: {0}")]
    IdentityViolation(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
