use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("matrix is not an element of {spec}: membership residual {residual:.3e}")]
    InvalidElement { spec: String, residual: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("representation sampling did not converge (residual {residual:.3e} after {iterations} iterations)")]
    SamplingFailure { residual: f64, iterations: usize },
    #[error("could not realize loops in generic position after {retries} retries")]
    Realization { retries: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("Maurer-Cartan Newton iteration did not converge (residual {residual:.3e})")]
    NewtonFailure { residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}
