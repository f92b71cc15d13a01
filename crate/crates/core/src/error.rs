use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge (last estimates {previous:e}, {last:e})")]
    Convergence { previous: f64, last: f64 },
    #[error("root not bracketed after {expansions} expansions (last g = {last_value:e})")]
    UnboundedRoot { expansions: usize, last_value: f64 },
    #[error("iteration did not converge: {0}")]
    Iteration(String),
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error("decoherence-free pair: s^alpha = s'^alpha for s = {s}, s' = {s_prime}")]
    DecoherenceFree { s: f64, s_prime: f64 },
    #[error("stability violated: {0}")]
    Stability(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("grid resolution: {0}")]
    Resolution(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
