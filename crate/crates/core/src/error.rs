use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("argument outside the representable range: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("parameters violate the convergence condition: {0}")]
    Convergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("time {t} not covered by the sampled profile (max {max})")]
    ProfileRange { t: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
