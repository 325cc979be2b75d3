use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gamma pole at non-positive integer {0}")]
    Pole(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("no sign change in level bracket ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("singular denominator at beta = {0}")]
    SingularDenominator(f64),

    #[error("integration step underflow: {0}")]
    StepUnderflow(String),

    #[error("reflected packet too dispersed to localize: width {width} > {limit}")]
    PacketDispersion { width: f64, limit: f64 },
}
