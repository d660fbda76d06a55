use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An angle or parameter outside the range where the quantity is defined.
    /// Bounds are reported in degrees.
    #[error("{quantity} = {value_deg}° is outside the valid range [{min_deg}°, {max_deg}°]")]
    Domain {
        quantity: &'static str,
        value_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    /// Inputs that are individually valid but inconsistent with each other.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(&'static str),

    #[error("invalid run configuration: {0}")]
    Run(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
