use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dispersion model itself is ill-formed at the requested point.
    #[error("model error: {0}")]
    Model(String),

    #[error("no phase matching: {0}")]
    NoPhaseMatching(String),

    /// A wavevector component became imaginary.
    #[error("evanescent wavevector: {0}")]
    Evanescent(String),

    /// All amplitudes on the grid vanish.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// The requested OAM window cannot be resolved by the azimuthal grid.
    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("registry error: {0}")]
    Registry(String),
}

impl Error {
    /// Whether the error stems from an iterative method failing to converge.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::Fit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
