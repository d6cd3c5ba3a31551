use num_complex::Complex64;
use thiserror::Error;

use crate::qsys::PrVerdict;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A linear operator was singular or nearly so. `pair` carries the two
    /// spectral values whose sum (or difference) vanished.
    #[error("singular operator in {context}: eigenvalue pair ({}, {})", pair.0, pair.1)]
    Singular { context: String, pair: (Complex64, Complex64) },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("system is not internally stable: {0}")]
    Unstable(String),

    #[error("norm is infinite: {0}")]
    InfiniteNorm(String),

    #[error("not augmentable (residual {residual:.3e}): {detail}")]
    NotAugmentable { residual: f64, detail: String },

    #[error("not physically realizable: {0}")]
    NotRealizable(String),

    #[error("system is not physically realizable ({})", .0.reason_text())]
    NotPhysicallyRealizable(Box<PrVerdict>),

    #[error("random generation failed: {0}")]
    Generation(String),

    #[error("filter design failed: {0}")]
    Design(String),

    #[error("feedback loop is ill-posed: {0}")]
    IllPosed(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
