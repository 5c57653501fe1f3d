use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate cubic: leading coefficient is zero")]
    DegenerateCubic,

    #[error("branch selection failed at z = {z}: no root with nonnegative imaginary part among {roots:?}")]
    BranchSelection { z: Complex64, roots: [Complex64; 3] },

    #[error("unexpected spectral topology: {count} positive discriminant roots {roots:?} for (px, py) = ({px}, {py})")]
    EdgeTopology {
        px: f64,
        py: f64,
        count: usize,
        roots: Vec<f64>,
    },

    #[error("negative abscissa {value} at index {index} cannot be mapped to a singular value")]
    NegativeAbscissa { index: usize, value: f64 },

    #[error("invalid density curve: {0}")]
    InvalidCurve(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("realization {index} failed: {source}")]
    Realization { index: usize, source: Box<Error> },

    #[error("memory budget of {budget} bytes cannot hold {required} bytes even at block size 1")]
    MemoryBudget { budget: usize, required: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
