//! Moving 3/2-singularities: germ inversion and transfer, and numeric
//! estimation of singularities and central-limit parameters from long series.

mod clt;
mod estimate;
mod germ;

use thiserror::Error;

pub use clt::{clt_params, mean_limit, mean_per_size, CltParams, DEFAULT_STEP};
pub use estimate::{estimate_singularity, germ_from_coefficients, SingularityEstimate, GERM_FIT_TERMS};
pub use germ::{invert_germ, transfer, Local, Scalar, SingularGerm, Transfer};

#[derive(Debug, Error)]
pub enum SingularError {
    #[error("degenerate germ: {0}")]
    Degenerate(String),
    #[error("{0} has no exact representation in this scalar type")]
    Inexact(String),
    #[error("series too short: {have} coefficients, at least {need} required")]
    TooShort { have: usize, need: usize },
    #[error("coefficient of z^{0} is not positive")]
    NonPositive(usize),
    #[error("estimator spread {spread:e} exceeds tolerance {tol:e}")]
    Spread { spread: f64, tol: f64 },
    #[error("negative variance estimate {0:e}")]
    NegativeVariance(f64),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}
