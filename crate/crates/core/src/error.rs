use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KicError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel spec is not additive")]
    NotAdditive,

    #[error("gram matrix was built from a precomputed matrix and has no training inputs")]
    NoTrainingInputs,

    #[error(
        "cholesky factorization of K + alpha*I failed (n = {n}, alpha = {alpha:e}, \
         trace(K)/n = {mean_diag:e}, last jitter tried = {jitter:e}, failing pivot {pivot})"
    )]
    Factorization {
        n: usize,
        alpha: f64,
        mean_diag: f64,
        jitter: f64,
        pivot: usize,
    },

    #[error("{routine} did not converge in {iterations} iterations")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("degenerate root problem: {0}")]
    DegenerateRoot(String),

    #[error("leave-one-out denominator 1 - H[{index},{index}] = {value:e} is too close to zero")]
    DegenerateLeverage { index: usize, value: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("component grams do not sum to the full gram (max abs deviation {0:e})")]
    ComponentMismatch(f64),

    #[error("every cell of the {criterion} surface is invalid")]
    EmptySurface { criterion: String },

    #[error("selection results come from different grids")]
    GridMismatch,

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = KicError> = std::result::Result<T, E>;
