use thiserror::Error;

/// Errors raised by the matrix core, the tensor layer and the probes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("matrix is not Hermitian: worst entry ({row}, {col}) deviates by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e} below tolerance {tolerance:e}")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("singular matrix (min eigenvalue {min_eigenvalue:e}) cannot be raised to power {power}")]
    Singular { min_eigenvalue: f64, power: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("group size for N = {n} exceeds the enumeration cap N_max = {max}")]
    Capacity { n: usize, max: usize },

    #[error("zero marginal: the partial trace vanishes")]
    ZeroMarginal,

    #[error("search failed after {attempts} attempts: best gap {best_gap:e}")]
    SearchFailed { attempts: usize, best_gap: f64 },

    #[error("no positive midpoint margin on the (lambda, t) grid (best {best_margin:e})")]
    ConstructionFailed {
        best_margin: f64,
        scan: Vec<(f64, f64, f64)>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
