use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator is not an effect: {0}")]
    NotEffect(String),
    #[error("operator is not a density matrix: {0}")]
    NotState(String),
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("setting ({x}, {y}) missing from the statistics table")]
    MissingSetting { x: String, y: String },
    #[error("invalid probability table: {0}")]
    InvalidStats(String),
    #[error("invalid hidden-variable model: {0}")]
    InvalidModel(String),
    #[error("branch angle {0} is neither +pi/8 nor -pi/8")]
    InvalidBranch(f64),
    #[error("invalid state vector: {0}")]
    InvalidKet(String),
    #[error("empty or too small angle grid ({0} points)")]
    EmptyGrid(usize),
    #[error("correlation undefined: marginal variances {var_a:.3e}, {var_b:.3e}")]
    UndefinedCorrelation { var_a: f64, var_b: f64 },
}
