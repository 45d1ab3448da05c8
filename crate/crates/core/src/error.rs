use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty factor list")]
    EmptyFactors,

    #[error("register of {parties} parties is not supported (1 to 3 qubits)")]
    UnsupportedRegister { parties: usize },

    #[error("amplitude vector of length {len} is not a power of two")]
    BadDimension { len: usize },

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("shape mismatch: expected dimension {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("party set {mask:#05b} is not valid here: {reason}")]
    InvalidParties { mask: u8, reason: &'static str },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("invalid projector: {reason}")]
    InvalidProjector { reason: String },

    #[error("vectors are not orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("input vector {index} is linearly dependent on its predecessors")]
    LinearlyDependent { index: usize },

    #[error("state is orthogonal to the subspace (weight {weight:e})")]
    OrthogonalToSubspace { weight: f64 },

    #[error("unknown reference state `{0}`")]
    UnknownState(String),

    #[error("no restart converged within {max_iterations} iterations (best value {best_value})")]
    NotConverged { best_value: f64, max_iterations: usize },

    #[error("invalid optimizer options: {0}")]
    InvalidOptions(&'static str),

    #[error("grid of {evaluations} evaluations rejected: {reason}")]
    GridRejected { evaluations: f64, reason: &'static str },

    #[error("concurrence radicand {radicand:e} is negative beyond rounding")]
    NegativeRadicand { radicand: f64 },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("family is degenerate (extendible): {0}")]
    DegenerateFamily(&'static str),

    #[error("biseparable basis not found at resolution {theta_points}x{phi_points}: {reason}")]
    NotFoundAtResolution {
        theta_points: usize,
        phi_points: usize,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
