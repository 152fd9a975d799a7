use thiserror::Error;

/// Errors raised anywhere in the simulator.
///
/// Variants are grouped loosely into input/configuration problems and
/// numerical failures; [`VibError::is_numerical`] tells the two apart so the
/// CLI can pick an exit code.
#[derive(Debug, Error)]
pub enum VibError {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{qubits} qubits exceeds the dense-matrix guard of {guard}")]
    DenseGuard { qubits: usize, guard: usize },

    #[error("register of {0} qubits is wider than the 64-qubit packed limit")]
    TooManyQubits(usize),

    #[error("levels per mode must be at least 2, got {0}")]
    TooFewLevels(usize),

    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("occupation {level} of mode {mode} is not below d = {levels}")]
    OccupationOutOfRange { mode: usize, level: usize, levels: usize },

    #[error("molecule has no vibrational modes (M = {0})")]
    NoModes(i64),

    #[error("harmonic coefficient must be positive (mode {mode}, value {value})")]
    NonPositiveHarmonic { mode: usize, value: f64 },

    #[error("matrix is not orthogonal (max deviation {0:.3e})")]
    NotOrthogonal(f64),

    #[error("operator is not Hermitian (residue {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid parse input: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("gradient descent diverged after {iterations} iterations")]
    Diverged { iterations: usize, trace: Vec<crate::uvcc::VqeStep> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl VibError {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            VibError::Diverged { .. } | VibError::Numerical(_) | VibError::NotHermitian(_) | VibError::ZeroNorm
        )
    }
}

pub type Result<T> = std::result::Result<T, VibError>;
