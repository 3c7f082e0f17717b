use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid spin J = {0}: must be a non-negative half-integer")]
    InvalidSpin(f64),
    #[error("invalid magnetic quantum number m = {m} for J = {j}")]
    InvalidProjection { j: f64, m: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state has no component in the symmetric subspace (weight {0:e})")]
    NoSymmetricComponent(f64),
    #[error("axis is not a unit vector (norm {0})")]
    NonUnitAxis(f64),
    #[error("state is not second-order anti-coherent (worst deviation {0:e})")]
    NotAntiCoherent(f64),
    #[error("small-angle expansion invalid: theta1^2 J(J+1)/3 = {0} exceeds 1")]
    SmallAngleOutOfRange(f64),
    #[error("parameter index {0} out of range (expected 1, 2 or 3)")]
    InvalidParameter(usize),
    #[error("qubit count {0} is not even")]
    OddQubitCount(usize),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("expected {expected} Bell pairs, found {found}")]
    WrongPairCount { expected: usize, found: usize },
    #[error("no Bell aggregation for {0} photons (supported: 4, 6)")]
    UnsupportedPhotonNumber(usize),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate matrix is not unitary (deviation {0:e})")]
    NonUnitaryGate(f64),
    #[error("gate qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate target {0} also appears among its controls")]
    OverlappingControls(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("{0}")]
    InvalidArgument(String),
}
