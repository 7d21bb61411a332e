use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown basis letter `{0}` (expected one of H, V, +, -, R, L)")]
    UnknownBasisLetter(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mode `{0}` appears in both operands")]
    OverlappingModes(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode sets differ: {left:?} vs {right:?}")]
    MismatchedModes { left: Vec<String>, right: Vec<String> },

    #[error("register of {0} qubits exceeds the supported maximum")]
    RegisterTooLarge(usize),

    #[error("operator is not a Hermitian idempotent projector (deviation {0:e})")]
    NotAProjector(f64),

    #[error("post-selection left an empty state (probability {0:e})")]
    EmptyPostSelection(f64),

    #[error("no preparation configuration reproduces the target state")]
    CalibrationFailed,

    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),

    #[error("outcome probabilities do not form a distribution: {0:?}")]
    InvalidDistribution([f64; 4]),

    #[error("correlation undefined for zero total counts")]
    ZeroCounts,

    #[error("fit needs at least 4 distinct angles, got {0}")]
    TooFewAngles(usize),

    #[error("degenerate fringe fit (no modulation or zero mean)")]
    DegenerateFit,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
