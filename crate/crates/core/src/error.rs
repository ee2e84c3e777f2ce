use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid thermal parameters: {0}")]
    InvalidParams(String),

    #[error("invalid bath specification: {0}")]
    InvalidBath(String),

    #[error("qubit count must be at least 1")]
    EmptyRegister,

    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("two-qubit gate requires distinct qubits, got {0} twice")]
    RepeatedQubit(usize),

    #[error("{0}")]
    NonPhysical(String),

    #[error("invalid code specification: {0}")]
    InvalidCode(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("weighted estimate requires at least one record")]
    EmptyEstimate,

    #[error("records mix different gamma products ({0} vs {1})")]
    MixedGamma(f64, f64),

    #[error("shot count must be positive")]
    NoShots,

    #[error("fault dictionary guard exceeded: {detectors} detectors > {limit}")]
    TooManyDetectors { detectors: usize, limit: usize },

    #[error("detector model parse error on line {line}: {msg}")]
    DetectorModel { line: usize, msg: String },

    #[error("{0}")]
    UnknownOption(String),

    #[error("unmatched detector parity with no boundary path")]
    UnmatchedParity,
}
