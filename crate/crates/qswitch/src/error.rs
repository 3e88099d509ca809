use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
    #[error("gate {0} is not supported here")]
    UnsupportedGate(String),
    #[error("operator {0} is not Hermitian")]
    InvalidOperator(String),
    #[error("invalid stabilizer group: {0}")]
    InvalidGroup(String),
    #[error("capacity exceeded: {0} qubits (max {1})")]
    Capacity(usize, usize),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("unsupported state preparation: {0}")]
    UnsupportedState(String),
    #[error("unsupported measurement: {0}")]
    UnsupportedMeasurement(String),
    #[error("inter-block CNOT from version {0} to version {1} leaves the codespace")]
    Direction(u8, u8),
    #[error("insufficient failures for a fit: {0}")]
    InsufficientFailures(String),
    #[error("malformed circuit: {0}")]
    Circuit(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
