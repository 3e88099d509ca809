pub mod error;
pub mod pauli;

pub use error::{Error, Result};
pub use pauli::{conjugate, Gate, GateKind, Pauli};
pub mod statevec;
pub mod tableau;
pub mod codes;
pub mod circuits;
pub mod noise;
pub mod protocol;
