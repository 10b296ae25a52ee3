use thiserror::Error;

use crate::sdof_theory::AntennaConfig;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("antenna counts must be positive, got {0}")]
    InvalidAntennas(AntennaConfig),

    #[error("{what} is only defined for m > max(nA, nB), got {cfg}")]
    OutOfTheoremRange { what: &'static str, cfg: AntennaConfig },

    #[error("scheme {kind} does not support {cfg}")]
    UnsupportedConfig { kind: &'static str, cfg: AntennaConfig },

    #[error("slot {slot} is out of range for a realization of {len} slots")]
    SlotOutOfRange { slot: usize, len: usize },

    #[error("empty slot range")]
    EmptySlotRange,

    #[error("realization has {available} slots but the scheme needs {needed}")]
    RealizationTooShort { needed: usize, available: usize },

    #[error("realization was drawn for {found}, scheme needs {expected}")]
    ConfigMismatch {
        expected: AntennaConfig,
        found: AntennaConfig,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid SNR grid: {0}")]
    InvalidGrid(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("scheme {kind} carries no message for receiver {message}")]
    NoSuchMessage { kind: &'static str, message: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
