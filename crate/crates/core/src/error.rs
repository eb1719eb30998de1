use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid OFDM configuration: {0}")]
    InvalidConfig(String),

    #[error("partial symbol: {bits} bits is not a multiple of {bits_per_symbol}")]
    PartialSymbol { bits: usize, bits_per_symbol: usize },

    #[error("FFT length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unsupported overclock factor {0} (expected 1, 2, 4 or 8)")]
    UnsupportedOverclock(usize),

    #[error("empty payload")]
    EmptyPayload,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("invalid channel scenario: {0}")]
    InvalidScenario(String),

    #[error("sync search window overruns the capture ({needed} samples needed, {available} available)")]
    SyncWindow { needed: usize, available: usize },

    #[error("degenerate symbol: CFO objective is not finite")]
    DegenerateSymbol,

    #[error("pilot erasure: pilot energy below threshold")]
    PilotErasure,

    #[error("not an IQ capture")]
    NotIqCapture,

    #[error("unsupported IQ capture version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated IQ capture: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
