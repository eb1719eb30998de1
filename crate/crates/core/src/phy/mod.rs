//! Numeric building blocks shared by the transmitter and receiver.

mod config;
mod constellation;
pub(crate) mod fft;
mod sequence;
pub(crate) mod symbol;

pub use config::{OfdmConfig, SUPPORTED_OVERCLOCK};
pub use constellation::{Constellation, Modulation};
pub use fft::{fft, ifft};
pub use sequence::{ComplexSequence, Domain};
pub use symbol::{assemble_symbol, disassemble_grid, populate_grid};
