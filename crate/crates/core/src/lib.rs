//! Baseband OFDM physical-layer simulator built around an *overclocked*
//! receiver.
//!
//! The transmitter and channel run at the base sample rate of an
//! 802.11ah-style 2 MHz, 64-subcarrier OFDM link. The receiver samples the
//! same waveform `G` times faster. Each of the `G` polyphase copies of a
//! symbol is a fractionally time-shifted view of the base-rate signal, so
//! after FFT the copies differ only by a known per-subcarrier phase ramp.
//! Undoing that ramp and averaging the copies lowers the noise floor. The
//! oversampled long training field is also a sharper timing reference.
//!
//! Module map:
//!
//! * [`phy`]: constellations, FFT, OFDM symbol assembly.
//! * [`transmitter`]: preamble generation, frame building, band-limited upsampling.
//! * [`channel`]: multipath, carrier frequency offset, calibrated noise.
//! * [`receiver`]: detection, timing sync, CFO estimation, copy combining,
//!   demapping, plus the standard 1x baseline receiver.
//! * [`harness`]: Monte Carlo trials and sweeps, IQ captures, result files.

pub mod channel;
pub mod error;
pub mod harness;
pub mod phy;
pub mod receiver;
pub mod transmitter;

pub use error::{Error, Result};
pub use num_complex::Complex64;
