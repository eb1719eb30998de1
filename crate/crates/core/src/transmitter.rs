//! Frame construction at the base rate, and the exact oversampled waveform
//! an overclocked receiver would observe.
//!
//! The oversampled waveform is built field by field: every OFDM symbol (and
//! each training field) is a trigonometric polynomial over its own span, so
//! sampling it `G` times faster is a zero-padded IFFT of the symbol's core
//! followed by the cyclic extension. Interpolating the whole frame at once
//! would smear energy across symbol boundaries.

use num_complex::Complex64;

use crate::phy::fft::{fft_any, ifft_any};
use crate::phy::{populate_grid, symbol::with_cyclic_prefix, Constellation, Modulation, OfdmConfig};
use crate::{Error, Result};

/// Base-rate samples in the short training field (ten 16-sample repetitions).
pub const STF_LEN: usize = 160;
/// Base-rate samples in the long training field (32-sample guard plus two symbols).
pub const LTF_LEN: usize = 160;
pub const LTF_GUARD: usize = 32;
pub const STF_PERIOD: usize = 16;
pub const PREAMBLE_LEN: usize = STF_LEN + LTF_LEN;

const L_STF: [(i32, f64); 12] = [
    (-24, 1.0),
    (-20, -1.0),
    (-16, 1.0),
    (-12, -1.0),
    (-8, -1.0),
    (-4, 1.0),
    (4, -1.0),
    (8, -1.0),
    (12, 1.0),
    (16, 1.0),
    (20, 1.0),
    (24, 1.0),
];

// subcarriers -28..=28, DC included as 0
const HT_LTF: [f64; 57] = [
    1., 1.,
    1., 1., -1., -1., 1., 1., -1., 1., -1., 1., 1., 1., 1., 1., 1., -1., -1., 1., 1., -1., 1., -1.,
    1., 1., 1., 1., 0., 1., -1., -1., 1., 1., -1., 1., -1., 1., -1., -1., -1., -1., -1., 1., 1., -1.,
    -1., 1., -1., 1., -1., 1., 1., 1., 1., -1., -1.,
];

/// 802.11 training sequences on a 64-bin grid: the legacy short field and
/// the 56-bin high-throughput long field.
#[derive(Debug, Clone, PartialEq)]
pub struct PreambleSpec {
    pub stf_freq: Vec<Complex64>,
    pub ltf_freq: Vec<Complex64>,
    pub stf_repetitions: usize,
    pub ltf_symbols: usize,
}

impl PreambleSpec {
    pub fn standard(cfg: &OfdmConfig) -> Self {
        let f = cfg.num_subcarriers;
        let scale = (13.0f64 / 6.0).sqrt();
        let mut stf_freq = vec![Complex64::new(0.0, 0.0); f];
        for &(l, s) in &L_STF {
            stf_freq[cfg.bin(l)] = Complex64::new(s, s) * scale;
        }
        let mut ltf_freq = vec![Complex64::new(0.0, 0.0); f];
        for (i, &v) in HT_LTF.iter().enumerate() {
            ltf_freq[cfg.bin(i as i32 - 28)] = Complex64::new(v, 0.0);
        }
        Self {
            stf_freq,
            ltf_freq,
            stf_repetitions: 10,
            ltf_symbols: 2,
        }
    }
}

/// Band-limited interpolation by `g`: the spectrum of `x` is zero-padded at
/// its midpoint (the Nyquist bin split evenly for even lengths) and
/// transformed back at `g` times the length. Every `g`-th output sample
/// reproduces the input.
pub fn upsample_bandlimited(x: &[Complex64], g: usize) -> Result<Vec<Complex64>> {
    if !crate::phy::SUPPORTED_OVERCLOCK.contains(&g) {
        return Err(Error::UnsupportedOverclock(g));
    }
    if g == 1 || x.is_empty() {
        return Ok(x.to_vec());
    }
    let n = x.len();
    let spec = fft_any(x);
    let m = n * g;
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let pos = n.div_ceil(2); // bins 0..pos are non-negative frequencies
    if n.is_multiple_of(2) {
        let half = n / 2;
        padded[..half].copy_from_slice(&spec[..half]);
        padded[half] = spec[half] * 0.5;
        padded[m - half] = spec[half] * 0.5;
        padded[m - half + 1..].copy_from_slice(&spec[half + 1..]);
    } else {
        padded[..pos].copy_from_slice(&spec[..pos]);
        padded[m - (n - pos)..].copy_from_slice(&spec[pos..]);
    }
    let mut out = ifft_any(&padded);
    let scale = g as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// Time-domain core (no prefix) of a grid, sampled at `g` times the base rate.
fn oversampled_core(grid: &[Complex64], g: usize) -> Result<Vec<Complex64>> {
    upsample_bandlimited(&ifft_any(grid), g)
}

fn periodic_extension(core: &[Complex64], start: usize, len: usize) -> Vec<Complex64> {
    (0..len).map(|i| core[(start + i) % core.len()]).collect()
}

/// Short training field at `g` times the base rate (`160 * g` samples).
pub fn gen_stf_at(cfg: &OfdmConfig, g: usize) -> Result<Vec<Complex64>> {
    let spec = PreambleSpec::standard(cfg);
    let core = oversampled_core(&spec.stf_freq, g)?;
    Ok(periodic_extension(&core, 0, STF_LEN * g))
}

/// Long training field at `g` times the base rate: guard (last 32 samples of
/// the symbol) followed by two copies of the 64-sample symbol.
pub fn gen_ltf_at(cfg: &OfdmConfig, g: usize) -> Result<Vec<Complex64>> {
    let spec = PreambleSpec::standard(cfg);
    let core = oversampled_core(&spec.ltf_freq, g)?;
    let f = cfg.num_subcarriers * g;
    Ok(periodic_extension(&core, f - LTF_GUARD * g, LTF_LEN * g))
}

pub fn gen_stf(cfg: &OfdmConfig) -> Vec<Complex64> {
    gen_stf_at(cfg, 1).expect("g = 1 is always supported")
}

pub fn gen_ltf(cfg: &OfdmConfig) -> Vec<Complex64> {
    gen_ltf_at(cfg, 1).expect("g = 1 is always supported")
}

/// Everything the transmitter produced for one frame, kept as ground truth.
#[derive(Debug, Clone)]
pub struct FrameBlueprint {
    /// Payload bits including the zero padding at the end.
    pub payload_bits: Vec<u8>,
    pub pad_bits: usize,
    pub scheme: Modulation,
    /// Frequency grid of every payload symbol.
    pub tx_symbols: Vec<Vec<Complex64>>,
    pub base_waveform: Vec<Complex64>,
    pub oversampled_waveform: Vec<Complex64>,
    pub overclock: usize,
}

impl FrameBlueprint {
    /// Payload bits without the padding.
    pub fn info_bits(&self) -> &[u8] {
        &self.payload_bits[..self.payload_bits.len() - self.pad_bits]
    }

    pub fn payload_symbols(&self) -> usize {
        self.tx_symbols.len()
    }

    /// Mean per-sample power of the base-rate waveform.
    pub fn base_power(&self) -> f64 {
        mean_power(&self.base_waveform)
    }
}

pub(crate) fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// STF, LTF, then one symbol per `52 * bits_per_symbol` payload bits (last
/// symbol zero-padded). Pilots are `cfg.pilot_values` on every symbol.
pub fn build_frame(bits: &[u8], scheme: Modulation, cfg: &OfdmConfig) -> Result<FrameBlueprint> {
    cfg.validate()?;
    if bits.is_empty() {
        return Err(Error::EmptyPayload);
    }
    let g = cfg.overclock;
    let constellation = Constellation::new(scheme);
    let per_symbol = cfg.data_subcarriers.len() * scheme.bits_per_symbol();
    let n_symbols = bits.len().div_ceil(per_symbol);
    let mut payload_bits = bits.to_vec();
    payload_bits.resize(n_symbols * per_symbol, 0);
    let pad_bits = payload_bits.len() - bits.len();

    let pilots: Vec<Complex64> = cfg.pilot_values.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    let frame_len = PREAMBLE_LEN + n_symbols * cfg.symbol_len();

    let mut base = Vec::with_capacity(frame_len);
    base.extend(gen_stf(cfg));
    base.extend(gen_ltf(cfg));
    let mut over = Vec::with_capacity(frame_len * g);
    over.extend(gen_stf_at(cfg, g)?);
    over.extend(gen_ltf_at(cfg, g)?);

    let mut tx_symbols = Vec::with_capacity(n_symbols);
    for chunk in payload_bits.chunks_exact(per_symbol) {
        let data = constellation.map_bits(chunk)?;
        let grid = populate_grid(&data, &pilots, cfg)?;
        let core = ifft_any(&grid);
        base.extend(with_cyclic_prefix(&core, cfg.cp_len));
        let core_g = upsample_bandlimited(&core, g)?;
        over.extend(with_cyclic_prefix(&core_g, cfg.cp_len * g));
        tx_symbols.push(grid);
    }

    Ok(FrameBlueprint {
        payload_bits,
        pad_bits,
        scheme,
        tx_symbols,
        base_waveform: base,
        oversampled_waveform: over,
        overclock: g,
    })
}
