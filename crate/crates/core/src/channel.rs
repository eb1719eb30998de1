//! Channel impairments applied to the oversampled waveform: multipath, then
//! carrier frequency offset, then receiver noise.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::phy::OfdmConfig;
use crate::transmitter::{upsample_bandlimited, FrameBlueprint, STF_LEN};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// White across the whole oversampled band: independent per sample, so
    /// the polyphase copies carry independent noise.
    Wideband,
    /// White only inside the base-rate band: a base-rate realization
    /// interpolated up by `G`, so the copies carry correlated noise.
    Brickwall,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wideband => "wideband",
            Self::Brickwall => "brickwall",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wideband" => Ok(Self::Wideband),
            "brickwall" => Ok(Self::Brickwall),
            other => Err(format!("unknown noise model '{other}'")),
        }
    }
}

/// Named multipath profiles. Delays are whole base-rate samples so the same
/// physical channel is used at every overclock factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TapPreset {
    Flat,
    TwoRay,
    Indoor,
}

impl TapPreset {
    fn profile(self) -> Vec<(usize, Complex64)> {
        match self {
            Self::Flat => vec![(0, Complex64::new(1.0, 0.0))],
            Self::TwoRay => vec![(0, Complex64::new(0.9, 0.0)), (1, Complex64::new(0.0, 0.435))],
            Self::Indoor => vec![
                (0, Complex64::new(1.0, 0.0)),
                (1, Complex64::from_polar(0.61, 2.1)),
                (2, Complex64::from_polar(0.37, -0.8)),
                (3, Complex64::from_polar(0.22, 1.3)),
                (5, Complex64::from_polar(0.08, -2.6)),
            ],
        }
    }

    /// Unnormalized taps at `g` times the base rate.
    pub fn taps(self, g: usize) -> Vec<Complex64> {
        let profile = self.profile();
        let len = profile.iter().map(|(d, _)| d * g).max().unwrap_or(0) + 1;
        let mut taps = vec![Complex64::new(0.0, 0.0); len];
        for (d, h) in profile {
            taps[d * g] = h;
        }
        taps
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::TwoRay => "two-ray",
            Self::Indoor => "indoor",
        }
    }
}

impl fmt::Display for TapPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TapPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "flat" | "awgn" => Ok(Self::Flat),
            "two-ray" => Ok(Self::TwoRay),
            "indoor" => Ok(Self::Indoor),
            other => Err(format!("unknown tap preset '{other}'")),
        }
    }
}

/// Impairments for one capture. `snr_db = +inf` means no noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScenario {
    taps: Vec<Complex64>,
    pub cfo_hz: f64,
    /// Noise-only samples (at the oversampled rate) ahead of the frame.
    pub timing_offset: usize,
    pub snr_db: f64,
    pub noise_model: NoiseModel,
    pub seed: u64,
}

impl ChannelScenario {
    /// Taps are normalized to unit energy.
    pub fn new(
        taps: Vec<Complex64>,
        cfo_hz: f64,
        timing_offset: usize,
        snr_db: f64,
        noise_model: NoiseModel,
        seed: u64,
    ) -> Result<Self> {
        let energy: f64 = taps.iter().map(|h| h.norm_sqr()).sum();
        if taps.is_empty() || !(energy.is_finite() && energy > 0.0) {
            return Err(Error::InvalidScenario("taps must have nonzero finite energy".into()));
        }
        if snr_db.is_nan() {
            return Err(Error::InvalidScenario("SNR is NaN".into()));
        }
        if !cfo_hz.is_finite() {
            return Err(Error::InvalidScenario("CFO must be finite".into()));
        }
        let scale = energy.sqrt().recip();
        Ok(Self {
            taps: taps.into_iter().map(|h| h * scale).collect(),
            cfo_hz,
            timing_offset,
            snr_db,
            noise_model,
            seed,
        })
    }

    /// Flat channel, no CFO, no offset, no noise.
    pub fn ideal() -> Self {
        Self::new(
            vec![Complex64::new(1.0, 0.0)],
            0.0,
            0,
            f64::INFINITY,
            NoiseModel::Wideband,
            0,
        )
        .expect("ideal scenario is valid")
    }

    pub fn with_timing_offset(mut self, samples: usize) -> Self {
        self.timing_offset = samples;
        self
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn validate(&self, cfg: &OfdmConfig) -> Result<()> {
        let nyquist = cfg.oversampled_rate_hz() / 2.0;
        if self.cfo_hz.abs() >= nyquist {
            return Err(Error::InvalidScenario(format!(
                "CFO {} Hz outside +-{nyquist} Hz",
                self.cfo_hz
            )));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Per-sample noise variance for a signal of mean power `signal_power`.
    pub fn noise_variance(&self, signal_power: f64) -> f64 {
        if self.is_noiseless() {
            0.0
        } else {
            signal_power / 10f64.powf(self.snr_db / 10.0)
        }
    }
}

/// Linear convolution, truncated to the input length.
pub fn apply_multipath(x: &[Complex64], taps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
    for (k, &h) in taps.iter().enumerate() {
        if h == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &v) in out[k.min(x.len())..].iter_mut().zip(x) {
            *o += h * v;
        }
    }
    out
}

/// Multiplies sample `n` by `e^{j 2 pi cfo n / rate}`.
pub fn apply_cfo(x: &[Complex64], cfo_hz: f64, rate_hz: f64) -> Vec<Complex64> {
    if cfo_hz == 0.0 {
        return x.to_vec();
    }
    let w = 2.0 * std::f64::consts::PI * cfo_hz / rate_hz;
    x.iter()
        .enumerate()
        .map(|(n, &v)| v * Complex64::from_polar(1.0, w * n as f64))
        .collect()
}

fn complex_gaussian(rng: &mut ChaCha8Rng, n: usize, variance: f64) -> Vec<Complex64> {
    let sd = (variance / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sd, im * sd)
        })
        .collect()
}

/// Noise for a stream of `len` samples at `g` times the base rate, with
/// per-sample variance `variance` under either model.
pub fn noise_realization(
    len: usize,
    variance: f64,
    model: NoiseModel,
    g: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if variance == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); len]);
    }
    match model {
        NoiseModel::Wideband => Ok(complex_gaussian(&mut rng, len, variance)),
        NoiseModel::Brickwall => {
            let base = complex_gaussian(&mut rng, len.div_ceil(g), variance);
            let mut up = upsample_bandlimited(&base, g)?;
            up.truncate(len);
            Ok(up)
        }
    }
}

/// Adds noise calibrated against `signal_power`, the mean per-sample power
/// of the base-rate (polyphase-0) signal. Deterministic under the scenario seed.
pub fn add_noise(
    x: &[Complex64],
    scenario: &ChannelScenario,
    signal_power: f64,
    g: usize,
) -> Result<Vec<Complex64>> {
    let variance = scenario.noise_variance(signal_power);
    if variance == 0.0 {
        return Ok(x.to_vec());
    }
    let noise = noise_realization(x.len(), variance, scenario.noise_model, g, scenario.seed)?;
    Ok(x.iter().zip(noise).map(|(a, b)| a + b).collect())
}

/// A received oversampled stream plus the bookkeeping needed to score it.
#[derive(Debug, Clone)]
pub struct Capture {
    pub samples: Vec<Complex64>,
    pub overclock: usize,
    pub sample_rate_hz: f64,
    /// Frame start in base-rate samples (fractional after decimation).
    pub frame_start_base: f64,
    /// Per-sample noise variance, 0 for a noiseless capture.
    pub noise_variance: f64,
}

impl Capture {
    /// True start of the long training field in base-rate samples.
    pub fn ltf_start_base(&self) -> f64 {
        self.frame_start_base + STF_LEN as f64
    }

    /// Keeps every `factor`-th sample: the capture an ADC running `factor`
    /// times slower would have produced from the same analog signal.
    pub fn decimate(&self, factor: usize) -> Result<Capture> {
        if factor == 0 || !self.overclock.is_multiple_of(factor) {
            return Err(Error::UnsupportedOverclock(factor));
        }
        Ok(Capture {
            samples: self.samples.iter().step_by(factor).copied().collect(),
            overclock: self.overclock / factor,
            sample_rate_hz: self.sample_rate_hz / factor as f64,
            frame_start_base: self.frame_start_base,
            noise_variance: self.noise_variance,
        })
    }
}

/// Runs the oversampled waveform of `bp` through `scenario`: `timing_offset`
/// leading samples, multipath, CFO, then noise over the whole stream. A tail
/// of at least 80 base samples is appended and the length is rounded up to a
/// multiple of the overclock factor.
pub fn apply_scenario(
    bp: &FrameBlueprint,
    scenario: &ChannelScenario,
    cfg: &OfdmConfig,
) -> Result<Capture> {
    scenario.validate(cfg)?;
    let g = bp.overclock;
    if g != cfg.overclock {
        return Err(Error::InvalidScenario(format!(
            "blueprint built at {g}x, config says {}x",
            cfg.overclock
        )));
    }
    let lead = scenario.timing_offset;
    let tail = g * cfg.symbol_len() + (g - lead % g) % g;
    let zero = Complex64::new(0.0, 0.0);
    let mut stream = Vec::with_capacity(lead + bp.oversampled_waveform.len() + tail);
    stream.resize(lead, zero);
    stream.extend_from_slice(&bp.oversampled_waveform);
    stream.resize(stream.len() + tail, zero);

    let rate = cfg.oversampled_rate_hz();
    let faded = apply_multipath(&stream, &scenario.taps);
    let rotated = apply_cfo(&faded, scenario.cfo_hz, rate);
    let p_sig = bp.base_power();
    let samples = add_noise(&rotated, scenario, p_sig, g)?;
    Ok(Capture {
        samples,
        overclock: g,
        sample_rate_hz: rate,
        frame_start_base: lead as f64 / g as f64,
        noise_variance: scenario.noise_variance(p_sig),
    })
}
