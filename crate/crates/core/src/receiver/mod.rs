//! Packet reception at `G` times the base rate, and the standard 1x
//! receiver it is compared against.
//!
//! Copy `g` of a symbol is the FFT window that starts `g` oversampled
//! samples before copy 0's window. Its spectrum is copy 0's times
//! `e^{-j 2 pi g l / (64 G)}` on signed subcarrier `l`.

mod cfo;
mod detect;
mod equalize;
mod polyphase;
mod sync;

pub use cfo::{cfo_objective, estimate_cfo_coarse, estimate_cfo_fine};
pub use detect::{calibrate_energy_threshold, detect_packet, DetectorConfig, ENERGY_THRESHOLD};
pub use equalize::{
    combine_copies, compensate_overclock_phase, estimate_channel, track_pilot_phase,
    ChannelEstimate, Combining,
};
pub use polyphase::{delayed_windows, polyphase_split, PolyphaseSet};
pub use sync::{sync_timing, SyncResult};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::apply_cfo;
use crate::phy::fft::fft_any;
use crate::phy::{Constellation, Modulation, OfdmConfig};
use crate::transmitter::{gen_ltf_at, PreambleSpec, LTF_GUARD, LTF_LEN, STF_LEN};
use crate::{Error, Result};

/// What to do with the fine CFO estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FineCfo {
    /// Skip the search.
    Off,
    /// Search and report, keep the coarse correction.
    #[default]
    Report,
    /// Search and re-compensate the stream with the fine estimate.
    Apply,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverConfig {
    pub detector: DetectorConfig,
    pub combining: Combining,
    /// Base samples the FFT window is moved back into the cyclic prefix.
    pub fft_backoff: usize,
    /// Slack added on both sides of the timing search, base samples. The
    /// plateau metric is normalized by the older window only, so at high SNR
    /// a run can start in the noise ahead of the frame; 64 covers that with
    /// room to spare while the true peak still dominates the +-64 repeats.
    pub sync_margin: usize,
    pub fine_cfo: FineCfo,
    pub fine_cfo_range_hz: f64,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            combining: Combining::Uniform,
            fft_backoff: 2,
            sync_margin: 64,
            fine_cfo: FineCfo::default(),
            fine_cfo_range_hz: 2000.0,
        }
    }
}

impl ReceiverConfig {
    pub fn with_noise_floor(mut self, noise_floor: f64) -> Self {
        self.detector.noise_floor = noise_floor;
        self
    }
}

/// Frame parameters agreed out of band (there is no signal field).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameFormat {
    pub scheme: Modulation,
    pub payload_symbols: usize,
}

/// What the simulator knows about the transmitted frame.
#[derive(Debug, Clone, Copy)]
pub struct GroundTruth<'a> {
    /// Payload bits without padding.
    pub bits: &'a [u8],
    /// Start of the long training field in base samples.
    pub ltf_start_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RxDiagnostics {
    pub overclock: usize,
    pub missed: bool,
    /// Detection index on the base-rate stream.
    pub detect_index: Option<usize>,
    /// Start of the long training field in stream samples.
    pub sync_index: Option<usize>,
    /// `sync_index / G` minus the true start, base samples.
    pub sync_error: Option<f64>,
    pub cfo_coarse_hz: f64,
    pub cfo_fine_hz: f64,
    /// The estimate the stream was actually corrected with.
    pub cfo_applied_hz: f64,
    pub decoded_bits: Vec<u8>,
    pub bit_errors: Option<usize>,
    pub ber: Option<f64>,
    pub per_copy_evm: Vec<f64>,
}

impl RxDiagnostics {
    fn missed(g: usize, truth: Option<GroundTruth>) -> Self {
        Self {
            overclock: g,
            missed: true,
            detect_index: None,
            sync_index: None,
            sync_error: None,
            cfo_coarse_hz: 0.0,
            cfo_fine_hz: 0.0,
            cfo_applied_hz: 0.0,
            decoded_bits: Vec::new(),
            bit_errors: truth.map(|t| t.bits.len()),
            ber: truth.map(|_| 1.0),
            per_copy_evm: Vec::new(),
        }
    }
}

/// Blanks what an ADC that starts at the base rate and switches to `G`
/// times the rate after detecting a packet would not have sampled: every
/// non-zero polyphase sample before the switch, and everything during it.
pub fn apply_clock_switch(
    stream: &[Complex64],
    detect_index: usize,
    det: &DetectorConfig,
    cfg: &OfdmConfig,
) -> Vec<Complex64> {
    let g = cfg.overclock;
    if g == 1 {
        return stream.to_vec();
    }
    let done = det.completion_index(detect_index);
    let resume = (done + 1 + det.latency_samples(cfg.base_rate_hz)) * g;
    let zero = Complex64::new(0.0, 0.0);
    stream
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i >= resume || (i % g == 0 && i / g <= done) {
                v
            } else {
                zero
            }
        })
        .collect()
}

/// Compensated spectra of the `G` copies of the 64-sample window starting
/// `start` samples into `stream`.
fn copy_spectra(stream: &[Complex64], start: usize, cfg: &OfdmConfig) -> Result<Vec<Vec<Complex64>>> {
    let g = cfg.overclock;
    let windows = delayed_windows(stream, start, cfg.num_subcarriers, g)?;
    Ok(windows
        .iter()
        .enumerate()
        .map(|(p, w)| compensate_overclock_phase(&fft_any(w), p, g))
        .collect())
}

fn rms_error(samples: &[Complex64], refs: &[Complex64]) -> f64 {
    let s: f64 = samples.iter().zip(refs).map(|(a, b)| (a - b).norm_sqr()).sum();
    (s / samples.len().max(1) as f64).sqrt()
}

/// Full overclocked pipeline on an oversampled stream (`cfg.overclock`
/// times the base rate).
pub fn receive_frame(
    stream: &[Complex64],
    cfg: &OfdmConfig,
    rx: &ReceiverConfig,
    format: FrameFormat,
    truth: Option<GroundTruth>,
) -> Result<RxDiagnostics> {
    cfg.validate()?;
    rx.detector.validate(cfg.base_rate_hz)?;
    let g = cfg.overclock;
    let fs = cfg.base_rate_hz;
    let base = polyphase_split(stream, g)?.into_copies().swap_remove(0);

    let Some(det) = detect_packet(&base, &rx.detector) else {
        return Ok(RxDiagnostics::missed(g, truth));
    };
    let switched = apply_clock_switch(stream, det, &rx.detector, cfg);

    // The detector fires between (about) the STF start and the latest
    // start that still completes inside the STF repetitions it may use.
    let d = &rx.detector;
    let latest = (d.stf_reps_used * crate::transmitter::STF_PERIOD)
        .saturating_sub(d.completion_index(0) + 1);
    let lo = (det + STF_LEN).saturating_sub(latest + rx.sync_margin) * g;
    let hi = (det + STF_LEN + rx.sync_margin) * g;
    let template = gen_ltf_at(cfg, g)?;
    let sync = sync_timing(&switched, &template, lo..=hi, g)?;
    let lag = sync.lag;

    let ltf_base: Vec<Complex64> = (0..LTF_LEN).map(|n| switched[lag + n * g]).collect();
    let cfo_coarse_hz = estimate_cfo_coarse(&ltf_base, fs);

    let f = cfg.num_subcarriers;
    let back = rx.fft_backoff;
    let payload_start = lag + (LTF_LEN + cfg.cp_len - back) * g;
    let cfo_fine_hz = match rx.fine_cfo {
        FineCfo::Off => cfo_coarse_hz,
        _ if g == 1 => cfo_coarse_hz,
        _ => {
            let copies = delayed_windows(&switched, payload_start, f, g)?;
            estimate_cfo_fine(&copies, cfo_coarse_hz, fs, rx.fine_cfo_range_hz)?
        }
    };
    let applied = if rx.fine_cfo == FineCfo::Apply { cfo_fine_hz } else { cfo_coarse_hz };
    let y = apply_cfo(&switched, -applied, cfg.oversampled_rate_hz());

    let preamble = PreambleSpec::standard(cfg);
    let mut ltf_spectra = vec![Vec::with_capacity(2); g];
    for sym in 0..2 {
        let start = lag + (LTF_GUARD + sym * f - back) * g;
        for (p, spec) in copy_spectra(&y, start, cfg)?.into_iter().enumerate() {
            ltf_spectra[p].push(spec);
        }
    }
    let est = estimate_channel(&ltf_spectra, &preamble.ltf_freq, cfg);
    let occupied = cfg.occupied_bins();
    if occupied.iter().any(|&b| !est.h_hat[b].is_finite() || est.h_hat[b].norm() == 0.0) {
        return Err(Error::DegenerateSymbol);
    }
    let weights = rx.combining.weights(&est);

    let constellation = Constellation::new(format.scheme);
    let data_bins = cfg.data_bins();
    let sym_len = cfg.symbol_len();
    let mut decoded_bits = Vec::with_capacity(format.payload_symbols * data_bins.len() * format.scheme.bits_per_symbol());
    let mut copy_err = vec![0.0; g];
    let mut decided_count = 0usize;
    for m in 0..format.payload_symbols {
        let spectra = copy_spectra(&y, payload_start + m * sym_len * g, cfg)?;
        let combined = combine_copies(&spectra, &weights);
        let (tracked, theta) = track_pilot_phase(&combined, &est.h_hat, cfg)?;
        let eq: Vec<Complex64> = data_bins.iter().map(|&b| tracked[b] / est.h_hat[b]).collect();
        let labels: Vec<usize> = eq.iter().map(|&z| constellation.demap_nearest(z)).collect();
        let decided: Vec<Complex64> = labels.iter().map(|&l| constellation.point(l)).collect();
        for &l in &labels {
            constellation.push_label_bits(l, &mut decoded_bits);
        }
        let rot = Complex64::from_polar(1.0, -theta);
        for (p, spec) in spectra.iter().enumerate() {
            let z: Vec<Complex64> = data_bins.iter().map(|&b| spec[b] * rot / est.h_hat[b]).collect();
            copy_err[p] += rms_error(&z, &decided).powi(2) * z.len() as f64;
        }
        decided_count += data_bins.len();
    }
    let per_copy_evm = copy_err
        .iter()
        .map(|e| (e / decided_count.max(1) as f64).sqrt())
        .collect();

    let (bit_errors, ber, sync_error) = match truth {
        Some(t) => {
            let errors = t
                .bits
                .iter()
                .zip(&decoded_bits)
                .filter(|(a, b)| a != b)
                .count()
                + t.bits.len().saturating_sub(decoded_bits.len());
            let ber = if t.bits.is_empty() { 0.0 } else { errors as f64 / t.bits.len() as f64 };
            (Some(errors), Some(ber), Some(lag as f64 / g as f64 - t.ltf_start_base))
        }
        None => (None, None, None),
    };

    Ok(RxDiagnostics {
        overclock: g,
        missed: false,
        detect_index: Some(det),
        sync_index: Some(lag),
        sync_error,
        cfo_coarse_hz,
        cfo_fine_hz,
        cfo_applied_hz: applied,
        decoded_bits,
        bit_errors,
        ber,
        per_copy_evm,
    })
}

/// The standard receiver: the same pipeline on polyphase copy 0 only, at the
/// base rate.
pub fn receive_frame_baseline(
    stream: &[Complex64],
    cfg: &OfdmConfig,
    rx: &ReceiverConfig,
    format: FrameFormat,
    truth: Option<GroundTruth>,
) -> Result<RxDiagnostics> {
    let base = polyphase_split(stream, cfg.overclock)?.into_copies().swap_remove(0);
    receive_frame(&base, &cfg.clone().with_overclock(1), rx, format, truth)
}
