use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_scenario, Capture, ChannelScenario, NoiseModel, TapPreset};
use crate::phy::{Modulation, OfdmConfig};
use crate::receiver::{
    receive_frame, receive_frame_baseline, FrameFormat, GroundTruth, ReceiverConfig, RxDiagnostics,
};
use crate::transmitter::{build_frame, FrameBlueprint, STF_LEN};
use crate::Result;

/// One grid point of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPoint {
    pub scheme: Modulation,
    pub g: usize,
    pub snr_db: f64,
    pub noise_model: NoiseModel,
    pub taps: TapPreset,
    pub payload_symbols: usize,
    /// Carrier offsets are drawn uniformly from `[-cfo_max_hz, cfo_max_hz]`.
    pub cfo_max_hz: f64,
}

impl TrialPoint {
    pub fn awgn(scheme: Modulation, g: usize, snr_db: f64) -> Self {
        Self {
            scheme,
            g,
            snr_db,
            noise_model: NoiseModel::Wideband,
            taps: TapPreset::Flat,
            payload_symbols: 20,
            cfo_max_hz: 0.0,
        }
    }
}

/// A frame and the channel it goes through, both drawn from one seed.
#[derive(Debug, Clone)]
pub struct DrawnTrial {
    pub cfg: OfdmConfig,
    pub blueprint: FrameBlueprint,
    pub scenario: ChannelScenario,
}

impl DrawnTrial {
    pub fn capture(&self) -> Result<Capture> {
        apply_scenario(&self.blueprint, &self.scenario, &self.cfg)
    }
}

/// Random payload, lead-in of up to 200 base samples (any oversampled
/// phase), carrier offset and noise seed.
pub fn draw_trial(point: &TrialPoint, seed: u64) -> Result<DrawnTrial> {
    let cfg = OfdmConfig::default().with_overclock(point.g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_bits = point.payload_symbols * cfg.data_subcarriers.len() * point.scheme.bits_per_symbol();
    let bits: Vec<u8> = (0..n_bits).map(|_| rng.random_range(0..2u8)).collect();
    let blueprint = build_frame(&bits, point.scheme, &cfg)?;
    let timing_offset = rng.random_range(0..200 * point.g);
    let cfo_hz = if point.cfo_max_hz > 0.0 {
        rng.random_range(-point.cfo_max_hz..=point.cfo_max_hz)
    } else {
        0.0
    };
    let scenario = ChannelScenario::new(
        point.taps.taps(point.g),
        cfo_hz,
        timing_offset,
        point.snr_db,
        point.noise_model,
        rng.random(),
    )?;
    Ok(DrawnTrial {
        cfg,
        blueprint,
        scenario,
    })
}

/// Outcome of one receiver on one capture. Misses and receiver errors score
/// a BER of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub ber: f64,
    pub bit_errors: usize,
    pub bits: usize,
    pub missed: bool,
    pub error: Option<String>,
    pub sync_error: Option<f64>,
    pub cfo_error_hz: Option<f64>,
    pub diagnostics: Option<RxDiagnostics>,
}

impl TrialRecord {
    fn score(outcome: Result<RxDiagnostics>, bits: usize, true_cfo: f64) -> Self {
        match outcome {
            Ok(d) if !d.missed => Self {
                ber: d.ber.unwrap_or(1.0),
                bit_errors: d.bit_errors.unwrap_or(bits),
                bits,
                missed: false,
                error: None,
                sync_error: d.sync_error,
                cfo_error_hz: Some(d.cfo_applied_hz - true_cfo),
                diagnostics: Some(d),
            },
            Ok(d) => Self {
                ber: 1.0,
                bit_errors: bits,
                bits,
                missed: true,
                error: None,
                sync_error: None,
                cfo_error_hz: None,
                diagnostics: Some(d),
            },
            Err(e) => Self {
                ber: 1.0,
                bit_errors: bits,
                bits,
                missed: true,
                error: Some(e.to_string()),
                sync_error: None,
                cfo_error_hz: None,
                diagnostics: None,
            },
        }
    }
}

/// Both receivers on the same capture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPair {
    pub tfi: TrialRecord,
    pub baseline: TrialRecord,
    /// FNV-1a over the capture samples, to confirm both saw the same input.
    pub capture_checksum: u64,
}

pub(crate) fn checksum(samples: &[Complex64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in samples {
        for b in v.re.to_le_bytes().into_iter().chain(v.im.to_le_bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Runs the overclocked and the baseline receiver on `capture`.
pub fn run_trial(
    capture: &Capture,
    blueprint: &FrameBlueprint,
    true_cfo_hz: f64,
    rx: &ReceiverConfig,
) -> TrialPair {
    let cfg = OfdmConfig::default().with_overclock(capture.overclock);
    let rx = rx.clone().with_noise_floor(capture.noise_variance);
    let format = FrameFormat {
        scheme: blueprint.scheme,
        payload_symbols: blueprint.payload_symbols(),
    };
    let truth = GroundTruth {
        bits: blueprint.info_bits(),
        ltf_start_base: capture.frame_start_base + STF_LEN as f64,
    };
    let n = truth.bits.len();
    let tfi = receive_frame(&capture.samples, &cfg, &rx, format, Some(truth));
    let baseline = receive_frame_baseline(&capture.samples, &cfg, &rx, format, Some(truth));
    TrialPair {
        tfi: TrialRecord::score(tfi, n, true_cfo_hz),
        baseline: TrialRecord::score(baseline, n, true_cfo_hz),
        capture_checksum: checksum(&capture.samples),
    }
}

/// Noise floor guess for a capture of unknown SNR: the quietest
/// non-overlapping 64-sample stretch of the base-rate copy. Assumes the
/// capture has a noise-only lead-in or tail; biased low by roughly 20%.
pub fn estimate_noise_floor(samples: &[Complex64], g: usize) -> f64 {
    let base: Vec<f64> = samples.iter().step_by(g.max(1)).map(|v| v.norm_sqr()).collect();
    base.chunks_exact(64)
        .map(|w| w.iter().sum::<f64>() / 64.0)
        .reduce(f64::min)
        .unwrap_or(0.0)
}
