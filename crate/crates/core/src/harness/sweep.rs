use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{draw_trial, run_trial, TrialPoint, TrialRecord};
use crate::channel::{NoiseModel, TapPreset};
use crate::phy::{Modulation, SUPPORTED_OVERCLOCK};
use crate::receiver::ReceiverConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub snr_grid_db: Vec<f64>,
    pub g_grid: Vec<usize>,
    pub schemes: Vec<Modulation>,
    pub noise_model: NoiseModel,
    pub taps: TapPreset,
    pub packets_per_point: usize,
    pub payload_symbols: usize,
    pub base_seed: u64,
    pub cfo_max_hz: f64,
    /// Record per-point wall time. Off by default so output is reproducible.
    pub timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            snr_grid_db: (0..14).map(|k| 9.0 + 2.0 * k as f64).collect(),
            g_grid: SUPPORTED_OVERCLOCK.to_vec(),
            schemes: Modulation::ALL.to_vec(),
            noise_model: NoiseModel::Wideband,
            taps: TapPreset::Flat,
            packets_per_point: 3000,
            payload_symbols: 20,
            base_seed: 1,
            cfo_max_hz: 0.0,
            timing: false,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSweep(m.to_string()));
        if self.snr_grid_db.is_empty() || self.g_grid.is_empty() || self.schemes.is_empty() {
            return bad("grids must be nonempty");
        }
        if self.packets_per_point == 0 || self.payload_symbols == 0 {
            return bad("packets and payload symbols must be at least 1");
        }
        if let Some(g) = self.g_grid.iter().find(|g| !SUPPORTED_OVERCLOCK.contains(g)) {
            return Err(Error::UnsupportedOverclock(*g));
        }
        if self.snr_grid_db.iter().any(|s| s.is_nan()) || self.cfo_max_hz.is_nan() || self.cfo_max_hz < 0.0 {
            return bad("SNR values must be numbers and the CFO bound nonnegative");
        }
        Ok(())
    }

    fn points(&self) -> Vec<TrialPoint> {
        let mut out = Vec::new();
        for &scheme in &self.schemes {
            for &g in &self.g_grid {
                for &snr_db in &self.snr_grid_db {
                    out.push(TrialPoint {
                        scheme,
                        g,
                        snr_db,
                        noise_model: self.noise_model,
                        taps: self.taps,
                        payload_symbols: self.payload_symbols,
                        cfo_max_hz: self.cfo_max_hz,
                    });
                }
            }
        }
        out.sort_by(|a, b| {
            (a.scheme, a.g)
                .cmp(&(b.scheme, b.g))
                .then(a.snr_db.total_cmp(&b.snr_db))
        });
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceiverKind {
    Tfi,
    Baseline,
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tfi => "tfi",
            Self::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResultRow {
    pub snr_db: f64,
    pub g: usize,
    pub scheme: Modulation,
    pub noise_model: NoiseModel,
    pub receiver: ReceiverKind,
    pub trials: usize,
    pub ber_mean: f64,
    pub ber_stderr: f64,
    pub mean_abs_sync_error: f64,
    pub sync_error_std: f64,
    pub miss_rate: f64,
    pub cfo_rmse_hz: f64,
    pub wall_time_s: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial, a function of the grid point's values (not its
/// position in the grid) so adding points never reshuffles others.
pub fn trial_seed(base_seed: u64, point: &TrialPoint, trial: usize) -> u64 {
    let scheme = Modulation::ALL.iter().position(|&m| m == point.scheme).unwrap_or(0) as u64;
    let model = match point.noise_model {
        NoiseModel::Wideband => 0,
        NoiseModel::Brickwall => 1,
    };
    let fields = [
        scheme,
        point.g as u64,
        point.snr_db.to_bits(),
        model,
        point.taps as u64,
        point.payload_symbols as u64,
        point.cfo_max_hz.to_bits(),
        trial as u64,
    ];
    fields.iter().fold(splitmix(base_seed), |h, &f| splitmix(h ^ f))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(point: &TrialPoint, receiver: ReceiverKind, records: &[&TrialRecord], wall: f64) -> SweepResultRow {
    let n = records.len();
    let bers: Vec<f64> = records.iter().map(|r| r.ber).collect();
    let (ber_mean, ber_std) = mean_std(&bers);
    let sync: Vec<f64> = records.iter().filter_map(|r| r.sync_error).map(f64::abs).collect();
    let (mean_abs_sync_error, sync_error_std) = mean_std(&sync);
    let cfo: Vec<f64> = records.iter().filter_map(|r| r.cfo_error_hz).collect();
    let cfo_rmse_hz = if cfo.is_empty() {
        f64::NAN
    } else {
        (cfo.iter().map(|e| e * e).sum::<f64>() / cfo.len() as f64).sqrt()
    };
    SweepResultRow {
        snr_db: point.snr_db,
        g: point.g,
        scheme: point.scheme,
        noise_model: point.noise_model,
        receiver,
        trials: n,
        ber_mean,
        ber_stderr: ber_std / (n as f64).sqrt(),
        mean_abs_sync_error,
        sync_error_std,
        miss_rate: records.iter().filter(|r| r.missed).count() as f64 / n as f64,
        cfo_rmse_hz,
        wall_time_s: wall,
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("TFI_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))
}

/// Every grid point, `packets_per_point` paired trials each. Two rows per
/// point (overclocked, then baseline), sorted by scheme, `G`, SNR.
pub fn run_sweep(spec: &SweepSpec, rx: &ReceiverConfig) -> Result<Vec<SweepResultRow>> {
    spec.validate()?;
    let points = spec.points();
    let pool = worker_pool()?;
    pool.install(|| {
        points
            .par_iter()
            .map(|point| {
                let started = Instant::now();
                let pairs: Vec<_> = (0..spec.packets_per_point)
                    .into_par_iter()
                    .map(|t| {
                        let drawn = draw_trial(point, trial_seed(spec.base_seed, point, t))?;
                        let capture = drawn.capture()?;
                        Ok(run_trial(&capture, &drawn.blueprint, drawn.scenario.cfo_hz, rx))
                    })
                    .collect::<Result<_>>()?;
                let wall = if spec.timing { started.elapsed().as_secs_f64() } else { 0.0 };
                let tfi: Vec<_> = pairs.iter().map(|p| &p.tfi).collect();
                let base: Vec<_> = pairs.iter().map(|p| &p.baseline).collect();
                Ok([
                    summarize(point, ReceiverKind::Tfi, &tfi, wall),
                    summarize(point, ReceiverKind::Baseline, &base, wall),
                ])
            })
            .collect::<Result<Vec<_>>>()
            .map(|rows| rows.into_iter().flatten().collect())
    })
}
