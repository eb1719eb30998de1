use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phy::OfdmConfig;
use crate::{Error, Result};

/// Undoes the phase ramp of delayed copy `g` of `g_total`: bin with signed
/// frequency `l` is multiplied by `e^{j 2 pi g l / (N G)}`.
pub fn compensate_overclock_phase(y: &[Complex64], g: usize, g_total: usize) -> Vec<Complex64> {
    let n = y.len();
    y.iter()
        .enumerate()
        .map(|(bin, &v)| {
            if g == 0 {
                return v;
            }
            let l = if bin >= n / 2 { bin as f64 - n as f64 } else { bin as f64 };
            v * Complex64::from_polar(1.0, 2.0 * PI * g as f64 * l / (n * g_total) as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    /// Zero off the occupied bins.
    pub h_hat: Vec<Complex64>,
    /// Residual variance across all observations, per bin.
    pub per_bin_noise_var: Vec<f64>,
    /// Residual variance of each copy, averaged over occupied bins.
    pub per_copy_noise_var: Vec<f64>,
}

/// Least-squares estimate from the phase-compensated training spectra,
/// `ltf_spectra[copy][symbol]`.
pub fn estimate_channel(
    ltf_spectra: &[Vec<Vec<Complex64>>],
    ltf_freq: &[Complex64],
    cfg: &OfdmConfig,
) -> ChannelEstimate {
    let f = cfg.num_subcarriers;
    let zero = Complex64::new(0.0, 0.0);
    let mut h_hat = vec![zero; f];
    let mut per_bin_noise_var = vec![0.0; f];
    let mut per_copy_noise_var = vec![0.0; ltf_spectra.len()];
    let occupied = cfg.occupied_bins();
    let obs = ltf_spectra.iter().map(Vec::len).sum::<usize>();
    for &bin in &occupied {
        let r = ltf_freq[bin];
        let sum: Complex64 = ltf_spectra.iter().flatten().map(|y| y[bin] / r).sum();
        h_hat[bin] = sum / obs as f64;
    }
    for (g, copy) in ltf_spectra.iter().enumerate() {
        let mut acc = 0.0;
        for y in copy {
            for &bin in &occupied {
                let e = (y[bin] - h_hat[bin] * ltf_freq[bin]).norm_sqr();
                per_bin_noise_var[bin] += e;
                acc += e;
            }
        }
        per_copy_noise_var[g] = acc / (copy.len() * occupied.len()) as f64;
    }
    if obs > 1 {
        for &bin in &occupied {
            per_bin_noise_var[bin] /= (obs - 1) as f64;
        }
    }
    ChannelEstimate {
        h_hat,
        per_bin_noise_var,
        per_copy_noise_var,
    }
}

/// Removes the common phase measured on the pilots. Returns the rotated
/// spectrum and the phase that was removed.
pub fn track_pilot_phase(
    y: &[Complex64],
    h_hat: &[Complex64],
    cfg: &OfdmConfig,
) -> Result<(Vec<Complex64>, f64)> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut energy = 0.0;
    for (&l, &p) in cfg.pilot_subcarriers.iter().zip(&cfg.pilot_values) {
        let bin = cfg.bin(l);
        acc += y[bin] * (h_hat[bin] * p).conj();
        energy += y[bin].norm_sqr();
    }
    if energy < 1e-12 || acc.norm() == 0.0 {
        return Err(Error::PilotErasure);
    }
    let theta = acc.arg();
    let rot = Complex64::from_polar(1.0, -theta);
    Ok((y.iter().map(|v| v * rot).collect(), theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combining {
    #[default]
    Uniform,
    InverseVariance,
}

impl Combining {
    /// Per-copy weights summing to one.
    pub fn weights(self, est: &ChannelEstimate) -> Vec<f64> {
        let g = est.per_copy_noise_var.len();
        let raw: Vec<f64> = match self {
            Self::Uniform => vec![1.0; g],
            Self::InverseVariance => est
                .per_copy_noise_var
                .iter()
                .map(|&v| if v > 0.0 { 1.0 / v } else { f64::INFINITY })
                .collect(),
        };
        if raw.iter().any(|w| w.is_infinite()) {
            // noiseless copies dominate; share the weight among them
            let n = raw.iter().filter(|w| w.is_infinite()).count() as f64;
            return raw.iter().map(|w| if w.is_infinite() { 1.0 / n } else { 0.0 }).collect();
        }
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    }
}

/// Weighted per-bin sum of the compensated copies.
pub fn combine_copies(spectra: &[Vec<Complex64>], weights: &[f64]) -> Vec<Complex64> {
    let n = spectra[0].len();
    (0..n)
        .map(|bin| spectra.iter().zip(weights).map(|(y, &w)| y[bin] * w).sum())
        .collect()
}
