use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Lag (in stream samples) that maximizes the correlation magnitude.
    pub lag: usize,
    pub peak: f64,
    /// Largest correlation more than `min_separation` lags away from the peak.
    pub second_peak: f64,
}

impl SyncResult {
    pub fn peak_ratio(&self) -> f64 {
        if self.second_peak > 0.0 {
            self.peak / self.second_peak
        } else {
            f64::INFINITY
        }
    }
}

/// Cross-correlates `stream` against `template` at every lag in `lags` and
/// returns the lag with the largest magnitude. Lags within `min_separation`
/// of the winner are ignored when reporting the runner-up.
pub fn sync_timing(
    stream: &[Complex64],
    template: &[Complex64],
    lags: RangeInclusive<usize>,
    min_separation: usize,
) -> Result<SyncResult> {
    let needed = lags.end() + template.len();
    if lags.is_empty() || template.is_empty() || needed > stream.len() {
        return Err(Error::SyncWindow {
            needed,
            available: stream.len(),
        });
    }
    let first = *lags.start();
    let mags: Vec<f64> = lags
        .map(|lag| {
            stream[lag..lag + template.len()]
                .iter()
                .zip(template)
                .map(|(y, t)| y * t.conj())
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    let (best, &peak) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty");
    let second_peak = mags
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(best) > min_separation)
        .map(|(_, &m)| m)
        .fold(0.0, f64::max);
    Ok(SyncResult {
        lag: first + best,
        peak,
        second_peak,
    })
}
