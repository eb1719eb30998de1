use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SUPPORTED_OVERCLOCK: [usize; 4] = [1, 2, 4, 8];

/// OFDM numerology plus the receiver's overclock factor.
///
/// Subcarrier indices are *signed* frequencies in `[-F/2, F/2)`. Use
/// [`OfdmConfig::bin`] to turn one into an FFT bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    pub num_subcarriers: usize,
    pub cp_len: usize,
    pub data_subcarriers: Vec<i32>,
    pub pilot_subcarriers: Vec<i32>,
    /// Pilot values, in the order of `pilot_subcarriers`.
    pub pilot_values: Vec<f64>,
    pub base_rate_hz: f64,
    pub overclock: usize,
}

impl Default for OfdmConfig {
    /// 2 MHz, 64 subcarriers, 802.11n 20 MHz layout: pilots at +-7 and +-21,
    /// data on the remaining bins of +-1..=+-28.
    fn default() -> Self {
        let pilots = vec![-21, -7, 7, 21];
        let data = (-28..=28)
            .filter(|l| *l != 0 && !pilots.contains(l))
            .collect();
        Self {
            num_subcarriers: 64,
            cp_len: 16,
            data_subcarriers: data,
            pilot_subcarriers: pilots,
            pilot_values: vec![1.0, 1.0, 1.0, -1.0],
            base_rate_hz: 2e6,
            overclock: 1,
        }
    }
}

impl OfdmConfig {
    pub fn with_overclock(mut self, g: usize) -> Self {
        self.overclock = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.num_subcarriers;
        if !f.is_power_of_two() || f < 4 {
            return Err(Error::InvalidConfig(format!(
                "subcarrier count {f} is not a power of two"
            )));
        }
        if self.cp_len >= f {
            return Err(Error::InvalidConfig(format!(
                "cyclic prefix {} must be shorter than {f}",
                self.cp_len
            )));
        }
        if !SUPPORTED_OVERCLOCK.contains(&self.overclock) {
            return Err(Error::UnsupportedOverclock(self.overclock));
        }
        if !(self.base_rate_hz.is_finite() && self.base_rate_hz > 0.0) {
            return Err(Error::InvalidConfig("base rate must be positive".into()));
        }
        if self.pilot_values.len() != self.pilot_subcarriers.len() {
            return Err(Error::InvalidConfig(
                "one pilot value is needed per pilot subcarrier".into(),
            ));
        }
        let half = (f / 2) as i32;
        let mut seen = vec![false; f];
        for &l in self.data_subcarriers.iter().chain(&self.pilot_subcarriers) {
            if l == 0 || l < -half || l >= half {
                return Err(Error::InvalidConfig(format!(
                    "subcarrier {l} is DC or outside the band"
                )));
            }
            let bin = self.bin(l);
            if seen[bin] {
                return Err(Error::InvalidConfig(format!(
                    "subcarrier {l} listed twice"
                )));
            }
            seen[bin] = true;
        }
        if self.data_subcarriers.is_empty() {
            return Err(Error::InvalidConfig("no data subcarriers".into()));
        }
        Ok(())
    }

    /// FFT bin of signed subcarrier `l`.
    pub fn bin(&self, l: i32) -> usize {
        l.rem_euclid(self.num_subcarriers as i32) as usize
    }

    /// Signed frequency of FFT bin `bin`, in `[-F/2, F/2)`.
    pub fn signed_index(&self, bin: usize) -> i32 {
        let f = self.num_subcarriers;
        if bin >= f / 2 {
            bin as i32 - f as i32
        } else {
            bin as i32
        }
    }

    pub fn data_bins(&self) -> Vec<usize> {
        self.data_subcarriers.iter().map(|&l| self.bin(l)).collect()
    }

    pub fn pilot_bins(&self) -> Vec<usize> {
        self.pilot_subcarriers.iter().map(|&l| self.bin(l)).collect()
    }

    /// Data and pilot bins together, sorted by bin number.
    pub fn occupied_bins(&self) -> Vec<usize> {
        let mut bins: Vec<usize> = self.data_bins();
        bins.extend(self.pilot_bins());
        bins.sort_unstable();
        bins
    }

    pub fn symbol_len(&self) -> usize {
        self.num_subcarriers + self.cp_len
    }

    pub fn symbol_duration_s(&self) -> f64 {
        self.symbol_len() as f64 / self.base_rate_hz
    }

    pub fn oversampled_rate_hz(&self) -> f64 {
        self.base_rate_hz * self.overclock as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let cfg = OfdmConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.data_subcarriers.len(), 52);
        assert_eq!(cfg.pilot_subcarriers.len(), 4);
        assert_eq!(cfg.occupied_bins().len(), 56);
        assert!((cfg.symbol_duration_s() - 40e-6).abs() < 1e-15);
        let expect: Vec<usize> = (1..=28).chain(36..=63).collect();
        assert_eq!(cfg.occupied_bins(), expect);
    }

    #[test]
    fn signed_round_trip() {
        let cfg = OfdmConfig::default();
        for bin in 0..64 {
            assert_eq!(cfg.bin(cfg.signed_index(bin)), bin);
        }
        assert_eq!(cfg.signed_index(32), -32);
        assert_eq!(cfg.signed_index(63), -1);
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = OfdmConfig { num_subcarriers: 48, ..OfdmConfig::default() };
        assert!(cfg.validate().is_err());

        let cfg = OfdmConfig::default().with_overclock(3);
        assert!(matches!(cfg.validate(), Err(Error::UnsupportedOverclock(3))));

        let cfg = OfdmConfig { cp_len: 64, ..OfdmConfig::default() };
        assert!(cfg.validate().is_err());

        let mut cfg = OfdmConfig::default();
        cfg.pilot_subcarriers[0] = 1; // collides with a data bin
        assert!(cfg.validate().is_err());

        let mut cfg = OfdmConfig::default();
        cfg.data_subcarriers.push(0);
        assert!(cfg.validate().is_err());
    }
}
