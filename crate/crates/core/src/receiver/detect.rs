use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Energy over a 16-sample window that unit-variance complex noise exceeds
/// with probability 1%, found by [`calibrate_energy_threshold`].
pub const ENERGY_THRESHOLD: f64 = 26.74;

/// Packet detector settings. Energies are in units of `noise_floor`, the
/// per-sample noise power the front end reports.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub energy_window: usize,
    pub autocorr_lag: usize,
    pub energy_threshold: f64,
    pub noise_floor: f64,
    pub plateau_ratio_threshold: f64,
    pub plateau_min_len: usize,
    pub stf_reps_used: usize,
    pub clock_switch_latency_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            energy_window: 16,
            autocorr_lag: 16,
            energy_threshold: ENERGY_THRESHOLD,
            noise_floor: 1.0,
            plateau_ratio_threshold: 0.35,
            plateau_min_len: 64,
            stf_reps_used: 9,
            clock_switch_latency_s: 8e-6,
        }
    }
}

impl DetectorConfig {
    pub fn with_noise_floor(mut self, noise_floor: f64) -> Self {
        self.noise_floor = noise_floor;
        self
    }

    pub fn validate(&self, base_rate_hz: f64) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.energy_window == 0 || self.autocorr_lag == 0 || self.plateau_min_len == 0 {
            return bad("detector windows must be nonzero");
        }
        if !(self.plateau_ratio_threshold > 0.0 && self.plateau_ratio_threshold < 1.0) {
            return bad("plateau ratio threshold must be in (0, 1)");
        }
        if !(self.noise_floor >= 0.0 && self.energy_threshold >= 0.0) {
            return bad("energy threshold and noise floor must be nonnegative");
        }
        if self.stf_reps_used > 9 {
            return bad("at most nine STF repetitions may be used for detection");
        }
        let rep = crate::transmitter::STF_PERIOD as f64 / base_rate_hz;
        if !(self.clock_switch_latency_s >= 0.0 && self.clock_switch_latency_s <= rep + 1e-12) {
            return bad("clock switch latency exceeds one STF repetition");
        }
        let span = self.autocorr_lag + self.plateau_min_len + self.energy_window - 1;
        if span > self.stf_reps_used * crate::transmitter::STF_PERIOD {
            return bad("plateau does not fit in the STF repetitions used");
        }
        Ok(())
    }

    /// Last base-rate sample the detector has looked at when it fires at `index`.
    pub fn completion_index(&self, index: usize) -> usize {
        index + self.plateau_min_len + self.energy_window - 2
    }

    /// Whole base-rate samples lost while the ADC clock switches.
    pub fn latency_samples(&self, base_rate_hz: f64) -> usize {
        (self.clock_switch_latency_s * base_rate_hz - 1e-9).ceil().max(0.0) as usize
    }
}

/// First index `n` at which the windowed energy clears the threshold and,
/// from there on, the lag-`d` autocorrelation ratio
/// `|sum y[n+k] conj(y[n+k-d])| / sum |y[n+k-d]|^2`
/// stays at or above the plateau threshold for `plateau_min_len` consecutive
/// indices.
pub fn detect_packet(stream: &[Complex64], cfg: &DetectorConfig) -> Option<usize> {
    let (l, d) = (cfg.energy_window, cfg.autocorr_lag);
    if stream.len() < d + l {
        return None;
    }
    let gate = cfg.energy_threshold * cfg.noise_floor;
    let mut run_start = None;
    for n in d..=stream.len() - l {
        let mut corr = Complex64::new(0.0, 0.0);
        let (mut energy, mut ref_energy) = (0.0, 0.0);
        for k in 0..l {
            let now = stream[n + k];
            let before = stream[n + k - d];
            corr += now * before.conj();
            energy += now.norm_sqr();
            ref_energy += before.norm_sqr();
        }
        let plateau = ref_energy > 0.0 && corr.norm() >= cfg.plateau_ratio_threshold * ref_energy;
        match (plateau, run_start) {
            (true, None) if energy > gate => run_start = Some(n),
            (false, Some(_)) => run_start = None,
            _ => {}
        }
        if let Some(s) = run_start {
            if n + 1 - s >= cfg.plateau_min_len {
                return Some(s);
            }
        }
    }
    None
}

/// Monte Carlo estimate of the window energy that unit-variance complex
/// Gaussian noise exceeds with probability `false_alarm`.
pub fn calibrate_energy_threshold(window: usize, false_alarm: f64, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut energies: Vec<f64> = (0..trials)
        .map(|_| {
            (0..window)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    (re * re + im * im) / 2.0
                })
                .sum()
        })
        .collect();
    energies.sort_by(f64::total_cmp);
    let idx = ((1.0 - false_alarm) * trials as f64).ceil() as usize;
    energies[idx.min(trials - 1)]
}

#[cfg(test)]
mod tests {
    use statrs::distribution::{ContinuousCDF, Gamma};

    use super::*;
    use crate::phy::OfdmConfig;
    use crate::transmitter::gen_stf;

    fn noise(n: usize, seed: u64, var: f64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sd = (var / 2.0).sqrt();
        (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re * sd, im * sd)
            })
            .collect()
    }

    #[test]
    fn threshold_matches_gamma_quantile() {
        // window energy of unit complex noise is Gamma(16, 1)
        let exact = Gamma::new(16.0, 1.0).unwrap().inverse_cdf(0.99);
        assert!((ENERGY_THRESHOLD - exact).abs() < 0.01, "{exact}");
        let mc = calibrate_energy_threshold(16, 0.01, 200_000, 1);
        assert!((mc - exact).abs() / exact < 0.01, "{mc}");
    }

    #[test]
    fn pure_noise_rarely_triggers() {
        let cfg = DetectorConfig::default();
        let hits = (0..200)
            .filter(|&s| detect_packet(&noise(10_000, s, 1.0), &cfg).is_some())
            .count();
        assert!(hits <= 2, "{hits} false alarms");
    }

    #[test]
    fn zero_stream_is_silent() {
        let cfg = DetectorConfig::default();
        assert_eq!(detect_packet(&vec![Complex64::new(0.0, 0.0); 1000], &cfg), None);
        let cfg = cfg.with_noise_floor(0.0);
        assert_eq!(detect_packet(&vec![Complex64::new(0.0, 0.0); 1000], &cfg), None);
    }

    #[test]
    fn clean_stf_detected_within_one_repetition() {
        let ofdm = OfdmConfig::default();
        let stf = gen_stf(&ofdm);
        let power = crate::transmitter::mean_power(&stf);
        let var = power / 1000.0; // 30 dB
        for seed in 0..20 {
            let start = 100 + seed as usize;
            let mut x = noise(start + 600, seed, var);
            for (k, v) in stf.iter().enumerate() {
                x[start + k] += v;
            }
            let cfg = DetectorConfig::default().with_noise_floor(var);
            let idx = detect_packet(&x, &cfg).expect("detected");
            assert!(idx.abs_diff(start) <= 16, "{idx} vs {start}");
            assert!(cfg.completion_index(idx) < start + 144);
        }
    }

    #[test]
    fn config_limits() {
        let cfg = DetectorConfig::default();
        cfg.validate(2e6).unwrap();
        assert_eq!(cfg.latency_samples(2e6), 16);
        let too_many = DetectorConfig { stf_reps_used: 10, ..cfg.clone() };
        assert!(too_many.validate(2e6).is_err());
        let too_slow = DetectorConfig { clock_switch_latency_s: 9e-6, ..cfg };
        assert!(too_slow.validate(2e6).is_err());
    }
}
