use num_complex::Complex64;

use super::fft::ifft_any;
#[cfg(test)]
use super::fft::fft_any;
use super::OfdmConfig;
use crate::{Error, Result};

/// Places data and pilot values on an `F`-bin grid; other bins (DC, guards) are zero.
pub fn populate_grid(
    data: &[Complex64],
    pilots: &[Complex64],
    cfg: &OfdmConfig,
) -> Result<Vec<Complex64>> {
    if data.len() != cfg.data_subcarriers.len() {
        return Err(Error::LengthMismatch {
            expected: cfg.data_subcarriers.len(),
            actual: data.len(),
        });
    }
    if pilots.len() != cfg.pilot_subcarriers.len() {
        return Err(Error::LengthMismatch {
            expected: cfg.pilot_subcarriers.len(),
            actual: pilots.len(),
        });
    }
    let mut grid = vec![Complex64::new(0.0, 0.0); cfg.num_subcarriers];
    for (&l, &v) in cfg.data_subcarriers.iter().zip(data) {
        grid[cfg.bin(l)] = v;
    }
    for (&l, &v) in cfg.pilot_subcarriers.iter().zip(pilots) {
        grid[cfg.bin(l)] = v;
    }
    Ok(grid)
}

/// Inverse of [`populate_grid`]: pulls the data and pilot values out of a grid.
pub fn disassemble_grid(grid: &[Complex64], cfg: &OfdmConfig) -> (Vec<Complex64>, Vec<Complex64>) {
    let data = cfg.data_subcarriers.iter().map(|&l| grid[cfg.bin(l)]).collect();
    let pilots = cfg.pilot_subcarriers.iter().map(|&l| grid[cfg.bin(l)]).collect();
    (data, pilots)
}

/// One time-domain OFDM symbol (`F + cp_len` samples) at the base rate.
pub fn assemble_symbol(
    data: &[Complex64],
    pilots: &[Complex64],
    cfg: &OfdmConfig,
) -> Result<Vec<Complex64>> {
    let grid = populate_grid(data, pilots, cfg)?;
    let core = ifft_any(&grid);
    Ok(with_cyclic_prefix(&core, cfg.cp_len))
}

pub(crate) fn with_cyclic_prefix(core: &[Complex64], cp: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(core.len() + cp);
    out.extend_from_slice(&core[core.len() - cp..]);
    out.extend_from_slice(core);
    out
}

/// Drops the prefix and transforms; handy for loopback checks.
#[cfg(test)]
fn symbol_spectrum(symbol: &[Complex64], cfg: &OfdmConfig) -> Vec<Complex64> {
    fft_any(&symbol[cfg.cp_len..cfg.cp_len + cfg.num_subcarriers])
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_values(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn zeros_in_zeros_out() {
        let cfg = OfdmConfig::default();
        let z = Complex64::new(0.0, 0.0);
        let out = assemble_symbol(&[z; 52], &[z; 4], &cfg).unwrap();
        assert_eq!(out.len(), 80);
        assert!(out.iter().all(|v| *v == z));
    }

    #[test]
    fn wrong_cardinality() {
        let cfg = OfdmConfig::default();
        let z = Complex64::new(0.0, 0.0);
        assert!(assemble_symbol(&[z; 51], &[z; 4], &cfg).is_err());
        assert!(assemble_symbol(&[z; 52], &[z; 3], &cfg).is_err());
    }

    #[test]
    fn cyclic_prefix_and_grid_recovery() {
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_values(&mut rng, 52);
        let pilots = random_values(&mut rng, 4);
        let out = assemble_symbol(&data, &pilots, &cfg).unwrap();
        assert_eq!(&out[0..16], &out[64..80]);

        let grid = populate_grid(&data, &pilots, &cfg).unwrap();
        let spec = symbol_spectrum(&out, &cfg);
        for (a, b) in grid.iter().zip(&spec) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(spec[0].norm() < 1e-12);
        let (d, p) = disassemble_grid(&spec, &cfg);
        assert!(d.iter().zip(&data).all(|(a, b)| (a - b).norm() < 1e-9));
        assert!(p.iter().zip(&pilots).all(|(a, b)| (a - b).norm() < 1e-9));
    }

    #[test]
    fn parseval_with_prefix() {
        // core energy is sum|grid|^2 / F; the prefix adds the energy of the
        // last cp_len samples on top of that
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = random_values(&mut rng, 52);
        let pilots = random_values(&mut rng, 4);
        let grid = populate_grid(&data, &pilots, &cfg).unwrap();
        let out = assemble_symbol(&data, &pilots, &cfg).unwrap();
        let grid_energy: f64 = grid.iter().map(|v| v.norm_sqr()).sum();
        let core: f64 = out[16..].iter().map(|v| v.norm_sqr()).sum();
        assert!((core - grid_energy / 64.0).abs() < 1e-9 * core);
        let total: f64 = out.iter().map(|v| v.norm_sqr()).sum();
        let prefix: f64 = out[64..].iter().map(|v| v.norm_sqr()).sum();
        assert!((total - core - prefix).abs() < 1e-12);
    }

    #[test]
    fn prefix_energy_scales_on_average() {
        // E[total] = (1/F) * sum|grid|^2 * (F + cp) / F for i.i.d. subcarrier values
        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut total, mut expected) = (0.0, 0.0);
        for _ in 0..4000 {
            let data = random_values(&mut rng, 52);
            let pilots = random_values(&mut rng, 4);
            let grid = populate_grid(&data, &pilots, &cfg).unwrap();
            let out = assemble_symbol(&data, &pilots, &cfg).unwrap();
            total += out.iter().map(|v| v.norm_sqr()).sum::<f64>();
            expected += grid.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0 * 80.0 / 64.0;
        }
        assert!((total / expected - 1.0).abs() < 0.01, "{}", total / expected);
    }
}
