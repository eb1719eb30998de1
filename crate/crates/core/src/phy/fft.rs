use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform_in_place(buf: &mut [Complex64], direction: FftDirection) {
    if buf.is_empty() {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(buf.len(), direction));
    plan.process(buf);
}

/// Unnormalized forward DFT, `X[l] = sum_n x[n] e^{-j 2 pi n l / N}`.
pub fn fft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if !x.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(x.len()));
    }
    Ok(fft_any(x))
}

/// Inverse DFT carrying the `1/N` factor, so `ifft(fft(x)) == x`.
pub fn ifft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if !x.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(x.len()));
    }
    Ok(ifft_any(x))
}

/// Forward DFT of any length.
pub(crate) fn fft_any(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform_in_place(&mut buf, FftDirection::Forward);
    buf
}

/// Inverse DFT of any length, `1/N` included.
pub(crate) fn ifft_any(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform_in_place(&mut buf, FftDirection::Inverse);
    let scale = 1.0 / buf.len().max(1) as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|l| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * l) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn dc_impulse() {
        let x = vec![Complex64::new(1.0, 0.0); 64];
        let y = fft(&x).unwrap();
        assert!((y[0] - Complex64::new(64.0, 0.0)).norm() < 1e-10);
        assert!(y[1..].iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_vec(&mut rng, 64);
        let fast = fft(&x).unwrap();
        let slow = naive_dft(&x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [64, 128, 256, 512] {
            let x = random_vec(&mut rng, n);
            let y = ifft(&fft(&x).unwrap()).unwrap();
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        let x = vec![Complex64::new(0.0, 0.0); 80];
        assert!(matches!(fft(&x), Err(Error::NotPowerOfTwo(80))));
        assert!(matches!(ifft(&x), Err(Error::NotPowerOfTwo(80))));
    }

    proptest! {
        #[test]
        fn parseval(seed in any::<u64>(), log_n in 1u32..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_vec(&mut rng, 1 << log_n);
            let y = fft(&x).unwrap();
            let et: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let ef: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
            prop_assert!((et - ef).abs() <= 1e-9 * et.max(1e-30));
        }
    }
}
