use std::f64::consts::PI;

use num_complex::Complex64;

use crate::phy::fft::fft_any;
use crate::{Error, Result};

/// Coarse estimate from the phase advance between the two long training
/// symbols of `ltf` (guard included, base rate). Unambiguous for
/// `|df| < rate / 128`; larger offsets wrap modulo `rate / 64`.
pub fn estimate_cfo_coarse(ltf: &[Complex64], base_rate_hz: f64) -> f64 {
    let guard = crate::transmitter::LTF_GUARD;
    let sym = &ltf[guard..];
    let acc: Complex64 = (0..64).map(|n| sym[n + 64] * sym[n].conj()).sum();
    acc.arg() * base_rate_hz / (2.0 * PI * 64.0)
}

/// Consistency cost of candidate offset `df` over the `G` delayed copies of
/// one symbol (time domain, 64 samples each): after removing `df` from every
/// copy, copy `g` should equal copy 0 rotated by its fractional delay.
pub fn cfo_objective(copies: &[Vec<Complex64>], df: f64, base_rate_hz: f64) -> f64 {
    let g_total = copies.len();
    let n = copies[0].len();
    let w = 2.0 * PI * df / base_rate_hz;
    let derotate = |y: &[Complex64]| -> Vec<Complex64> {
        let x: Vec<Complex64> = y
            .iter()
            .enumerate()
            .map(|(k, v)| v * Complex64::from_polar(1.0, -w * k as f64))
            .collect();
        fft_any(&x)
    };
    let ref0 = derotate(&copies[0]);
    let mut cost = 0.0;
    for (g, y) in copies.iter().enumerate().skip(1) {
        let yg = derotate(y);
        let common = Complex64::from_polar(1.0, -w * g as f64 / g_total as f64);
        for (bin, (a, b)) in yg.iter().zip(&ref0).enumerate() {
            let l = if bin >= n / 2 { bin as f64 - n as f64 } else { bin as f64 };
            let shift = Complex64::from_polar(1.0, -2.0 * PI * g as f64 * l / (n * g_total) as f64);
            cost += (a - common * shift * b).norm_sqr();
        }
    }
    cost
}

/// Golden-section minimization of [`cfo_objective`] over
/// `[coarse - range, coarse + range]` to 0.5 Hz. Returns `coarse` when only
/// one copy is available.
pub fn estimate_cfo_fine(
    copies: &[Vec<Complex64>],
    coarse_hz: f64,
    base_rate_hz: f64,
    range_hz: f64,
) -> Result<f64> {
    if copies.len() < 2 {
        return Ok(coarse_hz);
    }
    let cost = |df: f64| -> Result<f64> {
        let j = cfo_objective(copies, df, base_rate_hz);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::DegenerateSymbol)
        }
    };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (coarse_hz - range_hz, coarse_hz + range_hz);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    while b - a > 0.5 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = cost(d)?;
        }
    }
    Ok((a + b) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_cfo;
    use crate::phy::OfdmConfig;
    use crate::receiver::polyphase::delayed_windows;
    use crate::transmitter::{gen_ltf, upsample_bandlimited};

    #[test]
    fn coarse_recovers_offset() {
        let cfg = OfdmConfig::default();
        let ltf = gen_ltf(&cfg);
        assert!(estimate_cfo_coarse(&ltf, 2e6).abs() < 1e-9);
        let rotated = apply_cfo(&ltf, 5000.0, 2e6);
        assert!((estimate_cfo_coarse(&rotated, 2e6) - 5000.0).abs() < 1e-6);
        // 20 kHz is past 15.625 kHz and wraps by 31.25 kHz
        let rotated = apply_cfo(&ltf, 20_000.0, 2e6);
        assert!((estimate_cfo_coarse(&rotated, 2e6) - (20_000.0 - 31_250.0)).abs() < 1e-6);
    }

    fn rotated_copies(df: f64, g: usize) -> Vec<Vec<Complex64>> {
        // one periodic symbol, long enough for a delayed window
        let cfg = OfdmConfig::default();
        let ltf = gen_ltf(&cfg);
        let up = upsample_bandlimited(&ltf[32..96], g).unwrap();
        let periodic: Vec<Complex64> = (0..3 * 64 * g).map(|i| up[i % up.len()]).collect();
        let y = apply_cfo(&periodic, df, 2e6 * g as f64);
        delayed_windows(&y, 64 * g, 64, g).unwrap()
    }

    #[test]
    fn objective_vanishes_at_true_offset() {
        for g in [2, 4, 8] {
            let copies = rotated_copies(1234.0, g);
            let energy: f64 = copies[0].iter().map(|v| v.norm_sqr()).sum::<f64>() * 64.0;
            assert!(cfo_objective(&copies, 1234.0, 2e6) / energy < 1e-9);
            assert!(cfo_objective(&copies, 1534.0, 2e6) / energy > 1e-9);
        }
    }

    #[test]
    fn fine_finds_offset_noiseless() {
        let copies = rotated_copies(-777.0, 8);
        let est = estimate_cfo_fine(&copies, -777.0 + 900.0, 2e6, 2000.0).unwrap();
        assert!((est + 777.0).abs() < 1.0, "{est}");
        let single = vec![copies[0].clone()];
        assert_eq!(estimate_cfo_fine(&single, 42.0, 2e6, 2000.0).unwrap(), 42.0);
    }
}
