use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 4] = [Self::Bpsk, Self::Qpsk, Self::Qam16, Self::Qam64];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qpsk => 2,
            Self::Qam16 => 4,
            Self::Qam64 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Qam16 => "16qam",
            Self::Qam64 => "64qam",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Bpsk),
            "qpsk" => Ok(Self::Qpsk),
            "16qam" | "qam16" => Ok(Self::Qam16),
            "64qam" | "qam64" => Ok(Self::Qam64),
            other => Err(format!("unknown modulation '{other}'")),
        }
    }
}

/// Unit-energy constellation with Gray-coded labels.
///
/// `points[label]` is the point for bit group `label`, first bit most
/// significant. For the square QAMs the first half of the bits picks the
/// in-phase level and the second half the quadrature level, each through a
/// Gray-coded PAM ladder (802.11 convention).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    scheme: Modulation,
    points: Vec<Complex64>,
}

fn gray_pam(bits: usize) -> Vec<f64> {
    // level index i (ascending amplitude) carries label gray(i)
    let m = 1usize << bits;
    let mut levels = vec![0.0; m];
    for i in 0..m {
        let label = i ^ (i >> 1);
        levels[label] = 2.0 * i as f64 - (m as f64 - 1.0);
    }
    levels
}

impl Constellation {
    pub fn new(scheme: Modulation) -> Self {
        let points = match scheme {
            Modulation::Bpsk => vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
            _ => {
                let half = scheme.bits_per_symbol() / 2;
                let pam = gray_pam(half);
                let m = pam.len();
                let raw: Vec<Complex64> = (0..m * m)
                    .map(|label| Complex64::new(pam[label >> half], pam[label & (m - 1)]))
                    .collect();
                let energy = raw.iter().map(|p| p.norm_sqr()).sum::<f64>() / raw.len() as f64;
                let scale = energy.sqrt().recip();
                raw.into_iter().map(|p| p * scale).collect()
            }
        };
        Self { scheme, points }
    }

    pub fn scheme(&self) -> Modulation {
        self.scheme
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.scheme.bits_per_symbol()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// One point per group of `bits_per_symbol` bits.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::PartialSymbol {
                bits: bits.len(),
                bits_per_symbol: k,
            });
        }
        Ok(bits
            .chunks_exact(k)
            .map(|group| {
                let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Label of the nearest point; ties go to the lowest label.
    pub fn demap_nearest(&self, sample: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (sample - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    /// Appends the bits of `label` (MSB first) to `out`.
    pub fn push_label_bits(&self, label: usize, out: &mut Vec<u8>) {
        let k = self.bits_per_symbol();
        for shift in (0..k).rev() {
            out.push(((label >> shift) & 1) as u8);
        }
    }

    pub fn demap_bits(&self, samples: &[Complex64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(samples.len() * self.bits_per_symbol());
        for &s in samples {
            self.push_label_bits(self.demap_nearest(s), &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn bpsk_and_qpsk_corners() {
        let bpsk = Constellation::new(Modulation::Bpsk);
        assert_eq!(bpsk.map_bits(&[0]).unwrap(), vec![Complex64::new(-1.0, 0.0)]);
        assert_eq!(bpsk.map_bits(&[1]).unwrap(), vec![Complex64::new(1.0, 0.0)]);
        let qpsk = Constellation::new(Modulation::Qpsk);
        let p = qpsk.map_bits(&[0, 0]).unwrap()[0];
        assert!((p - Complex64::new(-1.0, -1.0) / SQRT2).norm() < 1e-15);
    }

    #[test]
    fn partial_symbol_rejected() {
        let c = Constellation::new(Modulation::Qam16);
        assert!(matches!(
            c.map_bits(&[0, 1, 1]),
            Err(Error::PartialSymbol { bits: 3, bits_per_symbol: 4 })
        ));
    }

    #[test]
    fn unit_energy_all_schemes() {
        for scheme in Modulation::ALL {
            let c = Constellation::new(scheme);
            assert_eq!(c.points().len(), 1 << scheme.bits_per_symbol());
            let e = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{scheme}: {e}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for scheme in [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64] {
            let c = Constellation::new(scheme);
            let pts = c.points();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    if i != j && ((a - b).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{scheme}: {i} vs {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn qam64_random_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = Constellation::new(Modulation::Qam64);
        let bits: Vec<u8> = (0..48).map(|_| rng.random_range(0..2)).collect();
        let syms = c.map_bits(&bits).unwrap();
        assert_eq!(syms.len(), 8);
        for s in &syms {
            assert!(c.points().iter().any(|p| (p - s).norm() < 1e-15));
        }
        let e = syms.iter().map(|p| p.norm_sqr()).sum::<f64>() / 8.0;
        // 8 draws from a unit-energy 64-point grid: mean energy is loosely near 1
        assert!(e > 0.2 && e < 2.4, "{e}");
    }

    #[test]
    fn demap_nearest_examples() {
        let bpsk = Constellation::new(Modulation::Bpsk);
        assert_eq!(bpsk.demap_bits(&[Complex64::new(0.9, 0.05)]), vec![1]);
        // exact midpoint: lowest label wins
        assert_eq!(bpsk.demap_nearest(Complex64::new(0.0, 0.3)), 0);
        for scheme in Modulation::ALL {
            let c = Constellation::new(scheme);
            for (label, &p) in c.points().iter().enumerate() {
                assert_eq!(c.demap_nearest(p), label);
            }
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for scheme in Modulation::ALL {
            let c = Constellation::new(scheme);
            let bits: Vec<u8> = (0..10_000 * scheme.bits_per_symbol())
                .map(|_| rng.random_range(0..2))
                .collect();
            let syms = c.map_bits(&bits).unwrap();
            assert_eq!(c.demap_bits(&syms), bits);
        }
    }
}
