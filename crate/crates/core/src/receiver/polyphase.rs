use num_complex::Complex64;

use crate::{Error, Result};

/// The `G` base-rate sub-streams of an oversampled stream,
/// `copies[g][n] = stream[n * G + g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyphaseSet {
    copies: Vec<Vec<Complex64>>,
}

impl PolyphaseSet {
    pub fn overclock(&self) -> usize {
        self.copies.len()
    }

    pub fn copies(&self) -> &[Vec<Complex64>] {
        &self.copies
    }

    pub fn copy(&self, g: usize) -> &[Complex64] {
        &self.copies[g]
    }

    pub fn into_copies(self) -> Vec<Vec<Complex64>> {
        self.copies
    }

    /// Interleaves the copies back into the oversampled stream.
    pub fn interleave(&self) -> Vec<Complex64> {
        let g = self.overclock();
        let n = self.copies[0].len();
        (0..n * g).map(|i| self.copies[i % g][i / g]).collect()
    }
}

pub fn polyphase_split(stream: &[Complex64], g: usize) -> Result<PolyphaseSet> {
    if !crate::phy::SUPPORTED_OVERCLOCK.contains(&g) {
        return Err(Error::UnsupportedOverclock(g));
    }
    if !stream.len().is_multiple_of(g) {
        return Err(Error::LengthMismatch {
            expected: stream.len().next_multiple_of(g),
            actual: stream.len(),
        });
    }
    let copies = (0..g)
        .map(|p| stream.iter().skip(p).step_by(g).copied().collect())
        .collect();
    Ok(PolyphaseSet { copies })
}

/// `G` windows of `len` base-rate samples. Window `g` starts `g` samples of
/// the oversampled stream *before* `start`, so copy `g` sees the signal
/// delayed by `g / G` of a base sample.
pub fn delayed_windows(
    stream: &[Complex64],
    start: usize,
    len: usize,
    g: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let needed = start + (len - 1) * g + 1;
    if start + 1 < g || needed > stream.len() {
        return Err(Error::SyncWindow {
            needed,
            available: stream.len(),
        });
    }
    Ok((0..g)
        .map(|p| (0..len).map(|n| stream[start - p + n * g]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::new(k as f64, -(k as f64))).collect()
    }

    #[test]
    fn split_and_interleave() {
        let x = ramp(32);
        let one = polyphase_split(&x, 1).unwrap();
        assert_eq!(one.copy(0), &x[..]);
        for g in [2, 4, 8] {
            let set = polyphase_split(&x, g).unwrap();
            assert_eq!(set.overclock(), g);
            assert_eq!(set.copy(1)[2], x[2 * g + 1]);
            assert_eq!(set.interleave(), x);
        }
        assert!(polyphase_split(&x[..30], 4).is_err());
        assert!(polyphase_split(&x, 3).is_err());
    }

    #[test]
    fn delayed_windows_index_backwards() {
        let x = ramp(64);
        let w = delayed_windows(&x, 10, 4, 4).unwrap();
        assert_eq!(w[0], vec![x[10], x[14], x[18], x[22]]);
        assert_eq!(w[3], vec![x[7], x[11], x[15], x[19]]);
        assert!(delayed_windows(&x, 2, 4, 4).is_err());
        assert!(delayed_windows(&x, 60, 4, 4).is_err());
    }
}
