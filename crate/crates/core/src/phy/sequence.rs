use std::ops::Deref;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

/// Complex baseband samples or subcarrier values, guaranteed finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    values: Vec<Complex64>,
    domain: Domain,
}

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, domain })
    }

    pub fn time(values: Vec<Complex64>) -> Result<Self> {
        Self::new(values, Domain::Time)
    }

    pub fn frequency(values: Vec<Complex64>) -> Result<Self> {
        Self::new(values, Domain::Frequency)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.values
    }

    /// Mean of `|x|^2`; zero for an empty sequence.
    pub fn mean_power(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

impl Deref for ComplexSequence {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(f64::NAN, 0.0)];
        assert!(matches!(ComplexSequence::time(v), Err(Error::NonFinite(1))));
        let v = vec![Complex64::new(0.0, f64::INFINITY)];
        assert!(ComplexSequence::frequency(v).is_err());
    }
}
