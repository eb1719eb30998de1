use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phy::Modulation;
use crate::{Error, Result};

pub const IQ_MAGIC: [u8; 4] = *b"TFIQ";
pub const IQ_VERSION: u16 = 1;
/// magic, version, rate, overclock, 16 reserved bytes, sample count
pub const IQ_HEADER_LEN: usize = 4 + 2 + 8 + 2 + 16 + 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureMeta {
    pub sample_rate_hz: f64,
    pub overclock: u16,
}

/// Little-endian header followed by interleaved `f32` I/Q pairs.
pub fn write_iq_capture(path: &Path, samples: &[Complex64], meta: CaptureMeta) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&IQ_MAGIC)?;
    w.write_all(&IQ_VERSION.to_le_bytes())?;
    w.write_all(&meta.sample_rate_hz.to_le_bytes())?;
    w.write_all(&meta.overclock.to_le_bytes())?;
    w.write_all(&[0u8; 16])?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    for v in samples {
        w.write_all(&(v.re as f32).to_le_bytes())?;
        w.write_all(&(v.im as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_iq_capture(path: &Path) -> Result<(Vec<Complex64>, CaptureMeta)> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < 4 || bytes[..4] != IQ_MAGIC {
        return Err(Error::NotIqCapture);
    }
    if bytes.len() < IQ_HEADER_LEN {
        return Err(Error::Truncated {
            expected: IQ_HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != IQ_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let sample_rate_hz = f64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
    let overclock = u16::from_le_bytes([bytes[14], bytes[15]]);
    let count = u64::from_le_bytes(bytes[32..40].try_into().expect("8 bytes"));
    let expected = (IQ_HEADER_LEN as u64).saturating_add(count.saturating_mul(8));
    if (bytes.len() as u64) < expected {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let samples = bytes[IQ_HEADER_LEN..expected as usize]
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().expect("4 bytes"));
            let im = f32::from_le_bytes(c[4..].try_into().expect("4 bytes"));
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok((
        samples,
        CaptureMeta {
            sample_rate_hz,
            overclock,
        },
    ))
}

/// Ground truth written next to a capture so a replay can score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSidecar {
    pub scheme: Modulation,
    pub payload_symbols: usize,
    /// Payload bits without padding, as a `0`/`1` string.
    pub bits: String,
    pub ltf_start_base: f64,
    pub noise_variance: f64,
    pub cfo_hz: f64,
}

impl TrialSidecar {
    pub fn path_for(capture: &Path) -> PathBuf {
        let mut name = capture.as_os_str().to_owned();
        name.push(".json");
        PathBuf::from(name)
    }

    pub fn bit_vec(&self) -> Vec<u8> {
        self.bits.bytes().map(|b| (b == b'1') as u8).collect()
    }

    pub fn encode_bits(bits: &[u8]) -> String {
        bits.iter().map(|&b| if b != 0 { '1' } else { '0' }).collect()
    }

    pub fn write(&self, capture: &Path) -> Result<()> {
        let f = BufWriter::new(File::create(Self::path_for(capture))?);
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }

    /// `None` when the capture has no sidecar.
    pub fn read(capture: &Path) -> Result<Option<Self>> {
        let path = Self::path_for(capture);
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(serde_json::from_reader(BufReader::new(File::open(path)?))?))
    }
}
