use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Real sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// One-sided occupied bandwidth in Hz when known (set by pulse shaping
    /// and narrowed by filters); used for aliasing checks.
    pub occupied_bw: Option<f64>,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::param(format!("sample rate must be > 0, got {sample_rate}")));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("waveform samples must be finite"));
        }
        Ok(Self { samples, sample_rate, occupied_bw: None })
    }

    pub fn with_occupied_bw(mut self, bw: f64) -> Self {
        self.occupied_bw = Some(bw);
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn header_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".hdr");
    PathBuf::from(name)
}

/// Dumps samples as little-endian `f32` plus a `<path>.hdr` text sidecar
/// holding `sample_rate` and `length`.
pub fn write_raw(wf: &Waveform, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(wf.len() * 4);
    for &s in &wf.samples {
        bytes.extend_from_slice(&(s as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let hdr = header_path(path);
    let mut f = fs::File::create(&hdr).map_err(|e| Error::io(&hdr, e))?;
    writeln!(f, "sample_rate = {}\nlength = {}", wf.sample_rate, wf.len()).map_err(|e| Error::io(&hdr, e))?;
    Ok(())
}

/// Reads a dump written by [`write_raw`].
pub fn read_raw(path: &Path) -> Result<Waveform> {
    let hdr = header_path(path);
    let text = fs::read_to_string(&hdr).map_err(|e| Error::io(&hdr, e))?;
    let mut rate = None;
    let mut length = None;
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            match k.trim() {
                "sample_rate" => rate = v.trim().parse::<f64>().ok(),
                "length" => length = v.trim().parse::<usize>().ok(),
                _ => {}
            }
        }
    }
    let (rate, length) = match (rate, length) {
        (Some(r), Some(l)) => (r, l),
        _ => return Err(Error::param(format!("malformed header {}", hdr.display()))),
    };
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != 4 * length {
        return Err(Error::Length(format!(
            "{} holds {} bytes, header says {length} samples",
            path.display(),
            bytes.len()
        )));
    }
    let samples = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).collect();
    Waveform::new(samples, rate)
}
