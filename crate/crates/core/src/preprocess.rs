//! uint16 -> uint8 quantization by per-channel 99th percentile, and the
//! pseudo-inverse that maps uint8-space deviations back to uint16 units.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BandImage, SampleDomain, TimeSeriesBundle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub p99: Vec<f64>,
}

impl ChannelStats {
    pub fn new(p99: Vec<f64>) -> Result<Self> {
        if let Some(channel) = p99.iter().position(|&v| !v.is_finite() || v <= 0.0) {
            return Err(Error::DegenerateChannel { channel });
        }
        Ok(ChannelStats { p99 })
    }

    /// Same percentile for every channel.
    pub fn uniform(channels: usize, p99: f64) -> Result<Self> {
        Self::new(vec![p99; channels])
    }

    pub fn channels(&self) -> usize {
        self.p99.len()
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: ChannelStats = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParams(format!("stats file {}: {e}", path.display())))?;
        Self::new(raw.p99)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string(self).expect("stats serialize");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    fn check(&self, channels: usize) -> Result<()> {
        if self.p99.len() == channels {
            Ok(())
        } else {
            Err(Error::StatsMismatch {
                stats: self.p99.len(),
                data: channels,
            })
        }
    }
}

/// 1-based rank of the nearest-rank 99th percentile among `n` values:
/// `ceil(0.99 * n)`, computed in integers.
pub fn p99_rank(n: u64) -> u64 {
    (99 * n).div_ceil(100).max(1)
}

/// Nearest-rank 99th percentile of every channel, pooled over all images of
/// all series.
pub fn compute_p99(bundle: &TimeSeriesBundle) -> Result<ChannelStats> {
    let channels = bundle.channels();
    let mut histograms = vec![vec![0u64; 1 << 16]; channels];
    for series in bundle.series() {
        for image in series.images() {
            for (c, hist) in histograms.iter_mut().enumerate() {
                for &v in image.band(c) {
                    hist[v as usize] += 1;
                }
            }
        }
    }

    let mut p99 = Vec::with_capacity(channels);
    for (channel, hist) in histograms.iter().enumerate() {
        let n: u64 = hist.iter().sum();
        if n == 0 {
            return Err(Error::RejectedEmptyBundle);
        }
        let rank = p99_rank(n);
        let mut seen = 0u64;
        let value = hist
            .iter()
            .position(|&count| {
                seen += count;
                seen >= rank
            })
            .expect("rank within population");
        if value == 0 {
            return Err(Error::DegenerateChannel { channel });
        }
        p99.push(value as f64);
    }
    Ok(ChannelStats { p99 })
}

/// `round(255 * min(v / p99, 1))`, half away from zero.
#[inline]
pub fn quantize_sample(v: u16, p99: f64) -> u16 {
    let scaled = 255.0 * (v as f64 / p99).min(1.0);
    scaled.round().clamp(0.0, 255.0) as u16
}

pub fn quantize_to_uint8(image: &BandImage, stats: &ChannelStats) -> Result<BandImage> {
    stats.check(image.channels())?;
    if image.domain() == SampleDomain::U8 {
        return Err(Error::DomainError);
    }
    let plane = image.height() * image.width();
    let samples = image
        .samples()
        .iter()
        .enumerate()
        .map(|(idx, &v)| quantize_sample(v, stats.p99[idx / plane]))
        .collect();
    Ok(image.with_samples(samples, SampleDomain::U8))
}

pub fn quantize_bundle(
    bundle: &TimeSeriesBundle,
    stats: &ChannelStats,
) -> Result<TimeSeriesBundle> {
    bundle.try_map_series(|s| s.try_map_images(|img| quantize_to_uint8(img, stats)))
}

/// Channel-averaged uint16-space deviation from per-band uint8-space absolute
/// differences: `(1/C) * sum_c diff[c] * p99[c] / 255`.
pub fn invert_deviation_to_uint16(per_band_abs_diffs: &[f64], stats: &ChannelStats) -> Result<f64> {
    stats.check(per_band_abs_diffs.len())?;
    let total: f64 = per_band_abs_diffs
        .iter()
        .zip(&stats.p99)
        .map(|(d, p)| d * p / 255.0)
        .sum();
    Ok(total / per_band_abs_diffs.len() as f64)
}
