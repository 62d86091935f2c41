//! Deterministic synthetic bundles: stationary single-class areas whose
//! signatures drift only through scene-level gain/offset jitter and
//! per-pixel noise.

use chrono::{Duration, TimeZone, Utc};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::raster::{BandImage, MaskRect, TimeSeries, TimeSeriesBundle};
use crate::rng::substream;

/// Revisit interval between consecutive synthetic acquisitions.
const REVISIT_DAYS: i64 = 5;
/// Added to every sample of an image flagged cloudy.
const CLOUD_BRIGHTENING: f64 = 3000.0;
const BASE_RANGE: (f64, f64) = (400.0, 4000.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub n_series: usize,
    pub length: usize,
    pub channels: usize,
    pub image_size: usize,
    pub k: usize,
    /// `n_series` vectors of `channels` uint16 values.
    pub base_signatures: Vec<Vec<u16>>,
    pub gain_jitter: f64,
    pub offset_jitter: f64,
    pub pixel_noise: f64,
    pub cloud_probability: f64,
    pub seed: u64,
}

impl SynthParams {
    pub const DEFAULT_GAIN_JITTER: f64 = 0.02;
    pub const DEFAULT_OFFSET_JITTER: f64 = 20.0;
    pub const DEFAULT_PIXEL_NOISE: f64 = 10.0;
    pub const DEFAULT_IMAGE_SIZE: usize = 32;

    /// Default jitters and per-series base signatures drawn uniformly in
    /// `[400, 4000]` per channel (spectrally non-flat).
    pub fn new(n_series: usize, length: usize, channels: usize, seed: u64) -> Self {
        SynthParams {
            n_series,
            length,
            channels,
            image_size: Self::DEFAULT_IMAGE_SIZE,
            k: MaskRect::DEFAULT_K,
            base_signatures: random_bases(n_series, channels, seed),
            gain_jitter: Self::DEFAULT_GAIN_JITTER,
            offset_jitter: Self::DEFAULT_OFFSET_JITTER,
            pixel_noise: Self::DEFAULT_PIXEL_NOISE,
            cloud_probability: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_series == 0 {
            return fail("at least one series is required".into());
        }
        if self.length < 2 {
            return fail(format!("series length must be >= 2, got {}", self.length));
        }
        if self.channels == 0 || self.image_size == 0 {
            return fail("channels and image size must be positive".into());
        }
        if self.k == 0 || self.k > self.image_size {
            return fail(format!(
                "mask side {} must be in 1..={}",
                self.k, self.image_size
            ));
        }
        for (name, v) in [
            ("gain_jitter", self.gain_jitter),
            ("offset_jitter", self.offset_jitter),
            ("pixel_noise", self.pixel_noise),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!(
                    "{name} must be a finite non-negative number, got {v}"
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.cloud_probability) {
            return fail(format!(
                "cloud probability {} outside [0, 1]",
                self.cloud_probability
            ));
        }
        if self.base_signatures.len() != self.n_series
            || self
                .base_signatures
                .iter()
                .any(|b| b.len() != self.channels)
        {
            return fail(format!(
                "base signatures must be {} vectors of {} values",
                self.n_series, self.channels
            ));
        }
        Ok(())
    }
}

fn random_bases(n_series: usize, channels: usize, seed: u64) -> Vec<Vec<u16>> {
    let mut rng = substream(seed, &[u64::MAX]);
    (0..n_series)
        .map(|_| {
            (0..channels)
                .map(|_| rng.random_range(BASE_RANGE.0..=BASE_RANGE.1).round() as u16)
                .collect()
        })
        .collect()
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn generate_series(params: &SynthParams, index: usize) -> Result<TimeSeries> {
    let (c, size) = (params.channels, params.image_size);
    let plane = size * size;
    let base = &params.base_signatures[index];
    let mut rng = substream(params.seed, &[index as u64]);
    let start = Utc.with_ymd_and_hms(2017, 1, 1, 10, 30, 0).unwrap();

    let mut images = Vec::with_capacity(params.length);
    for t in 0..params.length {
        let gain = 1.0 + params.gain_jitter * normal(&mut rng);
        let offset = params.offset_jitter * normal(&mut rng);
        let cloudy = rng.random::<f64>() < params.cloud_probability;
        let haze = if cloudy { CLOUD_BRIGHTENING } else { 0.0 };
        let mut samples = Vec::with_capacity(c * plane);
        for &b in base {
            let level = b as f64 * gain + offset + haze;
            for _ in 0..plane {
                let v = level + params.pixel_noise * normal(&mut rng);
                samples.push(v.round().clamp(0.0, u16::MAX as f64) as u16);
            }
        }
        let timestamp = start + Duration::days(REVISIT_DAYS * t as i64);
        images.push(BandImage::new(c, size, size, samples, timestamp, cloudy)?);
    }
    TimeSeries::new(
        format!("synth-{index:03}"),
        images,
        MaskRect::centered(size, size, params.k),
    )
}

pub fn generate_bundle(params: &SynthParams) -> Result<TimeSeriesBundle> {
    params.validate()?;
    let series = Exec::default().try_map(params.n_series, |i| generate_series(params, i))?;
    TimeSeriesBundle::new(
        series,
        format!(
            "synthetic: seed={} gain_jitter={} offset_jitter={} pixel_noise={} cloud_probability={}",
            params.seed, params.gain_jitter, params.offset_jitter, params.pixel_noise, params.cloud_probability
        ),
    )
}
