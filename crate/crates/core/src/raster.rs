//! Multiband image time series: data model, bundle directory I/O, cloud
//! filtering and mask-window signature extraction.
//!
//! A bundle directory holds a `manifest.json` and one raw file per image.
//! Image files are band-sequential (band-major, then row-major) little-endian
//! `u16` samples with no header, exactly `2 * C * H * W` bytes long.

use std::fs;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
const DATA_DIR: &str = "data";

/// Numeric domain of the samples held by a [`BandImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleDomain {
    /// Raw 16-bit radiometry.
    #[default]
    U16,
    /// Quantized to `[0, 255]`; samples are still stored as `u16`.
    U8,
}

/// One `C x H x W` image of a time series.
#[derive(Debug, Clone, PartialEq)]
pub struct BandImage {
    channels: usize,
    height: usize,
    width: usize,
    samples: Vec<u16>,
    domain: SampleDomain,
    pub timestamp: DateTime<Utc>,
    pub cloudy: bool,
}

impl BandImage {
    pub fn new(
        channels: usize,
        height: usize,
        width: usize,
        samples: Vec<u16>,
        timestamp: DateTime<Utc>,
        cloudy: bool,
    ) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidParams(format!(
                "image dimensions must be positive, got {channels}x{height}x{width}"
            )));
        }
        let expected = channels * height * width;
        if samples.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "image samples".into(),
                expected,
                found: samples.len(),
            });
        }
        Ok(BandImage {
            channels,
            height,
            width,
            samples,
            domain: SampleDomain::U16,
            timestamp,
            cloudy,
        })
    }

    /// Builds a uint8-domain image. Fails if any sample exceeds 255.
    pub fn new_u8(
        channels: usize,
        height: usize,
        width: usize,
        samples: Vec<u16>,
        timestamp: DateTime<Utc>,
        cloudy: bool,
    ) -> Result<Self> {
        if samples.iter().any(|&v| v > 255) {
            return Err(Error::DomainError);
        }
        let mut img = Self::new(channels, height, width, samples, timestamp, cloudy)?;
        img.domain = SampleDomain::U8;
        Ok(img)
    }

    /// Same geometry, timestamp and flags with new samples. Callers guarantee
    /// the length and domain bounds.
    pub(crate) fn with_samples(&self, samples: Vec<u16>, domain: SampleDomain) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        debug_assert!(domain == SampleDomain::U16 || samples.iter().all(|&v| v <= 255));
        BandImage {
            samples,
            domain,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> Self {
        BandImage {
            channels: self.channels,
            height: self.height,
            width: self.width,
            samples: Vec::new(),
            domain: self.domain,
            timestamp: self.timestamp,
            cloudy: self.cloudy,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn domain(&self) -> SampleDomain {
        self.domain
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn band(&self, c: usize) -> &[u16] {
        let n = self.height * self.width;
        &self.samples[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn sample(&self, c: usize, row: usize, col: usize) -> u16 {
        self.samples[(c * self.height + row) * self.width + col]
    }

    fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
}

/// Square `k x k` window anchored at `(row0, col0)`; the same window applies
/// to every band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRect {
    pub row0: usize,
    pub col0: usize,
    pub k: usize,
}

impl MaskRect {
    pub const DEFAULT_K: usize = 5;

    pub fn new(row0: usize, col0: usize, k: usize) -> Self {
        MaskRect { row0, col0, k }
    }

    /// Window centred in an `height x width` image.
    pub fn centered(height: usize, width: usize, k: usize) -> Self {
        MaskRect {
            row0: height.saturating_sub(k) / 2,
            col0: width.saturating_sub(k) / 2,
            k,
        }
    }

    pub fn fits(&self, height: usize, width: usize) -> bool {
        self.k >= 1 && self.row0 + self.k <= height && self.col0 + self.k <= width
    }

    pub fn area(&self) -> usize {
        self.k * self.k
    }

    fn check(&self, series: &str, height: usize, width: usize) -> Result<()> {
        if self.fits(height, width) {
            Ok(())
        } else {
            Err(Error::MaskOutOfBounds {
                series: series.to_string(),
                row0: self.row0,
                col0: self.col0,
                k: self.k,
                height,
                width,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    images: Vec<BandImage>,
    mask: MaskRect,
}

impl TimeSeries {
    /// Validates shared geometry, strictly increasing timestamps and the mask.
    /// Length is checked later by [`filter_cloudy`], since cloudy acquisitions
    /// may still be present here.
    pub fn new(id: impl Into<String>, images: Vec<BandImage>, mask: MaskRect) -> Result<Self> {
        let id = id.into();
        if let Some(first) = images.first() {
            let dims = first.dims();
            for (index, img) in images.iter().enumerate() {
                if img.dims() != dims {
                    return Err(Error::DimensionMismatch {
                        context: format!("series `{id}` image {index}"),
                        expected: dims.0 * dims.1 * dims.2,
                        found: img.samples.len(),
                    });
                }
                if index > 0 && img.timestamp <= images[index - 1].timestamp {
                    return Err(Error::NonMonotonicTimestamps { series: id, index });
                }
            }
            mask.check(&id, dims.1, dims.2)?;
        } else if mask.k == 0 {
            return Err(Error::InvalidParams(format!(
                "series `{id}`: mask side k must be >= 1"
            )));
        }
        Ok(TimeSeries { id, images, mask })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn images(&self) -> &[BandImage] {
        &self.images
    }

    pub fn mask(&self) -> MaskRect {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Replaces every image via `f`; geometry and timestamps must be preserved.
    pub fn try_map_images<F>(&self, f: F) -> Result<TimeSeries>
    where
        F: FnMut(&BandImage) -> Result<BandImage>,
    {
        let images = self.images.iter().map(f).collect::<Result<Vec<_>>>()?;
        TimeSeries::new(self.id.clone(), images, self.mask)
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.images.len() < min {
            Err(Error::SeriesTooShort {
                series: self.id.clone(),
                len: self.images.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesBundle {
    series: Vec<TimeSeries>,
    channels: usize,
    pub provenance: String,
}

impl TimeSeriesBundle {
    pub fn new(series: Vec<TimeSeries>, provenance: impl Into<String>) -> Result<Self> {
        let channels = series
            .iter()
            .find_map(|s| s.images.first().map(|i| i.channels))
            .ok_or(Error::RejectedEmptyBundle)?;
        for s in &series {
            for img in &s.images {
                if img.channels != channels {
                    return Err(Error::DimensionMismatch {
                        context: format!("channel count of series `{}`", s.id),
                        expected: channels,
                        found: img.channels,
                    });
                }
            }
        }
        Ok(TimeSeriesBundle {
            series,
            channels,
            provenance: provenance.into(),
        })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Total number of images across all series.
    pub fn image_count(&self) -> usize {
        self.series.iter().map(TimeSeries::len).sum()
    }

    pub fn try_map_series<F>(&self, f: F) -> Result<TimeSeriesBundle>
    where
        F: FnMut(&TimeSeries) -> Result<TimeSeries>,
    {
        let series = self.series.iter().map(f).collect::<Result<Vec<_>>>()?;
        TimeSeriesBundle::new(series, self.provenance.clone())
    }
}

/// Per-band mean over a mask window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelSignature(Vec<f64>);

impl PixelSignature {
    pub fn new(values: Vec<f64>) -> Self {
        PixelSignature(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mean of each band over the mask window. Sums are exact integer sums, so
/// the result does not depend on traversal order.
pub fn extract_signature(image: &BandImage, mask: MaskRect) -> Result<PixelSignature> {
    mask.check("<image>", image.height, image.width)?;
    let area = mask.area() as f64;
    let values = (0..image.channels)
        .map(|c| window_sum(image, c, mask, |v| v) as f64 / area)
        .collect();
    Ok(PixelSignature(values))
}

/// Integer sum of `f(sample)` over the mask window of band `c`.
#[inline]
pub(crate) fn window_sum(
    image: &BandImage,
    c: usize,
    mask: MaskRect,
    f: impl Fn(u16) -> u16,
) -> u64 {
    let mut sum = 0u64;
    for row in mask.row0..mask.row0 + mask.k {
        let start = (c * image.height + row) * image.width + mask.col0;
        sum += image.samples[start..start + mask.k]
            .iter()
            .map(|&v| f(v) as u64)
            .sum::<u64>();
    }
    sum
}

/// Drops cloudy images, preserving order.
pub fn filter_cloudy(series: &TimeSeries) -> Result<TimeSeries> {
    let images: Vec<BandImage> = series
        .images
        .iter()
        .filter(|i| !i.cloudy)
        .cloned()
        .collect();
    let filtered = TimeSeries {
        id: series.id.clone(),
        images,
        mask: series.mask,
    };
    filtered.require_len(2)?;
    Ok(filtered)
}

/// Applies [`filter_cloudy`] to every series of a bundle.
pub fn filter_bundle(bundle: &TimeSeriesBundle) -> Result<TimeSeriesBundle> {
    bundle.try_map_series(filter_cloudy)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    channels: usize,
    height: usize,
    width: usize,
    dtype: String,
    #[serde(default, skip_serializing_if = "is_u16_domain")]
    domain: SampleDomain,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
    series: Vec<ManifestSeries>,
}

fn is_u16_domain(d: &SampleDomain) -> bool {
    *d == SampleDomain::U16
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestSeries {
    id: String,
    mask: MaskRect,
    images: Vec<ManifestImage>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestImage {
    timestamp: String,
    path: String,
    cloudy: bool,
}

pub fn load_bundle(dir: &Path) -> Result<TimeSeriesBundle> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(Error::MissingFile(manifest_path));
    }
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::MalformedManifest(e.to_string()))?;
    if manifest.version != 1 {
        return Err(Error::MalformedManifest(format!(
            "unsupported version {}",
            manifest.version
        )));
    }
    if manifest.dtype != "u16le" {
        return Err(Error::MalformedManifest(format!(
            "unsupported dtype `{}`",
            manifest.dtype
        )));
    }
    let (c, h, w) = (manifest.channels, manifest.height, manifest.width);
    if c == 0 || h == 0 || w == 0 {
        return Err(Error::MalformedManifest(format!(
            "dimensions must be positive, got {c}x{h}x{w}"
        )));
    }
    if manifest.series.is_empty() {
        return Err(Error::RejectedEmptyBundle);
    }
    let byte_len = 2 * c * h * w;

    let mut series = Vec::with_capacity(manifest.series.len());
    for ms in manifest.series {
        ms.mask.check(&ms.id, h, w)?;
        let mut images = Vec::with_capacity(ms.images.len());
        for mi in &ms.images {
            let timestamp = DateTime::parse_from_rfc3339(&mi.timestamp)
                .map_err(|e| {
                    Error::MalformedManifest(format!(
                        "series `{}`: bad timestamp `{}`: {e}",
                        ms.id, mi.timestamp
                    ))
                })?
                .with_timezone(&Utc);
            let path = dir.join(&mi.path);
            if !path.is_file() {
                return Err(Error::MissingFile(path));
            }
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            if bytes.len() != byte_len {
                return Err(Error::DimensionMismatch {
                    context: format!("file {}", path.display()),
                    expected: byte_len,
                    found: bytes.len(),
                });
            }
            let samples = bytes
                .chunks_exact(2)
                .map(|b| u16::from_le_bytes([b[0], b[1]]))
                .collect();
            let img = match manifest.domain {
                SampleDomain::U16 => BandImage::new(c, h, w, samples, timestamp, mi.cloudy)?,
                SampleDomain::U8 => BandImage::new_u8(c, h, w, samples, timestamp, mi.cloudy)?,
            };
            images.push(img);
        }
        series.push(TimeSeries::new(ms.id, images, ms.mask)?);
    }
    TimeSeriesBundle::new(series, manifest.provenance)
}

pub fn save_bundle(bundle: &TimeSeriesBundle, dir: &Path) -> Result<()> {
    let first = bundle
        .series
        .iter()
        .find_map(|s| s.images.first())
        .ok_or(Error::RejectedEmptyBundle)?;
    let (c, h, w) = first.dims();
    let domain = first.domain;

    let data_dir = dir.join(DATA_DIR);
    fs::create_dir_all(&data_dir).map_err(|e| Error::io(&data_dir, e))?;

    let mut manifest_series = Vec::with_capacity(bundle.series.len());
    for (i, s) in bundle.series.iter().enumerate() {
        let mut entries = Vec::with_capacity(s.images.len());
        for (t, img) in s.images.iter().enumerate() {
            if img.dims() != (c, h, w) {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "series `{}` image {t} (bundle files share one geometry)",
                        s.id
                    ),
                    expected: c * h * w,
                    found: img.samples.len(),
                });
            }
            if img.domain != domain {
                return Err(Error::DomainError);
            }
            let rel = format!("{DATA_DIR}/s{i:04}_t{t:04}.u16");
            let path = dir.join(&rel);
            let bytes: Vec<u8> = img.samples.iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            entries.push(ManifestImage {
                timestamp: img.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
                path: rel,
                cloudy: img.cloudy,
            });
        }
        manifest_series.push(ManifestSeries {
            id: s.id.clone(),
            mask: s.mask,
            images: entries,
        });
    }

    let manifest = Manifest {
        version: 1,
        channels: c,
        height: h,
        width: w,
        dtype: "u16le".into(),
        domain,
        provenance: bundle.provenance.clone(),
        series: manifest_series,
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::MalformedManifest(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone};
    use proptest::prelude::*;

    fn ts(day: i64) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2018, 1, 1, 10, 30, 0).unwrap() + Duration::days(day)
    }

    fn constant_image(c: usize, h: usize, w: usize, vals: &[u16], day: i64) -> BandImage {
        let samples = vals
            .iter()
            .take(c)
            .flat_map(|&v| std::iter::repeat_n(v, h * w))
            .collect();
        BandImage::new(c, h, w, samples, ts(day), false).unwrap()
    }

    fn cloudy(mut img: BandImage) -> BandImage {
        img.cloudy = true;
        img
    }

    #[test]
    fn signature_of_constant_bands() {
        let img = constant_image(2, 4, 4, &[10, 20], 0);
        let sig = extract_signature(&img, MaskRect::new(1, 1, 2)).unwrap();
        assert_eq!(sig.values(), &[10.0, 20.0]);
    }

    #[test]
    fn signature_is_mean_of_window() {
        let samples = vec![10, 20, 30, 40];
        let img = BandImage::new(1, 2, 2, samples, ts(0), false).unwrap();
        let sig = extract_signature(&img, MaskRect::new(0, 0, 2)).unwrap();
        assert_eq!(sig.values(), &[25.0]);
    }

    #[test]
    fn single_pixel_window() {
        let samples: Vec<u16> = (0..2 * 3 * 4).collect();
        let img = BandImage::new(2, 3, 4, samples, ts(0), false).unwrap();
        let sig = extract_signature(&img, MaskRect::new(2, 1, 1)).unwrap();
        assert_eq!(
            sig.values(),
            &[img.sample(0, 2, 1) as f64, img.sample(1, 2, 1) as f64]
        );
    }

    #[test]
    fn signature_rejects_window_outside_image() {
        let img = constant_image(1, 4, 4, &[1], 0);
        assert!(matches!(
            extract_signature(&img, MaskRect::new(3, 0, 2)),
            Err(Error::MaskOutOfBounds { .. })
        ));
    }

    #[test]
    fn cloudy_images_are_dropped_in_order() {
        let imgs: Vec<_> = (0..5)
            .map(|d| constant_image(1, 2, 2, &[d as u16], d))
            .collect();
        let imgs: Vec<_> = imgs
            .into_iter()
            .enumerate()
            .map(|(i, im)| if i == 1 || i == 3 { cloudy(im) } else { im })
            .collect();
        let s = TimeSeries::new("a", imgs, MaskRect::new(0, 0, 1)).unwrap();
        let f = filter_cloudy(&s).unwrap();
        let kept: Vec<u16> = f.images().iter().map(|i| i.sample(0, 0, 0)).collect();
        assert_eq!(kept, vec![0, 2, 4]);
        assert_eq!(filter_cloudy(&f).unwrap(), f);
    }

    #[test]
    fn clear_series_is_unchanged_by_filter() {
        let imgs: Vec<_> = (0..3).map(|d| constant_image(1, 2, 2, &[7], d)).collect();
        let s = TimeSeries::new("a", imgs, MaskRect::new(0, 0, 2)).unwrap();
        assert_eq!(filter_cloudy(&s).unwrap(), s);
    }

    #[test]
    fn mostly_cloudy_series_is_too_short() {
        let imgs: Vec<_> = (0..4)
            .map(|d| {
                let im = constant_image(1, 2, 2, &[7], d);
                if d > 0 {
                    cloudy(im)
                } else {
                    im
                }
            })
            .collect();
        let s = TimeSeries::new("a", imgs, MaskRect::new(0, 0, 1)).unwrap();
        assert!(matches!(
            filter_cloudy(&s),
            Err(Error::SeriesTooShort { len: 1, .. })
        ));
    }

    #[test]
    fn duplicate_timestamps_rejected() {
        let imgs = vec![
            constant_image(1, 2, 2, &[1], 3),
            constant_image(1, 2, 2, &[2], 3),
        ];
        assert!(matches!(
            TimeSeries::new("a", imgs, MaskRect::new(0, 0, 1)),
            Err(Error::NonMonotonicTimestamps { index: 1, .. })
        ));
    }

    #[test]
    fn mismatched_channels_rejected_by_bundle() {
        let a = TimeSeries::new(
            "a",
            vec![constant_image(1, 2, 2, &[1], 0)],
            MaskRect::new(0, 0, 1),
        )
        .unwrap();
        let b = TimeSeries::new(
            "b",
            vec![constant_image(2, 2, 2, &[1, 2], 0)],
            MaskRect::new(0, 0, 1),
        )
        .unwrap();
        assert!(TimeSeriesBundle::new(vec![a, b], "").is_err());
        assert!(matches!(
            TimeSeriesBundle::new(vec![], ""),
            Err(Error::RejectedEmptyBundle)
        ));
    }

    fn small_bundle() -> TimeSeriesBundle {
        let imgs: Vec<_> = (0..3)
            .map(|d| {
                let samples: Vec<u16> = (0..2 * 6 * 5)
                    .map(|v| (v * 31 + d as u16 * 7) % 4000)
                    .collect();
                let mut im = BandImage::new(2, 6, 5, samples, ts(d), false).unwrap();
                im.cloudy = d == 1;
                im
            })
            .collect();
        let s = TimeSeries::new("tile-1", imgs, MaskRect::new(1, 2, 3)).unwrap();
        TimeSeriesBundle::new(vec![s], "unit test").unwrap()
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let b = small_bundle();
        save_bundle(&b, dir.path()).unwrap();
        let back = load_bundle(dir.path()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.series().len(), 1);
        assert_eq!(back.series()[0].len(), 3);
    }

    #[test]
    fn file_size_follows_layout() {
        let dir = tempfile::tempdir().unwrap();
        let samples = vec![0u16; 12 * 120 * 120];
        let imgs = vec![
            BandImage::new(12, 120, 120, samples.clone(), ts(0), false).unwrap(),
            BandImage::new(12, 120, 120, samples, ts(1), false).unwrap(),
        ];
        let s = TimeSeries::new("x", imgs, MaskRect::new(0, 0, 5)).unwrap();
        save_bundle(&TimeSeriesBundle::new(vec![s], "").unwrap(), dir.path()).unwrap();
        for entry in fs::read_dir(dir.path().join(DATA_DIR)).unwrap() {
            let len = entry.unwrap().metadata().unwrap().len();
            assert_eq!(len, 2 * 12 * 120 * 120);
        }
    }

    #[test]
    fn truncated_file_is_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        save_bundle(&small_bundle(), dir.path()).unwrap();
        let victim = dir.path().join(DATA_DIR).join("s0000_t0002.u16");
        let bytes = fs::read(&victim).unwrap();
        fs::write(&victim, &bytes[..bytes.len() - 2]).unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn missing_image_file_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::MissingFile(_))
        ));
        save_bundle(&small_bundle(), dir.path()).unwrap();
        fs::remove_file(dir.path().join(DATA_DIR).join("s0000_t0000.u16")).unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn mask_outside_manifest_geometry() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("d")).unwrap();
        fs::write(dir.path().join("d/a.u16"), vec![0u8; 2 * 64 * 64]).unwrap();
        let manifest = r#"{"version":1,"channels":1,"height":64,"width":64,"dtype":"u16le",
            "series":[{"id":"s","mask":{"row0":62,"col0":62,"k":5},
            "images":[{"timestamp":"2019-05-01T10:00:00Z","path":"d/a.u16","cloudy":false}]}]}"#;
        fs::write(dir.path().join(MANIFEST_FILE), manifest).unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::MaskOutOfBounds { .. })
        ));
    }

    #[test]
    fn malformed_manifest() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(MANIFEST_FILE), "{\"version\": 1,").unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::MalformedManifest(_))
        ));
        fs::write(
            dir.path().join(MANIFEST_FILE),
            r#"{"version":1,"channels":1,"height":2,"width":2,"dtype":"f32","series":[]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_bundle(dir.path()),
            Err(Error::MalformedManifest(_))
        ));
    }

    proptest! {
        #[test]
        fn signature_is_affine(
            vals in proptest::collection::vec(0u16..1000, 16),
            a in 0u16..20,
            b in 0u16..500,
        ) {
            let img = BandImage::new(1, 4, 4, vals.clone(), ts(0), false).unwrap();
            let scaled: Vec<u16> = vals.iter().map(|&v| a * v + b).collect();
            let img2 = BandImage::new(1, 4, 4, scaled, ts(0), false).unwrap();
            let mask = MaskRect::new(1, 0, 3);
            let s1 = extract_signature(&img, mask).unwrap().values()[0];
            let s2 = extract_signature(&img2, mask).unwrap().values()[0];
            prop_assert!((s2 - (a as f64 * s1 + b as f64)).abs() < 1e-9);
        }

        #[test]
        fn signature_ignores_pixel_order_in_window(
            vals in proptest::collection::vec(0u16..=u16::MAX, 9),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut shuffled = vals.clone();
            shuffled.shuffle(&mut crate::rng::substream(seed, &[]));
            let mask = MaskRect::new(0, 0, 3);
            let a = BandImage::new(1, 3, 3, vals, ts(0), false).unwrap();
            let b = BandImage::new(1, 3, 3, shuffled, ts(0), false).unwrap();
            prop_assert_eq!(extract_signature(&a, mask).unwrap(), extract_signature(&b, mask).unwrap());
        }
    }
}
