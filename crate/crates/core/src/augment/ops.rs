//! Per-technique pixel operators.
//!
//! Each operator is expressed as a pure function of `(image, c, row, col)`
//! so that the full-image path and the mask-window path perform the same
//! floating-point operations in the same order.

use crate::raster::{BandImage, MaskRect, PixelSignature, SampleDomain};
use crate::rng::normal_at;

use super::{AugmentDraw, Technique};

const SMOOTH_CENTER_WEIGHT: u64 = 5;
const SMOOTH_TOTAL_WEIGHT: f64 = 13.0;

/// Rounds half away from zero and clamps into `[0, 255]`.
#[inline]
fn to_u8(x: f64) -> u16 {
    x.round().clamp(0.0, 255.0) as u16
}

/// Mirror index without repeating the edge sample (`-1 -> 1`, `n -> n - 2`).
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

pub fn enhance_factor(magnitude: f64) -> f64 {
    1.0 + 0.02 * magnitude
}

pub fn blur_sigma(magnitude: f64) -> f64 {
    0.1 * magnitude
}

pub fn noise_sigma(magnitude: f64) -> f64 {
    0.5 * magnitude
}

pub fn posterize_bits(magnitude: f64) -> u32 {
    8 - (magnitude / 5.0).floor().clamp(0.0, 4.0) as u32
}

pub fn solarize_threshold(magnitude: f64) -> f64 {
    256.0 * (1.0 - magnitude / 20.0)
}

/// Normalized 1-D Gaussian taps of radius `ceil(3 sigma)`. The 2-D kernel is
/// the outer product of these taps with itself.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn channel_means(image: &BandImage) -> Vec<f64> {
    let n = (image.height() * image.width()) as f64;
    (0..image.channels())
        .map(|c| image.band(c).iter().map(|&v| v as u64).sum::<u64>() as f64 / n)
        .collect()
}

pub(crate) enum PixelOp {
    Identity,
    Scale { factor: f64 },
    Contrast { factor: f64, means: Vec<f64> },
    Blur { taps: Vec<f64> },
    Noise { sigma: f64, seed: u64 },
    Grayscale,
    Posterize { keep: u16 },
    Sharpness { factor: f64 },
    Solarize { threshold: f64 },
}

impl PixelOp {
    pub(crate) fn prepare(image: &BandImage, technique: Technique, draw: &AugmentDraw) -> PixelOp {
        if !draw.applied {
            return PixelOp::Identity;
        }
        let m = draw.magnitude.unwrap_or(0.0);
        match technique {
            Technique::Brightness => PixelOp::Scale {
                factor: enhance_factor(m),
            },
            Technique::Contrast => PixelOp::contrast(image, enhance_factor(m)),
            Technique::GaussianBlur => PixelOp::blur(blur_sigma(m)),
            Technique::GaussianNoise => PixelOp::noise(noise_sigma(m), draw.noise_seed),
            Technique::Grayscale => PixelOp::Grayscale,
            Technique::Posterize => PixelOp::posterize(posterize_bits(m)),
            Technique::Sharpness => PixelOp::Sharpness {
                factor: enhance_factor(m),
            },
            Technique::Solarize => PixelOp::Solarize {
                threshold: solarize_threshold(m),
            },
        }
    }

    fn contrast(image: &BandImage, factor: f64) -> PixelOp {
        PixelOp::Contrast {
            factor,
            means: channel_means(image),
        }
    }

    fn blur(sigma: f64) -> PixelOp {
        if sigma <= 0.0 {
            PixelOp::Identity
        } else {
            PixelOp::Blur {
                taps: gaussian_kernel(sigma),
            }
        }
    }

    fn noise(sigma: f64, seed: u64) -> PixelOp {
        if sigma <= 0.0 {
            PixelOp::Identity
        } else {
            PixelOp::Noise { sigma, seed }
        }
    }

    fn posterize(bits: u32) -> PixelOp {
        PixelOp::Posterize {
            keep: (0xFFu16 << (8 - bits)) & 0xFF,
        }
    }

    #[inline]
    fn value_at(&self, image: &BandImage, c: usize, row: usize, col: usize) -> u16 {
        let v = image.sample(c, row, col);
        match self {
            PixelOp::Identity => v,
            PixelOp::Scale { factor } => to_u8(factor * v as f64),
            PixelOp::Contrast { factor, means } => {
                let mu = means[c];
                to_u8(mu + factor * (v as f64 - mu))
            }
            PixelOp::Blur { .. } => unreachable!("blur is evaluated by region"),
            PixelOp::Noise { sigma, seed } => {
                let index = ((c * image.height() + row) * image.width() + col) as u64;
                to_u8(v as f64 + sigma * normal_at(*seed, index))
            }
            PixelOp::Grayscale => {
                let total: u64 = (0..image.channels())
                    .map(|ch| image.sample(ch, row, col) as u64)
                    .sum();
                to_u8(total as f64 / image.channels() as f64)
            }
            PixelOp::Posterize { keep } => v & keep,
            PixelOp::Sharpness { factor } => {
                let s = smooth_at(image, c, row, col);
                to_u8(s + factor * (v as f64 - s))
            }
            PixelOp::Solarize { threshold } => {
                if v as f64 >= *threshold {
                    255 - v
                } else {
                    v
                }
            }
        }
    }

    /// Evaluates rows `rows` x cols `cols` of band `c` in row-major order.
    fn region(
        &self,
        image: &BandImage,
        c: usize,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
        out: &mut Vec<u16>,
    ) {
        match self {
            PixelOp::Blur { taps } => blur_region(image, c, rows, cols, taps, out),
            _ => {
                for row in rows {
                    for col in cols.clone() {
                        out.push(self.value_at(image, c, row, col));
                    }
                }
            }
        }
    }

    pub(crate) fn apply(&self, image: &BandImage) -> BandImage {
        if let PixelOp::Identity = self {
            return image.clone();
        }
        let mut samples = Vec::with_capacity(image.samples().len());
        for c in 0..image.channels() {
            self.region(image, c, 0..image.height(), 0..image.width(), &mut samples);
        }
        image.with_samples(samples, SampleDomain::U8)
    }

    pub(crate) fn window_signature(&self, image: &BandImage, mask: MaskRect) -> PixelSignature {
        let area = mask.area() as f64;
        let mut buf = Vec::with_capacity(mask.area());
        let values = (0..image.channels())
            .map(|c| {
                buf.clear();
                self.region(
                    image,
                    c,
                    mask.row0..mask.row0 + mask.k,
                    mask.col0..mask.col0 + mask.k,
                    &mut buf,
                );
                buf.iter().map(|&v| v as u64).sum::<u64>() as f64 / area
            })
            .collect();
        PixelSignature::new(values)
    }
}

/// `[[1,1,1],[1,5,1],[1,1,1]] / 13` smoothing with reflected borders.
#[inline]
fn smooth_at(image: &BandImage, c: usize, row: usize, col: usize) -> f64 {
    let (h, w) = (image.height(), image.width());
    let mut total = 0u64;
    for dr in -1isize..=1 {
        let r = reflect(row as isize + dr, h);
        for dc in -1isize..=1 {
            let cc = reflect(col as isize + dc, w);
            let weight = if dr == 0 && dc == 0 {
                SMOOTH_CENTER_WEIGHT
            } else {
                1
            };
            total += weight * image.sample(c, r, cc) as u64;
        }
    }
    total as f64 / SMOOTH_TOTAL_WEIGHT
}

/// Separable Gaussian over a region. Horizontal partial sums are computed on
/// demand for each source row the vertical pass touches; each partial sum is
/// a fixed function of its (row, col), so any region yields the same values
/// for the pixels it shares with another.
fn blur_region(
    image: &BandImage,
    c: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    taps: &[f64],
    out: &mut Vec<u16>,
) {
    let (h, w) = (image.height(), image.width());
    let radius = (taps.len() / 2) as isize;
    let width = cols.len();
    let band = image.band(c);

    let mut needed = vec![false; h];
    for row in rows.clone() {
        for dy in -radius..=radius {
            needed[reflect(row as isize + dy, h)] = true;
        }
    }
    let col_index: Vec<Vec<usize>> = cols
        .clone()
        .map(|col| {
            (-radius..=radius)
                .map(|dx| reflect(col as isize + dx, w))
                .collect()
        })
        .collect();
    let mut horizontal = vec![0.0f64; h * width];
    for (src_row, _) in needed.iter().enumerate().filter(|(_, &n)| n) {
        let line = &band[src_row * w..(src_row + 1) * w];
        for (j, idx) in col_index.iter().enumerate() {
            let mut acc = 0.0;
            for (tap, &x) in taps.iter().zip(idx) {
                acc += tap * line[x] as f64;
            }
            horizontal[src_row * width + j] = acc;
        }
    }
    for row in rows {
        for j in 0..width {
            let mut acc = 0.0;
            for (tap, dy) in taps.iter().zip(-radius..=radius) {
                let src = reflect(row as isize + dy, h);
                acc += tap * horizontal[src * width + j];
            }
            out.push(to_u8(acc));
        }
    }
}

fn run(image: &BandImage, op: PixelOp) -> BandImage {
    op.apply(image)
}

/// Scales every sample by `1 + 0.02 * magnitude`.
pub fn op_brightness(image: &BandImage, magnitude: f64) -> BandImage {
    op_brightness_factor(image, enhance_factor(magnitude))
}

pub fn op_brightness_factor(image: &BandImage, factor: f64) -> BandImage {
    run(image, PixelOp::Scale { factor })
}

/// Blends each band with its whole-image mean.
pub fn op_contrast(image: &BandImage, magnitude: f64) -> BandImage {
    op_contrast_factor(image, enhance_factor(magnitude))
}

pub fn op_contrast_factor(image: &BandImage, factor: f64) -> BandImage {
    run(image, PixelOp::contrast(image, factor))
}

pub fn op_gaussian_blur(image: &BandImage, magnitude: f64) -> BandImage {
    run(image, PixelOp::blur(blur_sigma(magnitude)))
}

pub fn op_gaussian_noise(image: &BandImage, magnitude: f64, noise_seed: u64) -> BandImage {
    run(image, PixelOp::noise(noise_sigma(magnitude), noise_seed))
}

pub fn op_grayscale(image: &BandImage) -> BandImage {
    run(image, PixelOp::Grayscale)
}

pub fn op_posterize(image: &BandImage, magnitude: f64) -> BandImage {
    run(image, PixelOp::posterize(posterize_bits(magnitude)))
}

/// Blends each sample with its 3x3 smoothed value.
pub fn op_sharpness(image: &BandImage, magnitude: f64) -> BandImage {
    op_sharpness_factor(image, enhance_factor(magnitude))
}

pub fn op_sharpness_factor(image: &BandImage, factor: f64) -> BandImage {
    run(image, PixelOp::Sharpness { factor })
}

pub fn op_solarize(image: &BandImage, magnitude: f64) -> BandImage {
    run(
        image,
        PixelOp::Solarize {
            threshold: solarize_threshold(magnitude),
        },
    )
}
