//! Channel augmentation techniques on uint8-domain images, the 0..=20
//! magnitude model, and the stochastic draw (application probability and
//! magnitude interval).
//!
//! Magnitude to parameter maps:
//!
//! | technique      | sign     | parameter at magnitude `a`                     |
//! |----------------|----------|------------------------------------------------|
//! | brightness     | signed   | factor `1 + 0.02 a`                            |
//! | contrast       | signed   | factor `1 + 0.02 a` around the channel mean    |
//! | sharpness      | signed   | factor `1 + 0.02 a` against a 3x3 smoothing    |
//! | gaussian-blur  | unsigned | `sigma = 0.1 a`, radius `ceil(3 sigma)`        |
//! | gaussian-noise | unsigned | `sigma = 0.5 a` uint8 units                    |
//! | posterize      | unsigned | keep `8 - floor(a / 5)` bits                   |
//! | solarize       | unsigned | invert samples `>= 256 (1 - a / 20)`           |
//! | grayscale      | none     | unweighted channel mean                        |

mod ops;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{extract_signature, BandImage, MaskRect, PixelSignature, SampleDomain};

use ops::PixelOp;
pub use ops::{
    gaussian_kernel, op_brightness, op_brightness_factor, op_contrast, op_contrast_factor,
    op_gaussian_blur, op_gaussian_noise, op_grayscale, op_posterize, op_sharpness,
    op_sharpness_factor, op_solarize,
};

/// Upper end of the magnitude scale.
pub const MAX_MAGNITUDE: f64 = 20.0;

pub const DEFAULT_APPLY_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technique {
    Brightness,
    Contrast,
    GaussianBlur,
    GaussianNoise,
    Grayscale,
    Posterize,
    Sharpness,
    Solarize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signedness {
    /// Magnitudes drawn from `[-alpha_max, alpha_max]`.
    Signed,
    /// Magnitudes drawn from `[0, alpha_max]`.
    Unsigned,
    MagnitudeFree,
}

impl Technique {
    pub const ALL: [Technique; 8] = [
        Technique::Brightness,
        Technique::Contrast,
        Technique::GaussianBlur,
        Technique::GaussianNoise,
        Technique::Grayscale,
        Technique::Posterize,
        Technique::Sharpness,
        Technique::Solarize,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Technique::Brightness => "brightness",
            Technique::Contrast => "contrast",
            Technique::GaussianBlur => "gaussian-blur",
            Technique::GaussianNoise => "gaussian-noise",
            Technique::Grayscale => "grayscale",
            Technique::Posterize => "posterize",
            Technique::Sharpness => "sharpness",
            Technique::Solarize => "solarize",
        }
    }

    pub fn signedness(self) -> Signedness {
        match self {
            Technique::Brightness | Technique::Contrast | Technique::Sharpness => {
                Signedness::Signed
            }
            Technique::Grayscale => Signedness::MagnitudeFree,
            _ => Signedness::Unsigned,
        }
    }

    pub fn has_magnitude(self) -> bool {
        self.signedness() != Signedness::MagnitudeFree
    }

    /// Stable index used when deriving random substreams.
    pub fn ordinal(self) -> u64 {
        Technique::ALL.iter().position(|&t| t == self).unwrap() as u64
    }

    /// Parses a comma-separated list; `all` expands to every technique.
    pub fn parse_list(s: &str) -> Result<Vec<Technique>> {
        let mut out = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if token.eq_ignore_ascii_case("all") {
                out.extend(Technique::ALL);
            } else {
                out.push(token.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParams("empty technique list".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Technique::ALL
            .into_iter()
            .find(|t| t.token().eq_ignore_ascii_case(s) || t.token().replace('-', "_") == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown technique `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagnitudeMode {
    /// Continuous uniform over the technique's interval.
    #[default]
    UniformInterval,
    /// Always `alpha_max` when applied.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentSpec {
    pub technique: Technique,
    pub alpha_max: f64,
    pub apply_probability: f64,
    pub magnitude_mode: MagnitudeMode,
}

impl AugmentSpec {
    pub fn new(technique: Technique, alpha_max: f64) -> Result<Self> {
        if !(0.0..=MAX_MAGNITUDE).contains(&alpha_max) {
            return Err(Error::InvalidParams(format!(
                "alpha_max {alpha_max} outside [0, {MAX_MAGNITUDE}]"
            )));
        }
        Ok(AugmentSpec {
            technique,
            alpha_max: if technique.has_magnitude() {
                alpha_max
            } else {
                0.0
            },
            apply_probability: DEFAULT_APPLY_PROBABILITY,
            magnitude_mode: MagnitudeMode::UniformInterval,
        })
    }

    pub fn with_probability(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "apply probability {p} outside [0, 1]"
            )));
        }
        self.apply_probability = p;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: MagnitudeMode) -> Self {
        self.magnitude_mode = mode;
        self
    }

    /// Lower end of the magnitude interval.
    pub fn min_magnitude(&self) -> f64 {
        match self.technique.signedness() {
            Signedness::Signed => -self.alpha_max,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentDraw {
    pub applied: bool,
    /// Present iff applied and the technique carries a magnitude.
    pub magnitude: Option<f64>,
    pub noise_seed: u64,
}

impl AugmentDraw {
    pub const NOT_APPLIED: AugmentDraw = AugmentDraw {
        applied: false,
        magnitude: None,
        noise_seed: 0,
    };

    pub fn applied(magnitude: Option<f64>, noise_seed: u64) -> Self {
        AugmentDraw {
            applied: true,
            magnitude,
            noise_seed,
        }
    }
}

/// Draws the application coin, a magnitude and a noise seed. Always consumes
/// the same number of values from `rng`, whatever the outcome.
pub fn sample_draw<R: Rng + ?Sized>(spec: &AugmentSpec, rng: &mut R) -> AugmentDraw {
    let coin: f64 = rng.random();
    let unit: f64 = rng.random();
    let noise_seed: u64 = rng.random();

    let applied = coin < spec.apply_probability;
    let magnitude =
        (applied && spec.technique.has_magnitude()).then(|| match spec.magnitude_mode {
            MagnitudeMode::Fixed => spec.alpha_max,
            MagnitudeMode::UniformInterval => {
                let lo = spec.min_magnitude();
                lo + (spec.alpha_max - lo) * unit
            }
        });
    AugmentDraw {
        applied,
        magnitude,
        noise_seed,
    }
}

/// `aug(image)` for one draw.
pub fn apply(image: &BandImage, draw: &AugmentDraw, technique: Technique) -> Result<BandImage> {
    if image.domain() != SampleDomain::U8 {
        return Err(Error::DomainError);
    }
    if !draw.applied {
        return Ok(image.clone());
    }
    Ok(PixelOp::prepare(image, technique, draw).apply(image))
}

/// `sig(aug(image), mask)` without materialising the augmented image; only
/// the mask window (plus kernel support) is evaluated. Bit-identical to
/// `extract_signature(&apply(image, draw, technique)?, mask)`.
pub fn augmented_signature(
    image: &BandImage,
    mask: MaskRect,
    draw: &AugmentDraw,
    technique: Technique,
) -> Result<PixelSignature> {
    if image.domain() != SampleDomain::U8 {
        return Err(Error::DomainError);
    }
    if !draw.applied {
        return extract_signature(image, mask);
    }
    if !mask.fits(image.height(), image.width()) {
        return extract_signature(image, mask);
    }
    Ok(PixelOp::prepare(image, technique, draw).window_signature(image, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn tokens_round_trip() {
        for t in Technique::ALL {
            assert_eq!(t.token().parse::<Technique>().unwrap(), t);
        }
        assert!("hue".parse::<Technique>().is_err());
        assert_eq!(Technique::parse_list("all").unwrap().len(), 8);
        assert_eq!(
            Technique::parse_list("solarize,brightness,solarize").unwrap(),
            vec![Technique::Brightness, Technique::Solarize]
        );
    }

    #[test]
    fn ordering_is_alphabetical_by_token() {
        let mut tokens: Vec<_> = Technique::ALL.iter().map(|t| t.token()).collect();
        let sorted = {
            let mut s = tokens.clone();
            s.sort();
            s
        };
        assert_eq!(tokens, sorted);
        tokens.dedup();
        assert_eq!(tokens.len(), 8);
    }

    #[test]
    fn spec_validation() {
        assert!(AugmentSpec::new(Technique::Brightness, 20.5).is_err());
        assert!(AugmentSpec::new(Technique::Brightness, -1.0).is_err());
        assert!(AugmentSpec::new(Technique::Brightness, 3.0)
            .unwrap()
            .with_probability(1.5)
            .is_err());
        assert_eq!(
            AugmentSpec::new(Technique::Grayscale, 7.0)
                .unwrap()
                .alpha_max,
            0.0
        );
    }

    #[test]
    fn zero_probability_never_applies() {
        let spec = AugmentSpec::new(Technique::Brightness, 20.0)
            .unwrap()
            .with_probability(0.0)
            .unwrap();
        let mut rng = substream(1, &[]);
        assert!((0..10_000).all(|_| !sample_draw(&spec, &mut rng).applied));
    }

    #[test]
    fn fixed_mode_returns_alpha_max() {
        let spec = AugmentSpec::new(Technique::Brightness, 6.0)
            .unwrap()
            .with_probability(1.0)
            .unwrap()
            .with_mode(MagnitudeMode::Fixed);
        let mut rng = substream(2, &[]);
        for _ in 0..1000 {
            let d = sample_draw(&spec, &mut rng);
            assert!(d.applied);
            assert_eq!(d.magnitude, Some(6.0));
        }
    }

    #[test]
    fn grayscale_draw_has_no_magnitude() {
        let spec = AugmentSpec::new(Technique::Grayscale, 0.0)
            .unwrap()
            .with_probability(1.0)
            .unwrap();
        let d = sample_draw(&spec, &mut substream(3, &[]));
        assert!(d.applied);
        assert_eq!(d.magnitude, None);
    }

    /// Kolmogorov-Smirnov statistic of `xs` against Uniform[lo, hi].
    fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                (cdf - i as f64 / n)
                    .abs()
                    .max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn draw_statistics_match_model() {
        let spec = AugmentSpec::new(Technique::Brightness, 20.0).unwrap();
        let mut rng = substream(4, &[]);
        let draws: Vec<_> = (0..100_000).map(|_| sample_draw(&spec, &mut rng)).collect();
        let rate = draws.iter().filter(|d| d.applied).count() as f64 / draws.len() as f64;
        assert!((rate - 0.5).abs() <= 0.01, "apply rate {rate}");
        let mags: Vec<f64> = draws.iter().filter_map(|d| d.magnitude).collect();
        assert!(mags.iter().all(|m| (-20.0..=20.0).contains(m)));
        let ks = ks_uniform(mags, -20.0, 20.0);
        assert!(ks < 0.01, "KS statistic {ks}");
    }

    #[test]
    fn unsigned_techniques_draw_non_negative() {
        for t in [
            Technique::GaussianBlur,
            Technique::GaussianNoise,
            Technique::Posterize,
            Technique::Solarize,
        ] {
            let spec = AugmentSpec::new(t, 12.0)
                .unwrap()
                .with_probability(1.0)
                .unwrap();
            let mut rng = substream(5, &[t.ordinal()]);
            for _ in 0..2000 {
                let m = sample_draw(&spec, &mut rng).magnitude.unwrap();
                assert!((0.0..=12.0).contains(&m));
            }
        }
    }
}
