//! Nearest-other-timestamp signature deviation and the scores built on it.
//!
//! For an image at position `tau` of a series, the deviation of a probe
//! signature is the smallest channel-averaged L1 distance to the unaugmented
//! signature of any *other* timestamp of the same series. `S_noaug` averages
//! this over every unaugmented image; `S_aug` averages it over `M` augmented
//! draws of every image. A technique is consistent when
//! `S_aug <= S_noaug + sigma`, sigma being the population standard deviation
//! of the unaugmented deviations.
//!
//! All reductions run in a fixed `(series, tau, repetition)` order, so results
//! are bit-identical for every execution strategy and thread count.

use serde::{Deserialize, Serialize};

use crate::augment::{augmented_signature, sample_draw, AugmentSpec, MagnitudeMode, Technique};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::preprocess::{invert_deviation_to_uint16, ChannelStats};
use crate::raster::{
    extract_signature, BandImage, MaskRect, PixelSignature, TimeSeries, TimeSeriesBundle,
};
use crate::rng::substream;

/// A score expressed in uint8 (quantized) and uint16 (original) units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScorePair {
    pub uint8: f64,
    pub uint16: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord {
    pub series_id: String,
    pub tau: usize,
    pub d_u8: f64,
    pub d_u16: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoaugScore {
    pub mean: ScorePair,
    pub sigma: ScorePair,
    pub records: Vec<DeviationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugScore {
    pub mean: ScorePair,
    /// Monte Carlo standard error of `mean`, conditional on the bundle.
    pub stderr: ScorePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreOptions {
    /// Let the probe's own unaugmented timestamp compete in the minimum for
    /// augmented probes. Off by default: the minimum runs over other
    /// timestamps only, exactly as for unaugmented probes.
    pub include_own_timestamp: bool,
    pub exec: Exec,
}

/// Inclusive consistency boundary.
pub fn is_consistent(s_aug: f64, s_noaug: f64, sigma: f64) -> bool {
    s_aug <= s_noaug + sigma
}

/// Unaugmented reference signatures of one series.
struct References<'a> {
    series: &'a TimeSeries,
    sigs: Vec<PixelSignature>,
}

impl<'a> References<'a> {
    fn new(series: &'a TimeSeries) -> Result<Self> {
        series.require_len(2)?;
        let sigs = series
            .images()
            .iter()
            .map(|img| extract_signature(img, series.mask()))
            .collect::<Result<Vec<_>>>()?;
        Ok(References { series, sigs })
    }

    /// Index and L1 distance of the closest reference, skipping `exclude`.
    /// Ties resolve to the earliest timestamp.
    fn nearest(&self, probe: &[f64], exclude: Option<usize>) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, sig) in self.sigs.iter().enumerate() {
            if Some(j) == exclude {
                continue;
            }
            let l1: f64 = probe
                .iter()
                .zip(sig.values())
                .map(|(a, b)| (a - b).abs())
                .sum();
            if l1 < best.1 {
                best = (j, l1);
            }
        }
        best
    }

    fn deviation(
        &self,
        probe: &PixelSignature,
        exclude: Option<usize>,
        stats: &ChannelStats,
    ) -> Result<ScorePair> {
        let channels = self.sigs[0].len();
        if probe.len() != channels {
            return Err(Error::DimensionMismatch {
                context: format!("probe signature for series `{}`", self.series.id()),
                expected: channels,
                found: probe.len(),
            });
        }
        let (j, l1) = self.nearest(probe.values(), exclude);
        let diffs: Vec<f64> = probe
            .values()
            .iter()
            .zip(self.sigs[j].values())
            .map(|(a, b)| (a - b).abs())
            .collect();
        Ok(ScorePair {
            uint8: l1 / channels as f64,
            uint16: invert_deviation_to_uint16(&diffs, stats)?,
        })
    }
}

fn prepare<'a>(bundle: &'a TimeSeriesBundle, stats: &ChannelStats) -> Result<Vec<References<'a>>> {
    if stats.channels() != bundle.channels() {
        return Err(Error::StatsMismatch {
            stats: stats.channels(),
            data: bundle.channels(),
        });
    }
    bundle.series().iter().map(References::new).collect()
}

/// Flattened `(series, tau)` coordinates in reduction order.
fn cells(refs: &[References<'_>]) -> Vec<(usize, usize)> {
    refs.iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.sigs.len()).map(move |t| (i, t)))
        .collect()
}

/// Deviation of `probe` at position `tau` of `series`.
pub fn deviation(
    series: &TimeSeries,
    tau: usize,
    probe: &PixelSignature,
    stats: &ChannelStats,
) -> Result<DeviationRecord> {
    let refs = References::new(series)?;
    if tau >= series.len() {
        return Err(Error::InvalidParams(format!(
            "timestamp index {tau} out of range for series `{}` of length {}",
            series.id(),
            series.len()
        )));
    }
    let d = refs.deviation(probe, Some(tau), stats)?;
    Ok(DeviationRecord {
        series_id: series.id().to_string(),
        tau,
        d_u8: d.uint8,
        d_u16: d.uint16,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn population_std(xs: &[f64], mean: f64) -> f64 {
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// `S_noaug` and its population standard deviation. Works on any sample
/// domain; `stats` maps the domain's units to uint16 units.
pub fn score_noaug(bundle: &TimeSeriesBundle, stats: &ChannelStats) -> Result<NoaugScore> {
    let refs = prepare(bundle, stats)?;
    let mut records = Vec::with_capacity(bundle.image_count());
    for r in &refs {
        for (tau, sig) in r.sigs.iter().enumerate() {
            let d = r.deviation(sig, Some(tau), stats)?;
            records.push(DeviationRecord {
                series_id: r.series.id().to_string(),
                tau,
                d_u8: d.uint8,
                d_u16: d.uint16,
            });
        }
    }
    let d8: Vec<f64> = records.iter().map(|r| r.d_u8).collect();
    let d16: Vec<f64> = records.iter().map(|r| r.d_u16).collect();
    let mean_pair = ScorePair {
        uint8: mean(d8.iter().copied()),
        uint16: mean(d16.iter().copied()),
    };
    Ok(NoaugScore {
        mean: mean_pair,
        sigma: ScorePair {
            uint8: population_std(&d8, mean_pair.uint8),
            uint16: population_std(&d16, mean_pair.uint16),
        },
        records,
    })
}

/// What a probe function sees for one `(series, tau, repetition)`.
pub struct ProbeContext<'a> {
    pub series_index: usize,
    pub tau: usize,
    pub repetition: usize,
    pub image: &'a BandImage,
    pub mask: MaskRect,
}

/// Running mean and sum of squared deviations.
#[derive(Default, Clone, Copy)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    /// Adding a value equal to the current mean leaves the mean bit-identical.
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn sample_variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }
}

/// `S_aug` for an arbitrary probe generator: the mean over `(series, tau)` of
/// the per-image mean over `repetitions` probes. With equal repetition counts
/// this equals the flat mean over all `(series, tau, repetition)` triples, and
/// it reproduces `S_noaug` bit-for-bit when every probe equals the
/// unaugmented signature.
pub fn score_aug_by<F>(
    bundle: &TimeSeriesBundle,
    stats: &ChannelStats,
    repetitions: usize,
    options: ScoreOptions,
    probe: F,
) -> Result<AugScore>
where
    F: Fn(&ProbeContext<'_>) -> Result<PixelSignature> + Sync + Send,
{
    if repetitions == 0 {
        return Err(Error::InvalidParams("repetitions M must be >= 1".into()));
    }
    let refs = prepare(bundle, stats)?;
    let coords = cells(&refs);
    let per_image = options.exec.try_map(coords.len(), |cell| {
        let (i, tau) = coords[cell];
        let r = &refs[i];
        let exclude = (!options.include_own_timestamp).then_some(tau);
        let mut acc8 = Welford::default();
        let mut acc16 = Welford::default();
        for repetition in 0..repetitions {
            let ctx = ProbeContext {
                series_index: i,
                tau,
                repetition,
                image: &r.series.images()[tau],
                mask: r.series.mask(),
            };
            let d = r.deviation(&probe(&ctx)?, exclude, stats)?;
            acc8.push(d.uint8);
            acc16.push(d.uint16);
        }
        Ok::<_, Error>((acc8, acc16))
    })?;

    let n = per_image.len() as f64;
    let se = |var_sum: f64| (var_sum / repetitions as f64).sqrt() / n;
    Ok(AugScore {
        mean: ScorePair {
            uint8: mean(per_image.iter().map(|(a, _)| a.mean)),
            uint16: mean(per_image.iter().map(|(_, b)| b.mean)),
        },
        stderr: ScorePair {
            uint8: se(per_image.iter().map(|(a, _)| a.sample_variance()).sum()),
            uint16: se(per_image.iter().map(|(_, b)| b.sample_variance()).sum()),
        },
    })
}

/// Substream coordinates of one draw.
fn draw_coords(spec: &AugmentSpec, ctx: &ProbeContext<'_>) -> [u64; 6] {
    let mode = match spec.magnitude_mode {
        MagnitudeMode::UniformInterval => 0,
        MagnitudeMode::Fixed => 1,
    };
    [
        spec.technique.ordinal(),
        spec.alpha_max.to_bits(),
        mode,
        ctx.series_index as u64,
        ctx.tau as u64,
        ctx.repetition as u64,
    ]
}

pub fn score_aug_with_options(
    bundle: &TimeSeriesBundle,
    spec: &AugmentSpec,
    repetitions: usize,
    master_seed: u64,
    stats: &ChannelStats,
    options: ScoreOptions,
) -> Result<AugScore> {
    score_aug_by(bundle, stats, repetitions, options, |ctx| {
        let mut rng = substream(master_seed, &draw_coords(spec, ctx));
        let draw = sample_draw(spec, &mut rng);
        augmented_signature(ctx.image, ctx.mask, &draw, spec.technique)
    })
}

/// `S_aug` of one technique and maximum magnitude.
pub fn score_aug(
    bundle: &TimeSeriesBundle,
    spec: &AugmentSpec,
    repetitions: usize,
    master_seed: u64,
    stats: &ChannelStats,
) -> Result<AugScore> {
    score_aug_with_options(
        bundle,
        spec,
        repetitions,
        master_seed,
        stats,
        ScoreOptions::default(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub technique: Technique,
    /// `None` for grayscale, which has no magnitude.
    pub alpha_max: Option<f64>,
    pub s_aug: ScorePair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<ScorePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub s_noaug: ScorePair,
    pub sigma: ScorePair,
    pub cells: Vec<SweepCell>,
    pub repetitions: usize,
    pub seed: u64,
}

impl ScoreSummary {
    /// Verdict for a cell, decided in uint16 space.
    pub fn is_consistent(&self, cell: &SweepCell) -> bool {
        is_consistent(cell.s_aug.uint16, self.s_noaug.uint16, self.sigma.uint16)
    }

    pub fn cells_for(&self, technique: Technique) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(move |c| c.technique == technique)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub techniques: Vec<Technique>,
    pub alphas: Vec<f64>,
    pub repetitions: usize,
    pub seed: u64,
    pub apply_probability: f64,
    pub options: ScoreOptions,
}

impl SweepConfig {
    pub const DEFAULT_REPETITIONS: usize = 100;

    pub fn new(techniques: Vec<Technique>, alphas: Vec<f64>) -> Self {
        SweepConfig {
            techniques,
            alphas,
            repetitions: Self::DEFAULT_REPETITIONS,
            seed: 0,
            apply_probability: crate::augment::DEFAULT_APPLY_PROBABILITY,
            options: ScoreOptions::default(),
        }
    }

    /// Every magnitude from 1 to 20.
    pub fn default_alphas() -> Vec<f64> {
        (1..=20).map(f64::from).collect()
    }

    /// Sorted `(technique, alpha_max)` grid; grayscale contributes one entry.
    pub fn specs(&self) -> Result<Vec<AugmentSpec>> {
        if self.techniques.is_empty() || self.alphas.is_empty() {
            return Err(Error::InvalidParams(
                "sweep needs at least one technique and one magnitude".into(),
            ));
        }
        let mut techniques = self.techniques.clone();
        techniques.sort();
        techniques.dedup();
        let mut alphas = self.alphas.clone();
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();

        let mut specs = Vec::new();
        for t in techniques {
            let grid: &[f64] = if t.has_magnitude() { &alphas } else { &[0.0] };
            for &a in grid {
                specs.push(AugmentSpec::new(t, a)?.with_probability(self.apply_probability)?);
            }
        }
        Ok(specs)
    }
}

/// Scores every `(technique, alpha_max)` cell against one `S_noaug`.
pub fn sweep(
    bundle: &TimeSeriesBundle,
    config: &SweepConfig,
    stats: &ChannelStats,
) -> Result<ScoreSummary> {
    let specs = config.specs()?;
    if config.repetitions == 0 {
        return Err(Error::InvalidParams("repetitions M must be >= 1".into()));
    }
    let noaug = score_noaug(bundle, stats)?;
    let scores = config.options.exec.try_map(specs.len(), |k| {
        score_aug_with_options(
            bundle,
            &specs[k],
            config.repetitions,
            config.seed,
            stats,
            config.options,
        )
    })?;
    let cells = specs
        .iter()
        .zip(scores)
        .map(|(spec, score)| SweepCell {
            technique: spec.technique,
            alpha_max: spec.technique.has_magnitude().then_some(spec.alpha_max),
            s_aug: score.mean,
            stderr: Some(score.stderr),
        })
        .collect();
    Ok(ScoreSummary {
        s_noaug: noaug.mean,
        sigma: noaug.sigma,
        cells,
        repetitions: config.repetitions,
        seed: config.seed,
    })
}
