//! Physical-consistency scoring of channel augmentations on multispectral
//! image time series.
//!
//! A pixel signature is the per-band mean over a small homogeneous window.
//! Across the acquisitions of one area, signatures drift naturally; the
//! deviation of a signature is its channel-averaged L1 distance to the
//! closest signature of another acquisition. Averaging that deviation over
//! unaugmented images gives `S_noaug`, averaging it over augmented images
//! gives `S_aug`, and an augmentation is consistent with natural variation
//! when `S_aug` stays within one standard deviation of `S_noaug`.
//!
//! Pipeline: [`raster::load_bundle`] -> [`raster::filter_bundle`] ->
//! [`preprocess::compute_p99`] -> [`preprocess::quantize_bundle`] ->
//! [`scoring::sweep`] -> [`report::write_csv`] / [`report::render_plot`].

pub mod augment;
pub mod cli;
pub mod error;
pub mod exec;
pub mod preprocess;
pub mod raster;
pub mod report;
pub mod rng;
pub mod scoring;
pub mod synth;

pub use augment::{AugmentDraw, AugmentSpec, MagnitudeMode, Technique};
pub use error::{Error, Result};
pub use exec::Exec;
pub use preprocess::ChannelStats;
pub use raster::{BandImage, MaskRect, PixelSignature, TimeSeries, TimeSeriesBundle};
pub use scoring::{ScoreOptions, ScorePair, ScoreSummary, SweepConfig};
pub use synth::SynthParams;
