//! `sigdev` command line: `synth`, `sweep` and `plot`.
//!
//! Exit codes: 0 success, 1 runtime or data error, 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::augment::{Technique, MAX_MAGNITUDE};
use crate::error::{Error, Result};
use crate::preprocess::{compute_p99, quantize_bundle, ChannelStats};
use crate::raster::{filter_bundle, load_bundle, save_bundle, MaskRect};
use crate::report::{
    read_scores_csv, read_training_csv, render_plot, write_csv, write_json, PlotSpace,
};
use crate::scoring::{sweep, ScoreOptions, SweepConfig};
use crate::synth::{generate_bundle, SynthParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sigdev",
    version,
    about = "Score channel augmentations against natural signature deviation in image time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic bundle directory
    Synth(SynthArgs),
    /// Score techniques over maximum magnitudes and write a scores CSV
    Sweep(SweepArgs),
    /// Render a scores CSV as SVG score-curve panels
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output bundle directory
    #[arg(long)]
    pub out: PathBuf,
    /// Number of time series N
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub series: u64,
    /// Images per series T
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    pub length: u64,
    /// Bands per image C
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub channels: u64,
    /// Image height and width in pixels
    #[arg(long, default_value_t = SynthParams::DEFAULT_IMAGE_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub size: u64,
    /// Mask side length k
    #[arg(long, default_value_t = MaskRect::DEFAULT_K as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplicative per-image gain standard deviation
    #[arg(long, default_value_t = SynthParams::DEFAULT_GAIN_JITTER)]
    pub gain_jitter: f64,
    /// Additive per-image offset standard deviation (uint16 units)
    #[arg(long, default_value_t = SynthParams::DEFAULT_OFFSET_JITTER)]
    pub offset_jitter: f64,
    /// Per-pixel noise standard deviation (uint16 units)
    #[arg(long, default_value_t = SynthParams::DEFAULT_PIXEL_NOISE)]
    pub pixel_noise: f64,
    /// Probability that an image is flagged (and rendered) cloudy
    #[arg(long, default_value_t = 0.0)]
    pub cloud_probability: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Bundle directory containing manifest.json
    #[arg(long)]
    pub bundle: PathBuf,
    /// Comma-separated techniques, or `all`
    #[arg(long, default_value = "all", value_parser = parse_techniques)]
    pub techniques: TechniqueList,
    /// Maximum magnitudes: `a..b` ranges and/or comma lists in [0, 20] [default: 1..20]
    #[arg(long, value_parser = parse_alpha_list)]
    pub alpha: Option<AlphaList>,
    /// Repetitions per image
    #[arg(long = "M", default_value_t = SweepConfig::DEFAULT_REPETITIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub repetitions: u64,
    /// Probability that a draw applies the technique
    #[arg(long, default_value_t = crate::augment::DEFAULT_APPLY_PROBABILITY, value_parser = parse_probability)]
    pub apply_probability: f64,
    /// Master seed for all draws
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use per-channel p99 values from this JSON file instead of the bundle's
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Write the p99 values used to this JSON file
    #[arg(long)]
    pub emit_stats: Option<PathBuf>,
    /// Scores CSV output
    #[arg(long, default_value = "scores.csv")]
    pub out: PathBuf,
    /// Optional JSON output of the full summary
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "SIGDEV_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Let an augmented probe match its own unaugmented timestamp
    #[arg(long)]
    pub include_own_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    U8,
    U16,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Scores CSV written by `sweep`
    pub scores: PathBuf,
    /// SVG output
    #[arg(long)]
    pub out: PathBuf,
    /// CSV with columns technique,alpha_max,map_aug,map_noaug
    #[arg(long)]
    pub training: Option<PathBuf>,
    /// Score space of the y axis
    #[arg(long, value_enum, default_value_t = SpaceArg::U16)]
    pub space: SpaceArg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechniqueList(pub Vec<Technique>);

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaList(pub Vec<f64>);

fn parse_techniques(s: &str) -> std::result::Result<TechniqueList, String> {
    Technique::parse_list(s)
        .map(TechniqueList)
        .map_err(|e| e.to_string())
}

fn parse_magnitude(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.0..=MAX_MAGNITUDE).contains(&v) {
        return Err(format!("magnitude {v} outside [0, {MAX_MAGNITUDE}]"));
    }
    Ok(v)
}

/// `1..20`, `2,4,6`, `0..5,10,20`. Ranges are inclusive with unit steps.
pub fn parse_alpha_list(s: &str) -> std::result::Result<AlphaList, String> {
    let mut out = Vec::new();
    for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = token.split_once("..") {
            let (lo, hi) = (
                parse_magnitude(a)?,
                parse_magnitude(b.trim_start_matches('='))?,
            );
            if lo > hi {
                return Err(format!("empty range `{token}`"));
            }
            let mut v = lo;
            while v <= hi {
                out.push(v);
                v += 1.0;
            }
        } else {
            out.push(parse_magnitude(token)?);
        }
    }
    if out.is_empty() {
        return Err("no magnitudes given".into());
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(AlphaList(out))
}

fn parse_probability(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("probability {p} outside [0, 1]"))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Plot(a) => cmd_plot(&a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn cmd_synth(args: &SynthArgs) -> std::result::Result<(), Failure> {
    let mut params = SynthParams::new(
        args.series as usize,
        args.length as usize,
        args.channels as usize,
        args.seed,
    );
    params.image_size = args.size as usize;
    params.k = args.k as usize;
    params.gain_jitter = args.gain_jitter;
    params.offset_jitter = args.offset_jitter;
    params.pixel_noise = args.pixel_noise;
    params.cloud_probability = args.cloud_probability;
    params
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let bundle = generate_bundle(&params)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    save_bundle(&bundle, &args.out)?;
    println!(
        "wrote {} series x {} images ({} bands, {}x{}) to {}",
        params.n_series,
        params.length,
        params.channels,
        params.image_size,
        params.image_size,
        args.out.display()
    );
    Ok(())
}

fn with_threads<R: Send>(threads: Option<u64>, f: impl FnOnce() -> R + Send) -> Result<R> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(f())
}

fn cmd_sweep(args: &SweepArgs) -> std::result::Result<(), Failure> {
    let techniques = args.techniques.0.clone();
    if args.alpha.is_some() && techniques.contains(&Technique::Grayscale) {
        eprintln!("warning: grayscale has no magnitude; --alpha is ignored for it");
    }
    let alphas = args
        .alpha
        .as_ref()
        .map(|a| a.0.clone())
        .unwrap_or_else(SweepConfig::default_alphas);

    let bundle = filter_bundle(&load_bundle(&args.bundle)?)?;
    let stats = match &args.stats {
        Some(path) => ChannelStats::load(path)?,
        None => compute_p99(&bundle)?,
    };
    if let Some(path) = &args.emit_stats {
        stats.save(path)?;
    }
    let quantized = quantize_bundle(&bundle, &stats)?;

    let config = SweepConfig {
        repetitions: args.repetitions as usize,
        seed: args.seed,
        apply_probability: args.apply_probability,
        options: ScoreOptions {
            include_own_timestamp: args.include_own_timestamp,
            ..ScoreOptions::default()
        },
        ..SweepConfig::new(techniques, alphas)
    };
    let summary = with_threads(args.threads, || sweep(&quantized, &config, &stats))??;

    write_csv(&summary, &args.out)?;
    if let Some(path) = &args.json {
        write_json(&summary, path)?;
    }

    println!(
        "S_noaug = {:.4} +- {:.4} (uint16), {:.4} +- {:.4} (uint8) over {} series / {} images",
        summary.s_noaug.uint16,
        summary.sigma.uint16,
        summary.s_noaug.uint8,
        summary.sigma.uint8,
        quantized.series().len(),
        quantized.image_count()
    );
    let flagged: Vec<String> = summary
        .cells
        .iter()
        .filter(|c| !summary.is_consistent(c))
        .map(|c| match c.alpha_max {
            Some(a) => format!("{}@{a}", c.technique),
            None => c.technique.to_string(),
        })
        .collect();
    println!(
        "{} of {} cells exceed S_noaug + sigma{}{}",
        flagged.len(),
        summary.cells.len(),
        if flagged.is_empty() { "" } else { ": " },
        flagged.join(" ")
    );
    println!("scores written to {}", args.out.display());
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> std::result::Result<(), Failure> {
    let summary = read_scores_csv(&args.scores)?;
    let training = args
        .training
        .as_deref()
        .map(read_training_csv)
        .transpose()?;
    let space = match args.space {
        SpaceArg::U8 => PlotSpace::Uint8,
        SpaceArg::U16 => PlotSpace::Uint16,
    };
    render_plot(&summary, training.as_deref(), space, &args.out)?;
    println!("plot written to {}", args.out.display());
    Ok(())
}
