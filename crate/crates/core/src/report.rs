//! Sweep results as CSV and as SVG score-curve panels.
//!
//! The scores CSV has one row per `(technique, alpha_max)` with columns
//! `technique,alpha_max,s_aug_u8,s_aug_u16,s_noaug_u8,s_noaug_u16,sigma_u8,
//! sigma_u16,consistent,M,seed`. Numbers carry 6 significant digits; the
//! grayscale row leaves `alpha_max` empty.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augment::{Technique, MAX_MAGNITUDE};
use crate::error::{Error, Result};
use crate::scoring::{is_consistent, ScorePair, ScoreSummary, SweepCell};

pub const SCORES_HEADER: [&str; 11] = [
    "technique",
    "alpha_max",
    "s_aug_u8",
    "s_aug_u16",
    "s_noaug_u8",
    "s_noaug_u16",
    "sigma_u8",
    "sigma_u16",
    "consistent",
    "M",
    "seed",
];

pub const TRAINING_HEADER: [&str; 4] = ["technique", "alpha_max", "map_aug", "map_noaug"];

/// Formats with 6 significant digits, C `%g` style: fixed notation for
/// exponents in `[-5, 6)`, scientific otherwise, trailing zeros removed.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn sorted_cells(summary: &ScoreSummary) -> Vec<&SweepCell> {
    let mut cells: Vec<&SweepCell> = summary.cells.iter().collect();
    cells.sort_by(|a, b| {
        a.technique.cmp(&b.technique).then(
            a.alpha_max
                .unwrap_or(-1.0)
                .total_cmp(&b.alpha_max.unwrap_or(-1.0)),
        )
    });
    cells
}

pub fn scores_csv(summary: &ScoreSummary) -> String {
    let mut out = SCORES_HEADER.join(",");
    out.push('\n');
    let noaug = [
        fmt_sig6(summary.s_noaug.uint8),
        fmt_sig6(summary.s_noaug.uint16),
    ];
    let sigma = [
        fmt_sig6(summary.sigma.uint8),
        fmt_sig6(summary.sigma.uint16),
    ];
    for cell in sorted_cells(summary) {
        let alpha = cell.alpha_max.map(fmt_sig6).unwrap_or_default();
        let s_aug = [fmt_sig6(cell.s_aug.uint8), fmt_sig6(cell.s_aug.uint16)];
        let _ = writeln!(
            out,
            "{},{alpha},{},{},{},{},{},{},{},{},{}",
            cell.technique,
            s_aug[0],
            s_aug[1],
            noaug[0],
            noaug[1],
            sigma[0],
            sigma[1],
            printed_verdict(&s_aug[1], &noaug[1], &sigma[1]),
            summary.repetitions,
            summary.seed,
        );
    }
    out
}

/// uint16-space verdict evaluated on the printed values, so every row is
/// self-consistent when re-read.
fn printed_verdict(s_aug: &str, s_noaug: &str, sigma: &str) -> bool {
    let parse = |s: &str| s.parse::<f64>().expect("formatted number");
    is_consistent(parse(s_aug), parse(s_noaug), parse(sigma))
}

pub fn write_csv(summary: &ScoreSummary, path: &Path) -> Result<()> {
    fs::write(path, scores_csv(summary)).map_err(|e| Error::io(path, e))
}

pub fn write_json(summary: &ScoreSummary, path: &Path) -> Result<()> {
    fs::write(path, summary.to_json()).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_records(text: &str, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| Error::MalformedCsv(e.to_string()))?
        .clone();
    if found.is_empty() || found.iter().ne(header.iter().copied()) {
        return Err(Error::MalformedCsv(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader
        .records()
        .enumerate()
        .map(|(i, r)| {
            r.map(|rec| (i + 2, rec))
                .map_err(|e| Error::MalformedCsv(e.to_string()))
        })
        .collect()
}

fn parse_field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    line: usize,
) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| {
        Error::MalformedCsv(format!(
            "line {line}: cannot parse `{raw}` in column {}",
            idx + 1
        ))
    })
}

fn parse_alpha(rec: &csv::StringRecord, line: usize) -> Result<Option<f64>> {
    match rec.get(1).unwrap_or("") {
        "" => Ok(None),
        _ => parse_field(rec, 1, line).map(Some),
    }
}

/// Reads a scores CSV back into a summary. Standard errors are not part of
/// the CSV and come back as `None`.
pub fn read_scores_csv(path: &Path) -> Result<ScoreSummary> {
    let rows = csv_records(&read_text(path)?, &SCORES_HEADER)?;
    if rows.is_empty() {
        return Err(Error::MalformedCsv("no data rows".into()));
    }
    let mut cells = Vec::with_capacity(rows.len());
    let mut shared = None;
    for (line, rec) in &rows {
        let line = *line;
        let technique: Technique = rec
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::MalformedCsv(format!("line {line}: unknown technique")))?;
        let alpha_max = parse_alpha(rec, line)?;
        if technique.has_magnitude() != alpha_max.is_some() {
            return Err(Error::MalformedCsv(format!(
                "line {line}: alpha_max does not fit {technique}"
            )));
        }
        let row_shared = (
            ScorePair {
                uint8: parse_field(rec, 4, line)?,
                uint16: parse_field(rec, 5, line)?,
            },
            ScorePair {
                uint8: parse_field(rec, 6, line)?,
                uint16: parse_field(rec, 7, line)?,
            },
            parse_field::<usize>(rec, 9, line)?,
            parse_field::<u64>(rec, 10, line)?,
        );
        parse_field::<bool>(rec, 8, line)?;
        match &shared {
            None => shared = Some(row_shared),
            Some(s) if *s != row_shared => {
                return Err(Error::MalformedCsv(format!(
                    "line {line}: rows disagree on S_noaug, sigma, M or seed"
                )))
            }
            Some(_) => {}
        }
        cells.push(SweepCell {
            technique,
            alpha_max,
            s_aug: ScorePair {
                uint8: parse_field(rec, 2, line)?,
                uint16: parse_field(rec, 3, line)?,
            },
            stderr: None,
        });
    }
    let (s_noaug, sigma, repetitions, seed) = shared.expect("at least one row");
    Ok(ScoreSummary {
        s_noaug,
        sigma,
        cells,
        repetitions,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingResult {
    pub technique: Technique,
    /// Absent for grayscale.
    pub alpha_max: Option<f64>,
    pub map_aug: f64,
    pub map_noaug: f64,
}

impl TrainingResult {
    pub fn improves(&self) -> bool {
        self.map_aug > self.map_noaug
    }
}

pub fn parse_training_csv(text: &str) -> Result<Vec<TrainingResult>> {
    let rows = csv_records(text, &TRAINING_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        let name = rec.get(0).unwrap_or("");
        let technique: Technique = name
            .parse()
            .map_err(|_| Error::UnknownTechniqueInTrainingCsv(name.to_string()))?;
        let alpha_max = parse_alpha(&rec, line)?;
        let map_aug: f64 = parse_field(&rec, 2, line)?;
        let map_noaug: f64 = parse_field(&rec, 3, line)?;
        for value in [map_aug, map_noaug] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRangeMap { value, line });
            }
        }
        out.push(TrainingResult {
            technique,
            alpha_max,
            map_aug,
            map_noaug,
        });
    }
    Ok(out)
}

pub fn read_training_csv(path: &Path) -> Result<Vec<TrainingResult>> {
    parse_training_csv(&read_text(path)?)
}

/// Which score space the plot's y axis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotSpace {
    Uint8,
    #[default]
    Uint16,
}

impl PlotSpace {
    fn pick(self, p: ScorePair) -> f64 {
        match self {
            PlotSpace::Uint8 => p.uint8,
            PlotSpace::Uint16 => p.uint16,
        }
    }

    fn label(self) -> &'static str {
        match self {
            PlotSpace::Uint8 => "score (uint8)",
            PlotSpace::Uint16 => "score (uint16)",
        }
    }
}

pub const COLOR_IMPROVES: &str = "#1f4fd1";
pub const COLOR_DEGRADES: &str = "#d12a1f";
pub const COLOR_UNKNOWN: &str = "#000000";

const PANEL_W: f64 = 300.0;
const PANEL_H: f64 = 220.0;
const PANEL_COLS: usize = 4;
const PAD_LEFT: f64 = 52.0;
const PAD_RIGHT: f64 = 14.0;
const PAD_TOP: f64 = 28.0;
const PAD_BOTTOM: f64 = 36.0;

struct Panel<'a> {
    technique: Technique,
    cells: Vec<&'a SweepCell>,
}

fn segment_color(
    training: Option<&[TrainingResult]>,
    technique: Technique,
    alpha: Option<f64>,
) -> &'static str {
    let Some(rows) = training else {
        return COLOR_UNKNOWN;
    };
    let hit = rows.iter().find(|r| {
        r.technique == technique
            && match (technique.has_magnitude(), r.alpha_max, alpha) {
                (false, _, _) => true,
                (true, Some(a), Some(b)) => (a - b).abs() < 1e-9,
                _ => false,
            }
    });
    match hit {
        Some(r) if r.improves() => COLOR_IMPROVES,
        Some(_) => COLOR_DEGRADES,
        None => COLOR_UNKNOWN,
    }
}

/// SVG document with one panel per technique. Per panel: the `S_noaug`
/// dashed line inside a shaded `+-sigma` band and the `S_aug` curve over
/// `alpha_max`. Each curve segment takes the colour of its left point's
/// training verdict (blue improves, red does not, black when unknown).
pub fn render_svg(
    summary: &ScoreSummary,
    training: Option<&[TrainingResult]>,
    space: PlotSpace,
) -> Result<String> {
    let present: BTreeSet<Technique> = summary.cells.iter().map(|c| c.technique).collect();
    if let Some(rows) = training {
        if let Some(r) = rows.iter().find(|r| !present.contains(&r.technique)) {
            return Err(Error::UnknownTechniqueInTrainingCsv(
                r.technique.to_string(),
            ));
        }
    }
    let cells = sorted_cells(summary);
    let panels: Vec<Panel<'_>> = present
        .iter()
        .map(|&t| Panel {
            technique: t,
            cells: cells.iter().copied().filter(|c| c.technique == t).collect(),
        })
        .collect();

    let rows = panels.len().div_ceil(PANEL_COLS).max(1);
    let width = PANEL_W * PANEL_COLS.min(panels.len().max(1)) as f64;
    let height = PANEL_H * rows as f64 + 24.0;
    let noaug = space.pick(summary.s_noaug);
    let sigma = space.pick(summary.sigma);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="8" y="16" font-size="12">S_noaug = {} +- {} ({}), M = {}, seed = {}</text>"#,
        fmt_sig6(noaug),
        fmt_sig6(sigma),
        space.label(),
        summary.repetitions,
        summary.seed
    );

    for (idx, panel) in panels.iter().enumerate() {
        let ox = (idx % PANEL_COLS) as f64 * PANEL_W;
        let oy = 24.0 + (idx / PANEL_COLS) as f64 * PANEL_H;
        let plot_w = PANEL_W - PAD_LEFT - PAD_RIGHT;
        let plot_h = PANEL_H - PAD_TOP - PAD_BOTTOM;

        let peak = panel
            .cells
            .iter()
            .map(|c| space.pick(c.s_aug))
            .fold(noaug + sigma, f64::max);
        let y_max = if peak > 0.0 { peak * 1.1 } else { 1.0 };
        let x_of = |a: f64| PAD_LEFT + a / MAX_MAGNITUDE * plot_w;
        let y_of = |v: f64| PAD_TOP + plot_h - (v / y_max).clamp(0.0, 1.0) * plot_h;

        let _ = writeln!(
            svg,
            r#"<g class="panel" id="panel-{}" transform="translate({ox:.2},{oy:.2})">"#,
            panel.technique
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="16" text-anchor="middle" font-size="12">({}) {}</text>"#,
            PAD_LEFT + plot_w / 2.0,
            (b'a' + idx as u8) as char,
            panel.technique
        );
        // sigma band and S_noaug line
        let band_top = y_of(noaug + sigma);
        let band_bottom = y_of((noaug - sigma).max(0.0));
        let _ = writeln!(
            svg,
            r##"<rect class="sigma-band" x="{:.2}" y="{band_top:.2}" width="{plot_w:.2}" height="{:.2}" fill="#d9d9d9"/>"##,
            PAD_LEFT,
            band_bottom - band_top
        );
        let _ = writeln!(
            svg,
            r##"<line class="s-noaug" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#808080" stroke-width="1.5" stroke-dasharray="6,4"/>"##,
            PAD_LEFT,
            y_of(noaug),
            PAD_LEFT + plot_w,
            y_of(noaug)
        );
        // axes
        let _ = writeln!(
            svg,
            r##"<rect x="{PAD_LEFT:.2}" y="{PAD_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333333"/>"##
        );
        for tick in [0.0, 5.0, 10.0, 15.0, 20.0] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                x_of(tick),
                PAD_TOP + plot_h + 14.0,
                tick
            );
        }
        for frac in [0.0, 0.5, 1.0] {
            let v = y_max * frac;
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                PAD_LEFT - 4.0,
                y_of(v) + 4.0,
                fmt_sig6((v * 100.0).round() / 100.0)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">max magnitude</text>"#,
            PAD_LEFT + plot_w / 2.0,
            PAD_TOP + plot_h + 28.0
        );

        // S_aug
        if !panel.technique.has_magnitude() {
            for cell in &panel.cells {
                let y = y_of(space.pick(cell.s_aug));
                let color = segment_color(training, panel.technique, None);
                let _ = writeln!(
                    svg,
                    r#"<line class="s-aug" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
                    x_of(0.0),
                    x_of(MAX_MAGNITUDE)
                );
            }
        } else {
            for pair in panel.cells.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let color = segment_color(training, panel.technique, a.alpha_max);
                let _ = writeln!(
                    svg,
                    r#"<line class="s-aug" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                    x_of(a.alpha_max.unwrap_or(0.0)),
                    y_of(space.pick(a.s_aug)),
                    x_of(b.alpha_max.unwrap_or(0.0)),
                    y_of(space.pick(b.s_aug))
                );
            }
            for cell in &panel.cells {
                let color = segment_color(training, panel.technique, cell.alpha_max);
                let _ = writeln!(
                    svg,
                    r#"<circle class="s-aug-point" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    x_of(cell.alpha_max.unwrap_or(0.0)),
                    y_of(space.pick(cell.s_aug))
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn render_plot(
    summary: &ScoreSummary,
    training: Option<&[TrainingResult]>,
    space: PlotSpace,
    path: &Path,
) -> Result<()> {
    let svg = render_svg(summary, training, space)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary() -> ScoreSummary {
        let mut cells = Vec::new();
        for t in Technique::ALL {
            if t.has_magnitude() {
                for a in 1..=20 {
                    let v = 100.0 + a as f64 * if t == Technique::Brightness { 9.0 } else { 0.3 };
                    cells.push(SweepCell {
                        technique: t,
                        alpha_max: Some(a as f64),
                        s_aug: ScorePair {
                            uint8: v / 16.0,
                            uint16: v,
                        },
                        stderr: None,
                    });
                }
            } else {
                cells.push(SweepCell {
                    technique: t,
                    alpha_max: None,
                    s_aug: ScorePair {
                        uint8: 20.0,
                        uint16: 320.0,
                    },
                    stderr: None,
                });
            }
        }
        cells.reverse();
        ScoreSummary {
            s_noaug: ScorePair {
                uint8: 6.25,
                uint16: 100.0,
            },
            sigma: ScorePair {
                uint8: 1.875,
                uint16: 30.0,
            },
            cells,
            repetitions: 100,
            seed: 42,
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(8.0), "8");
        assert_eq!(fmt_sig6(5.656854249492381), "5.65685");
        assert_eq!(fmt_sig6(123456.7), "123457");
        assert_eq!(fmt_sig6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_sig6(0.000123456789), "0.000123457");
        assert_eq!(fmt_sig6(0.0000012345), "1.2345e-06");
        assert_eq!(fmt_sig6(99999.96), "100000");
        assert_eq!(fmt_sig6(-2.5), "-2.5");
    }

    #[test]
    fn csv_has_one_sorted_row_per_cell() {
        let text = scores_csv(&summary());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 142);
        assert_eq!(lines[0], SCORES_HEADER.join(","));
        assert!(lines[1].starts_with("brightness,1,"));
        assert!(lines[20].starts_with("brightness,20,"));
        assert!(lines.iter().any(|l| l.starts_with("grayscale,,20,320,")));
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn csv_consistent_column_matches_row_numbers() {
        let text = scores_csv(&summary());
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let s_aug: f64 = f[3].parse().unwrap();
            let noaug: f64 = f[5].parse().unwrap();
            let sigma: f64 = f[7].parse().unwrap();
            assert_eq!(f[8] == "true", is_consistent(s_aug, noaug, sigma), "{line}");
        }
    }

    #[test]
    fn csv_round_trips_through_reader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = summary();
        write_csv(&s, &path).unwrap();
        let back = read_scores_csv(&path).unwrap();
        assert_eq!(scores_csv(&back), scores_csv(&s));
        assert_eq!(back.cells.len(), 141);
    }

    #[test]
    fn training_csv_parsing() {
        let rows = parse_training_csv(
            "technique,alpha_max,map_aug,map_noaug\nbrightness,6,0.71,0.74\ngrayscale,,0.5,0.6\n",
        )
        .unwrap();
        assert_eq!(
            rows[0],
            TrainingResult {
                technique: Technique::Brightness,
                alpha_max: Some(6.0),
                map_aug: 0.71,
                map_noaug: 0.74
            }
        );
        assert_eq!(rows[1].alpha_max, None);
        assert!(matches!(
            parse_training_csv("technique,alpha_max,map_aug,map_noaug\nbrightness,6,1.3,0.74\n"),
            Err(Error::OutOfRangeMap { line: 2, .. })
        ));
        assert!(matches!(
            parse_training_csv(""),
            Err(Error::MalformedCsv(_))
        ));
        assert!(matches!(
            parse_training_csv("technique,alpha_max,map_aug,map_noaug\nhue,3,0.1,0.2\n"),
            Err(Error::UnknownTechniqueInTrainingCsv(_))
        ));
        assert!(matches!(
            parse_training_csv("a,b\n1,2\n"),
            Err(Error::MalformedCsv(_))
        ));
    }

    #[test]
    fn svg_has_one_panel_per_technique_and_black_curves() {
        let svg = render_svg(&summary(), None, PlotSpace::Uint16).unwrap();
        assert_eq!(svg.matches(r#"class="panel""#).count(), 8);
        assert!(!svg.contains(COLOR_IMPROVES));
        assert!(!svg.contains(COLOR_DEGRADES));
        assert_eq!(svg.matches(r#"class="sigma-band""#).count(), 8);
        assert_eq!(svg.matches(r#"class="s-noaug""#).count(), 8);
        // 7 x 19 segments + 1 grayscale line
        assert_eq!(svg.matches(r#"class="s-aug""#).count(), 7 * 19 + 1);
        assert_eq!(
            svg,
            render_svg(&summary(), None, PlotSpace::Uint16).unwrap()
        );
    }

    #[test]
    fn training_colours_segments_by_left_point() {
        let training = parse_training_csv(
            "technique,alpha_max,map_aug,map_noaug\nbrightness,6,0.80,0.75\nbrightness,7,0.70,0.75\n",
        )
        .unwrap();
        let s = summary();
        let svg = render_svg(&s, Some(&training), PlotSpace::Uint16).unwrap();
        let brightness: &str = svg
            .split(r#"<g class="panel""#)
            .find(|p| p.contains("panel-brightness"))
            .unwrap();
        let segs: Vec<&str> = brightness
            .lines()
            .filter(|l| l.contains(r#"class="s-aug""#))
            .collect();
        assert!(segs[5].contains(COLOR_IMPROVES));
        assert!(segs[6].contains(COLOR_DEGRADES));
        assert!(segs[0].contains(COLOR_UNKNOWN));
    }

    #[test]
    fn training_for_absent_technique_is_rejected() {
        let mut s = summary();
        s.cells.retain(|c| c.technique == Technique::Brightness);
        let training =
            parse_training_csv("technique,alpha_max,map_aug,map_noaug\nsolarize,3,0.5,0.4\n")
                .unwrap();
        assert!(matches!(
            render_svg(&s, Some(&training), PlotSpace::Uint16),
            Err(Error::UnknownTechniqueInTrainingCsv(_))
        ));
    }

    #[test]
    fn uint8_space_changes_scale_only() {
        let a = render_svg(&summary(), None, PlotSpace::Uint8).unwrap();
        let b = render_svg(&summary(), None, PlotSpace::Uint16).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.matches(r#"class="panel""#).count(), 8);
    }
}
