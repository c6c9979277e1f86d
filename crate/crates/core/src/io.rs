//! Config parsing, figure presets and deterministic CSV/JSON/SVG emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coins::{basis_state, coin_by_name, phi1, phi2, phi3, CoinOperator};
use crate::embed::{run_embedded_2d, EmbeddingParams};
use crate::error::{Error, Result};
use crate::matrix::{C64, CoinVec, coin_norm_sq};
use crate::walk::{evolve, position_distribution, ShiftVector, WalkConfig};

/// Schema tag written into every output; bump when the layout changes.
pub const SCHEMA_VERSION: &str = "coinwalk.v1";
/// The coin-state-to-shift assignment figures depend on.
pub const SHIFT_CONVENTION: &str = "H+,H-,V+,V- -> e0,e1,e2,e3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Walk1d,
    Walk2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }
}

/// Initial state: a named state or 8 decimal components (re, im per coin
/// amplitude).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Named(String),
    Components(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_coin")]
    coin: String,
    #[serde(default)]
    apply_sagnac_swap: bool,
    #[serde(default = "default_shifts")]
    shifts: [i64; 4],
    #[serde(default = "default_steps")]
    steps: i64,
    #[serde(default = "default_initial")]
    initial: InitialSpec,
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default)]
    n: Option<i64>,
    #[serde(default)]
    recenter: bool,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default = "default_format")]
    format: OutputFormat,
}

fn default_coin() -> String {
    "hadamard4".into()
}
fn default_shifts() -> [i64; 4] {
    [1, -1, 2, -2]
}
fn default_steps() -> i64 {
    12
}
fn default_initial() -> InitialSpec {
    InitialSpec::Named("phi1".into())
}
fn default_mode() -> Mode {
    Mode::Walk1d
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub coin: CoinOperator,
    pub apply_sagnac_swap: bool,
    pub shifts: ShiftVector,
    pub steps: u32,
    pub initial: CoinVec,
    pub initial_label: String,
    pub mode: Mode,
    pub segment_n: Option<i64>,
    pub recenter: bool,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Resolves a named or component-list initial state to a normalized CoinVec.
pub fn resolve_initial(spec: &InitialSpec) -> Result<(CoinVec, String)> {
    match spec {
        InitialSpec::Named(name) => {
            let v = match name.as_str() {
                "phi1" => phi1(),
                "phi2" => phi2(),
                "phi3" => phi3(),
                _ => {
                    if let Some(idx) = name.strip_prefix("basis:") {
                        let idx: usize = idx
                            .parse()
                            .map_err(|_| Error::UnknownInitialState(name.clone()))?;
                        if idx > 3 {
                            return Err(Error::UnknownInitialState(name.clone()));
                        }
                        basis_state(idx)
                    } else {
                        return Err(Error::UnknownInitialState(name.clone()));
                    }
                }
            };
            Ok((v, name.clone()))
        }
        InitialSpec::Components(parts) => {
            if parts.len() != 8 {
                return Err(Error::Config(format!(
                    "initial state needs 8 components, got {}",
                    parts.len()
                )));
            }
            let mut v = [C64::new(0.0, 0.0); 4];
            for j in 0..4 {
                v[j] = C64::new(parts[2 * j], parts[2 * j + 1]);
            }
            let norm = coin_norm_sq(&v).sqrt();
            if !norm.is_finite() || norm < 1e-9 {
                return Err(Error::NotNormalized(norm));
            }
            for a in &mut v {
                *a /= norm;
            }
            Ok((v, "custom".into()))
        }
    }
}

/// Parses and validates a JSON experiment config, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    build_config(raw)
}

fn build_config(raw: RawConfig) -> Result<ExperimentConfig> {
    let coin = coin_by_name(&raw.coin)?;
    let (initial, initial_label) = resolve_initial(&raw.initial)?;
    if raw.steps < 0 {
        return Err(Error::NegativeSteps(raw.steps));
    }
    let segment_n = match raw.mode {
        Mode::Walk2d => {
            let n = raw.n.unwrap_or(21);
            if n < 3 || n % 2 == 0 {
                return Err(Error::EvenSegmentLength(n));
            }
            Some(n)
        }
        Mode::Walk1d => raw.n,
    };
    Ok(ExperimentConfig {
        coin,
        apply_sagnac_swap: raw.apply_sagnac_swap,
        shifts: ShiftVector(raw.shifts),
        steps: raw.steps as u32,
        initial,
        initial_label,
        mode: raw.mode,
        segment_n,
        recenter: raw.recenter,
        output: raw.output,
        format: raw.format,
    })
}

/// One row of a 1D distribution table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub step: u32,
    pub position: i64,
    #[serde(rename = "p_Hp")]
    pub p_hp: f64,
    #[serde(rename = "p_Hm")]
    pub p_hm: f64,
    #[serde(rename = "p_Vp")]
    pub p_vp: f64,
    #[serde(rename = "p_Vm")]
    pub p_vm: f64,
    pub p_total: f64,
}

/// Metadata header carried by every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema: String,
    pub convention: String,
    pub coin: String,
    pub initial: String,
    pub shifts: [i64; 4],
    pub sagnac_swap: bool,
    pub recenter: bool,
}

/// Everything an experiment run produced.
#[derive(Debug, Clone)]
pub enum RunOutput {
    OneD {
        meta: RunMetadata,
        records: Vec<DistributionRecord>,
    },
    TwoD {
        meta: RunMetadata,
        n: i64,
        steps: u32,
        cells: Vec<(i64, i64, f64)>,
    },
}

fn metadata(cfg: &ExperimentConfig) -> RunMetadata {
    RunMetadata {
        schema: SCHEMA_VERSION.into(),
        convention: SHIFT_CONVENTION.into(),
        coin: cfg.coin.name.clone(),
        initial: cfg.initial_label.clone(),
        shifts: cfg.shifts.0,
        sagnac_swap: cfg.apply_sagnac_swap,
        recenter: cfg.recenter,
    }
}

/// Runs a validated experiment to completion.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let meta = metadata(cfg);
    match cfg.mode {
        Mode::Walk1d => {
            let mut walk = WalkConfig::new(cfg.coin.clone(), cfg.initial, cfg.steps)?;
            walk.apply_sagnac_swap = cfg.apply_sagnac_swap;
            walk.shifts = cfg.shifts;
            walk.recenter = cfg.recenter;
            let states = evolve(&walk)?;
            let mut records = Vec::new();
            for s in &states {
                for (&n, v) in s.positions() {
                    let ps: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
                    records.push(DistributionRecord {
                        step: s.step_index(),
                        position: n,
                        p_hp: ps[0],
                        p_hm: ps[1],
                        p_vp: ps[2],
                        p_vm: ps[3],
                        p_total: ps.iter().sum(),
                    });
                }
            }
            Ok(RunOutput::OneD { meta, records })
        }
        Mode::Walk2d => {
            let n = cfg.segment_n.unwrap_or(21);
            let params = EmbeddingParams::new(n, cfg.steps)?;
            let grid = run_embedded_2d(&cfg.coin, &cfg.initial, &params)?;
            let cells = grid.into_iter().map(|((x, y), p)| (x, y, p)).collect();
            Ok(RunOutput::TwoD {
                meta,
                n,
                steps: cfg.steps,
                cells,
            })
        }
    }
}

fn fmt_f64(x: f64) -> String {
    // 17 significant digits: round-trips f64 exactly
    format!("{x:.16e}")
}

fn meta_comment_lines(meta: &RunMetadata, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    let shifts = meta
        .shifts
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let _ = writeln!(out, "# schema={}", meta.schema);
    let _ = writeln!(out, "# convention={}", meta.convention);
    let _ = writeln!(out, "# coin={}", meta.coin);
    let _ = writeln!(out, "# initial={}", meta.initial);
    let _ = writeln!(out, "# shifts={shifts}");
    let _ = writeln!(out, "# sagnac_swap={}", meta.sagnac_swap);
    let _ = writeln!(out, "# recenter={}", meta.recenter);
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

/// Serializes a run in the requested format.
pub fn emit(output: &RunOutput, format: OutputFormat) -> Result<Vec<u8>> {
    let text = match (output, format) {
        (RunOutput::OneD { meta, records }, OutputFormat::Csv) => {
            if records.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            let mut s = meta_comment_lines(meta, &[]);
            s.push_str("step,position,p_Hp,p_Hm,p_Vp,p_Vm,p_total\n");
            for r in records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.step,
                    r.position,
                    fmt_f64(r.p_hp),
                    fmt_f64(r.p_hm),
                    fmt_f64(r.p_vp),
                    fmt_f64(r.p_vm),
                    fmt_f64(r.p_total)
                );
            }
            s
        }
        (RunOutput::TwoD { meta, n, steps, cells }, OutputFormat::Csv) => {
            if cells.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            let extra = [("N", n.to_string()), ("steps", steps.to_string())];
            let mut s = meta_comment_lines(meta, &extra);
            s.push_str("x,y,p\n");
            for (x, y, p) in cells {
                let _ = writeln!(s, "{},{},{}", x, y, fmt_f64(*p));
            }
            s
        }
        (RunOutput::OneD { meta, records }, OutputFormat::Json) => {
            if records.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            let value = serde_json::json!({ "meta": meta, "records": records });
            let mut s = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::Config(e.to_string()))?;
            s.push('\n');
            s
        }
        (RunOutput::TwoD { meta, n, steps, cells }, OutputFormat::Json) => {
            if cells.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            let cell_rows: Vec<serde_json::Value> = cells
                .iter()
                .map(|(x, y, p)| serde_json::json!([x, y, p]))
                .collect();
            let value = serde_json::json!({
                "meta": meta,
                "N": n,
                "steps": steps,
                "cells": cell_rows,
            });
            let mut s = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::Config(e.to_string()))?;
            s.push('\n');
            s
        }
        (out, OutputFormat::Svg) => emit_svg(out)?,
    };
    Ok(text.into_bytes())
}

fn emit_svg(output: &RunOutput) -> Result<String> {
    match output {
        RunOutput::OneD { meta, records } => {
            if records.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            let last_step = records.iter().map(|r| r.step).max().unwrap_or(0);
            let finals: Vec<&DistributionRecord> =
                records.iter().filter(|r| r.step == last_step).collect();
            Ok(svg_bar_chart(
                &format!("{} / {} after {} steps", meta.coin, meta.initial, last_step),
                &finals
                    .iter()
                    .map(|r| (r.position, r.p_total))
                    .collect::<Vec<_>>(),
            ))
        }
        RunOutput::TwoD { meta, n, steps, cells } => {
            if cells.is_empty() {
                return Err(Error::Config("nothing to emit".into()));
            }
            Ok(svg_heatmap(
                &format!("{} / {} 2D, N={}, {} steps", meta.coin, meta.initial, n, steps),
                cells,
            ))
        }
    }
}

fn svg_bar_chart(title: &str, bars: &[(i64, f64)]) -> String {
    let w = 800.0;
    let h = 420.0;
    let margin = 50.0;
    let pmax = bars.iter().map(|&(_, p)| p).fold(0.0, f64::max).max(1e-300);
    let count = bars.len().max(1) as f64;
    let bw = (w - 2.0 * margin) / count;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>",
        w / 2.0
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{margin}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        h - margin,
        w - margin
    );
    for (i, &(pos, p)) in bars.iter().enumerate() {
        let x = margin + i as f64 * bw;
        let bh = (p / pmax) * (h - 2.0 * margin - 20.0);
        let y = h - margin - bh;
        let _ = writeln!(
            s,
            "  <rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"steelblue\"/>",
            x,
            y,
            (bw * 0.85).max(0.5),
            bh
        );
        // label every few bars to keep the axis readable
        if bars.len() <= 16 || i % (bars.len() / 12 + 1) == 0 {
            let _ = writeln!(
                s,
                "  <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{pos}</text>",
                x + bw * 0.425,
                h - margin + 14.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn svg_heatmap(title: &str, cells: &[(i64, i64, f64)]) -> String {
    let xs: Vec<i64> = cells.iter().map(|c| c.0).collect();
    let ys: Vec<i64> = cells.iter().map(|c| c.1).collect();
    let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let pmax = cells.iter().map(|c| c.2).fold(0.0, f64::max).max(1e-300);
    let cols = (x1 - x0 + 1) as f64;
    let rows = (y1 - y0 + 1) as f64;
    let cell = (700.0 / cols.max(rows)).min(30.0);
    let w = cols * cell + 100.0;
    let h = rows * cell + 80.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>",
        w / 2.0
    );
    for &(x, y, p) in cells {
        let px = 50.0 + (x - x0) as f64 * cell;
        let py = 40.0 + (y1 - y) as f64 * cell;
        let alpha = (p / pmax).sqrt();
        let _ = writeln!(
            s,
            "  <rect x=\"{px:.3}\" y=\"{py:.3}\" width=\"{cell:.3}\" height=\"{cell:.3}\" fill=\"darkred\" fill-opacity=\"{alpha:.6}\"><title>({x},{y}): {p:e}</title></rect>"
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Parses a CSV produced by [`emit`] back into records (1D layout).
pub fn parse_records_csv(text: &str) -> Result<Vec<DistributionRecord>> {
    let mut records = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("step,") || line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(Error::Config(format!("bad csv row: {line}")));
        }
        let f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Config(format!("bad number {s}")))
        };
        records.push(DistributionRecord {
            step: parts[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad step {}", parts[0])))?,
            position: parts[1]
                .parse()
                .map_err(|_| Error::Config(format!("bad position {}", parts[1])))?,
            p_hp: f(parts[2])?,
            p_hm: f(parts[3])?,
            p_vp: f(parts[4])?,
            p_vm: f(parts[5])?,
            p_total: f(parts[6])?,
        });
    }
    Ok(records)
}

/// Parses JSON produced by [`emit`] back into records (1D layout).
pub fn parse_records_json(text: &str) -> Result<Vec<DistributionRecord>> {
    #[derive(Deserialize)]
    struct Doc {
        records: Vec<DistributionRecord>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(doc.records)
}

/// Parses a 2D CSV back into cells.
pub fn parse_cells_csv(text: &str) -> Result<Vec<(i64, i64, f64)>> {
    let mut cells = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("x,") || line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("bad csv row: {line}")));
        }
        cells.push((
            parts[0].parse().map_err(|_| Error::Config("bad x".into()))?,
            parts[1].parse().map_err(|_| Error::Config("bad y".into()))?,
            parts[2].parse().map_err(|_| Error::Config("bad p".into()))?,
        ));
    }
    Ok(cells)
}

/// The figure presets.
pub const PRESET_NAMES: [&str; 5] = [
    "fig_grover_localized",
    "fig_grover_spreading",
    "fig_hadamard_phi3",
    "fig_2d_hadamard",
    "fig_2d_grover",
];

/// Builds the experiment configuration for a named preset.
pub fn preset_config(name: &str) -> Result<ExperimentConfig> {
    let raw = match name {
        // phi2 is the +1 eigenvector of the Grover coin and is the state
        // that stays put; phi1 (its sign-flipped partner) spreads
        // ballistically. Verified against the dense oracle.
        "fig_grover_localized" => RawConfig {
            coin: "grover4".into(),
            initial: InitialSpec::Named("phi2".into()),
            mode: Mode::Walk1d,
            ..raw_defaults()
        },
        "fig_grover_spreading" => RawConfig {
            coin: "grover4".into(),
            initial: InitialSpec::Named("phi1".into()),
            mode: Mode::Walk1d,
            ..raw_defaults()
        },
        "fig_hadamard_phi3" => RawConfig {
            coin: "hadamard4".into(),
            initial: InitialSpec::Named("phi3".into()),
            mode: Mode::Walk1d,
            ..raw_defaults()
        },
        "fig_2d_hadamard" => RawConfig {
            coin: "hadamard4".into(),
            initial: InitialSpec::Named("phi2".into()),
            mode: Mode::Walk2d,
            steps: 10,
            n: Some(21),
            ..raw_defaults()
        },
        "fig_2d_grover" => RawConfig {
            coin: "grover4".into(),
            initial: InitialSpec::Named("phi2".into()),
            mode: Mode::Walk2d,
            steps: 10,
            n: Some(21),
            ..raw_defaults()
        },
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    build_config(raw)
}

fn raw_defaults() -> RawConfig {
    RawConfig {
        coin: default_coin(),
        apply_sagnac_swap: false,
        shifts: default_shifts(),
        steps: default_steps(),
        initial: default_initial(),
        mode: default_mode(),
        n: None,
        recenter: false,
        output: None,
        format: default_format(),
    }
}

/// Runs a preset and writes its distribution file into `out_dir`, returning
/// the written path.
pub fn run_preset(name: &str, out_dir: &Path, format: OutputFormat) -> Result<PathBuf> {
    let mut cfg = preset_config(name)?;
    cfg.format = format;
    let output = run_experiment(&cfg)?;
    let bytes = emit(&output, format)?;
    let path = out_dir.join(format!("{name}.{}", format.extension()));
    write_atomic(&path, &bytes)?;
    Ok(path)
}

/// Writes via a temp file in the same directory plus rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Convenience: final-step position distribution of a 1D run.
pub fn final_distribution(cfg: &ExperimentConfig) -> Result<std::collections::BTreeMap<i64, f64>> {
    let mut walk = WalkConfig::new(cfg.coin.clone(), cfg.initial, cfg.steps)?;
    walk.apply_sagnac_swap = cfg.apply_sagnac_swap;
    walk.shifts = cfg.shifts;
    walk.recenter = cfg.recenter;
    let states = evolve(&walk)?;
    Ok(position_distribution(states.last().expect("steps + 1")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = parse_config(r#"{"coin":"grover4","initial":"phi1"}"#).unwrap();
        assert_eq!(cfg.steps, 12);
        assert_eq!(cfg.shifts, ShiftVector([1, -1, 2, -2]));
        assert!(!cfg.recenter);
        assert_eq!(cfg.coin.name, "grover4");
    }

    #[test]
    fn named_and_component_initials() {
        let cfg = parse_config(r#"{"coin":"hadamard4","initial":"phi3","steps":12}"#).unwrap();
        assert_eq!(cfg.initial_label, "phi3");
        let cfg =
            parse_config(r#"{"initial":[1,0,0,0,0,0,0,0],"coin":"grover4"}"#).unwrap();
        assert_eq!(cfg.initial[0], C64::new(1.0, 0.0));
        let cfg = parse_config(r#"{"initial":"basis:2"}"#).unwrap();
        assert_eq!(cfg.initial[2], C64::new(1.0, 0.0));
    }

    #[test]
    fn distinct_config_errors() {
        assert!(matches!(
            parse_config(r#"{"coin":"nope"}"#),
            Err(Error::UnknownCoin(_))
        ));
        assert!(matches!(
            parse_config(r#"{"initial":[0,0,0,0,0,0,0,0]}"#),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            parse_config(r#"{"steps":-3}"#),
            Err(Error::NegativeSteps(-3))
        ));
        assert!(matches!(
            parse_config(r#"{"mode":"walk2d","n":4,"steps":1}"#),
            Err(Error::EvenSegmentLength(4))
        ));
        assert!(matches!(
            parse_config(r#"{"initial":"phiX"}"#),
            Err(Error::UnknownInitialState(_))
        ));
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let cfg = preset_config("fig_hadamard_phi3").unwrap();
        let out = run_experiment(&cfg).unwrap();
        let bytes = emit(&out, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let parsed = parse_records_csv(&text).unwrap();
        match out {
            RunOutput::OneD { records, .. } => assert_eq!(parsed, records),
            _ => unreachable!(),
        }
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let cfg = preset_config("fig_grover_localized").unwrap();
        let out = run_experiment(&cfg).unwrap();
        let bytes = emit(&out, OutputFormat::Json).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let parsed = parse_records_json(&text).unwrap();
        match out {
            RunOutput::OneD { records, .. } => assert_eq!(parsed, records),
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_record_csv() {
        let meta = RunMetadata {
            schema: SCHEMA_VERSION.into(),
            convention: SHIFT_CONVENTION.into(),
            coin: "hadamard4".into(),
            initial: "basis:0".into(),
            shifts: [1, -1, 2, -2],
            sagnac_swap: false,
            recenter: false,
        };
        let out = RunOutput::OneD {
            meta,
            records: vec![DistributionRecord {
                step: 0,
                position: 0,
                p_hp: 1.0,
                p_hm: 0.0,
                p_vp: 0.0,
                p_vm: 0.0,
                p_total: 1.0,
            }],
        };
        let text = String::from_utf8(emit(&out, OutputFormat::Csv).unwrap()).unwrap();
        let data_rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("step,"))
            .collect();
        assert_eq!(data_rows.len(), 1);
        assert!(text.contains("step,position,p_Hp,p_Hm,p_Vp,p_Vm,p_total"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn empty_records_rejected() {
        let meta = RunMetadata {
            schema: SCHEMA_VERSION.into(),
            convention: SHIFT_CONVENTION.into(),
            coin: "hadamard4".into(),
            initial: "phi1".into(),
            shifts: [1, -1, 2, -2],
            sagnac_swap: false,
            recenter: false,
        };
        let out = RunOutput::OneD {
            meta,
            records: vec![],
        };
        assert!(emit(&out, OutputFormat::Csv).is_err());
    }

    #[test]
    fn final_probabilities_sum_to_one() {
        for name in PRESET_NAMES {
            let cfg = preset_config(name).unwrap();
            let out = run_experiment(&cfg).unwrap();
            let total: f64 = match &out {
                RunOutput::OneD { records, .. } => {
                    let last = records.iter().map(|r| r.step).max().unwrap();
                    records
                        .iter()
                        .filter(|r| r.step == last)
                        .map(|r| r.p_total)
                        .sum()
                }
                RunOutput::TwoD { cells, .. } => cells.iter().map(|c| c.2).sum(),
            };
            assert!((total - 1.0).abs() <= 1e-9, "{name}: {total}");
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(
            preset_config("fig_nope"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn svg_emission_smoke() {
        for name in ["fig_hadamard_phi3", "fig_2d_hadamard"] {
            let cfg = preset_config(name).unwrap();
            let out = run_experiment(&cfg).unwrap();
            let bytes = emit(&out, OutputFormat::Svg).unwrap();
            let text = String::from_utf8(bytes).unwrap();
            assert!(text.starts_with("<svg"));
            assert!(text.trim_end().ends_with("</svg>"));
        }
    }
}
