//! Command-line front end: run a config file, a named preset, or an ad-hoc
//! walk assembled from flags, and write the distribution to disk or stdout.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use coinwalk::error::Error;
use coinwalk::io::{
    emit, parse_config, preset_config, resolve_initial, run_experiment, InitialSpec, Mode,
    OutputFormat, PRESET_NAMES,
};
use coinwalk::walk::ShiftVector;

#[derive(Parser, Debug)]
#[command(
    name = "coinwalk",
    about = "Quantum walk on the line with a four-dimensional coin",
    after_help = "Exit codes: 0 success, 2 configuration error, 3 I/O error."
)]
struct Cli {
    /// JSON experiment config file
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Named figure preset (see --list-presets)
    #[arg(long)]
    preset: Option<String>,

    /// List available presets and exit
    #[arg(long)]
    list_presets: bool,

    /// Output path (default: stdout, or <preset>.<ext> for presets)
    #[arg(long, short)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Coin name (hadamard4, grover4, sagnac_swap, file:<path>)
    #[arg(long)]
    coin: Option<String>,

    /// Initial coin state: phi1|phi2|phi3|basis:<i> or 8 comma-separated
    /// floats (re,im per component)
    #[arg(long)]
    initial: Option<String>,

    /// Number of steps
    #[arg(long)]
    steps: Option<i64>,

    /// Shift vector, 4 comma-separated integers
    #[arg(long, value_delimiter = ',', num_args = 4)]
    shifts: Option<Vec<i64>>,

    /// Keep the support midpoint at the origin
    #[arg(long)]
    recenter: bool,

    /// Apply the Sagnac swap after each coin toss
    #[arg(long)]
    sagnac_swap: bool,

    /// Run the 2D embedding with this (odd) segment length
    #[arg(long)]
    segment: Option<i64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Svg => OutputFormat::Svg,
        }
    }
}

fn parse_initial_arg(text: &str) -> InitialSpec {
    let parts: Vec<f64> = text
        .split(',')
        .filter_map(|p| p.trim().parse().ok())
        .collect();
    if parts.len() == 8 && text.split(',').count() == 8 {
        InitialSpec::Components(parts)
    } else {
        InitialSpec::Named(text.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return Ok(());
    }

    let mut cfg = if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        parse_config(&text)?
    } else if let Some(name) = &cli.preset {
        preset_config(name)?
    } else {
        preset_config("fig_grover_localized")?
    };

    // flag overrides
    if let Some(name) = &cli.coin {
        cfg.coin = coinwalk::coins::coin_by_name(name)?;
    }
    if let Some(text) = &cli.initial {
        let (v, label) = resolve_initial(&parse_initial_arg(text))?;
        cfg.initial = v;
        cfg.initial_label = label;
    }
    if let Some(steps) = cli.steps {
        if steps < 0 {
            return Err(Error::NegativeSteps(steps));
        }
        cfg.steps = steps as u32;
    }
    if let Some(shifts) = &cli.shifts {
        cfg.shifts = ShiftVector([shifts[0], shifts[1], shifts[2], shifts[3]]);
    }
    if cli.recenter {
        cfg.recenter = true;
    }
    if cli.sagnac_swap {
        cfg.apply_sagnac_swap = true;
    }
    if let Some(n) = cli.segment {
        if n < 3 || n % 2 == 0 {
            return Err(Error::EvenSegmentLength(n));
        }
        cfg.mode = Mode::Walk2d;
        cfg.segment_n = Some(n);
    }
    if let Some(f) = cli.format {
        cfg.format = f.into();
    }

    let result = run_experiment(&cfg)?;
    let bytes = emit(&result, cfg.format)?;

    let output = cli.output.or(cfg.output).or_else(|| {
        cli.preset
            .as_ref()
            .map(|p| PathBuf::from(format!("{p}.{}", cfg.format.extension())))
    });
    match output {
        Some(path) => coinwalk::io::write_atomic(&path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
