//! `nlfermion` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

mod commands;
mod config;
mod plot;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use nlfermion::{ModelKind, Stencil};

use config::{Config, FitRequest, HoloConfig, Overrides, SweepSpec};

/// Bad flags, unreadable or invalid configuration.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(name = "nlfermion", version, about = "Entanglement entropy of local and nonlocal lattice fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-particle or quasiparticle energies per wavenumber.
    Spectrum(Common),
    /// Entropy versus block size, with optional fits and plot.
    #[command(alias = "entropy")]
    Sweep(Common),
    /// Lattice entropy against the geodesic-length model.
    Holo(Holo),
    /// Run the oracle suite.
    Verify(Verify),
}

fn parse_snake<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_snake::<ModelKind>)]
    kind: Option<ModelKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    filling: Option<f64>,
    /// Lattice extent, e.g. `400` or `61,61`.
    #[arg(long, value_delimiter = ',')]
    extent: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_snake::<Stencil>)]
    stencil: Option<Stencil>,
    /// Block sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Block sizes as `start:end[:step]`.
    #[arg(long)]
    range: Option<String>,
    /// Fit request `form[:lo:hi]`; repeatable.
    #[arg(long = "fit")]
    fits: Vec<String>,
    #[arg(long)]
    crossover: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Logarithmic L axis in the plot.
    #[arg(long)]
    log_x: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct Holo {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    alpha_c: Option<f64>,
    #[arg(long = "a")]
    a: Option<f64>,
    #[arg(long = "b")]
    b: Option<f64>,
    /// Fit the metric parameters to the lattice curve.
    #[arg(long)]
    fit_metric: bool,
    /// Comparison window `lo:hi`.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
struct Verify {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Make the named check fail (tests the failure path).
    #[arg(long, hide = true)]
    corrupt: Option<String>,
}

fn load(path: Option<&PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn resolve(common: Common) -> Result<Config> {
    let config = load(common.config.as_ref())?;
    let overrides = Overrides {
        kind: common.kind,
        alpha: common.alpha,
        filling: common.filling,
        extent: common.extent,
        stencil: common.stencil,
        lengths: common.lengths,
        range: common.range.as_deref().map(SweepSpec::parse_range).transpose()?,
        fits: common.fits.iter().map(|f| FitRequest::parse(f)).collect::<Result<_>>()?,
        crossover: common.crossover,
        csv: common.csv,
        svg: common.svg,
        log_x: common.log_x,
        seed: common.seed,
        workers: common.workers,
    };
    overrides.apply(config)
}

fn parse_window(text: &str) -> Result<(usize, usize)> {
    let bad = || Usage(format!("window must be lo:hi, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?))
}

fn with_workers(config: &Config, job: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    match config.workers {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Usage(e.to_string()))?
            .install(job),
        Some(_) => Err(Usage("workers must be positive".into()).into()),
        None => job(),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(common) => {
            let config = resolve(common)?;
            commands::spectrum(&config)
        }
        Command::Sweep(common) => {
            let config = resolve(common)?;
            with_workers(&config, || commands::entropy_sweep(&config))
        }
        Command::Holo(h) => {
            let mut config = resolve(h.common)?;
            let holo = config.holography.get_or_insert_with(HoloConfig::default);
            if let Some(v) = h.alpha_c {
                holo.alpha_c = v;
            }
            if let Some(v) = h.a {
                holo.a = v;
            }
            if let Some(v) = h.b {
                holo.b = v;
            }
            holo.fit |= h.fit_metric;
            if let Some(w) = h.window.as_deref() {
                holo.window = Some(parse_window(w)?);
            }
            with_workers(&config, || commands::holo(&config))
        }
        Command::Verify(v) => {
            let mut config = load(v.config.as_ref())?;
            if v.seed.is_some() {
                config.seed = v.seed;
            }
            if v.csv.is_some() {
                config.output.csv = v.csv;
            }
            commands::verify(&config, v.corrupt)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    if err.downcast_ref::<commands::ChecksFailed>().is_some() {
        return 2;
    }
    match err.downcast_ref::<nlfermion::Error>() {
        Some(e) if e.is_numerical() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
