//! Command-line driver: configuration, dispatch and file output.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use invis_core::born::{Method, Side};
use thiserror::Error;

pub use config::{Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] invis_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

#[derive(Debug, Parser)]
#[command(name = "invis", version, about = "Scattering by unidirectionally invisible complex potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample the constructed potential on a grid
    Construct,
    /// Scattering amplitude table f(θ)
    Amplitude,
    /// Invisibility, symplectic, current and reciprocity checks
    Verify,
    /// Numeric transfer operator and its T-functions
    Xfer,
    /// Total power changes and screen power
    Power,
    /// Screen power curves for a list of wavenumbers
    Fig2,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Amplitude => "amplitude",
            Command::Verify => "verify",
            Command::Xfer => "xfer",
            Command::Power => "power",
            Command::Fig2 => "fig2",
        }
    }
}

/// Flags override the config file, which overrides the defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Config file: JSON, `key = value` lines, or an earlier output file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Wavenumber in units of π/a
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Wavenumbers for fig2 in units of π/a, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub k_list: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ell: Option<i32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m: Option<i32>,
    /// gaussian, quartic, or a path to an envelope table
    #[arg(long, global = true)]
    pub envelope: Option<String>,
    /// Real part of the envelope amplitude
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g0: Option<f64>,
    /// Imaginary part of the envelope amplitude
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g0_im: Option<f64>,
    /// Envelope width
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long, global = true)]
    pub dimension: Option<u8>,
    /// constructed, zero, random:<seed>, or a path to a sampled field CSV
    #[arg(long, global = true)]
    pub potential: Option<String>,
    #[arg(long, global = true, value_parser = parse_side)]
    pub side: Option<Side>,
    /// born, closed_form or xfermat
    #[arg(long, global = true, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, global = true)]
    pub theta_samples: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Odd number of momentum nodes
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub slices: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Screen distance
    #[arg(long, global = true)]
    pub d: Option<f64>,
    /// Largest screen size
    #[arg(long, global = true)]
    pub s_max: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Gauss nodes per angular half for total powers
    #[arg(long, global = true)]
    pub power_angles: Option<usize>,
    #[arg(long, global = true)]
    pub grazing_margin: Option<f64>,
    /// Sample counts along x and y for construct
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_side(s: &str) -> Result<Side, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| "expected left or right".to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| "expected born, closed_form or xfermat".to_string())
}

/// Defaults, then the config file, then the output-directory variable,
/// then flags.
pub fn resolve(o: &Overrides, out_env: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            config::from_entries(config::parse_config(&text)?)?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = out_env {
        cfg.out = dir;
    }
    macro_rules! set {
        ($($f:ident),*) => {$(if let Some(v) = &o.$f { cfg.$f = v.clone(); })*};
    }
    set!(k, k_list, ell, m, envelope, g0, g0_im, b, dimension, potential, side, method, theta_samples, phi, grid_n, tol, d, s_max, samples, power_angles, grazing_margin, nx, ny, format, out);
    if o.slices.is_some() {
        cfg.slices = o.slices;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env = std::env::var_os(config::OUT_DIR_ENV).map(PathBuf::from);
    let result = resolve(&cli.overrides, env).and_then(|cfg| commands::dispatch(cli.command, &cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
