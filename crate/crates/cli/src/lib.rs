//! Batch front end: argument and configuration handling for the `xychain`
//! binary, usable in-process through [`run_from`].

pub mod cache;
pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig, TimeChoice};

#[derive(Debug, Parser)]
#[command(name = "xychain", version, about = "Sender/receiver correlations across an XY spin chain")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Each one overrides the matching key of the
/// configuration file.
#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of spins in the chain.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Nearest-neighbour coupling constant.
    #[arg(long, global = true)]
    coupling: Option<f64>,
    /// Registration time, or `optimize` to search for it.
    #[arg(long, global = true, value_name = "REAL|optimize")]
    time: Option<TimeChoice>,
    /// Step of the angle grids on [0, 1].
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    /// Step of the eigenvalue grids.
    #[arg(long, global = true)]
    lambda_grid_step: Option<f64>,
    /// Quantity computed by `sweep`.
    #[arg(long, global = true)]
    quantity: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached tensor archives.
    #[arg(long, global = true, value_name = "PATH")]
    cache_dir: Option<PathBuf>,
    /// Do not read or write cached tensors.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer tensor archive and its magnitude families.
    Tparams,
    /// A mean, deviation or witness field over the (lambda_r, lambda_s) grid.
    Sweep,
    /// The entanglement frontier in the (lambda_r, lambda_s) plane.
    Boundary {
        /// Trace the bisectrix crossing over `START:STOP:STEP` instead.
        #[arg(long, value_name = "START:STOP:STEP")]
        evolution: Option<String>,
    },
    /// Outlines of the entangled part of the (beta1, alpha1) square.
    Contours {
        /// Follow the frontier moved by this distance along the diagonal.
        #[arg(long)]
        shift: Option<f64>,
    },
    /// Registration probability and averaged measures against time.
    TimeCurves {
        /// Time grid `START:STOP:STEP`.
        #[arg(long, value_name = "START:STOP:STEP")]
        times: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl From<xychain::Error> for CliError {
    fn from(e: xychain::Error) -> Self {
        match e {
            xychain::Error::Io(_) | xychain::Error::Archive { .. } | xychain::Error::NotPositive(_) => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn parse_range(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("expected START:STOP:STEP, got `{text}`")))?;
    <[f64; 3]>::try_from(parts).map_err(|_| CliError::Usage(format!("expected START:STOP:STEP, got `{text}`")))
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let a = &cli.common;
    let mut cfg = match &a.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(n) = a.n {
        cfg.chain.n = n;
    }
    if let Some(d) = a.coupling {
        cfg.chain.coupling = d;
    }
    if let Some(t) = a.time {
        cfg.time.value = t;
    }
    if let Some(s) = a.grid_step {
        cfg.grids.angle_step = s;
        cfg.contours.grid_step = s;
        cfg.boundary.angle_step = s;
    }
    if let Some(s) = a.lambda_grid_step {
        cfg.grids.lambda_step = s;
    }
    if let Some(q) = &a.quantity {
        cfg.sweep.quantity = q.clone();
    }
    if let Some(p) = &a.output {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = a.format {
        cfg.output.format = f;
    }
    if let Some(t) = a.threads {
        cfg.run.threads = Some(t);
    }
    if let Some(d) = &a.cache_dir {
        cfg.run.cache_dir = Some(d.clone());
    }
    if a.no_cache {
        cfg.run.cache_dir = None;
    }
    match &cli.command {
        Command::Boundary { evolution: Some(r) } => cfg.boundary.evolution = Some(parse_range(r)?),
        Command::Contours { shift: Some(s) } => cfg.contours.shift = Some(*s),
        Command::TimeCurves { times: Some(r) } => {
            let [start, stop, step] = parse_range(r)?;
            cfg.time_curves = config::TimeCurveSection { start, stop, step };
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let dispatch = || match cli.command {
        Command::Tparams => commands::tparams(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Boundary { .. } => commands::boundary(&cfg),
        Command::Contours { .. } => commands::contours(&cfg),
        Command::TimeCurves { .. } => commands::time_curves(&cfg),
    };
    match cfg.run.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(dispatch),
        None => dispatch(),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 for runtime or I/O failures, 2 for
/// usage and configuration errors.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) => 2,
                CliError::Runtime(_) => 1,
            }
        }
    }
}
