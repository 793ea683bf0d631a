//! Command-line front end. Configuration layering and report emission live here.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

pub use commands::run;
pub use config::{Format, RunConfig};
pub use report::{Report, Table, EXIT_ANALYSIS_ONLY, EXIT_OK, EXIT_THEOREM_FAILED, EXIT_USAGE};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "zerofree", version, about = "Desk-scale checks for prime Dirichlet polynomial bounds and zero-free regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive the parameter set and check its exact identities.
    Params(Common),
    /// Certified supremum of a random polynomial and the family supremum.
    Sup(Common),
    /// Spacing coefficient against the prime lower bound.
    Spacing(Common),
    /// Moment bounds by quadrature.
    Moments(Common),
    /// Randomized Hilbert inequality suite.
    Hilbert(Common),
    /// Calibrate and validate the chaining constant.
    Chain(Common),
    /// Estimate the good-shift proportion.
    Theta(Common),
    /// Scan prime sums over a window.
    Scan(Common),
    /// Count covered subdivision pieces.
    Cover(Common),
    /// Zeta oracle: value accuracy plus zero counting and box scans.
    Zeta(Common),
    /// Full pipeline plus side checks.
    Certify(Common),
}

impl Command {
    fn split(self) -> (&'static str, Common) {
        match self {
            Command::Params(c) => ("params", c),
            Command::Sup(c) => ("sup", c),
            Command::Spacing(c) => ("spacing", c),
            Command::Moments(c) => ("moments", c),
            Command::Hilbert(c) => ("hilbert", c),
            Command::Chain(c) => ("chain", c),
            Command::Theta(c) => ("theta", c),
            Command::Scan(c) => ("scan", c),
            Command::Cover(c) => ("cover", c),
            Command::Zeta(c) => ("zeta", c),
            Command::Certify(c) => ("certify", c),
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// JSON file with configuration keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest prime or height any stage may touch.
    #[arg(long)]
    cap: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Further `--key value` pairs naming configuration fields.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

/// Parse `--key value` and `--key=value` pairs. Values are read as JSON
/// when they parse and as strings otherwise.
fn parse_overrides(args: &[String]) -> Result<Map<String, Value>> {
    let mut out = Map::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| Error::invalid(format!("expected --key, found `{arg}`")))?;
        let (key, raw) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::invalid(format!("missing value for --{key}")))?;
                (key.to_string(), v.clone())
            }
        };
        let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        out.insert(key.replace('-', "_"), value);
    }
    Ok(out)
}

/// Defaults, then the config file, then the named flags, then overrides.
fn build_config(command: &str, common: Common) -> Result<RunConfig> {
    let mut merged = match serde_json::to_value(RunConfig::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("config serializes to an object"),
    };
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        let file: Map<String, Value> = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("config {}: {e}", path.display())))?;
        merged.extend(file);
    }
    let mut named = Map::new();
    if let Some(v) = common.seed {
        named.insert("seed".into(), v.into());
    }
    if let Some(v) = common.cap {
        named.insert("cap".into(), v.into());
    }
    if let Some(v) = common.workers {
        named.insert("workers".into(), v.into());
    }
    if let Some(v) = &common.out {
        named.insert("out".into(), v.to_string_lossy().into_owned().into());
    }
    if let Some(v) = common.format {
        named.insert("format".into(), serde_json::to_value(v).expect("format serializes"));
    }
    merged.extend(named);
    merged.extend(parse_overrides(&common.overrides)?);
    merged.insert("command".into(), command.into());
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::invalid(format!("config: {e}")))
}

/// Parse arguments, run, write the report and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, common) = cli.command.split();
    let config = match build_config(name, common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Run with a bounded worker pool and write the rendered report.
pub fn execute(config: &RunConfig) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let report = pool.install(|| run(config))?;
    let bytes = report.render(config.format)?;
    match &config.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(report.exit_code)
}
