//! The `fup` experiment runner.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 resource cap, 4
//! theorem violation or failed internal invariant. On 4 a JSON payload with
//! the resolved config and every loaded input goes to stderr, and next to
//! `--output` as `<output>.repro.json` when an output path is set.

pub mod config;
pub mod expr;
pub mod run;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

pub use config::{Command, Format, RunConfig};
pub use expr::{parse_poly, render, ParseError, PolyExpr};
pub use run::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("{message}")]
    Violation { message: String, payload: Box<Value> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Violation { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fup", version, about = "Discrete fractal uncertainty experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: TopLevel,
    /// Artifact format.
    #[arg(long, value_enum, global = true)]
    pub out: Option<Format>,
    /// Write the artifact here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for random batteries.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest grid (number of points) a computation may touch.
    #[arg(long, global = true)]
    pub grid_cap: Option<usize>,
    /// Largest side of a dense matrix; overrides FUP_CAP.
    #[arg(long, global = true)]
    pub dense_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum TopLevel {
    #[command(flatten)]
    Op(Command),
    /// Re-run a saved config, or the config embedded in a JSON output.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if value.get("version").is_some() && value.get("result").is_some() {
        value = value["config"].take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

impl Cli {
    /// Flags override the saved config or the environment.
    pub fn resolve(self, fup_cap: Option<&str>) -> Result<RunConfig, CliError> {
        let mut config = match self.command {
            TopLevel::Op(command) => {
                let mut c = RunConfig::new(command);
                c.caps = config::caps_from_env(fup_cap)?;
                c
            }
            TopLevel::Run { config } => load_config(&config)?,
        };
        if let Some(f) = self.out {
            config.format = f;
        }
        if self.output.is_some() {
            config.output = self.output;
        }
        if self.seed.is_some() {
            config.seed = self.seed;
        }
        if let Some(g) = self.grid_cap {
            config.caps.grid_points = g;
        }
        if let Some(d) = self.dense_cap {
            config.caps.dense_side = d;
        }
        Ok(config)
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn repro_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".repro.json");
    PathBuf::from(s)
}

/// Runs a config, writes its artifact and returns the exit code.
pub fn execute(config: &RunConfig) -> i32 {
    let body = match run(config) {
        Ok(body) => body,
        Err(e) => {
            eprintln!("fup: {e}");
            if let CliError::Violation { payload, .. } = &e {
                let text = serde_json::to_string_pretty(payload).expect("JSON values serialise") + "\n";
                eprint!("{text}");
                if let Some(out) = &config.output {
                    let p = repro_path(out);
                    match write_atomic(&p, text.as_bytes()) {
                        Ok(()) => eprintln!("fup: reproduction payload written to {}", p.display()),
                        Err(err) => eprintln!("fup: cannot write {}: {err}", p.display()),
                    }
                }
            }
            return e.exit_code();
        }
    };
    let written = match &config.output {
        Some(path) => write_atomic(path, body.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(m) => {
            eprintln!("fup: {m}");
            2
        }
    }
}

/// Entry point shared by the binary and tests.
pub fn main_with<I, T>(args: I, fup_cap: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.resolve(fup_cap) {
        Ok(config) => execute(&config),
        Err(e) => {
            eprintln!("fup: {e}");
            e.exit_code()
        }
    }
}
