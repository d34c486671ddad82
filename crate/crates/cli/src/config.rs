use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use fup_core::ResourceCaps;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// An integer pair written `a,b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Pair(pub i64, pub i64);

impl From<[i64; 2]> for Pair {
    fn from(v: [i64; 2]) -> Self {
        Pair(v[0], v[1])
    }
}

impl From<Pair> for [i64; 2] {
    fn from(p: Pair) -> Self {
        [p.0, p.1]
    }
}

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

/// An interval written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Span(pub f64, pub f64);

impl From<[f64; 2]> for Span {
    fn from(v: [f64; 2]) -> Self {
        Span(v[0], v[1])
    }
}

impl From<Span> for [f64; 2] {
    fn from(s: Span) -> Self {
        [s.0, s.1]
    }
}

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi but got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Span(parse(a)?, parse(b)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffName {
    #[default]
    SmoothBump,
    PlateauBump,
    Indicator,
    Zero,
}

impl fmt::Display for CutoffName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingName {
    #[default]
    Grid,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffArgs {
    #[arg(long = "cutoff", value_enum, default_value_t)]
    #[serde(default)]
    pub kind: CutoffName,
    /// Flat part `lo:hi` of a plateau bump.
    #[arg(long)]
    #[serde(default)]
    pub flat: Option<Span>,
    /// Sample `χ(j/n)` (grid) or `χ((j+1/2)/n)` (midpoint).
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub sampling: SamplingName,
}

fn default_trials() -> usize {
    200
}
fn default_n_min() -> usize {
    4
}
fn default_n_max() -> usize {
    16
}
fn default_max_support() -> usize {
    12
}

/// Random inputs for commands that otherwise read one from a file.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryArgs {
    #[arg(long, default_value_t = default_trials())]
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[arg(long, default_value_t = default_n_min())]
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[arg(long, default_value_t = default_n_max())]
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[arg(long, default_value_t = default_max_support())]
    #[serde(default = "default_max_support")]
    pub max_support: usize,
}

impl Default for BatteryArgs {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            n_min: default_n_min(),
            n_max: default_n_max(),
            max_support: default_max_support(),
        }
    }
}

fn one() -> usize {
    1
}
fn one_u32() -> u32 {
    1
}
fn two_u32() -> u32 {
    2
}

/// Alphabet files hold `{"M":3,"cells":[[0,0],[1,1]]}` or
/// `{"M":3,"digits":[0,2]}`; grid sets hold `{"N":9,"points":[[0,0]]}`.
/// Polynomial arguments take an expression or `@file.json`.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// FUP norm of two grid sets (--x, --y) or of the k-th iterates of two alphabets (--a, --b, --k).
    Norm {
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Norms and exponents β_k for k = 1..=kmax.
    Beta {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        kmax: u32,
    },
    /// Directions (or one direction --v) of lines inside the limit set.
    LineCheck {
        #[arg(long)]
        a: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<Pair>,
    },
    /// Whether A contains a line orthogonal to one in B.
    Orthopair {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Whether the uncertainty bound holds, choosing the rule by |A||B| against M².
    FullRange {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// A norm-one witness for an obstructed pair.
    Sharpness {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<Pair>,
    },
    /// Localise a grid function (--f) or a seeded random battery to one line.
    Localize {
        #[arg(long)]
        f: Option<PathBuf>,
        #[command(flatten)]
        #[serde(default)]
        battery: BatteryArgs,
    },
    /// Separating polynomial for a set (--set) or a seeded random battery.
    Separate {
        #[arg(long)]
        set: Option<PathBuf>,
        #[command(flatten)]
        #[serde(default)]
        battery: BatteryArgs,
    },
    /// |Z_N(F)| for N = nmin..=nmax.
    CycloCount {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = one())]
        #[serde(default = "one")]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Checks that the seven derived polynomials cover Z_N(F).
    SevenCover {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = one())]
        #[serde(default = "one")]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Common grid zeros of F and G against deg F · deg G.
    Bezout {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        n: usize,
    },
    /// Builds B_N for N = M^k and reports its norm and spectral radius.
    BakerBuild {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        #[serde(default)]
        cutoff: CutoffArgs,
    },
    /// Spectra of B_N for k = kmin..=kmax against the FUP reference.
    BakerSpectrum {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long, default_value_t = one_u32())]
        #[serde(default = "one_u32")]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
        #[command(flatten)]
        #[serde(default)]
        cutoff: CutoffArgs,
    },
    /// ‖φ B_N ψ‖ over k and its log-log decay exponent.
    Propagation {
        #[arg(long)]
        alphabet: PathBuf,
        /// One lo:hi per coordinate.
        #[arg(long, required = true)]
        phi: Vec<Span>,
        #[arg(long, required = true)]
        psi: Vec<Span>,
        #[arg(long, default_value_t = two_u32())]
        #[serde(default = "two_u32")]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
        #[command(flatten)]
        #[serde(default)]
        cutoff: CutoffArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Beta { .. } => "beta",
            Command::LineCheck { .. } => "line-check",
            Command::Orthopair { .. } => "orthopair",
            Command::FullRange { .. } => "full-range",
            Command::Sharpness { .. } => "sharpness",
            Command::Localize { .. } => "localize",
            Command::Separate { .. } => "separate",
            Command::CycloCount { .. } => "cyclo-count",
            Command::SevenCover { .. } => "seven-cover",
            Command::Bezout { .. } => "bezout",
            Command::BakerBuild { .. } => "baker-build",
            Command::BakerSpectrum { .. } => "baker-spectrum",
            Command::Propagation { .. } => "propagation",
        }
    }

    pub fn has_csv(&self) -> bool {
        matches!(
            self,
            Command::Beta { .. }
                | Command::LineCheck { .. }
                | Command::CycloCount { .. }
                | Command::SevenCover { .. }
                | Command::BakerSpectrum { .. }
                | Command::Propagation { .. }
        ) || matches!(self, Command::Localize { f: None, .. } | Command::Separate { set: None, .. })
    }
}

/// Everything a run depends on. Serialised into every JSON output, and
/// accepted back by `fup run --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub caps: ResourceCaps,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, caps: ResourceCaps::default(), format: Format::Json, output: None, seed: None }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.caps.grid_points == 0 || self.caps.dense_side == 0 {
            return usage("caps must be positive".into());
        }
        if self.format == Format::Csv && !self.command.has_csv() {
            return usage(format!("{} has no CSV form; use --out json", self.command.name()));
        }
        let range = |what: &str, lo: usize, hi: usize| {
            if lo == 0 || lo > hi {
                usage(format!("{what}: need 1 ≤ min ≤ max, got {lo}..{hi}"))
            } else {
                Ok(())
            }
        };
        match &self.command {
            Command::Beta { kmax, .. } => range("kmax", 1, *kmax as usize),
            Command::Sharpness { k, .. } | Command::BakerBuild { k, .. } => range("k", 1, *k as usize),
            Command::Localize { f: None, battery } | Command::Separate { set: None, battery } => {
                range("trials", 1, battery.trials)?;
                range("max-support", 1, battery.max_support)?;
                range("n", battery.n_min, battery.n_max)?;
                if self.seed.is_none() {
                    return usage(format!("a random {} battery needs --seed", self.command.name()));
                }
                Ok(())
            }
            Command::CycloCount { nmin, nmax, .. } | Command::SevenCover { nmin, nmax, .. } => range("N", *nmin, *nmax),
            Command::Bezout { n, .. } => range("N", *n, *n),
            Command::BakerSpectrum { kmin, kmax, .. } | Command::Propagation { kmin, kmax, .. } => {
                range("k", *kmin as usize, *kmax as usize)
            }
            _ => Ok(()),
        }
    }
}

/// `FUP_CAP` bounds the entries of one dense matrix, so the side cap becomes
/// its integer square root.
pub fn caps_from_env(value: Option<&str>) -> Result<ResourceCaps, CliError> {
    let mut caps = ResourceCaps::default();
    if let Some(v) = value {
        let entries: usize = v.trim().parse().map_err(|e| CliError::Usage(format!("FUP_CAP={v:?}: {e}")))?;
        if entries == 0 {
            return Err(CliError::Usage("FUP_CAP must be positive".into()));
        }
        caps.dense_side = entries.isqrt();
    }
    Ok(caps)
}
