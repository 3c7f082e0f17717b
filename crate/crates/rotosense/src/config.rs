//! Command-line flags, JSON config files and their merge into a [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rotosense_core::states::NamedState;
use rotosense_core::RotationParams;
use serde::Deserialize;

/// Rotations beyond this angle leave the small-angle regime.
pub const SMALL_ANGLE_LIMIT: f64 = 0.05;

pub const DEFAULT_THETA1: f64 = 0.05;
pub const DEFAULT_N: u64 = 1_000_000;
pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_POINTS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "rotosense", version, about = "Rotation sensing with anti-coherent spin states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Quantum Fisher information and anti-coherence of a state.
    Fisher,
    /// Exact, small-angle and Bell-aggregated outcome probabilities over a θ₁ sweep.
    Probabilities,
    /// Preparation-circuit fidelities, Bell-analyzer table, or a user circuit.
    CircuitVerify,
    /// Monte Carlo estimation of θ₁ and the axis against the Cramér-Rao bound.
    Estimate,
    /// Bell-product expansion of a (rotated) state and the tabulated expansions.
    Decompose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fisher => "fisher",
            Self::Probabilities => "probabilities",
            Self::CircuitVerify => "circuit-verify",
            Self::Estimate => "estimate",
            Self::Decompose => "decompose",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineChoice {
    Optimal,
    Bell,
    #[default]
    Both,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// tetra1, tetra2, balance, or file:PATH
    #[arg(long, global = true)]
    pub state: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta3: Option<f64>,
    /// Photons detected per trial.
    #[arg(long, global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the flag names as keys. Flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid points of the θ₁ sweep.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub pipeline: Option<PipelineChoice>,
    /// Circuit JSON file for circuit-verify.
    #[arg(long, global = true)]
    pub circuit: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub state: Option<String>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    pub n: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub points: Option<usize>,
    pub pipeline: Option<PipelineChoice>,
    pub circuit: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSelector {
    Named(NamedState),
    File(PathBuf),
}

impl FromStr for StateSelector {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                bail!("empty path in state selector `{s}`");
            }
            return Ok(Self::File(PathBuf::from(path)));
        }
        match s.parse::<NamedState>() {
            Ok(n) => Ok(Self::Named(n)),
            Err(_) => bail!("unknown state `{s}`; expected tetra1, tetra2, balance or file:PATH"),
        }
    }
}

impl fmt::Display for StateSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Named(n) => write!(f, "{n}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` when neither flag nor config chose a state.
    pub state: Option<StateSelector>,
    /// `None` when θ₁ was not given; each command has its own default.
    pub theta1: Option<f64>,
    pub theta2: f64,
    pub theta3: f64,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub points: usize,
    pub pipeline: PipelineChoice,
    pub circuit: Option<PathBuf>,
}

impl RunConfig {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let state = match flags.state.clone().or(file.state) {
            Some(s) => Some(s.parse()?),
            None => None,
        };
        let cfg = Self {
            command,
            state,
            theta1: flags.theta1.or(file.theta1),
            theta2: flags.theta2.or(file.theta2).unwrap_or(0.0),
            theta3: flags.theta3.or(file.theta3).unwrap_or(0.0),
            n: flags.n.or(file.n).unwrap_or(DEFAULT_N),
            trials: flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
            points: flags.points.or(file.points).unwrap_or(DEFAULT_POINTS),
            pipeline: flags.pipeline.or(file.pipeline).unwrap_or_default(),
            circuit: flags.circuit.clone().or(file.circuit),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("theta1", self.theta1.unwrap_or(0.0)), ("theta2", self.theta2), ("theta3", self.theta3)] {
            if !v.is_finite() {
                bail!("--{name} must be finite");
            }
        }
        if self.n == 0 {
            bail!("--n must be at least 1");
        }
        if self.points == 0 {
            bail!("--points must be at least 1");
        }
        if self.command == Command::Estimate && self.trials < 2 {
            bail!("--trials must be at least 2");
        }
        Ok(())
    }

    pub fn state_or_default(&self) -> StateSelector {
        self.state.clone().unwrap_or(StateSelector::Named(NamedState::Tetra2))
    }

    pub fn default_theta1(&self) -> f64 {
        match self.command {
            Command::Decompose => 0.0,
            _ => DEFAULT_THETA1,
        }
    }

    pub fn params(&self) -> RotationParams {
        RotationParams::new(self.theta1.unwrap_or(self.default_theta1()), self.theta2, self.theta3)
    }

    /// Messages to print before running.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let t = self.params().theta1.abs();
        if t > SMALL_ANGLE_LIMIT && self.command != Command::CircuitVerify {
            out.push(format!(
                "θ₁ = {t} exceeds {SMALL_ANGLE_LIMIT}; small-angle formulas may be inaccurate"
            ));
        }
        if self.command == Command::Estimate && self.trials < 100 {
            out.push(format!("only {} trials; spreads will be noisy", self.trials));
        }
        out
    }
}
