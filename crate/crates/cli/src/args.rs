use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcsit_core::channel::ChannelMode;
use dcsit_core::constant_lab::LabCase;
use dcsit_core::linalg::Tolerance;
use dcsit_core::optimizer::Scheme;

#[derive(Debug, Parser)]
#[command(name = "dcsit", version, about = "Interference alignment with delayed CSIT: bounds, parameters, simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outer and inner DoF bounds over a grid of antenna ratios (CSV).
    Bounds(BoundsArgs),
    /// Integer scheme parameters for one setting (JSON).
    Params(ParamsArgs),
    /// Monte-Carlo build-and-decode runs (JSON).
    Simulate(SimulateArgs),
    /// DoF against frame length for budgets 1..=Bmax (CSV).
    Tradeoff(TradeoffArgs),
    /// Constant-channel experiments (JSON).
    ConstantLab(LabArgs),
}

/// Group size given on the command line: a number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupArg {
    #[default]
    Auto,
    Size(usize),
}

impl FromStr for GroupArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(GroupArg::Auto);
        }
        s.parse::<usize>().map(GroupArg::Size).map_err(|_| format!("expected 'auto' or a group size, got '{s}'"))
    }
}

impl GroupArg {
    pub fn size(self) -> Option<usize> {
        match self {
            GroupArg::Auto => None,
            GroupArg::Size(g) => Some(g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    TimeVarying,
    Constant,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> Result<LabCase, String> {
    s.parse::<LabCase>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct OutArg {
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TolArg {
    /// Relative rank tolerance; overrides IA_RANK_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl TolArg {
    pub fn tolerance(&self) -> anyhow::Result<Tolerance> {
        match self.tol {
            Some(t) => Ok(Tolerance::new(t)?),
            None => Ok(Tolerance::from_env()),
        }
    }
}

/// Scheme, antennas, users and group choice shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct SettingArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Transmit antennas per user.
    #[arg(long = "M")]
    pub m: usize,
    /// Receive antennas per user.
    #[arg(long = "N")]
    pub n: usize,
    /// Users; must be 3 for psr.
    #[arg(long = "K", default_value_t = 3)]
    pub k: usize,
    /// RIA group size, or auto.
    #[arg(long = "L", default_value = "auto")]
    pub l: GroupArg,
    /// TG group size, or auto.
    #[arg(long = "G", default_value = "auto")]
    pub g: GroupArg,
}

impl SettingArgs {
    /// The fixed group for the chosen scheme, rejecting the other scheme's flag.
    pub fn group(&self) -> anyhow::Result<Option<usize>> {
        match self.scheme {
            Scheme::Ria => {
                anyhow::ensure!(self.g == GroupArg::Auto, "--G applies to tg; use --L for ria");
                Ok(self.l.size())
            }
            Scheme::Tg => {
                anyhow::ensure!(self.l == GroupArg::Auto, "--L applies to ria; use --G for tg");
                Ok(self.g.size())
            }
            Scheme::Psr3 => {
                anyhow::ensure!(self.l == GroupArg::Auto && self.g == GroupArg::Auto, "psr has no group choice");
                Ok(None)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long = "K", default_value_t = 3)]
    pub k: usize,
    /// Smallest ratio M/N; defaults to 1/(K-1), where the outer bound starts.
    #[arg(long)]
    pub rho_min: Option<f64>,
    #[arg(long, default_value_t = 8.0)]
    pub rho_max: f64,
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub setting: SettingArgs,
    /// Symbol budget per user.
    #[arg(long = "B")]
    pub b: Option<usize>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub setting: SettingArgs,
    #[arg(long = "B")]
    pub b: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// First channel seed; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ChannelArg::TimeVarying)]
    pub channel: ChannelArg,
    /// Lift a constant channel to the real domain.
    #[arg(long)]
    pub acs: bool,
    /// Refuse settings whose signal-space matrix has more rows than this.
    #[arg(long, default_value_t = 2048)]
    pub max_rows: usize,
    #[command(flatten)]
    pub tol: TolArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub setting: SettingArgs,
    #[arg(long = "Bmax")]
    pub b_max: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct LabArgs {
    /// One of ria-siso, psr-siso, tg-mimo, ria-mimo.
    #[arg(long, value_parser = parse_case)]
    pub case: LabCase,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ChannelArg::Constant)]
    pub channel: ChannelArg,
    #[arg(long)]
    pub acs: bool,
    #[command(flatten)]
    pub tol: TolArg,
    #[command(flatten)]
    pub out: OutArg,
}

/// Channel mode for a channel flag and the ACS switch. Lifting is defined for
/// constant draws only.
pub fn channel_mode(channel: ChannelArg, acs: bool) -> anyhow::Result<ChannelMode> {
    match (channel, acs) {
        (ChannelArg::TimeVarying, false) => Ok(ChannelMode::TimeVarying),
        (ChannelArg::Constant, false) => Ok(ChannelMode::Constant),
        (ChannelArg::Constant, true) => Ok(ChannelMode::AcsReal),
        (ChannelArg::TimeVarying, true) => anyhow::bail!("--acs needs --channel constant"),
    }
}
