use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edge_energy::AppKind;

#[derive(Parser, Debug)]
#[command(
    name = "edge-energy",
    version,
    about = "Energy of an LTE terminal talking to edge or cloud servers"
)]
pub struct Cli {
    /// JSON power profile replacing the built-in reference interface.
    #[arg(long, global = true, value_name = "FILE")]
    pub profile: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the active power profile.
    PowerTable,
    /// Energy breakdown of one connectionless cycle.
    Eval(EvalArgs),
    /// Edge/cloud energy ratio over a one- or two-dimensional grid.
    Sweep(SweepArgs),
    /// Normalized energy/delay cost over a grid of application periods.
    Cost(CostArgs),
    /// Phases and energy of captured exchanges.
    TraceAnalyze(TraceAnalyzeArgs),
    /// Generate the capture of one synthetic exchange.
    TraceSynth(TraceSynthArgs),
}

/// Scenario fields shared by `eval` and `sweep`; each overrides the config.
#[derive(Args, Debug, Default)]
pub struct ScenarioFlags {
    /// Application period, ms.
    #[arg(long)]
    pub t_i: Option<f64>,
    /// Server elaboration time, ms.
    #[arg(long)]
    pub t_elab: Option<f64>,
    /// Round-trip time to the (edge) server, ms.
    #[arg(long)]
    pub rtt: Option<f64>,
    /// Bytes sent per cycle.
    #[arg(long)]
    pub b_tx: Option<u64>,
    /// Bytes received per cycle.
    #[arg(long)]
    pub b_rx: Option<u64>,
    /// Uplink bitrate, bit/s.
    #[arg(long)]
    pub uplink: Option<f64>,
    /// Downlink bitrate, bit/s.
    #[arg(long)]
    pub downlink: Option<f64>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// JSON scenario file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Also evaluate a cloud placement at this RTT and report the ratio.
    #[arg(long)]
    pub rtt_cloud: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// JSON sweep spec: `base` scenario, `rtt_cloud`, `axes`.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[arg(long)]
    pub rtt_cloud: Option<f64>,
    /// Replaces the configured axes. `param:min:max:step` or
    /// `param=v1,v2,...`; param is one of t_i, rtt_cloud, payload, t_elab.
    #[arg(long = "axis", value_name = "AXIS")]
    pub axes: Vec<String>,
}

#[derive(Args, Debug)]
pub struct CostArgs {
    /// JSON cost config.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Energy weight; repeat for several curves.
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Bytes produced per hour.
    #[arg(long)]
    pub hourly_bytes: Option<u64>,
    /// Round-trip time, ms.
    #[arg(long)]
    pub rtt: Option<f64>,
    #[arg(long)]
    pub t_elab: Option<f64>,
    #[arg(long)]
    pub t_i_min: Option<f64>,
    #[arg(long)]
    pub t_i_max: Option<f64>,
    #[arg(long)]
    pub t_i_step: Option<f64>,
    #[arg(long)]
    pub reply_bytes: Option<u64>,
    #[arg(long)]
    pub uplink: Option<f64>,
    #[arg(long)]
    pub downlink: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TraceAnalyzeArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: AppKind,
    /// Address of the terminal in the captures.
    #[arg(long)]
    pub client: SocketAddr,
    /// Application period, ms; repeat for several rows.
    #[arg(long = "t-i", required = true)]
    pub t_i: Vec<f64>,
    /// Cloud captures with the same repetitions; adds the ratio column.
    #[arg(long, num_args = 1.., value_name = "FILE")]
    pub cloud: Vec<PathBuf>,
    /// Terminal address in the cloud captures, if different.
    #[arg(long)]
    pub cloud_client: Option<SocketAddr>,
    /// Concurrent connections during the capture, reported as-is.
    #[arg(long, default_value_t = 0)]
    pub concurrency: u32,
    /// One capture per repetition.
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TraceSynthArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: AppKind,
    /// Bytes of the transferred file.
    #[arg(long)]
    pub file_size: u64,
    /// Round-trip time, ms.
    #[arg(long)]
    pub rtt: f64,
    /// Bottleneck bitrate, bit/s.
    #[arg(long)]
    pub bottleneck: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Server processing time, ms.
    #[arg(long, default_value_t = 0.0)]
    pub t_elab: f64,
}

fn parse_kind(s: &str) -> Result<AppKind, String> {
    s.parse::<AppKind>().map_err(|e| e.to_string())
}
