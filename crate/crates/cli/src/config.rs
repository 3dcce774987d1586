//! JSON config files and flag overlays.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use edge_energy::analytic::{DEFAULT_DOWNLINK_BPS, DEFAULT_UPLINK_BPS};
use edge_energy::cost::period_grid;
use edge_energy::{
    ConnectionlessScenario, CostSpec, PowerProfile, SweepAxis, SweepParam, SweepSpec,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{CostArgs, ScenarioFlags};

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {what} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid {what} {}", path.display()))
}

pub fn load_profile(path: Option<&Path>) -> Result<PowerProfile> {
    match path {
        None => Ok(PowerProfile::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read profile {}", path.display()))?;
            PowerProfile::from_json(&text)
                .with_context(|| format!("invalid profile {}", path.display()))
        }
    }
}

impl ScenarioFlags {
    pub fn apply(&self, scn: &mut ConnectionlessScenario) {
        if let Some(v) = self.t_i {
            scn.t_i = v;
        }
        if let Some(v) = self.t_elab {
            scn.t_elab = v;
        }
        if let Some(v) = self.rtt {
            scn.rtt = v;
        }
        if let Some(v) = self.b_tx {
            scn.b_tx = v;
        }
        if let Some(v) = self.b_rx {
            scn.b_rx = v;
        }
        if let Some(v) = self.uplink {
            scn.uplink_bps = v;
        }
        if let Some(v) = self.downlink {
            scn.downlink_bps = v;
        }
    }
}

/// Scenario from an optional file plus flags. Without a file, `t_i`, `b_tx`
/// and `b_rx` must be given as flags.
pub fn scenario(config: Option<&Path>, flags: &ScenarioFlags) -> Result<ConnectionlessScenario> {
    let mut scn = match config {
        Some(path) => read_json::<ConnectionlessScenario>(path, "scenario")?,
        None => {
            let missing: Vec<&str> = [
                ("--t-i", flags.t_i.is_none()),
                ("--b-tx", flags.b_tx.is_none()),
                ("--b-rx", flags.b_rx.is_none()),
            ]
            .into_iter()
            .filter_map(|(name, absent)| absent.then_some(name))
            .collect();
            if !missing.is_empty() {
                bail!("missing {} (no --config given)", missing.join(", "));
            }
            ConnectionlessScenario::new(0.0, 0.0, 0, 0)
        }
    };
    flags.apply(&mut scn);
    Ok(scn)
}

/// Base used by `sweep` without a config file.
fn default_sweep() -> SweepSpec {
    SweepSpec {
        base: ConnectionlessScenario::new(1000.0, 150.0, 16000, 16000),
        rtt_cloud: 300.0,
        axes: Vec::new(),
    }
}

pub fn sweep_spec(
    config: Option<&Path>,
    flags: &ScenarioFlags,
    rtt_cloud: Option<f64>,
    axes: &[String],
) -> Result<SweepSpec> {
    let mut spec = match config {
        Some(path) => read_json::<SweepSpec>(path, "sweep config")?,
        None => default_sweep(),
    };
    flags.apply(&mut spec.base);
    if let Some(v) = rtt_cloud {
        spec.rtt_cloud = v;
    }
    if !axes.is_empty() {
        spec.axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<_>>()?;
    }
    Ok(spec)
}

fn parse_param(name: &str) -> Result<SweepParam> {
    Ok(match name {
        "t_i" => SweepParam::TI,
        "rtt_cloud" => SweepParam::RttCloud,
        "payload" => SweepParam::Payload,
        "t_elab" => SweepParam::TElab,
        other => bail!("unknown sweep parameter `{other}`"),
    })
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .with_context(|| format!("invalid number `{s}`"))
}

/// `param:min:max:step` or `param=v1,v2,...`.
pub fn parse_axis(text: &str) -> Result<SweepAxis> {
    if let Some((name, list)) = text.split_once('=') {
        let points = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',').map(parse_number).collect::<Result<_>>()?
        };
        return Ok(SweepAxis::from_points(parse_param(name)?, points));
    }
    let parts: Vec<&str> = text.split(':').collect();
    let [name, min, max, step] = parts[..] else {
        bail!("invalid axis `{text}`: expected param:min:max:step or param=v1,v2,...");
    };
    Ok(SweepAxis::new(
        parse_param(name)?,
        parse_number(min)?,
        parse_number(max)?,
        parse_number(step)?,
    ))
}

/// Cost config file: one curve per `alphas` entry over the period grid
/// `t_i_min..=t_i_max` by `t_i_step` (all ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub alphas: Vec<f64>,
    pub hourly_bytes: u64,
    pub rtt: f64,
    #[serde(default)]
    pub t_elab: f64,
    pub t_i_min: f64,
    pub t_i_max: f64,
    pub t_i_step: f64,
    #[serde(default = "one")]
    pub reply_bytes: u64,
    #[serde(default = "uplink")]
    pub uplink_bps: f64,
    #[serde(default = "downlink")]
    pub downlink_bps: f64,
}

fn one() -> u64 {
    1
}

fn uplink() -> f64 {
    DEFAULT_UPLINK_BPS
}

fn downlink() -> f64 {
    DEFAULT_DOWNLINK_BPS
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 0.75],
            hourly_bytes: 10_000_000,
            rtt: 50.0,
            t_elab: 0.0,
            t_i_min: 1000.0,
            t_i_max: 120_000.0,
            t_i_step: 1000.0,
            reply_bytes: 1,
            uplink_bps: DEFAULT_UPLINK_BPS,
            downlink_bps: DEFAULT_DOWNLINK_BPS,
        }
    }
}

impl CostConfig {
    pub fn load(args: &CostArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => read_json::<CostConfig>(path, "cost config")?,
            None => CostConfig::default(),
        };
        if !args.alphas.is_empty() {
            cfg.alphas = args.alphas.clone();
        }
        macro_rules! overlay {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = args.$flag { cfg.$field = v; })*
            };
        }
        overlay!(hourly_bytes => hourly_bytes, rtt => rtt, t_elab => t_elab, t_i_min => t_i_min,
            t_i_max => t_i_max, t_i_step => t_i_step, reply_bytes => reply_bytes,
            uplink => uplink_bps, downlink => downlink_bps);
        Ok(cfg)
    }

    pub fn specs(&self) -> Result<Vec<CostSpec>> {
        if self.alphas.is_empty() {
            bail!("no alpha given");
        }
        let grid = period_grid(self.t_i_min, self.t_i_max, self.t_i_step)?;
        Ok(self
            .alphas
            .iter()
            .map(|&alpha| CostSpec {
                alpha,
                hourly_bytes: self.hourly_bytes,
                rtt: self.rtt,
                t_elab: self.t_elab,
                t_i_grid: grid.clone(),
                reply_bytes: self.reply_bytes,
                uplink_bps: self.uplink_bps,
                downlink_bps: self.downlink_bps,
            })
            .collect())
    }
}
