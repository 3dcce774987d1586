//! Energy/delay cost of batching a fixed hourly volume into periodic
//! request-response cycles.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    scenario_energy, ConnectionlessScenario, DEFAULT_DOWNLINK_BPS, DEFAULT_UPLINK_BPS,
};
use crate::error::{Error, Result};
use crate::power::PowerProfile;

pub const MS_PER_HOUR: f64 = 3_600_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    /// Weight of the energy term, in `[0, 1]`.
    pub alpha: f64,
    /// Bytes produced per hour.
    pub hourly_bytes: u64,
    /// Round-trip time to the server, ms.
    pub rtt: f64,
    #[serde(default)]
    pub t_elab: f64,
    /// Candidate application periods, ms.
    pub t_i_grid: Vec<f64>,
    #[serde(default = "one_byte")]
    pub reply_bytes: u64,
    #[serde(default = "uplink")]
    pub uplink_bps: f64,
    #[serde(default = "downlink")]
    pub downlink_bps: f64,
}

fn one_byte() -> u64 {
    1
}

fn uplink() -> f64 {
    DEFAULT_UPLINK_BPS
}

fn downlink() -> f64 {
    DEFAULT_DOWNLINK_BPS
}

impl CostSpec {
    /// Spec with no elaboration time, a 1-byte reply and default bitrates.
    pub fn new(alpha: f64, hourly_bytes: u64, rtt: f64, t_i_grid: Vec<f64>) -> Self {
        Self {
            alpha,
            hourly_bytes,
            rtt,
            t_elab: 0.0,
            t_i_grid,
            reply_bytes: 1,
            uplink_bps: DEFAULT_UPLINK_BPS,
            downlink_bps: DEFAULT_DOWNLINK_BPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidCost(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if self.hourly_bytes == 0 {
            return Err(Error::InvalidCost("hourly_bytes must be positive".into()));
        }
        if self.t_i_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if self.t_i_grid.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidCost("grid periods must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub t_i: f64,
    /// Energy spent per hour, mJ.
    pub e_total: f64,
    /// Delay incurred by the data, ms. Equal to `t_i`.
    pub d: f64,
    /// Normalized cost.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCurve {
    pub alpha: f64,
    pub points: Vec<CostPoint>,
    /// Index of the cheapest point; ties go to the smallest period.
    pub argmin: usize,
}

impl CostCurve {
    pub fn best(&self) -> &CostPoint {
        &self.points[self.argmin]
    }
}

/// Bytes carried by each cycle so that `hourly_bytes` leave every hour.
pub fn per_cycle_payload(hourly_bytes: u64, t_i: f64) -> u64 {
    (hourly_bytes as f64 * t_i / MS_PER_HOUR).round() as u64
}

/// `alpha * e / e_max + (1 - alpha) * d / d_max`.
pub fn normalized_cost(alpha: f64, e: f64, e_max: f64, d: f64, d_max: f64) -> f64 {
    alpha * e / e_max + (1.0 - alpha) * d / d_max
}

/// Hourly energy of one grid period.
pub fn hourly_energy(spec: &CostSpec, t_i: f64, profile: &PowerProfile) -> Result<f64> {
    let scn = ConnectionlessScenario {
        t_i,
        t_elab: spec.t_elab,
        rtt: spec.rtt,
        b_tx: per_cycle_payload(spec.hourly_bytes, t_i),
        b_rx: spec.reply_bytes,
        uplink_bps: spec.uplink_bps,
        downlink_bps: spec.downlink_bps,
    };
    let cycle = scenario_energy(&scn, profile)?;
    Ok(cycle.e_i * MS_PER_HOUR / t_i)
}

/// Cost over the grid, normalized by the grid maxima of energy and delay.
pub fn cost_curve(spec: &CostSpec, profile: &PowerProfile) -> Result<CostCurve> {
    spec.validate()?;
    let energies = spec
        .t_i_grid
        .iter()
        .map(|&t_i| hourly_energy(spec, t_i, profile))
        .collect::<Result<Vec<_>>>()?;
    let e_max = energies.iter().copied().fold(f64::MIN, f64::max);
    let d_max = spec.t_i_grid.iter().copied().fold(f64::MIN, f64::max);

    let points: Vec<CostPoint> = spec
        .t_i_grid
        .iter()
        .zip(&energies)
        .map(|(&t_i, &e)| CostPoint {
            t_i,
            e_total: e,
            d: t_i,
            c: normalized_cost(spec.alpha, e, e_max, t_i, d_max),
        })
        .collect();

    let mut argmin = 0;
    for (i, p) in points.iter().enumerate() {
        let best = &points[argmin];
        if p.c < best.c || (p.c == best.c && p.t_i < best.t_i) {
            argmin = i;
        }
    }
    Ok(CostCurve {
        alpha: spec.alpha,
        points,
        argmin,
    })
}

/// Grid of periods `min, min + step, ..., max`.
pub fn period_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    crate::sweep::SweepAxis::new(crate::sweep::SweepParam::TI, min, max, step).values()
}
