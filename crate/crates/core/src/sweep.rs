//! Dense parameter sweeps of the edge/cloud energy ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{compare, ComparisonResult, ConnectionlessScenario};
use crate::error::{Error, Result};
use crate::power::PowerProfile;

/// Upper bound on the number of cells of one sweep.
pub const MAX_CELLS: usize = 4_000_000;

/// A scenario parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Application period, applied to both placements.
    TI,
    /// Cloud RTT; the edge RTT stays at the base value.
    RttCloud,
    /// Sets `b_tx = b_rx` for both placements.
    Payload,
    /// Elaboration time, applied to both placements.
    TElab,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::TI => "t_i",
            SweepParam::RttCloud => "rtt_cloud",
            SweepParam::Payload => "payload",
            SweepParam::TElab => "t_elab",
        }
    }
}

/// Evenly spaced `min..=max` by `step`, or an explicit list of `points`
/// (which takes precedence when present).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    #[serde(default)]
    pub min: f64,
    #[serde(default)]
    pub max: f64,
    #[serde(default)]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
}

impl SweepAxis {
    pub fn new(param: SweepParam, min: f64, max: f64, step: f64) -> Self {
        Self {
            param,
            min,
            max,
            step,
            points: None,
        }
    }

    pub fn from_points(param: SweepParam, points: Vec<f64>) -> Self {
        Self {
            points: Some(points),
            ..Self::new(param, 0.0, 0.0, 0.0)
        }
    }

    /// Grid values `min, min + step, ...` up to and including `max`.
    pub fn values(&self) -> Result<Vec<f64>> {
        if let Some(points) = &self.points {
            if points.is_empty() {
                return Err(Error::EmptyGrid);
            }
            if points.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "{}: non-finite point",
                    self.param.name()
                )));
            }
            return Ok(points.clone());
        }
        if ![self.min, self.max, self.step]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidSweep(format!(
                "{}: non-finite bound",
                self.param.name()
            )));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidSweep(format!(
                "{}: step must be positive",
                self.param.name()
            )));
        }
        if self.min > self.max {
            return Err(Error::InvalidSweep(format!(
                "{}: min exceeds max",
                self.param.name()
            )));
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        if count > MAX_CELLS {
            return Err(Error::InvalidSweep(format!(
                "{}: too many points",
                self.param.name()
            )));
        }
        Ok((0..count)
            .map(|k| self.min + k as f64 * self.step)
            .collect())
    }
}

/// One- or two-dimensional sweep around a base scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Edge scenario; the cloud scenario copies it with `rtt_cloud`.
    pub base: ConnectionlessScenario,
    pub rtt_cloud: f64,
    pub axes: Vec<SweepAxis>,
}

/// Result of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CellOutcome {
    Ok(ComparisonResult),
    /// At least one placement does not fit in the period; `deficit_ms` is
    /// the larger of the two overruns.
    Overrun {
        deficit_ms: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// Axis values in the order of [`SweepGrid::axes`].
    pub coords: Vec<f64>,
    pub outcome: CellOutcome,
}

impl SweepCell {
    pub fn rho(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Ok(r) => Some(r.rho),
            CellOutcome::Overrun { .. } => None,
        }
    }
}

/// Cells in row-major order: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<SweepParam>,
    pub values: Vec<Vec<f64>>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, coords: &[f64]) -> Option<&SweepCell> {
        self.cells.iter().find(|c| {
            c.coords.len() == coords.len()
                && c.coords
                    .iter()
                    .zip(coords)
                    .all(|(a, b)| (a - b).abs() < 1e-9)
        })
    }
}

/// Edge and cloud scenarios of the cell at `coords`.
pub fn cell_scenarios(
    spec: &SweepSpec,
    coords: &[f64],
) -> (ConnectionlessScenario, ConnectionlessScenario) {
    let mut edge = spec.base.clone();
    let mut rtt_cloud = spec.rtt_cloud;
    for (axis, &value) in spec.axes.iter().zip(coords) {
        match axis.param {
            SweepParam::TI => edge.t_i = value,
            SweepParam::RttCloud => rtt_cloud = value,
            SweepParam::Payload => {
                let bytes = value.round().max(0.0) as u64;
                edge.b_tx = bytes;
                edge.b_rx = bytes;
            }
            SweepParam::TElab => edge.t_elab = value,
        }
    }
    let cloud = edge.clone().with_rtt(rtt_cloud);
    (edge, cloud)
}

fn evaluate_cell(
    edge: &ConnectionlessScenario,
    cloud: &ConnectionlessScenario,
    profile: &PowerProfile,
) -> Result<CellOutcome> {
    match compare(edge, cloud, profile) {
        Ok(r) => Ok(CellOutcome::Ok(r)),
        Err(Error::PeriodOverrun { .. }) => {
            let deficit =
                |s: &ConnectionlessScenario| match crate::analytic::phase_timing(s, profile) {
                    Err(Error::PeriodOverrun { deficit_ms }) => deficit_ms,
                    _ => 0.0,
                };
            Ok(CellOutcome::Overrun {
                deficit_ms: deficit(edge).max(deficit(cloud)),
            })
        }
        Err(e) => Err(e),
    }
}

/// Evaluate every cell of the sweep. Cells are computed in parallel; the
/// output order does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec, profile: &PowerProfile) -> Result<SweepGrid> {
    if spec.axes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if spec.axes.len() > 2 {
        return Err(Error::InvalidSweep("at most two axes are supported".into()));
    }
    if spec.axes.len() == 2 && spec.axes[0].param == spec.axes[1].param {
        return Err(Error::InvalidSweep(
            "axes must sweep different parameters".into(),
        ));
    }
    let values = spec
        .axes
        .iter()
        .map(SweepAxis::values)
        .collect::<Result<Vec<_>>>()?;
    let total: usize = values.iter().map(Vec::len).product();
    if total > MAX_CELLS {
        return Err(Error::InvalidSweep(format!(
            "{total} cells exceeds the limit of {MAX_CELLS}"
        )));
    }

    let coords: Vec<Vec<f64>> = match values.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| vec![x, y]))
            .collect(),
        _ => unreachable!(),
    };

    let cells = coords
        .into_par_iter()
        .map(|coords| {
            let (edge, cloud) = cell_scenarios(spec, &coords);
            evaluate_cell(&edge, &cloud, profile).map(|outcome| SweepCell { coords, outcome })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepGrid {
        axes: spec.axes.iter().map(|a| a.param).collect(),
        values,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::default_profile;

    fn period_rtt_sweep() -> SweepSpec {
        SweepSpec {
            base: ConnectionlessScenario::new(750.0, 150.0, 16000, 16000),
            rtt_cloud: 50.0,
            axes: vec![
                SweepAxis::new(SweepParam::TI, 750.0, 5000.0, 250.0),
                SweepAxis::new(SweepParam::RttCloud, 50.0, 300.0, 50.0),
            ],
        }
    }

    #[test]
    fn axis_values_include_max() {
        let a = SweepAxis::new(SweepParam::TI, 750.0, 5000.0, 250.0);
        let v = a.values().unwrap();
        assert_eq!(v.len(), 18);
        assert_eq!(*v.last().unwrap(), 5000.0);
        let single = SweepAxis::new(SweepParam::TI, 10.0, 10.0, 1.0)
            .values()
            .unwrap();
        assert_eq!(single, vec![10.0]);
    }

    #[test]
    fn invalid_axes() {
        assert!(SweepAxis::new(SweepParam::TI, 1.0, 2.0, 0.0)
            .values()
            .is_err());
        assert!(SweepAxis::new(SweepParam::TI, 3.0, 2.0, 1.0)
            .values()
            .is_err());
        let listed = SweepAxis::from_points(SweepParam::Payload, vec![16.0, 1024.0, 16000.0]);
        assert_eq!(listed.values().unwrap(), vec![16.0, 1024.0, 16000.0]);
        assert_eq!(
            SweepAxis::from_points(SweepParam::Payload, vec![]).values(),
            Err(Error::EmptyGrid)
        );
        let mut spec = period_rtt_sweep();
        spec.axes.clear();
        assert_eq!(run_sweep(&spec, &default_profile()), Err(Error::EmptyGrid));
        let mut spec = period_rtt_sweep();
        spec.axes[1].param = SweepParam::TI;
        assert!(run_sweep(&spec, &default_profile()).is_err());
    }

    #[test]
    fn period_rtt_sign_cells() {
        let p = default_profile();
        let grid = run_sweep(&period_rtt_sweep(), &p).unwrap();
        assert_eq!(grid.cells.len(), 18 * 6);
        assert!(grid.cell(&[750.0, 300.0]).unwrap().rho().unwrap() > 1.0);
        assert!(grid.cell(&[1000.0, 300.0]).unwrap().rho().unwrap() < 1.0);
    }

    #[test]
    fn cells_match_compare() {
        let p = default_profile();
        let spec = period_rtt_sweep();
        let grid = run_sweep(&spec, &p).unwrap();
        for cell in &grid.cells {
            let (edge, cloud) = cell_scenarios(&spec, &cell.coords);
            assert_eq!(
                cell.outcome,
                CellOutcome::Ok(compare(&edge, &cloud, &p).unwrap())
            );
        }
    }

    #[test]
    fn single_cell_equals_compare() {
        let p = default_profile();
        let spec = SweepSpec {
            base: ConnectionlessScenario::new(750.0, 150.0, 16000, 16000),
            rtt_cloud: 150.0,
            axes: vec![SweepAxis::new(SweepParam::TI, 750.0, 750.0, 1.0)],
        };
        let grid = run_sweep(&spec, &p).unwrap();
        let expected = compare(&spec.base, &spec.base.clone().with_rtt(150.0), &p).unwrap();
        assert_eq!(grid.cells.len(), 1);
        assert_eq!(grid.cells[0].outcome, CellOutcome::Ok(expected));
    }

    #[test]
    fn overrun_cells_are_kept() {
        let p = default_profile();
        let spec = SweepSpec {
            base: ConnectionlessScenario::new(500.0, 150.0, 16000, 16000),
            rtt_cloud: 300.0,
            axes: vec![SweepAxis::new(SweepParam::TI, 500.0, 800.0, 100.0)],
        };
        let grid = run_sweep(&spec, &p).unwrap();
        assert_eq!(grid.cells.len(), 4);
        // 478 ms of edge phases, 738 ms of cloud phases
        match grid.cells[0].outcome {
            CellOutcome::Overrun { deficit_ms } => assert!((deficit_ms - 238.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(grid.cells[2].outcome, CellOutcome::Overrun { .. }));
        assert!(grid.cells[3].rho().is_some());
    }
}
