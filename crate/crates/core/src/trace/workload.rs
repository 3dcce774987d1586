use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::TraceIteration;

/// Two-sided 95% quantile of the standard normal distribution.
pub const Z_95: f64 = 1.96;

/// Mean reception time of the monitored client under `c` concurrent
/// connections to the same server.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadPoint {
    pub concurrent_connections: u32,
    /// ms
    pub t_rx_mean: f64,
    /// Half-width of the 95% confidence interval (normal approximation,
    /// sample standard deviation). `None` with a single repetition.
    pub half_width: Option<f64>,
    pub repetitions: usize,
}

pub fn workload_summary(points: &[(u32, Vec<TraceIteration>)]) -> Result<Vec<WorkloadPoint>> {
    points
        .iter()
        .map(|(c, iterations)| {
            if iterations.is_empty() {
                return Err(Error::EmptyGroup(format!("no repetitions for c = {c}")));
            }
            let n = iterations.len();
            let samples = iterations.iter().map(|it| it.phases.t_rx);
            let mean = samples.clone().sum::<f64>() / n as f64;
            let half_width = (n > 1).then(|| {
                let var = samples.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                Z_95 * var.sqrt() / (n as f64).sqrt()
            });
            Ok(WorkloadPoint {
                concurrent_connections: *c,
                t_rx_mean: mean,
                half_width,
                repetitions: n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{AppKind, MeasuredPhases};
    use approx::assert_abs_diff_eq;

    fn rx(t_rx: f64) -> TraceIteration {
        TraceIteration {
            phases: MeasuredPhases {
                t_tx: 10.0,
                t_w: 10.0,
                t_rx,
            },
            app_kind: AppKind::Get,
            file_size: 100_000,
            repetition_index: 0,
        }
    }

    #[test]
    fn single_repetition_has_no_interval() {
        let out = workload_summary(&[(0, vec![rx(420.0)])]).unwrap();
        assert_eq!(out[0].t_rx_mean, 420.0);
        assert_eq!(out[0].half_width, None);
        assert_eq!(out[0].repetitions, 1);
    }

    #[test]
    fn identical_repetitions_have_zero_width() {
        let out = workload_summary(&[(10, vec![rx(300.0); 5])]).unwrap();
        assert_eq!(out[0].half_width, Some(0.0));
    }

    #[test]
    fn six_repetitions() {
        // mean 350, deviations -50 -30 -10 10 30 50, sum of squares 7000,
        // sample variance 1400
        let values = [300.0, 320.0, 340.0, 360.0, 380.0, 400.0];
        let out = workload_summary(&[(50, values.iter().map(|&v| rx(v)).collect())]).unwrap();
        assert_abs_diff_eq!(out[0].t_rx_mean, 350.0);
        assert_abs_diff_eq!(
            out[0].half_width.unwrap(),
            1.96 * 1400f64.sqrt() / 6f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn empty_group_rejected() {
        assert!(matches!(
            workload_summary(&[(0, vec![])]),
            Err(Error::EmptyGroup(_))
        ));
    }
}
