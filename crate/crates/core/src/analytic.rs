//! Closed-form energy of one request-response cycle and the edge/cloud
//! comparison for the connectionless (UDP) case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::PowerProfile;

/// RTT towards the edge server when none is given, in ms.
pub const DEFAULT_EDGE_RTT_MS: f64 = 40.0;
/// Uplink bitrate when none is given, in bit/s.
pub const DEFAULT_UPLINK_BPS: f64 = 1_000_000.0;
/// Downlink bitrate when none is given, in bit/s.
pub const DEFAULT_DOWNLINK_BPS: f64 = 800_000.0;

/// Residual periods this close to zero are treated as exactly zero.
const OVERRUN_SLACK_MS: f64 = 1e-9;

/// Application and network parameters of a periodic UDP exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionlessScenario {
    /// Application period, ms.
    pub t_i: f64,
    /// Server elaboration time, ms.
    #[serde(default)]
    pub t_elab: f64,
    /// Round-trip time to the server, ms.
    #[serde(default = "default_rtt")]
    pub rtt: f64,
    /// Bytes sent per cycle, stack overhead included.
    pub b_tx: u64,
    /// Bytes received per cycle, stack overhead included.
    pub b_rx: u64,
    #[serde(default = "default_uplink")]
    pub uplink_bps: f64,
    #[serde(default = "default_downlink")]
    pub downlink_bps: f64,
}

fn default_rtt() -> f64 {
    DEFAULT_EDGE_RTT_MS
}

fn default_uplink() -> f64 {
    DEFAULT_UPLINK_BPS
}

fn default_downlink() -> f64 {
    DEFAULT_DOWNLINK_BPS
}

impl ConnectionlessScenario {
    /// Scenario with the default edge RTT and bitrates.
    pub fn new(t_i: f64, t_elab: f64, b_tx: u64, b_rx: u64) -> Self {
        Self {
            t_i,
            t_elab,
            rtt: DEFAULT_EDGE_RTT_MS,
            b_tx,
            b_rx,
            uplink_bps: DEFAULT_UPLINK_BPS,
            downlink_bps: DEFAULT_DOWNLINK_BPS,
        }
    }

    pub fn with_rtt(mut self, rtt: f64) -> Self {
        self.rtt = rtt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.t_i,
            self.t_elab,
            self.rtt,
            self.uplink_bps,
            self.downlink_bps,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScenario("non-finite field".into()));
        }
        if self.t_i <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "t_i must be positive, got {}",
                self.t_i
            )));
        }
        if self.t_elab < 0.0 || self.rtt < 0.0 {
            return Err(Error::InvalidScenario(
                "t_elab and rtt must be non-negative".into(),
            ));
        }
        if self.uplink_bps <= 0.0 || self.downlink_bps <= 0.0 {
            return Err(Error::InvalidScenario("bitrates must be positive".into()));
        }
        Ok(())
    }
}

/// Durations of the phases of one cycle, in ms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub t_tx: f64,
    pub t_w: f64,
    pub t_rx: f64,
    pub t_q: f64,
    /// Promotion charged ahead of the next transmission.
    pub prom_tx: bool,
    /// Promotion charged ahead of the reception.
    pub prom_rx: bool,
}

impl PhaseTiming {
    /// Complete measured or computed TX/W/RX durations into a full cycle of
    /// length `t_i`, deciding promotions and the residual `t_q`.
    ///
    /// The reception needs a promotion when `t_w` exceeds the IDLE
    /// threshold. The next transmission needs one when the silence left
    /// after paying for it still exceeds that threshold, so `prom_tx`
    /// implies `t_q > T_C + T_S + T_L`.
    pub fn from_phases(
        t_tx: f64,
        t_w: f64,
        t_rx: f64,
        t_i: f64,
        profile: &PowerProfile,
    ) -> Result<Self> {
        if [t_tx, t_w, t_rx].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidScenario(
                "phase durations must be finite and non-negative".into(),
            ));
        }
        let threshold = profile.idle_threshold();
        let prom_rx = t_w > threshold;
        let mut t_q = t_i - t_tx - t_rx - t_w;
        if prom_rx {
            t_q -= profile.t_prom;
        }
        let prom_tx = t_q - profile.t_prom > threshold;
        if prom_tx {
            t_q -= profile.t_prom;
        }
        if t_q < 0.0 {
            if t_q > -OVERRUN_SLACK_MS {
                t_q = 0.0;
            } else {
                return Err(Error::PeriodOverrun { deficit_ms: -t_q });
            }
        }
        Ok(Self {
            t_tx,
            t_w,
            t_rx,
            t_q,
            prom_tx,
            prom_rx,
        })
    }

    /// Time spent in promotions during the cycle.
    pub fn promotion_time(&self, profile: &PowerProfile) -> f64 {
        (u8::from(self.prom_tx) + u8::from(self.prom_rx)) as f64 * profile.t_prom
    }

    /// Sum of all phases, promotions included.
    pub fn total(&self, profile: &PowerProfile) -> f64 {
        self.t_tx + self.t_w + self.t_rx + self.t_q + self.promotion_time(profile)
    }
}

/// Per-component energy of one cycle, in mJ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub e_tx: f64,
    pub e_w: f64,
    pub e_rx: f64,
    pub e_q: f64,
    pub e_prom_tx: f64,
    pub e_prom_rx: f64,
    pub e_i: f64,
}

/// Both placements of the same scenario and their energy ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub edge: EnergyBreakdown,
    pub cloud: EnergyBreakdown,
    /// `edge.e_i / cloud.e_i`; below 1 the edge placement saves energy.
    pub rho: f64,
    /// Cloud RTT minus edge RTT, ms.
    pub delta_rtt: f64,
}

/// Serialization time of `bytes` at `bitrate` bit/s, in ms.
pub fn transfer_time(bytes: u64, bitrate: f64) -> f64 {
    8.0 * bytes as f64 / bitrate * 1000.0
}

/// Energy spent by an interface left without traffic for `gap` ms, starting
/// from CR and decaying through SHORT DRX, LONG DRX and IDLE.
pub fn idle_gap_energy(gap: f64, profile: &PowerProfile) -> Result<f64> {
    if gap < 0.0 || gap.is_nan() {
        return Err(Error::NegativeGap(gap));
    }
    let short_start = profile.t_cr;
    let long_start = short_start + profile.t_short;
    let idle_start = long_start + profile.t_long;

    let micro_joules = if gap <= short_start {
        gap * profile.p_cr
    } else if gap <= long_start {
        profile.t_cr * profile.p_cr + (gap - short_start) * profile.p_short
    } else if gap <= idle_start {
        profile.t_cr * profile.p_cr
            + profile.t_short * profile.p_short
            + (gap - long_start) * profile.p_long
    } else {
        profile.t_cr * profile.p_cr
            + profile.t_short * profile.p_short
            + profile.t_long * profile.p_long
            + (gap - idle_start) * profile.p_idle
    };
    Ok(micro_joules / 1000.0)
}

/// Phase durations of a connectionless scenario.
pub fn phase_timing(scn: &ConnectionlessScenario, profile: &PowerProfile) -> Result<PhaseTiming> {
    scn.validate()?;
    let t_tx = transfer_time(scn.b_tx, scn.uplink_bps);
    let t_rx = transfer_time(scn.b_rx, scn.downlink_bps);
    let t_w = scn.t_elab + scn.rtt;
    PhaseTiming::from_phases(t_tx, t_w, t_rx, scn.t_i, profile)
}

/// Energy of one cycle with the given phase durations.
pub fn cycle_energy(timing: &PhaseTiming, profile: &PowerProfile) -> Result<EnergyBreakdown> {
    let e_tx = timing.t_tx * profile.p_tx / 1000.0;
    let e_rx = timing.t_rx * profile.p_rx / 1000.0;
    let e_w = idle_gap_energy(timing.t_w, profile)?;
    let e_q = idle_gap_energy(timing.t_q, profile)?;
    let promotion = profile.promotion_energy();
    let e_prom_tx = if timing.prom_tx { promotion } else { 0.0 };
    let e_prom_rx = if timing.prom_rx { promotion } else { 0.0 };
    Ok(EnergyBreakdown {
        e_tx,
        e_w,
        e_rx,
        e_q,
        e_prom_tx,
        e_prom_rx,
        e_i: e_tx + e_w + e_rx + e_q + e_prom_tx + e_prom_rx,
    })
}

/// Energy of one cycle of a connectionless scenario.
pub fn scenario_energy(
    scn: &ConnectionlessScenario,
    profile: &PowerProfile,
) -> Result<EnergyBreakdown> {
    cycle_energy(&phase_timing(scn, profile)?, profile)
}

/// Evaluate the same exchange against an edge and a cloud server.
///
/// The two scenarios must be identical except for `rtt`.
pub fn compare(
    edge: &ConnectionlessScenario,
    cloud: &ConnectionlessScenario,
    profile: &PowerProfile,
) -> Result<ComparisonResult> {
    let mismatch = [
        ("t_i", edge.t_i == cloud.t_i),
        ("t_elab", edge.t_elab == cloud.t_elab),
        ("b_tx", edge.b_tx == cloud.b_tx),
        ("b_rx", edge.b_rx == cloud.b_rx),
        ("uplink_bps", edge.uplink_bps == cloud.uplink_bps),
        ("downlink_bps", edge.downlink_bps == cloud.downlink_bps),
    ]
    .into_iter()
    .find(|(_, same)| !same);
    if let Some((field, _)) = mismatch {
        return Err(Error::ScenarioMismatch(field));
    }

    let edge_energy = scenario_energy(edge, profile)?;
    let cloud_energy = scenario_energy(cloud, profile)?;
    Ok(ComparisonResult {
        edge: edge_energy,
        cloud: cloud_energy,
        rho: edge_energy.e_i / cloud_energy.e_i,
        delta_rtt: cloud.rtt - edge.rtt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::{decay_state_at, default_profile};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Integrates the state power over `gap` in `step`-ms slices using only
    /// the decay state machine. Exact when every threshold is a multiple of
    /// `step`.
    fn integrate_decay(gap: f64, profile: &PowerProfile, step: f64) -> f64 {
        let mut t = 0.0;
        let mut acc = 0.0;
        while t < gap {
            let dt = step.min(gap - t);
            let state = decay_state_at(t + dt / 2.0, profile);
            acc += state.power(profile) * dt;
            t += dt;
        }
        acc / 1000.0
    }

    fn reference(t_i: f64) -> ConnectionlessScenario {
        ConnectionlessScenario::new(t_i, 150.0, 16000, 16000)
    }

    #[test]
    fn transfer_times() {
        assert_abs_diff_eq!(transfer_time(16000, 1e6), 128.0);
        assert_abs_diff_eq!(transfer_time(16000, 0.8e6), 160.0);
        assert_eq!(transfer_time(0, 1234.0), 0.0);
    }

    #[test]
    fn idle_gap_reference_points() {
        let p = default_profile();
        let round1 = |v: f64| (v * 10.0).round() / 10.0;
        assert_eq!(round1(idle_gap_energy(190.0, &p).unwrap()), 190.0);
        assert_eq!(round1(idle_gap_energy(300.0, &p).unwrap()), 235.9);
        assert_eq!(round1(idle_gap_energy(272.0, &p).unwrap()), 225.9);
        assert_eq!(idle_gap_energy(0.0, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(
            idle_gap_energy(20000.0, &p).unwrap(),
            2258.858,
            epsilon = 1e-9
        );
    }

    #[test]
    fn idle_gap_matches_state_integration() {
        let p = default_profile();
        for gap in [
            0.0, 1.0, 150.0, 200.0, 201.0, 450.0, 600.0, 5000.0, 11600.0, 12000.0, 20000.0, 36000.0,
        ] {
            let oracle = integrate_decay(gap, &p, 1.0);
            assert_abs_diff_eq!(idle_gap_energy(gap, &p).unwrap(), oracle, epsilon = 1e-6);
        }
    }

    #[test]
    fn negative_gap_is_rejected() {
        assert_eq!(
            idle_gap_energy(-1.0, &default_profile()),
            Err(Error::NegativeGap(-1.0))
        );
    }

    #[test]
    fn reference_phase_timings() {
        let p = default_profile();
        let edge = phase_timing(&reference(750.0), &p).unwrap();
        assert_abs_diff_eq!(edge.t_tx, 128.0);
        assert_abs_diff_eq!(edge.t_w, 190.0);
        assert_abs_diff_eq!(edge.t_rx, 160.0);
        assert_abs_diff_eq!(edge.t_q, 272.0, epsilon = 1e-9);
        assert!(!edge.prom_tx && !edge.prom_rx);

        let cloud = phase_timing(&reference(750.0).with_rtt(300.0), &p).unwrap();
        assert_abs_diff_eq!(cloud.t_w, 450.0);
        assert_abs_diff_eq!(cloud.t_q, 12.0, epsilon = 1e-9);
    }

    #[test]
    fn exact_fit_has_zero_residual() {
        let p = default_profile();
        let scn = ConnectionlessScenario::new(478.0, 150.0, 16000, 16000);
        let t = phase_timing(&scn, &p).unwrap();
        assert_eq!(t.t_q, 0.0);
    }

    #[test]
    fn overrun_carries_deficit() {
        let p = default_profile();
        let scn = ConnectionlessScenario::new(400.0, 150.0, 16000, 16000);
        match phase_timing(&scn, &p) {
            Err(Error::PeriodOverrun { deficit_ms }) => {
                assert_abs_diff_eq!(deficit_ms, 78.0, epsilon = 1e-9)
            }
            other => panic!("expected overrun, got {other:?}"),
        }
    }

    #[test]
    fn reference_totals() {
        let p = default_profile();
        let edge = scenario_energy(&reference(750.0), &p).unwrap();
        let cloud = scenario_energy(&reference(750.0).with_rtt(300.0), &p).unwrap();
        assert_abs_diff_eq!(edge.e_i, 729.5, epsilon = 0.05);
        assert_abs_diff_eq!(cloud.e_i, 615.4, epsilon = 0.05);
        let zero = cycle_energy(&PhaseTiming::default(), &p).unwrap();
        assert_eq!(zero.e_i, 0.0);
    }

    #[test]
    fn long_period_charges_promotion() {
        let p = default_profile();
        let t = PhaseTiming::from_phases(10.0, 50.0, 10.0, 20000.0, &p).unwrap();
        assert!(t.prom_tx);
        assert!(!t.prom_rx);
        assert_abs_diff_eq!(t.t_q, 20000.0 - 70.0 - 200.0);
        let e = cycle_energy(&t, &p).unwrap();
        assert_abs_diff_eq!(e.e_prom_tx, 240.0);
    }

    #[test]
    fn long_wait_charges_reception_promotion() {
        let p = default_profile();
        let t = PhaseTiming::from_phases(10.0, 12000.0, 10.0, 13000.0, &p).unwrap();
        assert!(t.prom_rx);
        assert!(!t.prom_tx);
        assert_abs_diff_eq!(t.t_q, 13000.0 - 12020.0 - 200.0);
    }

    #[test]
    fn compare_examples() {
        let p = default_profile();
        let r = compare(&reference(750.0), &reference(750.0).with_rtt(50.0), &p).unwrap();
        assert_abs_diff_eq!(r.rho, 729.45 / 735.93, epsilon = 1e-3);
        assert!(r.rho < 1.0);
        let r = compare(&reference(750.0), &reference(750.0).with_rtt(150.0), &p).unwrap();
        assert!(r.rho > 1.0);
        assert_abs_diff_eq!(r.delta_rtt, 110.0);
        let r = compare(&reference(750.0), &reference(750.0), &p).unwrap();
        assert_eq!(r.rho, 1.0);
    }

    #[test]
    fn compare_rejects_other_differences() {
        let p = default_profile();
        let mut cloud = reference(750.0).with_rtt(100.0);
        cloud.b_rx = 1;
        assert_eq!(
            compare(&reference(750.0), &cloud, &p),
            Err(Error::ScenarioMismatch("b_rx"))
        );
    }

    proptest! {
        #[test]
        fn time_is_conserved(
            t_i in 1.0f64..60000.0,
            t_elab in 0.0f64..15000.0,
            rtt in 0.0f64..1000.0,
            b_tx in 0u64..200_000,
            b_rx in 0u64..200_000,
        ) {
            let p = default_profile();
            let scn = ConnectionlessScenario { t_i, t_elab, rtt, b_tx, b_rx, uplink_bps: 1e6, downlink_bps: 0.8e6 };
            if let Ok(t) = phase_timing(&scn, &p) {
                prop_assert!((t.total(&p) - t_i).abs() <= 1e-9 * t_i.max(1.0));
                let e = cycle_energy(&t, &p).unwrap();
                let sum = e.e_tx + e.e_w + e.e_rx + e.e_q + e.e_prom_tx + e.e_prom_rx;
                prop_assert_eq!(sum, e.e_i);
            }
        }

        #[test]
        fn idle_gap_strictly_increasing(a in 0.0f64..40000.0, b in 0.0f64..40000.0) {
            prop_assume!(a != b);
            let p = default_profile();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(idle_gap_energy(lo, &p).unwrap() < idle_gap_energy(hi, &p).unwrap());
        }
    }
}
