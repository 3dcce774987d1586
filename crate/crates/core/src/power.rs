//! LTE radio state machine and its power parameters.
//!
//! Units throughout the crate: time in milliseconds, power in milliwatts,
//! energy in millijoules (`mJ = mW * ms / 1000`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when cross-checking stored state powers against their
/// duty-cycle micro-parameters.
pub const DUTY_CYCLE_TOLERANCE_MW: f64 = 0.01;

/// RRC/DRX state of the LTE interface.
///
/// Without traffic the machine decays `ContinuousReception -> ShortDrx ->
/// LongDrx -> Idle`; any packet brings it back to `ContinuousReception`.
/// Only the exit from `Idle` pays a promotion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RadioState {
    #[serde(rename = "CR")]
    ContinuousReception,
    ShortDrx,
    LongDrx,
    Idle,
}

impl RadioState {
    /// Mean power drawn while resting in this state.
    pub fn power(self, profile: &PowerProfile) -> f64 {
        match self {
            RadioState::ContinuousReception => profile.p_cr,
            RadioState::ShortDrx => profile.p_short,
            RadioState::LongDrx => profile.p_long,
            RadioState::Idle => profile.p_idle,
        }
    }

    /// Whether leaving this state for CR requires a promotion.
    pub fn needs_promotion(self) -> bool {
        self == RadioState::Idle
    }
}

/// Wake/sleep micro-parameters of a discontinuous-reception state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DutyCycle {
    /// mW drawn during a wake-up window.
    pub wake_power: f64,
    /// ms of each wake-up window.
    pub wake_duration: f64,
    /// ms between consecutive wake-ups.
    pub period: f64,
    /// mW drawn while asleep.
    pub sleep_power: f64,
}

impl DutyCycle {
    pub const fn new(wake_power: f64, wake_duration: f64, period: f64, sleep_power: f64) -> Self {
        Self {
            wake_power,
            wake_duration,
            period,
            sleep_power,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.wake_power,
            self.wake_duration,
            self.period,
            self.sleep_power,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDutyCycle("non-finite field".into()));
        }
        if self.period <= 0.0 {
            return Err(Error::InvalidDutyCycle(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if self.wake_duration < 0.0 || self.wake_duration > self.period {
            return Err(Error::InvalidDutyCycle(format!(
                "wake duration {} outside [0, {}]",
                self.wake_duration, self.period
            )));
        }
        if self.wake_power < 0.0 || self.sleep_power < 0.0 {
            return Err(Error::InvalidDutyCycle("negative power".into()));
        }
        Ok(())
    }
}

/// Time-weighted mean power of a duty cycle.
pub fn mean_power(spec: &DutyCycle) -> Result<f64> {
    spec.validate()?;
    let asleep = spec.period - spec.wake_duration;
    Ok((spec.wake_power * spec.wake_duration + spec.sleep_power * asleep) / spec.period)
}

/// All powers, timers and duty cycles of one LTE interface.
///
/// The DRX/IDLE mean powers are stored explicitly. When the matching duty
/// cycle is present, [`PowerProfile::validate`] checks that the two agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerProfile {
    pub p_tx: f64,
    pub p_rx: f64,
    pub p_cr: f64,
    pub p_short: f64,
    pub p_long: f64,
    pub p_idle: f64,
    pub p_prom: f64,
    pub t_cr: f64,
    pub t_short: f64,
    pub t_long: f64,
    pub t_prom: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub short_drx: Option<DutyCycle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub long_drx: Option<DutyCycle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idle: Option<DutyCycle>,
}

impl Default for PowerProfile {
    fn default() -> Self {
        default_profile()
    }
}

/// The reference LTE interface: 1200/1000 mW TX/RX, 1000 mW in CR,
/// 200/400/11000 ms CR/SHORT/LONG tails and a 200 ms, 1200 mW promotion.
pub fn default_profile() -> PowerProfile {
    PowerProfile {
        p_tx: 1200.0,
        p_rx: 1000.0,
        p_cr: 1000.0,
        p_short: 359.07,
        p_long: 163.23,
        p_idle: 14.25,
        p_prom: 1200.0,
        t_cr: 200.0,
        t_short: 400.0,
        t_long: 11000.0,
        t_prom: 200.0,
        short_drx: Some(DutyCycle::new(788.0, 41.0, 100.0, 61.0)),
        long_drx: Some(DutyCycle::new(788.0, 45.0, 320.0, 61.0)),
        idle: Some(DutyCycle::new(570.0, 32.0, 1280.0, 0.0)),
    }
}

impl PowerProfile {
    /// Silence after which the interface has reached IDLE.
    pub fn idle_threshold(&self) -> f64 {
        self.t_cr + self.t_short + self.t_long
    }

    /// `T_PROM * P_PROM`, in mJ.
    pub fn promotion_energy(&self) -> f64 {
        self.t_prom * self.p_prom / 1000.0
    }

    /// Parse a profile from its JSON representation and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let profile: PowerProfile =
            serde_json::from_str(text).map_err(|e| Error::InvalidProfile(e.to_string()))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let powers = [
            ("p_tx", self.p_tx),
            ("p_rx", self.p_rx),
            ("p_cr", self.p_cr),
            ("p_short", self.p_short),
            ("p_long", self.p_long),
            ("p_idle", self.p_idle),
            ("p_prom", self.p_prom),
        ];
        for (name, value) in powers {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidProfile(format!("{name} = {value}")));
            }
        }
        let timers = [
            ("t_cr", self.t_cr),
            ("t_short", self.t_short),
            ("t_long", self.t_long),
            ("t_prom", self.t_prom),
        ];
        for (name, value) in timers {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if !(self.p_idle < self.p_long && self.p_long < self.p_short && self.p_short < self.p_cr) {
            return Err(Error::InvalidProfile(
                "state powers must satisfy p_idle < p_long < p_short < p_cr".into(),
            ));
        }

        let checks = [
            ("short_drx", self.short_drx, self.p_short),
            ("long_drx", self.long_drx, self.p_long),
            ("idle", self.idle, self.p_idle),
        ];
        for (name, cycle, stored) in checks {
            match cycle {
                Some(cycle) => {
                    let derived = mean_power(&cycle)?;
                    if (derived - stored).abs() > DUTY_CYCLE_TOLERANCE_MW {
                        return Err(Error::InvalidProfile(format!(
                            "{name}: duty cycle yields {derived:.4} mW but profile stores {stored} mW"
                        )));
                    }
                }
                None => log::warn!("profile has no `{name}` duty cycle; consistency check skipped"),
            }
        }
        Ok(())
    }
}

/// State reached after `gap_elapsed` ms without traffic, starting from CR.
///
/// Thresholds are inclusive: a gap of exactly `T_C` is still CR.
pub fn decay_state_at(gap_elapsed: f64, profile: &PowerProfile) -> RadioState {
    let short_end = profile.t_cr + profile.t_short;
    if gap_elapsed <= profile.t_cr {
        RadioState::ContinuousReception
    } else if gap_elapsed <= short_end {
        RadioState::ShortDrx
    } else if gap_elapsed <= short_end + profile.t_long {
        RadioState::LongDrx
    } else {
        RadioState::Idle
    }
}
