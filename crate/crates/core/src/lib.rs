//! Energy model of an LTE terminal exchanging data with edge or cloud
//! servers: radio power states, closed-form per-cycle energy, parameter
//! sweeps, an energy/latency trade-off, and energy from packet captures.

pub mod analytic;
pub mod cost;
pub mod error;
pub mod power;
pub mod report;
pub mod sweep;
pub mod trace;

pub use analytic::{
    compare, cycle_energy, idle_gap_energy, phase_timing, scenario_energy, transfer_time,
    ComparisonResult, ConnectionlessScenario, EnergyBreakdown, PhaseTiming,
};
pub use cost::{cost_curve, period_grid, CostCurve, CostPoint, CostSpec};
pub use error::{Error, Result};
pub use power::{decay_state_at, default_profile, mean_power, DutyCycle, PowerProfile, RadioState};
pub use sweep::{run_sweep, CellOutcome, SweepAxis, SweepCell, SweepGrid, SweepParam, SweepSpec};
pub use trace::{AppKind, MeasuredPhases, PacketEvent, Timestamp, TraceIteration};
