use serde::{Deserialize, Serialize};

use crate::analytic::{
    cycle_energy, idle_gap_energy, EnergyBreakdown, PhaseTiming, DEFAULT_DOWNLINK_BPS,
    DEFAULT_UPLINK_BPS,
};
use crate::error::{Error, Result};
use crate::power::PowerProfile;

use super::{Direction, Flow, MeasuredPhases, PacketEvent, TcpFlags, Timestamp, TraceIteration};

/// Bitrates used to turn packet payloads into radio busy time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceRates {
    pub uplink_bps: f64,
    pub downlink_bps: f64,
}

impl Default for InterfaceRates {
    fn default() -> Self {
        Self {
            uplink_bps: DEFAULT_UPLINK_BPS,
            downlink_bps: DEFAULT_DOWNLINK_BPS,
        }
    }
}

impl InterfaceRates {
    /// Busy time of one packet, in µs.
    fn busy_micros(&self, event: &PacketEvent) -> f64 {
        let bps = match event.direction {
            Direction::ClientToServer => self.uplink_bps,
            Direction::ServerToClient => self.downlink_bps,
        };
        8.0 * f64::from(event.payload_len) / bps * 1e6
    }
}

/// Energy of one measured exchange repeated every `t_i` ms.
pub fn iteration_energy(
    iter: &TraceIteration,
    t_i: f64,
    profile: &PowerProfile,
) -> Result<EnergyBreakdown> {
    let MeasuredPhases { t_tx, t_w, t_rx } = iter.phases;
    let timing = PhaseTiming::from_phases(t_tx, t_w, t_rx, t_i, profile)?;
    cycle_energy(&timing, profile)
}

/// Walk the radio state machine over an arbitrary event sequence.
///
/// Every event resets the machine to CR. Silences decay along the
/// CR/SHORT/LONG/IDLE chain; a silence whose length minus `T_PROM` still
/// exceeds the IDLE threshold ends with a promotion taken out of that
/// silence. Client payload is busy at `P_TX`, server payload at `P_RX`, for
/// its serialization time at the configured rates; packets that arrive
/// while the radio is busy queue behind it. The window start counts as the
/// end of earlier activity. Returns mJ.
pub fn event_driven_energy(
    events: &[PacketEvent],
    profile: &PowerProfile,
    window: (Timestamp, Timestamp),
    rates: &InterfaceRates,
) -> Result<f64> {
    let (start, end) = window;
    if end < start {
        return Err(Error::InvalidScenario(
            "window ends before it starts".into(),
        ));
    }
    if let Some(index) = events
        .windows(2)
        .position(|w| w[1].timestamp < w[0].timestamp)
    {
        return Err(Error::UnsortedEvents { index: index + 1 });
    }
    if let Some(index) = events
        .iter()
        .position(|e| e.timestamp < start || e.timestamp > end)
    {
        return Err(Error::OutsideWindow { index });
    }

    let silence = |gap_us: f64| -> Result<f64> {
        let gap = gap_us / 1000.0;
        if gap - profile.t_prom > profile.idle_threshold() {
            Ok(idle_gap_energy(gap - profile.t_prom, profile)? + profile.promotion_energy())
        } else {
            idle_gap_energy(gap.max(0.0), profile)
        }
    };

    let origin = start.micros();
    // µs after `origin` at which the radio last stopped being busy
    let mut free_at = 0.0f64;
    let mut energy = 0.0;
    for event in events {
        let at = (event.timestamp.micros() - origin) as f64;
        let begin = if at > free_at {
            energy += silence(at - free_at)?;
            at
        } else {
            free_at
        };
        let busy = rates.busy_micros(event);
        let power = match event.direction {
            Direction::ClientToServer => profile.p_tx,
            Direction::ServerToClient => profile.p_rx,
        };
        energy += busy / 1000.0 * power / 1000.0;
        free_at = begin + busy;
    }
    let stop = (end.micros() - origin) as f64;
    if stop > free_at {
        energy += idle_gap_energy((stop - free_at) / 1000.0, profile)?;
    }
    Ok(energy)
}

fn whole_micros(ms: f64, what: &str) -> Result<i64> {
    let us = ms * 1000.0;
    let rounded = us.round();
    if (us - rounded).abs() > 1e-6 {
        return Err(Error::InvalidScenario(format!(
            "{what} = {ms} ms is not a whole number of microseconds"
        )));
    }
    Ok(rounded as i64)
}

fn whole_bytes(micros: i64, bps: f64, what: &str) -> Result<u32> {
    let bytes = micros as f64 * bps / 8e6;
    let rounded = bytes.round();
    if (bytes - rounded).abs() > 1e-6 || rounded > f64::from(u32::MAX) {
        return Err(Error::InvalidScenario(format!(
            "{what} does not correspond to whole bytes at {bps} bit/s"
        )));
    }
    Ok(rounded as u32)
}

/// Event sequence whose state-machine walk reproduces one analytic cycle:
/// a request sized to last `t_tx`, a response sized to last `t_rx` after
/// the wait (and its promotion), and a zero-length marker for the next
/// request at the end of the period. Phase durations must be whole
/// microseconds and match whole payloads at `rates`.
pub fn canonical_cycle(
    timing: &PhaseTiming,
    profile: &PowerProfile,
    rates: &InterfaceRates,
    flow: &Flow,
    start: Timestamp,
) -> Result<(Vec<PacketEvent>, (Timestamp, Timestamp))> {
    let t_tx = whole_micros(timing.t_tx, "t_tx")?;
    let t_w = whole_micros(timing.t_w, "t_w")?;
    let t_rx = whole_micros(timing.t_rx, "t_rx")?;
    let t_q = whole_micros(timing.t_q, "t_q")?;
    let t_prom = whole_micros(profile.t_prom, "t_prom")?;
    let b_tx = whole_bytes(t_tx, rates.uplink_bps, "t_tx")?;
    let b_rx = whole_bytes(t_rx, rates.downlink_bps, "t_rx")?;

    let request_at = start;
    let response_at = request_at.add_micros(t_tx + t_w + if timing.prom_rx { t_prom } else { 0 });
    let next_at = response_at.add_micros(t_rx + t_q + if timing.prom_tx { t_prom } else { 0 });

    let flags = TcpFlags::ACK | TcpFlags::PSH;
    let events = vec![
        flow.event(request_at, Direction::ClientToServer, b_tx, 1, 1, flags),
        flow.event(
            response_at,
            Direction::ServerToClient,
            b_rx,
            1,
            1 + u64::from(b_tx),
            flags,
        ),
        flow.event(
            next_at,
            Direction::ClientToServer,
            0,
            1 + u64::from(b_tx),
            1 + u64::from(b_rx),
            TcpFlags::ACK,
        ),
    ];
    Ok((events, (start, next_at)))
}

/// Totals over the repetitions of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Sum of the per-iteration energies, mJ.
    pub total: f64,
    pub breakdowns: Vec<EnergyBreakdown>,
    pub mean_phases: MeasuredPhases,
}

/// Sum the energy of every repetition at period `t_i`.
pub fn aggregate(
    iterations: &[TraceIteration],
    t_i: f64,
    profile: &PowerProfile,
) -> Result<Aggregate> {
    let first = iterations
        .first()
        .ok_or_else(|| Error::EmptyGroup("no iterations to aggregate".into()))?;
    if let Some(other) = iterations
        .iter()
        .find(|it| it.app_kind != first.app_kind || it.file_size != first.file_size)
    {
        return Err(Error::MismatchedIterations(format!(
            "{} {} B mixed with {} {} B",
            first.app_kind, first.file_size, other.app_kind, other.file_size
        )));
    }
    let breakdowns = iterations
        .iter()
        .map(|it| iteration_energy(it, t_i, profile))
        .collect::<Result<Vec<_>>>()?;
    let n = iterations.len() as f64;
    let mean =
        |f: fn(&MeasuredPhases) -> f64| iterations.iter().map(|it| f(&it.phases)).sum::<f64>() / n;
    Ok(Aggregate {
        total: breakdowns.iter().map(|b| b.e_i).sum(),
        mean_phases: MeasuredPhases {
            t_tx: mean(|p| p.t_tx),
            t_w: mean(|p| p.t_w),
            t_rx: mean(|p| p.t_rx),
        },
        breakdowns,
    })
}

/// Edge over cloud energy for matching sets of repetitions.
pub fn rho_from_traces(
    edge: &[TraceIteration],
    cloud: &[TraceIteration],
    t_i: f64,
    profile: &PowerProfile,
) -> Result<f64> {
    if edge.len() != cloud.len() {
        return Err(Error::MismatchedIterations(format!(
            "{} edge repetitions against {} cloud repetitions",
            edge.len(),
            cloud.len()
        )));
    }
    if let (Some(e), Some(c)) = (edge.first(), cloud.first()) {
        if e.app_kind != c.app_kind || e.file_size != c.file_size {
            return Err(Error::MismatchedIterations(format!(
                "edge {} {} B against cloud {} {} B",
                e.app_kind, e.file_size, c.app_kind, c.file_size
            )));
        }
    }
    let edge_total = aggregate(edge, t_i, profile)?.total;
    let cloud_total = aggregate(cloud, t_i, profile)?.total;
    Ok(edge_total / cloud_total)
}
