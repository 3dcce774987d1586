//! Inputs shared by the benchmarks.

use edge_energy::trace::{synthesize_trace, PacketEvent, SynthConfig, Timestamp};
use edge_energy::{AppKind, ConnectionlessScenario, SweepAxis, SweepParam, SweepSpec};

/// Reference edge cycle: 16000 B each way, 150 ms elaboration.
pub fn reference_scenario(t_i: f64) -> ConnectionlessScenario {
    ConnectionlessScenario::new(t_i, 150.0, 16000, 16000)
}

/// Period x cloud RTT surface at 50 ms by 10 ms resolution.
pub fn period_rtt_sweep() -> SweepSpec {
    SweepSpec {
        base: reference_scenario(750.0),
        rtt_cloud: 300.0,
        axes: vec![
            SweepAxis::new(SweepParam::TI, 750.0, 5000.0, 50.0),
            SweepAxis::new(SweepParam::RttCloud, 50.0, 300.0, 10.0),
        ],
    }
}

/// Packets of one synthetic download and the window they span.
pub fn download_trace(file_size: u64) -> (Vec<PacketEvent>, (Timestamp, Timestamp)) {
    let trace = synthesize_trace(&SynthConfig::new(AppKind::Get, file_size, 40.0, 15e6, 1));
    let start = trace
        .events
        .first()
        .map(|e| e.timestamp)
        .expect("non-empty trace");
    let end = trace
        .events
        .last()
        .map(|e| e.timestamp)
        .expect("non-empty trace");
    (trace.events, (start, end.add_micros(20_000_000)))
}
