//! Deterministic synthetic captures of one HTTP exchange.
//!
//! The bulk direction follows a window-growth schedule: the sender starts
//! with ten segments in flight and doubles its window every round; a round
//! starts when the first acknowledgment of the previous round is back, or
//! as soon as the previous round has been serialized on the bottleneck,
//! whichever is later. Every packet time is a whole microsecond.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AppKind, Direction, Flow, MeasuredPhases, PacketEvent, TcpFlags, Timestamp};

/// Segment payload size.
pub const MSS: u32 = 1448;

const INITIAL_WINDOW: u64 = 10;
const POST_HEADER_BYTES: u64 = 200;
const GET_REQUEST_BYTES: u32 = 120;
const POST_RESPONSE_BYTES: u32 = 180;
const EPOCH_BASE_US: i64 = 1_600_000_000_000_000;
/// Delay between the end of the handshake and the request.
const THINK_US: i64 = 1_000;
/// Delay between the end of the exchange and the client FIN.
const LINGER_US: i64 = 50_000;
/// Upper bound of the random extra server processing time.
const JITTER_US: i64 = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub kind: AppKind,
    /// Bytes of the uploaded (POST) or downloaded (GET) file.
    pub file_size: u64,
    /// Round-trip time, ms.
    pub rtt: f64,
    /// Bottleneck bitrate, bit/s, used in both directions.
    pub bottleneck_bps: f64,
    pub seed: u64,
    /// Server processing time before the response, ms.
    #[serde(default)]
    pub t_elab: f64,
}

impl SynthConfig {
    pub fn new(kind: AppKind, file_size: u64, rtt: f64, bottleneck_bps: f64, seed: u64) -> Self {
        Self {
            kind,
            file_size,
            rtt,
            bottleneck_bps,
            seed,
            t_elab: 0.0,
        }
    }
}

/// Generated packets plus the phase boundaries the generator scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTrace {
    pub events: Vec<PacketEvent>,
    pub flow: Flow,
    /// `None` when the exchange has no response (empty file).
    pub schedule: Option<MeasuredPhases>,
    /// Time from the first request byte to the final client ACK, µs.
    pub completion_us: i64,
}

struct Transfer {
    /// (send offset in µs from the transfer start, seq, len) per segment.
    segments: Vec<(i64, u64, u32)>,
    /// (offset, cumulative ack) of the receiver's per-round ACKs, as seen
    /// one RTT after the round for uploads, or right away for downloads.
    round_ends: Vec<(i64, u64)>,
}

fn serialization_us(len: u32, bps: f64) -> i64 {
    (8.0 * f64::from(len) * 1e6 / bps).ceil() as i64
}

/// Segment times of a bulk transfer of `bytes` starting at offset 0.
fn bulk_schedule(bytes: u64, first_seq: u64, rtt_us: i64, bps: f64) -> Transfer {
    let mut segments = Vec::new();
    let mut round_ends = Vec::new();
    let mut sent = 0u64;
    let mut window = INITIAL_WINDOW;
    let mut round_start = 0i64;
    while sent < bytes {
        let mut t = round_start;
        let mut first_done = None;
        for _ in 0..window {
            if sent >= bytes {
                break;
            }
            let len = (bytes - sent).min(u64::from(MSS)) as u32;
            segments.push((t, first_seq + sent, len));
            t += serialization_us(len, bps);
            first_done.get_or_insert(t);
            sent += u64::from(len);
        }
        round_ends.push((t, first_seq + sent));
        round_start = t.max(first_done.unwrap_or(t) + rtt_us);
        window *= 2;
    }
    Transfer {
        segments,
        round_ends,
    }
}

/// Generate the capture of one exchange, handshake and teardown included.
pub fn synthesize_trace(config: &SynthConfig) -> SyntheticTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let client = SocketAddr::new(
        IpAddr::V4(Ipv4Addr::new(10, 0, 0, 2)),
        rng.random_range(49152..=65535),
    );
    let server = SocketAddr::new(IpAddr::V4(Ipv4Addr::new(10, 0, 0, 1)), 80);
    let flow = Flow::new(client, server);
    let client_isn = u64::from(rng.random_range(0..1u32 << 30));
    let server_isn = u64::from(rng.random_range(0..1u32 << 30));
    let jitter = rng.random_range(0..=JITTER_US);

    let rtt = (config.rtt * 1000.0).round() as i64;
    let elab = (config.t_elab * 1000.0).round() as i64 + jitter;
    let bps = config.bottleneck_bps;
    let base = Timestamp::from_micros(EPOCH_BASE_US);
    let at = |us: i64| base.add_micros(us);

    let ack = TcpFlags::ACK;
    let data = TcpFlags::ACK | TcpFlags::PSH;
    let c2s = Direction::ClientToServer;
    let s2c = Direction::ServerToClient;

    let mut events = vec![
        flow.event(at(0), c2s, 0, client_isn, 0, TcpFlags::SYN),
        flow.event(
            at(rtt),
            s2c,
            0,
            server_isn,
            client_isn + 1,
            TcpFlags::SYN | ack,
        ),
        flow.event(at(rtt), c2s, 0, client_isn + 1, server_isn + 1, ack),
    ];
    let mut cseq = client_isn + 1;
    let mut sseq = server_isn + 1;
    let request_start = rtt + THINK_US;

    // request
    let request_bytes = match config.kind {
        AppKind::Post => POST_HEADER_BYTES + config.file_size,
        AppKind::Get => u64::from(GET_REQUEST_BYTES),
    };
    let upload = bulk_schedule(request_bytes, cseq, rtt, bps);
    for &(offset, seq, len) in &upload.segments {
        events.push(flow.event(at(request_start + offset), c2s, len, seq, sseq, data));
    }
    let last_round = upload.round_ends.len() - 1;
    let mut final_ack_at = 0;
    for (i, &(offset, acked)) in upload.round_ends.iter().enumerate() {
        let t = request_start + offset + rtt;
        events.push(flow.event(at(t), s2c, 0, sseq, acked, ack));
        if i == last_round {
            final_ack_at = t;
        }
    }
    cseq += request_bytes;

    let response_bytes = match config.kind {
        AppKind::Post => u64::from(POST_RESPONSE_BYTES),
        AppKind::Get => config.file_size,
    };

    let mut schedule = None;
    let mut exchange_end = final_ack_at;
    if config.file_size > 0 {
        let response_start = final_ack_at + elab;
        let download = bulk_schedule(response_bytes, sseq, rtt, bps);
        for &(offset, seq, len) in &download.segments {
            events.push(flow.event(at(response_start + offset), s2c, len, seq, cseq, data));
        }
        let mut client_ack_at = response_start;
        for &(offset, acked) in &download.round_ends {
            client_ack_at = response_start + offset;
            events.push(flow.event(at(client_ack_at), c2s, 0, cseq, acked, ack));
        }
        sseq += response_bytes;
        schedule = Some(MeasuredPhases {
            t_tx: (final_ack_at - request_start) as f64 / 1000.0,
            t_w: (response_start - final_ack_at) as f64 / 1000.0,
            t_rx: (client_ack_at - response_start) as f64 / 1000.0,
        });
        exchange_end = client_ack_at;
    }

    let fin_at = exchange_end + LINGER_US;
    events.push(flow.event(at(fin_at), c2s, 0, cseq, sseq, TcpFlags::FIN | ack));
    events.push(flow.event(
        at(fin_at + rtt),
        s2c,
        0,
        sseq,
        cseq + 1,
        TcpFlags::FIN | ack,
    ));
    events.push(flow.event(at(fin_at + rtt), c2s, 0, cseq + 1, sseq + 1, ack));

    events.sort_by_key(|e| e.timestamp);
    SyntheticTrace {
        events,
        flow,
        schedule,
        completion_us: exchange_end - request_start,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::extract_phases;

    #[test]
    fn deterministic_for_seed() {
        let cfg = SynthConfig::new(AppKind::Get, 100_000, 60.0, 5e6, 7);
        assert_eq!(synthesize_trace(&cfg), synthesize_trace(&cfg));
        let other = SynthConfig {
            seed: 8,
            ..cfg.clone()
        };
        assert_ne!(
            synthesize_trace(&cfg).events,
            synthesize_trace(&other).events
        );
    }

    #[test]
    fn larger_rtt_takes_longer() {
        for kind in [AppKind::Post, AppKind::Get] {
            let fast = synthesize_trace(&SynthConfig::new(kind, 500_000, 40.0, 10e6, 1));
            let slow = synthesize_trace(&SynthConfig::new(kind, 500_000, 80.0, 10e6, 1));
            assert!(slow.completion_us > fast.completion_us);
        }
    }

    #[test]
    fn empty_file_has_no_response() {
        let t = synthesize_trace(&SynthConfig::new(AppKind::Get, 0, 40.0, 10e6, 3));
        assert!(t.schedule.is_none());
        let payload: Vec<_> = t.events.iter().filter(|e| e.payload_len > 0).collect();
        assert_eq!(payload.len(), 1);
        assert_eq!(payload[0].direction, Direction::ClientToServer);
        let acks = t
            .events
            .iter()
            .filter(|e| e.direction == Direction::ServerToClient && !e.flags.is_control())
            .count();
        assert_eq!(acks, 1);
        assert!(extract_phases(&t.events, AppKind::Get).is_err());
    }

    #[test]
    fn segments_respect_mss() {
        let t = synthesize_trace(&SynthConfig::new(AppKind::Post, 1_000_000, 40.0, 10e6, 3));
        assert!(t.events.iter().all(|e| e.payload_len <= MSS));
        let uploaded: u64 = t
            .events
            .iter()
            .filter(|e| e.direction == Direction::ClientToServer)
            .map(|e| u64::from(e.payload_len))
            .sum();
        assert_eq!(uploaded, 1_000_000 + POST_HEADER_BYTES);
    }

    #[test]
    fn extraction_recovers_schedule() {
        for (kind, size) in [
            (AppKind::Post, 100_000),
            (AppKind::Get, 100_000),
            (AppKind::Get, 1),
            (AppKind::Post, 3_000_000),
        ] {
            let mut cfg = SynthConfig::new(kind, size, 120.0, 8e6, 11);
            cfg.t_elab = 35.0;
            let t = synthesize_trace(&cfg);
            let it = extract_phases(&t.events, kind).unwrap();
            assert_eq!(Some(it.phases), t.schedule);
            let expected_size = match kind {
                AppKind::Post => size + POST_HEADER_BYTES,
                AppKind::Get => size,
            };
            assert_eq!(it.file_size, expected_size);
        }
    }
}
