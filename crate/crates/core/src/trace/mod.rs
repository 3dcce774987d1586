//! Connection-oriented pipeline: packet-event traces of one request-response
//! exchange, the phases measured on them and their energy.

mod energy;
mod extract;
mod parse;
mod synth;
mod workload;

use std::fmt;
use std::net::SocketAddr;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

pub use energy::{
    aggregate, canonical_cycle, event_driven_energy, iteration_energy, rho_from_traces, Aggregate,
    InterfaceRates,
};
pub use extract::{extract_get_phases, extract_phases, extract_post_phases};
pub use parse::{parse_events, write_events};
pub use synth::{synthesize_trace, SynthConfig, SyntheticTrace, MSS};
pub use workload::{workload_summary, WorkloadPoint, Z_95};

/// Microseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_micros(micros: i64) -> Self {
        Self(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }

    pub fn add_micros(self, micros: i64) -> Self {
        Self(self.0 + micros)
    }

    /// `self - earlier`, in ms.
    pub fn ms_since(self, earlier: Timestamp) -> f64 {
        (self.0 - earlier.0) as f64 / 1000.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:06}", abs / 1_000_000, abs % 1_000_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

bitflags! {
    /// TCP control flags, with the on-wire bit values.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct TcpFlags: u16 {
        const FIN = 0x01;
        const SYN = 0x02;
        const RST = 0x04;
        const PSH = 0x08;
        const ACK = 0x10;
    }
}

impl TcpFlags {
    /// Connection setup or teardown packet.
    pub fn is_control(self) -> bool {
        self.intersects(TcpFlags::SYN | TcpFlags::FIN | TcpFlags::RST)
    }
}

/// One packet of a captured exchange, seen from the client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketEvent {
    pub timestamp: Timestamp,
    pub src: SocketAddr,
    pub dst: SocketAddr,
    pub direction: Direction,
    /// Transport payload bytes.
    pub payload_len: u32,
    pub seq: u64,
    pub ack: u64,
    pub flags: TcpFlags,
    /// `client-server` address pair of the flow.
    pub stream_id: String,
}

/// Client and server endpoints of one flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Flow {
    pub client: SocketAddr,
    pub server: SocketAddr,
}

impl Flow {
    pub fn new(client: SocketAddr, server: SocketAddr) -> Self {
        Self { client, server }
    }

    pub fn stream_id(&self) -> String {
        format!("{}-{}", self.client, self.server)
    }

    /// Build an event travelling in `direction` on this flow.
    pub fn event(
        &self,
        timestamp: Timestamp,
        direction: Direction,
        payload_len: u32,
        seq: u64,
        ack: u64,
        flags: TcpFlags,
    ) -> PacketEvent {
        let (src, dst) = match direction {
            Direction::ClientToServer => (self.client, self.server),
            Direction::ServerToClient => (self.server, self.client),
        };
        PacketEvent {
            timestamp,
            src,
            dst,
            direction,
            payload_len,
            seq,
            ack,
            flags,
            stream_id: self.stream_id(),
        }
    }
}

impl PacketEvent {
    /// Sequence number just past this packet's payload.
    pub fn end_seq(&self) -> u64 {
        self.seq + u64::from(self.payload_len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AppKind {
    /// Client uploads the file.
    Post,
    /// Client downloads the file.
    Get,
}

impl AppKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AppKind::Post => "POST",
            AppKind::Get => "GET",
        }
    }
}

impl fmt::Display for AppKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AppKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "post" => Ok(AppKind::Post),
            "get" => Ok(AppKind::Get),
            other => Err(format!("unknown application kind `{other}`")),
        }
    }
}

/// Measured TX, wait and RX durations of one exchange, in ms. The residual
/// `t_q` is only known once a period is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasuredPhases {
    pub t_tx: f64,
    pub t_w: f64,
    pub t_rx: f64,
}

/// One captured repetition of the exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceIteration {
    pub phases: MeasuredPhases,
    pub app_kind: AppKind,
    /// Bytes of the transferred file.
    pub file_size: u64,
    pub repetition_index: u32,
}
