//! Phase boundaries of one HTTP exchange on an open connection.
//!
//! POST and GET share the same boundaries, seen from the client:
//!
//! * `t_tx` runs from the first request payload packet to the first pure
//!   server ACK covering the last request byte;
//! * `t_w` runs from that ACK to the first response payload packet;
//! * `t_rx` runs from the first response payload packet to the first client
//!   packet acknowledging the last response byte.
//!
//! Connection setup and teardown packets (SYN, FIN, RST) are ignored.

use crate::error::{Error, Result};

use super::{AppKind, Direction, MeasuredPhases, PacketEvent, TraceIteration};

fn incomplete(msg: &str) -> Error {
    Error::IncompleteExchange(msg.to_string())
}

/// Extract the phases of a single request-response exchange.
pub fn extract_phases(events: &[PacketEvent], kind: AppKind) -> Result<TraceIteration> {
    let data: Vec<&PacketEvent> = events.iter().filter(|e| !e.flags.is_control()).collect();

    let request: Vec<&PacketEvent> = data
        .iter()
        .copied()
        .filter(|e| e.direction == Direction::ClientToServer && e.payload_len > 0)
        .collect();
    let (first_req, last_req) = match (request.first(), request.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(incomplete("no request payload")),
    };
    let req_end = request.iter().map(|e| e.end_seq()).max().unwrap_or(0);
    let req_start_seq = request.iter().map(|e| e.seq).min().unwrap_or(0);

    let final_ack = data
        .iter()
        .find(|e| {
            e.direction == Direction::ServerToClient
                && e.payload_len == 0
                && e.ack >= req_end
                && e.timestamp >= last_req.timestamp
        })
        .ok_or_else(|| incomplete("missing server ACK of the request"))?;

    let response: Vec<&PacketEvent> = data
        .iter()
        .copied()
        .filter(|e| e.direction == Direction::ServerToClient && e.payload_len > 0)
        .filter(|e| e.timestamp >= first_req.timestamp)
        .collect();
    let (first_resp, last_resp) = match (response.first(), response.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(incomplete("no response payload")),
    };
    if first_resp.timestamp < final_ack.timestamp {
        return Err(incomplete(
            "response starts before the request is acknowledged",
        ));
    }
    let resp_end = response.iter().map(|e| e.end_seq()).max().unwrap_or(0);
    let resp_start_seq = response.iter().map(|e| e.seq).min().unwrap_or(0);

    let client_ack = data
        .iter()
        .find(|e| {
            e.direction == Direction::ClientToServer
                && e.ack >= resp_end
                && e.timestamp >= last_resp.timestamp
        })
        .ok_or_else(|| incomplete("missing client ACK of the response"))?;

    let phases = MeasuredPhases {
        t_tx: final_ack.timestamp.ms_since(first_req.timestamp),
        t_w: first_resp.timestamp.ms_since(final_ack.timestamp),
        t_rx: client_ack.timestamp.ms_since(first_resp.timestamp),
    };
    let file_size = match kind {
        AppKind::Post => req_end - req_start_seq,
        AppKind::Get => resp_end - resp_start_seq,
    };
    Ok(TraceIteration {
        phases,
        app_kind: kind,
        file_size,
        repetition_index: 0,
    })
}

/// Phases of an upload: request body out, short confirmation back.
pub fn extract_post_phases(events: &[PacketEvent]) -> Result<TraceIteration> {
    extract_phases(events, AppKind::Post)
}

/// Phases of a download: short request out, file back.
pub fn extract_get_phases(events: &[PacketEvent]) -> Result<TraceIteration> {
    extract_phases(events, AppKind::Get)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Flow, TcpFlags, Timestamp};

    fn flow() -> Flow {
        Flow::new(
            "10.0.0.2:50000".parse().unwrap(),
            "10.0.0.1:80".parse().unwrap(),
        )
    }

    fn at(ms: i64) -> Timestamp {
        Timestamp::from_micros(1_600_000_000_000_000 + ms * 1000)
    }

    const C: Direction = Direction::ClientToServer;
    const S: Direction = Direction::ServerToClient;
    const A: TcpFlags = TcpFlags::ACK;

    fn post_exchange() -> Vec<PacketEvent> {
        let f = flow();
        vec![
            f.event(at(0), C, 1000, 1, 1, A),
            f.event(at(50), C, 500, 1001, 1, A | TcpFlags::PSH),
            f.event(at(100), S, 0, 1, 1501, A),
            f.event(at(400), S, 200, 1, 1501, A | TcpFlags::PSH),
            f.event(at(405), C, 0, 1501, 201, A),
        ]
    }

    fn with_handshake(mut events: Vec<PacketEvent>) -> Vec<PacketEvent> {
        let f = flow();
        events.insert(0, f.event(at(-80), C, 0, 0, 0, TcpFlags::SYN));
        events.insert(1, f.event(at(-40), S, 0, 0, 1, TcpFlags::SYN | A));
        events.insert(2, f.event(at(-40), C, 0, 1, 1, A));
        events.push(f.event(at(500), C, 0, 1501, 201, TcpFlags::FIN | A));
        events.push(f.event(at(540), S, 0, 201, 1502, TcpFlags::FIN | A));
        events.push(f.event(at(540), C, 0, 1502, 202, A));
        events
    }

    #[test]
    fn post_phases() {
        let it = extract_post_phases(&post_exchange()).unwrap();
        assert_eq!(
            it.phases,
            MeasuredPhases {
                t_tx: 100.0,
                t_w: 300.0,
                t_rx: 5.0
            }
        );
        assert_eq!(it.file_size, 1500);
        assert_eq!(it.app_kind, AppKind::Post);
    }

    #[test]
    fn handshake_and_teardown_ignored() {
        let plain = extract_post_phases(&post_exchange()).unwrap();
        let wrapped = extract_post_phases(&with_handshake(post_exchange())).unwrap();
        assert_eq!(plain, wrapped);
    }

    #[test]
    fn response_before_ack_is_incomplete() {
        let f = flow();
        let events = vec![
            f.event(at(0), C, 1000, 1, 1, A),
            f.event(at(80), S, 200, 1, 1001, A),
            f.event(at(100), S, 0, 201, 1001, A),
            f.event(at(120), C, 0, 1001, 201, A),
        ];
        assert!(matches!(
            extract_post_phases(&events),
            Err(Error::IncompleteExchange(_))
        ));
    }

    #[test]
    fn missing_final_ack_is_incomplete() {
        let mut events = post_exchange();
        events.remove(2);
        assert!(matches!(
            extract_post_phases(&events),
            Err(Error::IncompleteExchange(_))
        ));
        let mut events = post_exchange();
        events.pop();
        assert!(matches!(
            extract_post_phases(&events),
            Err(Error::IncompleteExchange(_))
        ));
    }

    #[test]
    fn single_packet_request() {
        let f = flow();
        let events = vec![
            f.event(at(0), C, 300, 1, 1, A),
            f.event(at(80), S, 0, 1, 301, A),
            f.event(at(90), S, 100, 1, 301, A),
            f.event(at(91), C, 0, 301, 101, A),
        ];
        let it = extract_post_phases(&events).unwrap();
        assert_eq!(it.phases.t_tx, 80.0);
        assert_eq!(it.phases.t_w, 10.0);
        assert_eq!(it.phases.t_rx, 1.0);
    }

    #[test]
    fn get_phases() {
        let f = flow();
        let mut events = vec![
            f.event(at(0), C, 120, 1, 1, A | TcpFlags::PSH),
            f.event(at(75), S, 0, 1, 121, A),
        ];
        // 11 segments between 300 ms and 1300 ms, ACKed along the way
        for k in 0..11i64 {
            let seq = 1 + 1000 * k as u64;
            events.push(f.event(at(300 + 100 * k), S, 1000, seq, 121, A));
            if k % 2 == 1 {
                events.push(f.event(at(301 + 100 * k), C, 0, 121, seq + 1000, A));
            }
        }
        events.push(f.event(at(1305), C, 0, 121, 11_001, A));
        let it = extract_get_phases(&events).unwrap();
        assert_eq!(
            it.phases,
            MeasuredPhases {
                t_tx: 75.0,
                t_w: 225.0,
                t_rx: 1005.0
            }
        );
        assert_eq!(it.file_size, 11_000);
    }

    #[test]
    fn empty_response_is_incomplete() {
        let f = flow();
        let events = vec![
            f.event(at(0), C, 120, 1, 1, A),
            f.event(at(75), S, 0, 1, 121, A),
        ];
        assert!(matches!(
            extract_get_phases(&events),
            Err(Error::IncompleteExchange(_))
        ));
        assert!(extract_get_phases(&[]).is_err());
    }

    #[test]
    fn retransmitted_request_extends_tx() {
        let f = flow();
        let events = vec![
            f.event(at(0), C, 1000, 1, 1, A),
            f.event(at(300), C, 1000, 1, 1, A),
            f.event(at(350), S, 0, 1, 1001, A),
            f.event(at(400), S, 10, 1, 1001, A),
            f.event(at(401), C, 0, 1001, 11, A),
        ];
        let it = extract_post_phases(&events).unwrap();
        assert_eq!(it.phases.t_tx, 350.0);
        assert_eq!(it.file_size, 1000);
    }
}
