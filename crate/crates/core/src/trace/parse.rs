//! Tab-separated packet field export, one packet per line:
//!
//! ```text
//! epoch_seconds  src_addr  dst_addr  src_port  dst_port  payload_len  flags  seq  ack
//! ```
//!
//! `flags` is either a hex bitmask (`0x018`) or a letter set (`AP`, `SA`,
//! `·······AP···`). Blank lines and lines starting with `#` are ignored, as is
//! a leading header line whose first field is `frame.time_epoch`.

use std::io::{BufRead, Write};
use std::net::{IpAddr, SocketAddr};

use crate::error::{Error, Result};

use super::{Direction, Flow, PacketEvent, TcpFlags, Timestamp};

const FIELD_COUNT: usize = 9;

fn parse_timestamp(field: &str) -> std::result::Result<Timestamp, String> {
    let bad = || format!("invalid timestamp `{field}`");
    let (secs, frac) = match field.split_once('.') {
        Some((s, f)) => (s, f),
        None => (field, ""),
    };
    if secs.is_empty() || !secs.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let secs: i64 = secs.parse().map_err(|_| bad())?;
    // sub-microsecond digits are truncated
    let mut micros = 0i64;
    for b in frac.bytes().chain(std::iter::repeat(b'0')).take(6) {
        micros = micros * 10 + i64::from(b - b'0');
    }
    secs.checked_mul(1_000_000)
        .and_then(|v| v.checked_add(micros))
        .map(Timestamp::from_micros)
        .ok_or_else(bad)
}

fn parse_flags(field: &str) -> std::result::Result<TcpFlags, String> {
    if let Some(hex) = field
        .strip_prefix("0x")
        .or_else(|| field.strip_prefix("0X"))
    {
        let bits = u16::from_str_radix(hex, 16).map_err(|_| format!("invalid flags `{field}`"))?;
        return Ok(TcpFlags::from_bits_truncate(bits));
    }
    if field.is_empty() {
        return Err("empty flags field".into());
    }
    let mut flags = TcpFlags::empty();
    for c in field.chars() {
        match c.to_ascii_uppercase() {
            'F' => flags |= TcpFlags::FIN,
            'S' => flags |= TcpFlags::SYN,
            'R' => flags |= TcpFlags::RST,
            'P' => flags |= TcpFlags::PSH,
            'A' => flags |= TcpFlags::ACK,
            'U' | 'E' | 'C' | 'N' | '.' | '·' | '*' | '-' => {}
            _ => return Err(format!("invalid flags `{field}`")),
        }
    }
    Ok(flags)
}

fn parse_line(line: &str, client: SocketAddr) -> std::result::Result<Option<PacketEvent>, String> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != FIELD_COUNT {
        return Err(format!(
            "expected {FIELD_COUNT} tab-separated fields, found {}",
            fields.len()
        ));
    }
    let timestamp = parse_timestamp(fields[0])?;
    let ip = |s: &str| {
        s.parse::<IpAddr>()
            .map_err(|_| format!("invalid address `{s}`"))
    };
    let port = |s: &str| s.parse::<u16>().map_err(|_| format!("invalid port `{s}`"));
    let number = |s: &str, what: &str| {
        s.parse::<u64>()
            .map_err(|_| format!("invalid {what} `{s}`"))
    };

    let src = SocketAddr::new(ip(fields[1])?, port(fields[3])?);
    let dst = SocketAddr::new(ip(fields[2])?, port(fields[4])?);
    let payload_len = fields[5]
        .parse::<u32>()
        .map_err(|_| format!("invalid payload length `{}`", fields[5]))?;
    let flags = parse_flags(fields[6])?;
    let seq = number(fields[7], "sequence number")?;
    let ack = number(fields[8], "acknowledgment number")?;

    let (flow, direction) = if src == client {
        (Flow::new(src, dst), Direction::ClientToServer)
    } else if dst == client {
        (Flow::new(dst, src), Direction::ServerToClient)
    } else {
        return Ok(None);
    };
    Ok(Some(flow.event(
        timestamp,
        direction,
        payload_len,
        seq,
        ack,
        flags,
    )))
}

/// Parse a field export, keeping the packets exchanged by `client`, sorted by
/// timestamp (stable for equal timestamps).
pub fn parse_events<R: BufRead>(input: R, client: SocketAddr) -> Result<Vec<PacketEvent>> {
    let mut events = Vec::new();
    let mut skipped = 0usize;
    for (index, line) in input.lines().enumerate() {
        let number = index + 1;
        let line = line.map_err(|e| Error::Parse {
            line: number,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if number == 1 && trimmed.starts_with("frame.time_epoch") {
            continue;
        }
        match parse_line(trimmed, client) {
            Ok(Some(event)) => events.push(event),
            Ok(None) => skipped += 1,
            Err(message) => {
                return Err(Error::Parse {
                    line: number,
                    message,
                })
            }
        }
    }
    if skipped > 0 {
        log::debug!("skipped {skipped} packets not involving {client}");
    }
    events.sort_by_key(|e| e.timestamp);
    Ok(events)
}

/// Write events in the format read by [`parse_events`].
pub fn write_events<W: Write>(events: &[PacketEvent], mut out: W) -> std::io::Result<()> {
    for e in events {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t0x{:03x}\t{}\t{}",
            e.timestamp,
            e.src.ip(),
            e.dst.ip(),
            e.src.port(),
            e.dst.port(),
            e.payload_len,
            e.flags.bits(),
            e.seq,
            e.ack
        )?;
    }
    Ok(())
}
