//! Terminal renderings: the human-readable report table and the decoded
//! frame field dump.

use std::fmt::Write as _;

use secarp::scenarios::Report;
use secarp::wire::{bytes_to_hex, encode_frame, ArpOp, AuthSection, Frame, FrameBody, StdArp};

pub fn report_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario: {} ({})  seed: {}  messages: {}  final tick: {}",
        report.scenario,
        report.mode.label(),
        report.seed,
        report.total_messages,
        report.final_time
    );
    let _ = writeln!(out, "verdict: {}", report.verdict);

    let width = report
        .episodes
        .iter()
        .map(|e| e.label.len())
        .chain(["episode".len()])
        .max()
        .unwrap_or(8);
    let _ = writeln!(out, "{:<width$}  {:>8}  breakdown", "episode", "messages");
    for episode in &report.episodes {
        let breakdown = episode
            .by_kind
            .iter()
            .map(|(kind, count)| format!("{kind} {count}"))
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "{:<width$}  {:>8}  {}", episode.label, episode.total, breakdown);
    }

    if !report.table.is_empty() {
        let _ = writeln!(out, "ip-mac table:");
        for (ip, mac) in &report.table {
            let _ = writeln!(out, "  {ip} -> {mac}");
        }
    }
    for (name, host) in &report.hosts {
        if !host.cache.is_empty() {
            let _ = writeln!(out, "arp cache of {name}:");
            for (ip, mac) in &host.cache {
                let _ = writeln!(out, "  {ip} -> {mac}");
            }
        }
    }
    if let Some(mc) = &report.monte_carlo {
        let _ = writeln!(
            out,
            "monte carlo: {}/{} blocked, estimate {:.5} (std error {:.5})",
            mc.successes, mc.trials, mc.estimate, mc.std_error
        );
    }
    out
}

fn hex_preview(bytes: &[u8]) -> String {
    if bytes.len() <= 12 {
        bytes_to_hex(bytes)
    } else {
        format!(
            "{}..{} ({} bytes)",
            bytes_to_hex(&bytes[..8]),
            bytes_to_hex(&bytes[bytes.len() - 2..]),
            bytes.len()
        )
    }
}

fn push_field(out: &mut String, name: &str, width: usize, value: impl std::fmt::Display) {
    let _ = writeln!(out, "  {name:<12} {width:>3}  {value}");
}

fn push_arp(out: &mut String, arp: &StdArp) {
    push_field(out, "htype", 2, "0x0001 (ethernet)");
    push_field(out, "ptype", 2, "0x0800 (ipv4)");
    push_field(out, "hlen", 1, 6);
    push_field(out, "plen", 1, 4);
    let op = match arp.op {
        ArpOp::Request => "1 (request)",
        ArpOp::Reply => "2 (reply)",
    };
    push_field(out, "oper", 2, op);
    push_field(out, "sender_mac", 6, arp.sender_mac);
    push_field(out, "sender_ip", 4, arp.sender_ip);
    push_field(out, "target_mac", 6, arp.target_mac);
    push_field(out, "target_ip", 4, arp.target_ip);
}

/// Field-by-field dump of a decoded frame: name, width in bytes, value.
/// Decoding already validated the FCS, so it reports OK with its value.
pub fn frame_text(frame: &Frame) -> String {
    let bytes = encode_frame(frame);
    let kind = match frame.msg_type() {
        Some(t) => t.name(),
        None => "std-ARP",
    };
    let mut out = String::new();
    let _ = writeln!(out, "frame: {kind} ({} bytes)", bytes.len());
    push_field(&mut out, "dest", 6, frame.dest);
    push_field(&mut out, "src", 6, frame.src);
    match &frame.body {
        FrameBody::StdArp(arp) => {
            push_field(&mut out, "ethertype", 2, "0x0806 (arp)");
            push_arp(&mut out, arp);
        }
        body => {
            push_field(&mut out, "ethertype", 2, "0x88b5");
            let msg_type = frame.msg_type().expect("custom frame");
            push_field(
                &mut out,
                "msg_type",
                1,
                format!("0x{:02x} ({})", msg_type.code(), msg_type.name()),
            );
            match body {
                FrameBody::IpSend { ip, mac, .. } => {
                    push_field(&mut out, "ip", 4, ip);
                    push_field(&mut out, "host_mac", 6, mac);
                }
                FrameBody::IpReply { ip, mac, ack, .. } => {
                    push_field(&mut out, "ip", 4, ip);
                    push_field(&mut out, "host_mac", 6, mac);
                    push_field(&mut out, "ack", 1, format!("0x{:02x}", u8::from(*ack)));
                }
                FrameBody::ArpCheck { ip, .. } => {
                    push_field(&mut out, "marker", 3, "\"ACH\"");
                    push_field(&mut out, "ip", 4, ip);
                }
                FrameBody::ArpNoChange { ip, .. } => {
                    push_field(&mut out, "marker", 3, "\"ANC\"");
                    push_field(&mut out, "ip", 4, ip);
                }
                FrameBody::ArpAck { ip, .. } => {
                    push_field(&mut out, "marker", 3, "\"ACK\"");
                    push_field(&mut out, "ip", 4, ip);
                }
                FrameBody::SignedArpReply { arp, .. } => push_arp(&mut out, arp),
                FrameBody::StdArp(_) => unreachable!(),
            }
        }
    }
    match frame.auth() {
        AuthSection::None => push_field(&mut out, "auth", 0, "none"),
        AuthSection::KeyedTag(tag) => {
            push_field(&mut out, "auth_kind", 1, "0x01 (keyed-tag)");
            push_field(&mut out, "tag", 32, hex_preview(tag));
        }
        AuthSection::Signature {
            signature,
            certificate,
        } => {
            push_field(&mut out, "auth_kind", 1, "0x02 (signature)");
            push_field(&mut out, "signature", 64, hex_preview(signature));
            push_field(&mut out, "cert_len", 2, certificate.len());
            push_field(
                &mut out,
                "certificate",
                certificate.len(),
                hex_preview(certificate),
            );
        }
    }
    let fcs = u32::from_be_bytes(bytes[bytes.len() - 4..].try_into().expect("fcs trailer"));
    push_field(&mut out, "fcs", 4, format!("0x{fcs:08x} OK"));
    out
}
