//! Minimal DHCP framing for the simulator.
//!
//! The protocol rides standard DHCP unchanged, so these frames exist only to
//! make the four-message join exchange visible on the simulated wire and in
//! traces. They use their own experimental EtherType and are *not* part of
//! the bit-exact link contract; `decode_frame` rejects them as
//! `BadEtherType`, and real RFC 2131 option encoding is out of scope.
//!
//! Layout: dest(6) | src(6) | ethertype(2)=0x88B6 | kind(1) | client_mac(6)
//! | ip(4) | central_mac(6) | fcs(4). The `central_mac` field is meaningful
//! only in the ack, where it bootstraps the client's knowledge of the
//! Central Server; elsewhere it is zero.

use std::net::Ipv4Addr;

use super::{compute_fcs, DecodeError, MacAddr, FCS_LEN};

pub const ETHERTYPE_SIM_DHCP: u16 = 0x88B6;

const FRAME_LEN: usize = 6 + 6 + 2 + 1 + 6 + 4 + 6 + FCS_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DhcpKind {
    Discover,
    Offer,
    Request,
    Ack,
}

impl DhcpKind {
    pub fn code(self) -> u8 {
        match self {
            DhcpKind::Discover => 1,
            DhcpKind::Offer => 2,
            DhcpKind::Request => 3,
            DhcpKind::Ack => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<DhcpKind> {
        Some(match code {
            1 => DhcpKind::Discover,
            2 => DhcpKind::Offer,
            3 => DhcpKind::Request,
            4 => DhcpKind::Ack,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            DhcpKind::Discover => "dhcp-discover",
            DhcpKind::Offer => "dhcp-offer",
            DhcpKind::Request => "dhcp-request",
            DhcpKind::Ack => "dhcp-ack",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DhcpFrame {
    pub dest: MacAddr,
    pub src: MacAddr,
    pub kind: DhcpKind,
    pub client_mac: MacAddr,
    pub ip: Ipv4Addr,
    pub central_mac: MacAddr,
}

pub fn encode_dhcp(frame: &DhcpFrame) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_LEN);
    out.extend_from_slice(&frame.dest.0);
    out.extend_from_slice(&frame.src.0);
    out.extend_from_slice(&ETHERTYPE_SIM_DHCP.to_be_bytes());
    out.push(frame.kind.code());
    out.extend_from_slice(&frame.client_mac.0);
    out.extend_from_slice(&frame.ip.octets());
    out.extend_from_slice(&frame.central_mac.0);
    let fcs = compute_fcs(&out);
    out.extend_from_slice(&fcs.to_be_bytes());
    out
}

pub fn decode_dhcp(bytes: &[u8]) -> Result<DhcpFrame, DecodeError> {
    if bytes.len() < FRAME_LEN {
        return Err(DecodeError::Truncated {
            offset: bytes.len(),
        });
    }
    if bytes.len() > FRAME_LEN {
        return Err(DecodeError::TrailingBytes {
            expected: FRAME_LEN,
            actual: bytes.len(),
        });
    }
    let ethertype = u16::from_be_bytes([bytes[12], bytes[13]]);
    if ethertype != ETHERTYPE_SIM_DHCP {
        return Err(DecodeError::BadEtherType(ethertype));
    }
    let kind = DhcpKind::from_code(bytes[14]).ok_or(DecodeError::UnknownMsgType(bytes[14]))?;
    let computed = compute_fcs(&bytes[..FRAME_LEN - FCS_LEN]);
    let found = u32::from_be_bytes(bytes[FRAME_LEN - FCS_LEN..].try_into().unwrap());
    if computed != found {
        return Err(DecodeError::BadFcs { computed, found });
    }
    let take_mac = |at: usize| MacAddr(bytes[at..at + 6].try_into().unwrap());
    Ok(DhcpFrame {
        dest: take_mac(0),
        src: take_mac(6),
        kind,
        client_mac: take_mac(15),
        ip: Ipv4Addr::new(bytes[21], bytes[22], bytes[23], bytes[24]),
        central_mac: take_mac(25),
    })
}
