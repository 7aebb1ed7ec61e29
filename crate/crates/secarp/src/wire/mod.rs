//! Link-layer frame codecs for the centralized secure ARP messages.
//!
//! Seven frame shapes ride the simulated wire: the five custom control
//! messages (`IP_send`, `IP_reply`, `ARP_Check`, `ARP_NoChange`, `ARP_Ack`),
//! a signed wrapper around a standard ARP reply, and plain RFC 826 ARP.
//! Custom messages use the experimental EtherType `0x88B5` with a one-byte
//! message discriminator; standard ARP uses `0x0806` with the textbook
//! 28-byte payload. Every frame ends in a CRC-32 FCS over all preceding
//! bytes, written big-endian.
//!
//! The byte layouts here are the wire contract: field order and widths are
//! fixed, and [`decode_frame`] is the exact inverse of [`encode_frame`] on
//! well-formed input.

use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod dhcp;

/// EtherType carrying the custom secure-ARP messages.
pub const ETHERTYPE_SECARP: u16 = 0x88B5;
/// EtherType for standard RFC 826 ARP.
pub const ETHERTYPE_ARP: u16 = 0x0806;

pub const TAG_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;
pub const FCS_LEN: usize = 4;

/// A 48-bit hardware address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    pub const BROADCAST: MacAddr = MacAddr([0xFF; 6]);
    pub const ZERO: MacAddr = MacAddr([0; 6]);

    pub fn octets(&self) -> [u8; 6] {
        self.0
    }

    pub fn is_broadcast(&self) -> bool {
        *self == Self::BROADCAST
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl fmt::Debug for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MacAddr({self})")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid MAC address syntax: {0:?}")]
pub struct MacParseError(String);

impl FromStr for MacAddr {
    type Err = MacParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut octets = [0u8; 6];
        let mut parts = s.split([':', '-']);
        for octet in &mut octets {
            let part = parts.next().ok_or_else(|| MacParseError(s.to_string()))?;
            *octet = u8::from_str_radix(part, 16).map_err(|_| MacParseError(s.to_string()))?;
        }
        if parts.next().is_some() {
            return Err(MacParseError(s.to_string()));
        }
        Ok(MacAddr(octets))
    }
}

impl Serialize for MacAddr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MacAddr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One-byte discriminator for the custom messages under [`ETHERTYPE_SECARP`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MsgType {
    IpSend,
    IpReply,
    ArpCheck,
    ArpNoChange,
    ArpAck,
    SignedArpReply,
}

impl MsgType {
    pub fn code(self) -> u8 {
        match self {
            MsgType::IpSend => 0x01,
            MsgType::IpReply => 0x02,
            MsgType::ArpCheck => 0x03,
            MsgType::ArpNoChange => 0x04,
            MsgType::ArpAck => 0x05,
            MsgType::SignedArpReply => 0x06,
        }
    }

    pub fn from_code(code: u8) -> Option<MsgType> {
        Some(match code {
            0x01 => MsgType::IpSend,
            0x02 => MsgType::IpReply,
            0x03 => MsgType::ArpCheck,
            0x04 => MsgType::ArpNoChange,
            0x05 => MsgType::ArpAck,
            0x06 => MsgType::SignedArpReply,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgType::IpSend => "IP_send",
            MsgType::IpReply => "IP_reply",
            MsgType::ArpCheck => "ARP_Check",
            MsgType::ArpNoChange => "ARP_NoChange",
            MsgType::ArpAck => "ARP_Ack",
            MsgType::SignedArpReply => "signed-ARP-reply",
        }
    }
}

impl fmt::Display for MsgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// RFC 826 operation field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArpOp {
    Request,
    Reply,
}

impl ArpOp {
    pub fn code(self) -> u16 {
        match self {
            ArpOp::Request => 1,
            ArpOp::Reply => 2,
        }
    }
}

/// The 28-byte Ethernet/IPv4 ARP payload (RFC 826).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StdArp {
    pub op: ArpOp,
    pub sender_mac: MacAddr,
    pub sender_ip: Ipv4Addr,
    pub target_mac: MacAddr,
    pub target_ip: Ipv4Addr,
}

/// Signature-carrying auth material: a 64-byte signature plus the signer's
/// certificate, length-prefixed on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedAuth {
    pub signature: [u8; SIGNATURE_LEN],
    pub certificate: Vec<u8>,
}

impl SignedAuth {
    /// Auth section with a zeroed signature, to be filled in after the
    /// signable bytes are known.
    pub fn placeholder(certificate: Vec<u8>) -> Self {
        SignedAuth {
            signature: [0; SIGNATURE_LEN],
            certificate,
        }
    }
}

/// Frame payload. Each variant carries exactly the auth material its message
/// type admits, so ill-formed body/auth pairings are unrepresentable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameBody {
    IpSend {
        ip: Ipv4Addr,
        mac: MacAddr,
        tag: [u8; TAG_LEN],
    },
    IpReply {
        ip: Ipv4Addr,
        mac: MacAddr,
        ack: bool,
        tag: [u8; TAG_LEN],
    },
    ArpCheck {
        ip: Ipv4Addr,
        auth: SignedAuth,
    },
    ArpNoChange {
        ip: Ipv4Addr,
        auth: SignedAuth,
    },
    ArpAck {
        ip: Ipv4Addr,
        auth: SignedAuth,
    },
    SignedArpReply {
        arp: StdArp,
        auth: SignedAuth,
    },
    StdArp(StdArp),
}

/// Borrowed view of a frame's auth section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuthSection<'a> {
    None,
    KeyedTag(&'a [u8; TAG_LEN]),
    Signature {
        signature: &'a [u8; SIGNATURE_LEN],
        certificate: &'a [u8],
    },
}

impl AuthSection<'_> {
    pub fn kind(&self) -> u8 {
        match self {
            AuthSection::None => 0x00,
            AuthSection::KeyedTag(_) => 0x01,
            AuthSection::Signature { .. } => 0x02,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AuthSection::None => "none",
            AuthSection::KeyedTag(_) => "keyed-tag",
            AuthSection::Signature { .. } => "signature",
        }
    }
}

/// A complete link-layer frame. The FCS is not stored; it is computed on
/// encode and checked on decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub dest: MacAddr,
    pub src: MacAddr,
    pub body: FrameBody,
}

impl Frame {
    /// Message discriminator; `None` for standard ARP, which carries none.
    pub fn msg_type(&self) -> Option<MsgType> {
        Some(match self.body {
            FrameBody::IpSend { .. } => MsgType::IpSend,
            FrameBody::IpReply { .. } => MsgType::IpReply,
            FrameBody::ArpCheck { .. } => MsgType::ArpCheck,
            FrameBody::ArpNoChange { .. } => MsgType::ArpNoChange,
            FrameBody::ArpAck { .. } => MsgType::ArpAck,
            FrameBody::SignedArpReply { .. } => MsgType::SignedArpReply,
            FrameBody::StdArp(_) => return None,
        })
    }

    pub fn auth(&self) -> AuthSection<'_> {
        match &self.body {
            FrameBody::IpSend { tag, .. } | FrameBody::IpReply { tag, .. } => {
                AuthSection::KeyedTag(tag)
            }
            FrameBody::ArpCheck { auth, .. }
            | FrameBody::ArpNoChange { auth, .. }
            | FrameBody::ArpAck { auth, .. }
            | FrameBody::SignedArpReply { auth, .. } => AuthSection::Signature {
                signature: &auth.signature,
                certificate: &auth.certificate,
            },
            FrameBody::StdArp(_) => AuthSection::None,
        }
    }

    /// The bytes a tag or signature covers: everything from `dest` through
    /// the body fields, excluding the auth section and the FCS.
    pub fn signable_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64);
        self.write_prefix(&mut out);
        out
    }

    /// Overwrite the keyed tag. No-op for bodies that carry none.
    pub fn set_tag(&mut self, tag: [u8; TAG_LEN]) {
        match &mut self.body {
            FrameBody::IpSend { tag: t, .. } | FrameBody::IpReply { tag: t, .. } => *t = tag,
            _ => {}
        }
    }

    /// Overwrite the signature. No-op for bodies that carry none.
    pub fn set_signature(&mut self, signature: [u8; SIGNATURE_LEN]) {
        match &mut self.body {
            FrameBody::ArpCheck { auth, .. }
            | FrameBody::ArpNoChange { auth, .. }
            | FrameBody::ArpAck { auth, .. }
            | FrameBody::SignedArpReply { auth, .. } => auth.signature = signature,
            _ => {}
        }
    }

    fn write_prefix(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.dest.0);
        out.extend_from_slice(&self.src.0);
        match &self.body {
            FrameBody::StdArp(arp) => {
                out.extend_from_slice(&ETHERTYPE_ARP.to_be_bytes());
                write_arp_payload(out, arp);
            }
            body => {
                out.extend_from_slice(&ETHERTYPE_SECARP.to_be_bytes());
                out.push(self.msg_type().expect("custom body has a msg type").code());
                match body {
                    FrameBody::IpSend { ip, mac, .. } => {
                        out.extend_from_slice(&ip.octets());
                        out.extend_from_slice(&mac.0);
                    }
                    FrameBody::IpReply { ip, mac, ack, .. } => {
                        out.extend_from_slice(&ip.octets());
                        out.extend_from_slice(&mac.0);
                        out.push(u8::from(*ack));
                    }
                    FrameBody::ArpCheck { ip, .. } => {
                        out.extend_from_slice(b"ACH");
                        out.extend_from_slice(&ip.octets());
                    }
                    FrameBody::ArpNoChange { ip, .. } => {
                        out.extend_from_slice(b"ANC");
                        out.extend_from_slice(&ip.octets());
                    }
                    FrameBody::ArpAck { ip, .. } => {
                        out.extend_from_slice(b"ACK");
                        out.extend_from_slice(&ip.octets());
                    }
                    FrameBody::SignedArpReply { arp, .. } => write_arp_payload(out, arp),
                    FrameBody::StdArp(_) => unreachable!(),
                }
            }
        }
    }

    fn write_auth(&self, out: &mut Vec<u8>) {
        match self.auth() {
            AuthSection::None => {}
            AuthSection::KeyedTag(tag) => {
                out.push(0x01);
                out.extend_from_slice(tag);
            }
            AuthSection::Signature {
                signature,
                certificate,
            } => {
                out.push(0x02);
                out.extend_from_slice(signature);
                let len = u16::try_from(certificate.len())
                    .expect("certificate exceeds the 2-byte length field");
                out.extend_from_slice(&len.to_be_bytes());
                out.extend_from_slice(certificate);
            }
        }
    }
}

fn write_arp_payload(out: &mut Vec<u8>, arp: &StdArp) {
    out.extend_from_slice(&1u16.to_be_bytes()); // htype: Ethernet
    out.extend_from_slice(&0x0800u16.to_be_bytes()); // ptype: IPv4
    out.push(6); // hlen
    out.push(4); // plen
    out.extend_from_slice(&arp.op.code().to_be_bytes());
    out.extend_from_slice(&arp.sender_mac.0);
    out.extend_from_slice(&arp.sender_ip.octets());
    out.extend_from_slice(&arp.target_mac.0);
    out.extend_from_slice(&arp.target_ip.octets());
}

/// CRC-32 (IEEE 802.3 polynomial, reflected, init and xor-out `0xFFFFFFFF`).
pub fn compute_fcs(bytes: &[u8]) -> u32 {
    crc32fast::hash(bytes)
}

/// Serialize a frame to its canonical byte layout, FCS included.
///
/// Infallible: the `Frame` type cannot represent an ill-formed body/auth
/// pairing. Panics only if a certificate exceeds the 2-byte length field,
/// which [`crate::crypto::issue_certificate`] never produces.
pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::with_capacity(64);
    frame.write_prefix(&mut out);
    frame.write_auth(&mut out);
    let fcs = compute_fcs(&out);
    out.extend_from_slice(&fcs.to_be_bytes());
    out
}

/// Frame decoding failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("TruncatedFrame at offset {offset}")]
    Truncated { offset: usize },
    #[error("TrailingBytes: frame structure ends at offset {expected} but input has {actual} bytes")]
    TrailingBytes { expected: usize, actual: usize },
    #[error("BadEtherType: 0x{0:04x}")]
    BadEtherType(u16),
    #[error("UnknownMsgType: 0x{0:02x}")]
    UnknownMsgType(u8),
    #[error("BadMarker: expected {expected:?}, found {found:?}")]
    BadMarker {
        expected: &'static str,
        found: [u8; 3],
    },
    #[error("BadAuthKind: 0x{kind:02x} not valid for {msg_type}")]
    BadAuthKind { msg_type: MsgType, kind: u8 },
    #[error("BadAckByte: 0x{0:02x} (upper seven bits must be zero)")]
    BadAckByte(u8),
    #[error("BadArpHeader: {field} = {value}")]
    BadArpHeader { field: &'static str, value: u16 },
    #[error("BadFcs: computed 0x{computed:08x}, frame carries 0x{found:08x}")]
    BadFcs { computed: u32, found: u32 },
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.pos + n > self.buf.len() {
            return Err(DecodeError::Truncated { offset: self.pos });
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16_be(&mut self) -> Result<u16, DecodeError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn mac(&mut self) -> Result<MacAddr, DecodeError> {
        let b = self.take(6)?;
        Ok(MacAddr(b.try_into().expect("take(6) yields 6 bytes")))
    }

    fn ipv4(&mut self) -> Result<Ipv4Addr, DecodeError> {
        let b = self.take(4)?;
        Ok(Ipv4Addr::new(b[0], b[1], b[2], b[3]))
    }
}

fn read_arp_payload(r: &mut Reader<'_>) -> Result<StdArp, DecodeError> {
    let htype = r.u16_be()?;
    if htype != 1 {
        return Err(DecodeError::BadArpHeader {
            field: "htype",
            value: htype,
        });
    }
    let ptype = r.u16_be()?;
    if ptype != 0x0800 {
        return Err(DecodeError::BadArpHeader {
            field: "ptype",
            value: ptype,
        });
    }
    let hlen = r.u8()?;
    if hlen != 6 {
        return Err(DecodeError::BadArpHeader {
            field: "hlen",
            value: hlen.into(),
        });
    }
    let plen = r.u8()?;
    if plen != 4 {
        return Err(DecodeError::BadArpHeader {
            field: "plen",
            value: plen.into(),
        });
    }
    let op = match r.u16_be()? {
        1 => ArpOp::Request,
        2 => ArpOp::Reply,
        other => {
            return Err(DecodeError::BadArpHeader {
                field: "oper",
                value: other,
            })
        }
    };
    Ok(StdArp {
        op,
        sender_mac: r.mac()?,
        sender_ip: r.ipv4()?,
        target_mac: r.mac()?,
        target_ip: r.ipv4()?,
    })
}

fn read_marker(r: &mut Reader<'_>, expected: &'static str) -> Result<(), DecodeError> {
    let found: [u8; 3] = r.take(3)?.try_into().expect("take(3) yields 3 bytes");
    if found != expected.as_bytes() {
        return Err(DecodeError::BadMarker { expected, found });
    }
    Ok(())
}

fn read_signed_auth(r: &mut Reader<'_>, msg_type: MsgType) -> Result<SignedAuth, DecodeError> {
    let kind = r.u8()?;
    if kind != 0x02 {
        return Err(DecodeError::BadAuthKind { msg_type, kind });
    }
    let signature: [u8; SIGNATURE_LEN] = r
        .take(SIGNATURE_LEN)?
        .try_into()
        .expect("take yields requested length");
    let cert_len = r.u16_be()? as usize;
    let certificate = r.take(cert_len)?.to_vec();
    Ok(SignedAuth {
        signature,
        certificate,
    })
}

fn read_keyed_tag(r: &mut Reader<'_>, msg_type: MsgType) -> Result<[u8; TAG_LEN], DecodeError> {
    let kind = r.u8()?;
    if kind != 0x01 {
        return Err(DecodeError::BadAuthKind { msg_type, kind });
    }
    Ok(r.take(TAG_LEN)?
        .try_into()
        .expect("take yields requested length"))
}

/// Parse and validate a frame: structure first, then the FCS over everything
/// that precedes it.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame, DecodeError> {
    let mut r = Reader::new(bytes);
    let dest = r.mac()?;
    let src = r.mac()?;
    let ethertype = r.u16_be()?;

    let body = match ethertype {
        ETHERTYPE_ARP => FrameBody::StdArp(read_arp_payload(&mut r)?),
        ETHERTYPE_SECARP => {
            let code = r.u8()?;
            let msg_type = MsgType::from_code(code).ok_or(DecodeError::UnknownMsgType(code))?;
            match msg_type {
                MsgType::IpSend => {
                    let ip = r.ipv4()?;
                    let mac = r.mac()?;
                    let tag = read_keyed_tag(&mut r, msg_type)?;
                    FrameBody::IpSend { ip, mac, tag }
                }
                MsgType::IpReply => {
                    let ip = r.ipv4()?;
                    let mac = r.mac()?;
                    let ack_byte = r.u8()?;
                    if ack_byte & 0xFE != 0 {
                        return Err(DecodeError::BadAckByte(ack_byte));
                    }
                    let tag = read_keyed_tag(&mut r, msg_type)?;
                    FrameBody::IpReply {
                        ip,
                        mac,
                        ack: ack_byte == 1,
                        tag,
                    }
                }
                MsgType::ArpCheck => {
                    read_marker(&mut r, "ACH")?;
                    let ip = r.ipv4()?;
                    let auth = read_signed_auth(&mut r, msg_type)?;
                    FrameBody::ArpCheck { ip, auth }
                }
                MsgType::ArpNoChange => {
                    read_marker(&mut r, "ANC")?;
                    let ip = r.ipv4()?;
                    let auth = read_signed_auth(&mut r, msg_type)?;
                    FrameBody::ArpNoChange { ip, auth }
                }
                MsgType::ArpAck => {
                    read_marker(&mut r, "ACK")?;
                    let ip = r.ipv4()?;
                    let auth = read_signed_auth(&mut r, msg_type)?;
                    FrameBody::ArpAck { ip, auth }
                }
                MsgType::SignedArpReply => {
                    let arp = read_arp_payload(&mut r)?;
                    let auth = read_signed_auth(&mut r, msg_type)?;
                    FrameBody::SignedArpReply { arp, auth }
                }
            }
        }
        other => return Err(DecodeError::BadEtherType(other)),
    };

    let fcs_offset = r.pos;
    let found = u32::from_be_bytes(
        r.take(FCS_LEN)?
            .try_into()
            .expect("take yields requested length"),
    );
    if r.pos != bytes.len() {
        return Err(DecodeError::TrailingBytes {
            expected: r.pos,
            actual: bytes.len(),
        });
    }
    let computed = compute_fcs(&bytes[..fcs_offset]);
    if computed != found {
        return Err(DecodeError::BadFcs { computed, found });
    }

    Ok(Frame { dest, src, body })
}

/// Hex text failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HexError {
    #[error("OddLength: hex text has an odd number of digits")]
    OddLength,
    #[error("BadHexDigit: {ch:?} at position {position}")]
    BadHexDigit { position: usize, ch: char },
}

/// Canonical hex rendering of an encoded frame (lowercase, no separators).
pub fn frame_hex(frame: &Frame) -> String {
    bytes_to_hex(&encode_frame(frame))
}

pub fn bytes_to_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Parse hex text into bytes. Whitespace is ignored; digits may be any case.
pub fn parse_hex(text: &str) -> Result<Vec<u8>, HexError> {
    let mut out = Vec::with_capacity(text.len() / 2);
    let mut high: Option<u8> = None;
    for (position, ch) in text.char_indices() {
        if ch.is_whitespace() {
            continue;
        }
        let digit = ch
            .to_digit(16)
            .ok_or(HexError::BadHexDigit { position, ch })? as u8;
        match high.take() {
            None => high = Some(digit),
            Some(h) => out.push((h << 4) | digit),
        }
    }
    if high.is_some() {
        return Err(HexError::OddLength);
    }
    Ok(out)
}

/// Message-kind vocabulary for trace records. Classification peeks at the
/// discriminating bytes only; full validation is the receiver's job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameKind {
    Msg(MsgType),
    ArpRequest,
    ArpReply,
    Dhcp(dhcp::DhcpKind),
    Malformed,
}

impl FrameKind {
    pub fn label(&self) -> &'static str {
        match self {
            FrameKind::Msg(t) => t.name(),
            FrameKind::ArpRequest => "arp-request",
            FrameKind::ArpReply => "arp-reply",
            FrameKind::Dhcp(k) => k.name(),
            FrameKind::Malformed => "malformed",
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Cheap classification of raw frame bytes for tracing.
pub fn classify(bytes: &[u8]) -> FrameKind {
    if bytes.len() < 15 {
        return FrameKind::Malformed;
    }
    let ethertype = u16::from_be_bytes([bytes[12], bytes[13]]);
    match ethertype {
        ETHERTYPE_SECARP => match MsgType::from_code(bytes[14]) {
            Some(t) => FrameKind::Msg(t),
            None => FrameKind::Malformed,
        },
        ETHERTYPE_ARP => {
            if bytes.len() < 22 {
                return FrameKind::Malformed;
            }
            match u16::from_be_bytes([bytes[20], bytes[21]]) {
                1 => FrameKind::ArpRequest,
                2 => FrameKind::ArpReply,
                _ => FrameKind::Malformed,
            }
        }
        dhcp::ETHERTYPE_SIM_DHCP => match dhcp::DhcpKind::from_code(bytes[14]) {
            Some(k) => FrameKind::Dhcp(k),
            None => FrameKind::Malformed,
        },
        _ => FrameKind::Malformed,
    }
}

/// Destination MAC of raw frame bytes, if present.
pub fn peek_dest(bytes: &[u8]) -> Option<MacAddr> {
    let octets: [u8; 6] = bytes.get(..6)?.try_into().ok()?;
    Some(MacAddr(octets))
}
