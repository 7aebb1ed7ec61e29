//! JSON frame descriptions for `secarp encode`, plus the canonical samples.

use std::net::Ipv4Addr;

use serde::Deserialize;

use secarp::crypto::{derive_bytes, sign_frame, tag_frame, KeyPair, SharedKey, SignerIdentity};
use secarp::wire::{ArpOp, Frame, FrameBody, MacAddr, SignedAuth, StdArp};

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescKind {
    IpSend,
    IpReply,
    ArpCheck,
    ArpNoChange,
    ArpAck,
    SignedArpReply,
    StdArp,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArpDesc {
    pub op: String,
    pub sender_mac: MacAddr,
    pub sender_ip: Ipv4Addr,
    pub target_mac: MacAddr,
    pub target_ip: Ipv4Addr,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AuthDesc {
    None,
    Tag { tag_hex: String },
    Signature {
        signature_hex: String,
        certificate_hex: String,
    },
}

/// What `encode` reads: a message type, its fields, and auth material
/// supplied as hex (or "none" for standard ARP). Type and auth-kind names
/// are kebab-case; field keys are snake_case.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDesc {
    pub r#type: DescKind,
    pub dest: MacAddr,
    pub src: MacAddr,
    #[serde(default)]
    pub ip: Option<Ipv4Addr>,
    #[serde(default)]
    pub mac: Option<MacAddr>,
    #[serde(default)]
    pub ack: Option<bool>,
    #[serde(default)]
    pub arp: Option<ArpDesc>,
    pub auth: AuthDesc,
}

fn hex_array<const N: usize>(hex: &str, what: &str) -> Result<[u8; N], String> {
    let bytes = secarp::wire::parse_hex(hex).map_err(|e| format!("{what}: {e}"))?;
    <[u8; N]>::try_from(bytes.as_slice())
        .map_err(|_| format!("{what}: expected {N} bytes, got {}", hex.len() / 2))
}

impl FrameDesc {
    fn tag(&self) -> Result<[u8; 32], String> {
        match &self.auth {
            AuthDesc::Tag { tag_hex } => hex_array(tag_hex, "tag"),
            _ => Err("this message type needs auth kind \"tag\"".to_string()),
        }
    }

    fn signed_auth(&self) -> Result<SignedAuth, String> {
        match &self.auth {
            AuthDesc::Signature {
                signature_hex,
                certificate_hex,
            } => Ok(SignedAuth {
                signature: hex_array(signature_hex, "signature")?,
                certificate: secarp::wire::parse_hex(certificate_hex)
                    .map_err(|e| format!("certificate: {e}"))?,
            }),
            _ => Err("this message type needs auth kind \"signature\"".to_string()),
        }
    }

    fn ip(&self) -> Result<Ipv4Addr, String> {
        self.ip.ok_or_else(|| "missing field: ip".to_string())
    }

    fn mac_field(&self) -> Result<MacAddr, String> {
        self.mac.ok_or_else(|| "missing field: mac".to_string())
    }

    fn arp(&self) -> Result<StdArp, String> {
        let desc = self
            .arp
            .as_ref()
            .ok_or_else(|| "missing field: arp".to_string())?;
        let op = match desc.op.as_str() {
            "request" => ArpOp::Request,
            "reply" => ArpOp::Reply,
            other => return Err(format!("arp.op must be request|reply, got {other:?}")),
        };
        Ok(StdArp {
            op,
            sender_mac: desc.sender_mac,
            sender_ip: desc.sender_ip,
            target_mac: desc.target_mac,
            target_ip: desc.target_ip,
        })
    }

    pub fn to_frame(&self) -> Result<Frame, String> {
        let body = match self.r#type {
            DescKind::IpSend => FrameBody::IpSend {
                ip: self.ip()?,
                mac: self.mac_field()?,
                tag: self.tag()?,
            },
            DescKind::IpReply => FrameBody::IpReply {
                ip: self.ip()?,
                mac: self.mac_field()?,
                ack: self.ack.ok_or("missing field: ack")?,
                tag: self.tag()?,
            },
            DescKind::ArpCheck => FrameBody::ArpCheck {
                ip: self.ip()?,
                auth: self.signed_auth()?,
            },
            DescKind::ArpNoChange => FrameBody::ArpNoChange {
                ip: self.ip()?,
                auth: self.signed_auth()?,
            },
            DescKind::ArpAck => FrameBody::ArpAck {
                ip: self.ip()?,
                auth: self.signed_auth()?,
            },
            DescKind::SignedArpReply => FrameBody::SignedArpReply {
                arp: self.arp()?,
                auth: self.signed_auth()?,
            },
            DescKind::StdArp => {
                if !matches!(self.auth, AuthDesc::None) {
                    return Err("standard ARP carries auth kind \"none\"".to_string());
                }
                FrameBody::StdArp(self.arp()?)
            }
        };
        Ok(Frame {
            dest: self.dest,
            src: self.src,
            body,
        })
    }
}

/// Deterministic sample frames, sealed with fixed-seed key material.
pub fn sample(name: &str) -> Option<Frame> {
    let root = KeyPair::from_seed(derive_bytes(0, "sample-root"));
    let identity = SignerIdentity::issue(&root, "central-server", derive_bytes(0, "sample-central"));
    let shared = SharedKey::new(derive_bytes(0, "sample-shared"));
    let central = MacAddr([0x02, 0xAA, 0, 0, 0, 0x01]);
    let dhcp = MacAddr([0x02, 0xAA, 0, 0, 0, 0x02]);
    let host = MacAddr([0x02, 0, 0, 0, 0, 0x0A]);
    let ip = Ipv4Addr::new(10, 0, 0, 7);

    let mut frame = match name {
        "ip-send" => Frame {
            dest: central,
            src: dhcp,
            body: FrameBody::IpSend {
                ip,
                mac: host,
                tag: [0; 32],
            },
        },
        "ip-reply" => Frame {
            dest: dhcp,
            src: central,
            body: FrameBody::IpReply {
                ip,
                mac: host,
                ack: true,
                tag: [0; 32],
            },
        },
        "arp-check" => Frame {
            dest: host,
            src: central,
            body: FrameBody::ArpCheck {
                ip,
                auth: SignedAuth::placeholder(identity.certificate_bytes()),
            },
        },
        "arp-no-change" => Frame {
            dest: host,
            src: central,
            body: FrameBody::ArpNoChange {
                ip,
                auth: SignedAuth::placeholder(identity.certificate_bytes()),
            },
        },
        "arp-ack" => Frame {
            dest: host,
            src: central,
            body: FrameBody::ArpAck {
                ip,
                auth: SignedAuth::placeholder(identity.certificate_bytes()),
            },
        },
        "signed-arp-reply" => Frame {
            dest: host,
            src: central,
            body: FrameBody::SignedArpReply {
                arp: StdArp {
                    op: ArpOp::Reply,
                    sender_mac: MacAddr([0x02, 0, 0, 0, 0, 0x0B]),
                    sender_ip: Ipv4Addr::new(10, 0, 0, 11),
                    target_mac: host,
                    target_ip: ip,
                },
                auth: SignedAuth::placeholder(identity.certificate_bytes()),
            },
        },
        "std-arp" => Frame {
            dest: MacAddr::BROADCAST,
            src: host,
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Request,
                sender_mac: host,
                sender_ip: ip,
                target_mac: MacAddr::ZERO,
                target_ip: Ipv4Addr::new(10, 0, 0, 11),
            }),
        },
        _ => return None,
    };
    match frame.body {
        FrameBody::IpSend { .. } | FrameBody::IpReply { .. } => tag_frame(&shared, &mut frame),
        FrameBody::StdArp(_) => {}
        _ => sign_frame(&identity, &mut frame),
    }
    Some(frame)
}

pub const SAMPLE_NAMES: &[&str] = &[
    "ip-send",
    "ip-reply",
    "arp-check",
    "arp-no-change",
    "arp-ack",
    "signed-arp-reply",
    "std-arp",
];
