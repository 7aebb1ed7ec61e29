//! The four node state machines: hosts, the DHCP server, the Central Server,
//! and the attacker.
//!
//! In secure mode every ARP request and every ARP reply goes to the Central
//! Server, which owns the authoritative IP→MAC table. Entries are created
//! only by keyed-tag-verified IP_send messages from the DHCP server, and
//! mutated only by the MAC-change verification procedure: a claimed change
//! triggers a burst of signed ARP_Check probes at the previous MAC, and the
//! entry is replaced only if none of them is answered before the deadline.
//!
//! Baseline mode runs textbook ARP/DHCP (no Central Server, unsigned
//! replies, poisonable caches) for the comparison scenarios.

use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use crate::simnet::{Tick, TimerToken};
use crate::wire::MacAddr;

mod attacker;
mod central;
mod dhcp_server;
mod host;

pub use attacker::{Attacker, AttackerStrategy};
pub use central::{CentralServer, PendingCheck, TableChange, TableChangeCause};
pub use dhcp_server::DhcpServer;
pub use host::{ChangeOutcome, Host, JoinPhase};

/// Which protocol family the network runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Secure,
    Baseline,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Secure => "secure",
            Mode::Baseline => "baseline",
        }
    }
}

/// Scripted inputs to nodes. Hosts take the first four; the attacker takes
/// `Act`, which triggers whatever its configured strategy does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    StartJoin,
    Resolve { target: Ipv4Addr },
    ChangeMac { new_mac: MacAddr },
    Renew,
    Act,
}

/// Central Server knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CentralConfig {
    /// ARP_Check probes per verification burst.
    pub n_probes: u32,
    /// Ticks from burst to the keep-or-replace decision.
    pub check_timeout: Tick,
    /// Token-bucket capacity for check-initiating ARP replies, per source MAC.
    pub rate_limit_max: u32,
    /// Aggregate token-bucket capacity across all sources. A flood that
    /// spoofs fresh source MACs sails past per-source buckets; this is the
    /// backstop that makes the server shed load (genuine requests included)
    /// while under attack.
    pub global_limit_max: u32,
    /// Ticks over which a full bucket's worth of tokens refills.
    pub rate_limit_window: Tick,
}

impl Default for CentralConfig {
    fn default() -> Self {
        CentralConfig {
            n_probes: 50,
            check_timeout: 100,
            rate_limit_max: 10,
            global_limit_max: 20,
            rate_limit_window: 1000,
        }
    }
}

/// Host knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HostConfig {
    /// Ticks a host waits for a signed reply before giving up a resolution.
    pub resolve_timeout: Tick,
    /// Ticks between change-request retries while no outcome arrives.
    pub change_retry: Tick,
}

impl Default for HostConfig {
    fn default() -> Self {
        HostConfig {
            resolve_timeout: 50,
            change_retry: 300,
        }
    }
}

/// DHCP server knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhcpConfig {
    /// Ticks between IP_send retransmissions while no IP_reply arrives.
    pub ip_send_retransmit: Tick,
}

impl Default for DhcpConfig {
    fn default() -> Self {
        DhcpConfig {
            ip_send_retransmit: 20,
        }
    }
}

// Timer tokens: an 8-bit tag in the high bits, an optional IPv4 payload in
// the low 32.
const TAG_RESOLVE: u64 = 1;
const TAG_CHANGE_RETRY: u64 = 2;
const TAG_IP_SEND: u64 = 3;
const TAG_CHECK_DEADLINE: u64 = 4;
const TAG_FLOOD: u64 = 5;

fn token(tag: u64, ip: Ipv4Addr) -> TimerToken {
    (tag << 32) | u64::from(u32::from(ip))
}

fn token_tag(token: TimerToken) -> u64 {
    token >> 32
}

fn token_ip(token: TimerToken) -> Ipv4Addr {
    Ipv4Addr::from((token & 0xFFFF_FFFF) as u32)
}

/// The simulation's node type: one variant per role.
pub enum ProtocolNode {
    Host(Host),
    Dhcp(DhcpServer),
    Central(CentralServer),
    Attacker(Attacker),
}

impl ProtocolNode {
    pub fn as_host(&self) -> Option<&Host> {
        match self {
            ProtocolNode::Host(h) => Some(h),
            _ => None,
        }
    }

    pub fn as_dhcp(&self) -> Option<&DhcpServer> {
        match self {
            ProtocolNode::Dhcp(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_central(&self) -> Option<&CentralServer> {
        match self {
            ProtocolNode::Central(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_attacker(&self) -> Option<&Attacker> {
        match self {
            ProtocolNode::Attacker(a) => Some(a),
            _ => None,
        }
    }
}

impl crate::simnet::Node for ProtocolNode {
    type Command = Command;

    fn on_frame(&mut self, ctx: &mut crate::simnet::Ctx<'_, Command>, bytes: &[u8]) {
        match self {
            ProtocolNode::Host(h) => h.on_frame(ctx, bytes),
            ProtocolNode::Dhcp(d) => d.on_frame(ctx, bytes),
            ProtocolNode::Central(c) => c.on_frame(ctx, bytes),
            ProtocolNode::Attacker(a) => a.on_frame(ctx, bytes),
        }
    }

    fn on_timer(&mut self, ctx: &mut crate::simnet::Ctx<'_, Command>, token: TimerToken) {
        match self {
            ProtocolNode::Host(h) => h.on_timer(ctx, token),
            ProtocolNode::Dhcp(d) => d.on_timer(ctx, token),
            ProtocolNode::Central(c) => c.on_timer(ctx, token),
            ProtocolNode::Attacker(a) => a.on_timer(ctx, token),
        }
    }

    fn on_command(&mut self, ctx: &mut crate::simnet::Ctx<'_, Command>, cmd: Command) {
        match self {
            ProtocolNode::Host(h) => h.on_command(ctx, cmd),
            ProtocolNode::Dhcp(d) => d.on_command(ctx, cmd),
            ProtocolNode::Central(c) => c.on_command(ctx, cmd),
            ProtocolNode::Attacker(a) => a.on_command(ctx, cmd),
        }
    }
}
