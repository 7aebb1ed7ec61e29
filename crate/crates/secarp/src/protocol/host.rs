//! Host state machine: DHCP join, ARP resolution, MAC change, and the
//! responses to the Central Server's signed control messages.
//!
//! Secure hosts never answer ARP requests and never accept a bare ARP reply;
//! their cache is fed exclusively by signature-verified signed ARP replies
//! matching an outstanding resolution. Baseline hosts behave like textbook
//! RFC 826 nodes — including the vulnerability: any received ARP reply
//! overwrites the cache.

use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;

use sha2::{Digest, Sha256};

use crate::crypto::{frame_signature_ok, TrustRoot};
use crate::simnet::{Ctx, Tick, TimerToken};
use crate::wire::AuthSection;
use crate::wire::dhcp::{decode_dhcp, encode_dhcp, DhcpFrame, DhcpKind};
use crate::wire::{decode_frame, encode_frame, ArpOp, Frame, FrameBody, MacAddr, StdArp};

use super::{token, token_ip, token_tag, Command, HostConfig, Mode, TAG_CHANGE_RETRY, TAG_RESOLVE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinPhase {
    Idle,
    AwaitingOffer,
    AwaitingAck { ip: Ipv4Addr },
    Done,
}

/// A verdict the Central Server returned for this host's change request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeOutcome {
    Ack(Ipv4Addr),
    NoChange(Ipv4Addr),
}

#[derive(Debug, Clone, Copy)]
struct PendingChange {
    ip: Ipv4Addr,
    new_mac: MacAddr,
}

pub struct Host {
    pub name: String,
    mode: Mode,
    trust_root: TrustRoot,
    config: HostConfig,
    pub ip: Option<Ipv4Addr>,
    pub arp_cache: BTreeMap<Ipv4Addr, MacAddr>,
    pub central_mac: Option<MacAddr>,
    dhcp_mac: Option<MacAddr>,
    join: JoinPhase,
    pending_resolutions: BTreeSet<Ipv4Addr>,
    pending_change: Option<PendingChange>,
    pub joins_completed: u32,
    pub outcomes: Vec<(Tick, ChangeOutcome)>,
    pub resolution_failures: Vec<Ipv4Addr>,
    pub events: Vec<String>,
    /// Digest of the last frame that passed signature verification; the 50
    /// probes of one burst are byte-identical, so this collapses a burst to
    /// one real verification.
    last_verified: Option<[u8; 32]>,
}

impl Host {
    pub fn new(name: impl Into<String>, mode: Mode, trust_root: TrustRoot, config: HostConfig) -> Self {
        Host {
            name: name.into(),
            mode,
            trust_root,
            config,
            ip: None,
            arp_cache: BTreeMap::new(),
            central_mac: None,
            dhcp_mac: None,
            join: JoinPhase::Idle,
            pending_resolutions: BTreeSet::new(),
            pending_change: None,
            joins_completed: 0,
            outcomes: Vec::new(),
            resolution_failures: Vec::new(),
            events: Vec::new(),
            last_verified: None,
        }
    }

    /// Signature check with a one-entry cache keyed over everything the
    /// signature binds (signable bytes, signature, certificate), so a cache
    /// hit is only possible for a byte-identical frame.
    fn signature_ok(&mut self, frame: &Frame) -> bool {
        let AuthSection::Signature {
            signature,
            certificate,
        } = frame.auth()
        else {
            return false;
        };
        let mut hasher = Sha256::new();
        hasher.update(frame.signable_bytes());
        hasher.update(signature);
        hasher.update(certificate);
        let digest: [u8; 32] = hasher.finalize().into();
        if self.last_verified == Some(digest) {
            return true;
        }
        let ok = frame_signature_ok(&self.trust_root, frame);
        if ok {
            self.last_verified = Some(digest);
        }
        ok
    }

    pub fn join_phase(&self) -> JoinPhase {
        self.join
    }

    pub fn has_pending_change(&self) -> bool {
        self.pending_change.is_some()
    }

    fn log(&mut self, now: Tick, msg: impl Into<String>) {
        self.events.push(format!("t={now} {}", msg.into()));
    }

    fn send_change_claim(&self, ctx: &mut Ctx<'_, Command>, change: PendingChange, central: MacAddr) {
        ctx.send(encode_frame(&Frame {
            dest: central,
            src: ctx.mac(),
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Reply,
                sender_mac: change.new_mac,
                sender_ip: change.ip,
                target_mac: central,
                target_ip: Ipv4Addr::UNSPECIFIED,
            }),
        }));
    }

    pub(super) fn on_command(&mut self, ctx: &mut Ctx<'_, Command>, cmd: Command) {
        let now = ctx.now();
        match cmd {
            Command::StartJoin => {
                self.join = JoinPhase::AwaitingOffer;
                ctx.send(encode_dhcp(&DhcpFrame {
                    dest: MacAddr::BROADCAST,
                    src: ctx.mac(),
                    kind: DhcpKind::Discover,
                    client_mac: ctx.mac(),
                    ip: Ipv4Addr::UNSPECIFIED,
                    central_mac: MacAddr::ZERO,
                }));
            }
            Command::Resolve { target } => {
                if let Some(&mac) = self.arp_cache.get(&target) {
                    self.log(now, format!("resolve {target}: cache hit {mac}"));
                    return;
                }
                let Some(my_ip) = self.ip else {
                    self.log(now, format!("resolve {target} ignored: no lease yet"));
                    return;
                };
                if !self.pending_resolutions.insert(target) {
                    self.log(now, format!("resolve {target} already in flight"));
                    return;
                }
                ctx.send(encode_frame(&Frame {
                    dest: MacAddr::BROADCAST,
                    src: ctx.mac(),
                    body: FrameBody::StdArp(StdArp {
                        op: ArpOp::Request,
                        sender_mac: ctx.mac(),
                        sender_ip: my_ip,
                        target_mac: MacAddr::ZERO,
                        target_ip: target,
                    }),
                }));
                ctx.set_timer(self.config.resolve_timeout, token(TAG_RESOLVE, target));
            }
            Command::ChangeMac { new_mac } => {
                ctx.rebind(new_mac);
                let Some(my_ip) = self.ip else {
                    self.log(now, "mac change before join: nothing to announce".to_string());
                    return;
                };
                match self.mode {
                    Mode::Baseline => {
                        // Gratuitous broadcast ARP reply, the textbook way.
                        ctx.send(encode_frame(&Frame {
                            dest: MacAddr::BROADCAST,
                            src: new_mac,
                            body: FrameBody::StdArp(StdArp {
                                op: ArpOp::Reply,
                                sender_mac: new_mac,
                                sender_ip: my_ip,
                                target_mac: MacAddr::ZERO,
                                target_ip: my_ip,
                            }),
                        }));
                    }
                    Mode::Secure => {
                        let Some(central) = self.central_mac else {
                            self.log(now, "mac change: central server unknown".to_string());
                            return;
                        };
                        let change = PendingChange {
                            ip: my_ip,
                            new_mac,
                        };
                        self.pending_change = Some(change);
                        self.send_change_claim(ctx, change, central);
                        ctx.set_timer(self.config.change_retry, token(TAG_CHANGE_RETRY, my_ip));
                    }
                }
            }
            Command::Renew => {
                let (Some(ip), Some(dhcp_mac)) = (self.ip, self.dhcp_mac) else {
                    self.log(now, "renew ignored: no lease".to_string());
                    return;
                };
                ctx.send(encode_dhcp(&DhcpFrame {
                    dest: dhcp_mac,
                    src: ctx.mac(),
                    kind: DhcpKind::Request,
                    client_mac: ctx.mac(),
                    ip,
                    central_mac: MacAddr::ZERO,
                }));
            }
            Command::Act => {
                self.log(now, "attacker command ignored by host".to_string());
            }
        }
    }

    pub(super) fn on_frame(&mut self, ctx: &mut Ctx<'_, Command>, bytes: &[u8]) {
        if let Ok(dhcp) = decode_dhcp(bytes) {
            self.on_dhcp(ctx, dhcp);
            return;
        }
        let frame = match decode_frame(bytes) {
            Ok(frame) => frame,
            Err(err) => {
                self.log(ctx.now(), format!("undecodable frame ignored: {err}"));
                return;
            }
        };
        match frame.body {
            FrameBody::StdArp(arp) => match arp.op {
                ArpOp::Request => self.on_arp_request(ctx, arp),
                ArpOp::Reply => self.on_arp_reply(ctx, arp),
            },
            FrameBody::SignedArpReply { arp, .. } => self.on_signed_arp_reply(ctx, &frame, arp),
            FrameBody::ArpCheck { ip, .. } => self.on_arp_check(ctx, &frame, ip),
            FrameBody::ArpNoChange { ip, .. } => self.on_change_outcome(ctx, &frame, ip, false),
            FrameBody::ArpAck { ip, .. } => self.on_change_outcome(ctx, &frame, ip, true),
            FrameBody::IpSend { .. } | FrameBody::IpReply { .. } => {
                self.log(ctx.now(), "dhcp/central traffic ignored by host".to_string());
            }
        }
    }

    fn on_dhcp(&mut self, ctx: &mut Ctx<'_, Command>, dhcp: DhcpFrame) {
        if dhcp.client_mac != ctx.mac() {
            return;
        }
        match (dhcp.kind, self.join) {
            (DhcpKind::Offer, JoinPhase::AwaitingOffer) => {
                self.dhcp_mac = Some(dhcp.src);
                self.join = JoinPhase::AwaitingAck { ip: dhcp.ip };
                ctx.send(encode_dhcp(&DhcpFrame {
                    dest: MacAddr::BROADCAST,
                    src: ctx.mac(),
                    kind: DhcpKind::Request,
                    client_mac: ctx.mac(),
                    ip: dhcp.ip,
                    central_mac: MacAddr::ZERO,
                }));
            }
            (DhcpKind::Ack, JoinPhase::AwaitingAck { ip }) if dhcp.ip == ip => {
                self.ip = Some(ip);
                self.dhcp_mac = Some(dhcp.src);
                if dhcp.central_mac != MacAddr::ZERO {
                    self.central_mac = Some(dhcp.central_mac);
                }
                self.join = JoinPhase::Done;
                self.joins_completed += 1;
                self.log(ctx.now(), format!("joined with {ip}"));
            }
            (DhcpKind::Ack, JoinPhase::Done) => {
                self.log(ctx.now(), format!("lease {} refreshed", dhcp.ip));
            }
            _ => {}
        }
    }

    fn on_arp_request(&mut self, ctx: &mut Ctx<'_, Command>, arp: StdArp) {
        // In the secure scheme hosts never answer; the Central Server does.
        if self.mode == Mode::Secure {
            return;
        }
        if self.ip != Some(arp.target_ip) {
            return;
        }
        ctx.send(encode_frame(&Frame {
            dest: arp.sender_mac,
            src: ctx.mac(),
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Reply,
                sender_mac: ctx.mac(),
                sender_ip: arp.target_ip,
                target_mac: arp.sender_mac,
                target_ip: arp.sender_ip,
            }),
        }));
    }

    fn on_arp_reply(&mut self, ctx: &mut Ctx<'_, Command>, arp: StdArp) {
        match self.mode {
            Mode::Baseline => {
                // Textbook cache update on any reply; this is the hole the
                // scheme closes.
                self.arp_cache.insert(arp.sender_ip, arp.sender_mac);
                self.pending_resolutions.remove(&arp.sender_ip);
            }
            Mode::Secure => {
                self.log(
                    ctx.now(),
                    format!("bare ARP reply for {} ignored", arp.sender_ip),
                );
            }
        }
    }

    fn on_signed_arp_reply(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, arp: StdArp) {
        let now = ctx.now();
        if self.mode == Mode::Baseline {
            self.log(now, "signed reply ignored in baseline mode".to_string());
            return;
        }
        if !self.signature_ok(frame) {
            self.log(
                now,
                format!("signed reply for {} failed verification", arp.sender_ip),
            );
            return;
        }
        if !self.pending_resolutions.remove(&arp.sender_ip) {
            self.log(now, format!("unsolicited signed reply for {} ignored", arp.sender_ip));
            return;
        }
        self.arp_cache.insert(arp.sender_ip, arp.sender_mac);
        self.log(now, format!("resolved {} -> {}", arp.sender_ip, arp.sender_mac));
    }

    /// Answer a verified probe iff this host currently holds the probed IP.
    /// A host that changed its MAC no longer receives frames at the old one,
    /// so it cannot answer probes sent there.
    fn on_arp_check(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, probed_ip: Ipv4Addr) {
        if !self.signature_ok(frame) {
            self.log(ctx.now(), format!("ARP_Check for {probed_ip} failed verification"));
            return;
        }
        if self.ip != Some(probed_ip) {
            return;
        }
        ctx.send(encode_frame(&Frame {
            dest: frame.src,
            src: ctx.mac(),
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Reply,
                sender_mac: ctx.mac(),
                sender_ip: probed_ip,
                target_mac: frame.src,
                target_ip: Ipv4Addr::UNSPECIFIED,
            }),
        }));
    }

    fn on_change_outcome(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, ip: Ipv4Addr, ack: bool) {
        let now = ctx.now();
        if !self.signature_ok(frame) {
            self.log(now, format!("change outcome for {ip} failed verification"));
            return;
        }
        let Some(change) = self.pending_change else {
            self.log(now, format!("outcome for {ip} without a pending change ignored"));
            return;
        };
        if change.ip != ip {
            self.log(now, format!("outcome for {ip} does not match pending change"));
            return;
        }
        self.pending_change = None;
        if ack {
            self.outcomes.push((now, ChangeOutcome::Ack(ip)));
            self.log(now, format!("ARP_Ack: table updated for {ip}"));
        } else {
            // The claim was cancelled; recover by requesting a fresh lease.
            self.outcomes.push((now, ChangeOutcome::NoChange(ip)));
            self.log(now, format!("ARP_NoChange for {ip}: rejoining for a fresh lease"));
            self.ip = None;
            let label = format!("join:{} (recovery)", self.name);
            ctx.schedule_command(1, label, Command::StartJoin);
        }
    }

    pub(super) fn on_timer(&mut self, ctx: &mut Ctx<'_, Command>, timer: TimerToken) {
        let now = ctx.now();
        match token_tag(timer) {
            TAG_RESOLVE => {
                let target = token_ip(timer);
                if self.pending_resolutions.remove(&target) {
                    self.resolution_failures.push(target);
                    self.log(now, format!("resolution of {target} timed out"));
                }
            }
            TAG_CHANGE_RETRY => {
                let Some(change) = self.pending_change else {
                    return;
                };
                let Some(central) = self.central_mac else {
                    return;
                };
                self.log(now, format!("no outcome for {}: resending change request", change.ip));
                self.send_change_claim(ctx, change, central);
                ctx.set_timer(self.config.change_retry, token(TAG_CHANGE_RETRY, change.ip));
            }
            _ => {}
        }
    }
}
