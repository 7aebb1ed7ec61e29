//! The Central Server: authoritative IP→MAC table, signed ARP answers, and
//! the probe-based MAC-change verification procedure.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use crate::crypto::{frame_tag_ok, sign_frame, tag_frame, SharedKey, SignerIdentity};
use crate::simnet::{Ctx, Tick, TimerToken};
use crate::wire::{
    decode_frame, encode_frame, ArpOp, Frame, FrameBody, MacAddr, SignedAuth, StdArp,
};

use super::{token, token_ip, token_tag, CentralConfig, Command, TAG_CHECK_DEADLINE};

/// In-flight MAC-change verification state for one IP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingCheck {
    pub ip: Ipv4Addr,
    pub old_mac: MacAddr,
    pub new_mac: MacAddr,
    pub initiator_mac: MacAddr,
    pub probes_sent: u32,
    pub reply_seen: bool,
    pub deadline: Tick,
}

/// A check that resolved recently. Replies from the old MAC within the
/// cooldown window are late probe replies, not fresh claims, and are ignored.
#[derive(Debug, Clone)]
struct RecentCheck {
    old_mac: MacAddr,
    expires: Tick,
}

#[derive(Debug, Clone)]
struct Bucket {
    milli_tokens: u64,
    last_refill: Tick,
}

fn refill(bucket: &mut Bucket, now: Tick, cap: u64, window: Tick) {
    let elapsed = now.saturating_sub(bucket.last_refill);
    bucket.last_refill = now;
    bucket.milli_tokens = cap.min(bucket.milli_tokens + elapsed * cap / window);
}

/// Why a table entry was installed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableChangeCause {
    /// Verified IP_send from the DHCP server.
    IpSend,
    /// Verification deadline passed with no probe answered.
    CheckExpired { old_mac: MacAddr },
}

/// Append-only provenance record of every table install.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableChange {
    pub time: Tick,
    pub ip: Ipv4Addr,
    pub mac: MacAddr,
    pub cause: TableChangeCause,
}

pub struct CentralServer {
    identity: SignerIdentity,
    shared_key: SharedKey,
    config: CentralConfig,
    table: BTreeMap<Ipv4Addr, MacAddr>,
    pending: BTreeMap<Ipv4Addr, PendingCheck>,
    recent: BTreeMap<Ipv4Addr, RecentCheck>,
    buckets: BTreeMap<MacAddr, Bucket>,
    global_bucket: Bucket,
    /// Every install ever applied, in order; attack verdicts audit this.
    pub table_log: Vec<TableChange>,
    pub events: Vec<String>,
}

impl CentralServer {
    pub fn new(identity: SignerIdentity, shared_key: SharedKey, config: CentralConfig) -> Self {
        assert!(config.n_probes >= 1, "n_probes must be at least 1");
        CentralServer {
            identity,
            shared_key,
            config,
            table: BTreeMap::new(),
            pending: BTreeMap::new(),
            recent: BTreeMap::new(),
            buckets: BTreeMap::new(),
            global_bucket: Bucket {
                milli_tokens: u64::from(config.global_limit_max) * 1000,
                last_refill: 0,
            },
            table_log: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn table(&self) -> &BTreeMap<Ipv4Addr, MacAddr> {
        &self.table
    }

    pub fn pending(&self) -> &BTreeMap<Ipv4Addr, PendingCheck> {
        &self.pending
    }

    fn log(&mut self, now: Tick, msg: impl Into<String>) {
        self.events.push(format!("t={now} {}", msg.into()));
    }

    fn install(&mut self, now: Tick, ip: Ipv4Addr, mac: MacAddr, cause: TableChangeCause) {
        self.table.insert(ip, mac);
        self.table_log.push(TableChange {
            time: now,
            ip,
            mac,
            cause,
        });
    }

    /// Deterministic integer token buckets in milli-tokens. A claim is
    /// admitted only if both the per-source bucket and the aggregate bucket
    /// can afford it; denial consumes nothing.
    fn admit_claim(&mut self, src: MacAddr, now: Tick) -> bool {
        let window = self.config.rate_limit_window.max(1);
        let src_cap = u64::from(self.config.rate_limit_max) * 1000;
        let global_cap = u64::from(self.config.global_limit_max) * 1000;
        let bucket = self.buckets.entry(src).or_insert(Bucket {
            milli_tokens: src_cap,
            last_refill: now,
        });
        refill(bucket, now, src_cap, window);
        refill(&mut self.global_bucket, now, global_cap, window);
        if bucket.milli_tokens >= 1000 && self.global_bucket.milli_tokens >= 1000 {
            bucket.milli_tokens -= 1000;
            self.global_bucket.milli_tokens -= 1000;
            true
        } else {
            false
        }
    }

    fn signed_frame(&self, dest: MacAddr, src: MacAddr, body: FrameBody) -> Vec<u8> {
        let mut frame = Frame { dest, src, body };
        sign_frame(&self.identity, &mut frame);
        encode_frame(&frame)
    }

    fn placeholder_auth(&self) -> SignedAuth {
        SignedAuth::placeholder(self.identity.certificate_bytes())
    }

    pub(super) fn on_frame(&mut self, ctx: &mut Ctx<'_, Command>, bytes: &[u8]) {
        let frame = match decode_frame(bytes) {
            Ok(frame) => frame,
            Err(err) => {
                self.log(ctx.now(), format!("undecodable frame ignored: {err}"));
                return;
            }
        };
        match frame.body {
            FrameBody::IpSend { ip, mac, .. } => self.on_ip_send(ctx, &frame, ip, mac),
            FrameBody::StdArp(arp) => match arp.op {
                ArpOp::Request => self.on_arp_request(ctx, &frame, arp),
                ArpOp::Reply => self.on_arp_reply(ctx, &frame, arp),
            },
            _ => {
                self.log(ctx.now(), "unexpected message kind ignored");
            }
        }
    }

    /// §3 steps 3–5: verify the keyed tag, install the lease, acknowledge.
    fn on_ip_send(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, ip: Ipv4Addr, mac: MacAddr) {
        if !frame_tag_ok(&self.shared_key, frame) {
            self.log(ctx.now(), format!("IP_send for {ip} rejected: bad tag"));
            return;
        }
        self.install(ctx.now(), ip, mac, TableChangeCause::IpSend);
        let mut reply = Frame {
            dest: frame.src,
            src: ctx.mac(),
            body: FrameBody::IpReply {
                ip,
                mac,
                ack: true,
                tag: [0; 32],
            },
        };
        tag_frame(&self.shared_key, &mut reply);
        ctx.send(encode_frame(&reply));
    }

    /// Answer a resolution query with a signed ARP reply; stay silent on a
    /// table miss.
    fn on_arp_request(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, arp: StdArp) {
        let Some(&mac) = self.table.get(&arp.target_ip) else {
            self.log(
                ctx.now(),
                format!("resolution miss for {} ignored", arp.target_ip),
            );
            return;
        };
        let body = FrameBody::SignedArpReply {
            arp: StdArp {
                op: ArpOp::Reply,
                sender_mac: mac,
                sender_ip: arp.target_ip,
                target_mac: arp.sender_mac,
                target_ip: arp.sender_ip,
            },
            auth: self.placeholder_auth(),
        };
        let bytes = self.signed_frame(frame.src, ctx.mac(), body);
        ctx.send(bytes);
    }

    /// An ARP reply is either an answer to an outstanding probe burst or a
    /// claim that an IP's MAC has changed.
    fn on_arp_reply(&mut self, ctx: &mut Ctx<'_, Command>, frame: &Frame, arp: StdArp) {
        let now = ctx.now();
        let ip = arp.sender_ip;

        if let Some(check) = self.pending.get(&ip) {
            if frame.src == check.old_mac && arp.sender_mac == check.old_mac {
                // The previous MAC answered: keep the old combination.
                let check = self.pending.remove(&ip).expect("just found");
                self.recent.insert(
                    ip,
                    RecentCheck {
                        old_mac: check.old_mac,
                        expires: now + self.config.check_timeout,
                    },
                );
                self.log(
                    now,
                    format!(
                        "probe answered by {} for {ip}: keeping old entry, ARP_NoChange to {}",
                        check.old_mac, check.initiator_mac
                    ),
                );
                let body = FrameBody::ArpNoChange {
                    ip,
                    auth: self.placeholder_auth(),
                };
                let bytes = self.signed_frame(check.initiator_mac, ctx.mac(), body);
                ctx.send(bytes);
            } else {
                self.log(now, format!("duplicate claim for {ip} while check pending"));
            }
            return;
        }

        if let Some(recent) = self.recent.get(&ip) {
            if now < recent.expires && frame.src == recent.old_mac && arp.sender_mac == recent.old_mac
            {
                self.log(now, format!("late probe reply from {} for {ip} ignored", frame.src));
                return;
            }
        }

        if !self.admit_claim(frame.src, now) {
            self.log(now, format!("claim from {} for {ip} rate-limited", frame.src));
            return;
        }

        let Some(&current) = self.table.get(&ip) else {
            self.log(now, format!("claim for unknown {ip} ignored"));
            return;
        };

        if current == arp.sender_mac {
            // Nothing to change; acknowledge immediately, no probes.
            self.log(now, format!("no-op claim for {ip}: immediate ARP_Ack"));
            let body = FrameBody::ArpAck {
                ip,
                auth: self.placeholder_auth(),
            };
            let bytes = self.signed_frame(frame.src, ctx.mac(), body);
            ctx.send(bytes);
            return;
        }

        // Launch the verification burst at the previous MAC.
        let check = PendingCheck {
            ip,
            old_mac: current,
            new_mac: arp.sender_mac,
            initiator_mac: frame.src,
            probes_sent: self.config.n_probes,
            reply_seen: false,
            deadline: now + self.config.check_timeout,
        };
        self.log(
            now,
            format!(
                "claim {ip}: {current} -> {}; sending {} ARP_Check probes",
                arp.sender_mac, self.config.n_probes
            ),
        );
        let body = FrameBody::ArpCheck {
            ip,
            auth: self.placeholder_auth(),
        };
        let probe = self.signed_frame(current, ctx.mac(), body);
        for _ in 0..self.config.n_probes {
            ctx.send(probe.clone());
        }
        ctx.set_timer(self.config.check_timeout, token(TAG_CHECK_DEADLINE, ip));
        self.pending.insert(ip, check);
    }

    pub(super) fn on_timer(&mut self, ctx: &mut Ctx<'_, Command>, timer: TimerToken) {
        if token_tag(timer) != TAG_CHECK_DEADLINE {
            return;
        }
        let ip = token_ip(timer);
        // A check answered in time was resolved and removed on the spot, so a
        // still-pending entry here means silence: commit the new mapping.
        let Some(check) = self.pending.remove(&ip) else {
            return;
        };
        let now = ctx.now();
        self.install(
            now,
            ip,
            check.new_mac,
            TableChangeCause::CheckExpired {
                old_mac: check.old_mac,
            },
        );
        self.recent.insert(
            ip,
            RecentCheck {
                old_mac: check.old_mac,
                expires: now + self.config.check_timeout,
            },
        );
        self.log(
            now,
            format!(
                "no probe answered for {ip}: entry now {}, ARP_Ack to {}",
                check.new_mac, check.initiator_mac
            ),
        );
        let body = FrameBody::ArpAck {
            ip,
            auth: self.placeholder_auth(),
        };
        let bytes = self.signed_frame(check.initiator_mac, ctx.mac(), body);
        ctx.send(bytes);
    }

    pub(super) fn on_command(&mut self, ctx: &mut Ctx<'_, Command>, _cmd: Command) {
        self.log(ctx.now(), "command ignored: central server takes none");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::KeyPair;
    use crate::simnet::{Action, NodeId};

    fn mac(last: u8) -> MacAddr {
        MacAddr([0x02, 0, 0, 0, 0, last])
    }

    fn ip(last: u8) -> Ipv4Addr {
        Ipv4Addr::new(10, 0, 0, last)
    }

    fn central() -> (CentralServer, SharedKey) {
        let root = KeyPair::from_seed([1; 32]);
        let identity = SignerIdentity::issue(&root, "central", [2; 32]);
        let key = SharedKey::new([7; 32]);
        (
            CentralServer::new(identity, key.clone(), CentralConfig::default()),
            key,
        )
    }

    fn drive(
        central: &mut CentralServer,
        now: Tick,
        f: impl FnOnce(&mut CentralServer, &mut Ctx<'_, Command>),
    ) -> Vec<Vec<u8>> {
        let mut actions: Vec<Action<Command>> = Vec::new();
        {
            let mut ctx = Ctx::detached(now, NodeId(0), mac(1), &mut actions);
            f(central, &mut ctx);
        }
        actions
            .iter()
            .filter_map(|a| a.as_send().map(|b| b.to_vec()))
            .collect()
    }

    fn tagged_ip_send(key: &SharedKey, ip_addr: Ipv4Addr, host: MacAddr) -> Vec<u8> {
        let mut frame = Frame {
            dest: mac(1),
            src: mac(2),
            body: FrameBody::IpSend {
                ip: ip_addr,
                mac: host,
                tag: [0; 32],
            },
        };
        tag_frame(key, &mut frame);
        encode_frame(&frame)
    }

    fn claim(src: MacAddr, claim_ip: Ipv4Addr, new_mac: MacAddr) -> Vec<u8> {
        encode_frame(&Frame {
            dest: mac(1),
            src,
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Reply,
                sender_mac: new_mac,
                sender_ip: claim_ip,
                target_mac: mac(1),
                target_ip: Ipv4Addr::UNSPECIFIED,
            }),
        })
    }

    #[test]
    fn verified_ip_send_installs_and_acks() {
        let (mut c, key) = central();
        let bytes = tagged_ip_send(&key, ip(5), mac(10));
        let out = drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &bytes));
        assert_eq!(c.table().get(&ip(5)), Some(&mac(10)));
        assert_eq!(out.len(), 1);
        let reply = decode_frame(&out[0]).unwrap();
        assert!(matches!(
            reply.body,
            FrameBody::IpReply { ack: true, .. }
        ));
        assert!(frame_tag_ok(&key, &reply));
    }

    #[test]
    fn flipped_payload_byte_means_bad_tag_and_no_entry() {
        let (mut c, key) = central();
        let mut bytes = tagged_ip_send(&key, ip(5), mac(10));
        bytes[15] ^= 0x01; // first IP octet; re-seal the FCS so only the tag fails
        let n = bytes.len();
        let fcs = crate::wire::compute_fcs(&bytes[..n - 4]);
        bytes[n - 4..].copy_from_slice(&fcs.to_be_bytes());
        let out = drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &bytes));
        assert!(c.table().is_empty());
        assert!(out.is_empty());
        assert!(c.table_log.is_empty());
    }

    #[test]
    fn claim_for_unknown_ip_is_ignored() {
        let (mut c, _key) = central();
        let bytes = claim(mac(66), ip(9), mac(66));
        let out = drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &bytes));
        assert!(out.is_empty());
        assert!(c.pending().is_empty());
        assert!(c.table().is_empty());
    }

    #[test]
    fn noop_claim_gets_immediate_ack_and_zero_probes() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));
        let bytes = claim(mac(10), ip(5), mac(10));
        let out = drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &bytes));
        assert_eq!(out.len(), 1);
        let frame = decode_frame(&out[0]).unwrap();
        assert!(matches!(frame.body, FrameBody::ArpAck { .. }));
        assert!(c.pending().is_empty());
    }

    #[test]
    fn change_claim_bursts_probes_then_commits_on_silence() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));

        let bytes = claim(mac(11), ip(5), mac(11));
        let out = drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &bytes));
        assert_eq!(out.len(), 50);
        for probe in &out {
            let frame = decode_frame(probe).unwrap();
            assert_eq!(frame.dest, mac(10));
            assert!(matches!(frame.body, FrameBody::ArpCheck { .. }));
        }
        let check = c.pending().get(&ip(5)).unwrap().clone();
        assert_eq!(check.old_mac, mac(10));
        assert_eq!(check.new_mac, mac(11));
        assert_eq!(check.probes_sent, 50);
        assert_eq!(check.deadline, 102);
        // table untouched until the deadline
        assert_eq!(c.table().get(&ip(5)), Some(&mac(10)));

        let out = drive(&mut c, 102, |c, ctx| {
            c.on_timer(ctx, token(TAG_CHECK_DEADLINE, ip(5)))
        });
        assert_eq!(c.table().get(&ip(5)), Some(&mac(11)));
        assert_eq!(out.len(), 1);
        let ack = decode_frame(&out[0]).unwrap();
        assert_eq!(ack.dest, mac(11));
        assert!(matches!(ack.body, FrameBody::ArpAck { .. }));
    }

    #[test]
    fn probe_reply_keeps_old_entry_and_notifies_initiator() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));
        let bytes = claim(mac(66), ip(5), mac(66));
        drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &bytes));

        // the old MAC answers one probe
        let reply = claim(mac(10), ip(5), mac(10));
        let out = drive(&mut c, 4, |c, ctx| c.on_frame(ctx, &reply));
        assert_eq!(c.table().get(&ip(5)), Some(&mac(10)));
        assert!(c.pending().is_empty());
        assert_eq!(out.len(), 1);
        let nochange = decode_frame(&out[0]).unwrap();
        assert_eq!(nochange.dest, mac(66));
        assert!(matches!(nochange.body, FrameBody::ArpNoChange { .. }));

        // the deadline later fires on nothing
        let out = drive(&mut c, 102, |c, ctx| {
            c.on_timer(ctx, token(TAG_CHECK_DEADLINE, ip(5)))
        });
        assert!(out.is_empty());
        assert_eq!(c.table().get(&ip(5)), Some(&mac(10)));
    }

    #[test]
    fn late_probe_reply_after_deadline_is_ignored() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));
        let bytes = claim(mac(11), ip(5), mac(11));
        drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &bytes));
        drive(&mut c, 102, |c, ctx| {
            c.on_timer(ctx, token(TAG_CHECK_DEADLINE, ip(5)))
        });
        assert_eq!(c.table().get(&ip(5)), Some(&mac(11)));

        // one tick after the deadline the old MAC's reply arrives
        let reply = claim(mac(10), ip(5), mac(10));
        let out = drive(&mut c, 103, |c, ctx| c.on_frame(ctx, &reply));
        assert!(out.is_empty());
        assert_eq!(c.table().get(&ip(5)), Some(&mac(11)));
        assert!(c.pending().is_empty());
    }

    #[test]
    fn duplicate_claim_while_pending_is_dropped() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));
        let first = claim(mac(11), ip(5), mac(11));
        let out = drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &first));
        assert_eq!(out.len(), 50);
        let second = claim(mac(12), ip(5), mac(12));
        let out = drive(&mut c, 3, |c, ctx| c.on_frame(ctx, &second));
        assert!(out.is_empty());
        assert_eq!(c.pending().get(&ip(5)).unwrap().new_mac, mac(11));
    }

    #[test]
    fn rate_limiter_drops_claim_floods_and_refills() {
        let (mut c, key) = central();
        for i in 0..30 {
            let install = tagged_ip_send(&key, ip(100 + i), mac(100 + i));
            drive(&mut c, 0, |c, ctx| c.on_frame(ctx, &install));
        }
        // 30 distinct-ip claims from one MAC in one tick: bucket capacity 10.
        let mut launched = 0;
        for i in 0..30u8 {
            let bytes = claim(mac(66), ip(100 + i), mac(66));
            let out = drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &bytes));
            if !out.is_empty() {
                launched += 1;
            }
        }
        assert_eq!(launched, 10);
        // 10 per 1000 ticks refills one token per 100 ticks.
        let bytes = claim(mac(66), ip(131), mac(66));
        let out = drive(&mut c, 50, |c, ctx| c.on_frame(ctx, &bytes));
        assert!(out.is_empty(), "no token yet at t=50");
        let install = tagged_ip_send(&key, ip(131), mac(131));
        drive(&mut c, 60, |c, ctx| c.on_frame(ctx, &install));
        let out = drive(&mut c, 101, |c, ctx| c.on_frame(ctx, &bytes));
        assert_eq!(out.len(), 50, "token refilled at t=101");
    }

    #[test]
    fn resolution_request_answered_from_table() {
        let (mut c, key) = central();
        let install = tagged_ip_send(&key, ip(5), mac(10));
        drive(&mut c, 1, |c, ctx| c.on_frame(ctx, &install));
        let request = encode_frame(&Frame {
            dest: MacAddr::BROADCAST,
            src: mac(3),
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Request,
                sender_mac: mac(3),
                sender_ip: ip(3),
                target_mac: MacAddr::ZERO,
                target_ip: ip(5),
            }),
        });
        let out = drive(&mut c, 2, |c, ctx| c.on_frame(ctx, &request));
        assert_eq!(out.len(), 1);
        let frame = decode_frame(&out[0]).unwrap();
        assert_eq!(frame.dest, mac(3));
        match frame.body {
            FrameBody::SignedArpReply { arp, .. } => {
                assert_eq!(arp.sender_ip, ip(5));
                assert_eq!(arp.sender_mac, mac(10));
                assert_eq!(arp.target_mac, mac(3));
            }
            other => panic!("expected signed reply, got {other:?}"),
        }

        // unknown IP: silence
        let miss = encode_frame(&Frame {
            dest: MacAddr::BROADCAST,
            src: mac(3),
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Request,
                sender_mac: mac(3),
                sender_ip: ip(3),
                target_mac: MacAddr::ZERO,
                target_ip: ip(99),
            }),
        });
        let out = drive(&mut c, 3, |c, ctx| c.on_frame(ctx, &miss));
        assert!(out.is_empty());
    }
}
