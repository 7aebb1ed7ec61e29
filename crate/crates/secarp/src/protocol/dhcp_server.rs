//! The DHCP server: standard four-message lease allocation, plus the secure
//! extension that reports every lease to the Central Server via IP_send and
//! retransmits until the IP_reply acknowledgement arrives.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use crate::crypto::{frame_tag_ok, tag_frame, SharedKey};
use crate::simnet::{Ctx, Tick, TimerToken};
use crate::wire::dhcp::{decode_dhcp, encode_dhcp, DhcpFrame, DhcpKind};
use crate::wire::{decode_frame, encode_frame, Frame, FrameBody, MacAddr};

use super::{token, token_ip, token_tag, Command, DhcpConfig, Mode, TAG_IP_SEND};

pub struct DhcpServer {
    mode: Mode,
    pool_base: Ipv4Addr,
    pool_size: u32,
    leases: BTreeMap<Ipv4Addr, MacAddr>,
    offers: BTreeMap<MacAddr, Ipv4Addr>,
    shared_key: SharedKey,
    central_mac: MacAddr,
    /// IP_send messages awaiting IP_reply, by lease IP.
    unacked: BTreeMap<Ipv4Addr, MacAddr>,
    config: DhcpConfig,
    pub events: Vec<String>,
}

impl DhcpServer {
    pub fn new(
        mode: Mode,
        pool_base: Ipv4Addr,
        pool_size: u32,
        shared_key: SharedKey,
        central_mac: MacAddr,
        config: DhcpConfig,
    ) -> Self {
        DhcpServer {
            mode,
            pool_base,
            pool_size,
            leases: BTreeMap::new(),
            offers: BTreeMap::new(),
            shared_key,
            central_mac,
            unacked: BTreeMap::new(),
            config,
            events: Vec::new(),
        }
    }

    pub fn leases(&self) -> &BTreeMap<Ipv4Addr, MacAddr> {
        &self.leases
    }

    fn log(&mut self, now: Tick, msg: impl Into<String>) {
        self.events.push(format!("t={now} {}", msg.into()));
    }

    fn pool_ip(&self, offset: u32) -> Ipv4Addr {
        Ipv4Addr::from(u32::from(self.pool_base) + offset)
    }

    /// Lowest pool address neither leased nor currently offered.
    fn next_free(&self) -> Option<Ipv4Addr> {
        (0..self.pool_size).map(|i| self.pool_ip(i)).find(|ip| {
            !self.leases.contains_key(ip) && !self.offers.values().any(|offered| offered == ip)
        })
    }

    fn send_ip_send(&self, ctx: &mut Ctx<'_, Command>, ip: Ipv4Addr, mac: MacAddr) {
        let mut frame = Frame {
            dest: self.central_mac,
            src: ctx.mac(),
            body: FrameBody::IpSend {
                ip,
                mac,
                tag: [0; 32],
            },
        };
        tag_frame(&self.shared_key, &mut frame);
        ctx.send(encode_frame(&frame));
    }

    pub(super) fn on_frame(&mut self, ctx: &mut Ctx<'_, Command>, bytes: &[u8]) {
        if let Ok(dhcp) = decode_dhcp(bytes) {
            self.on_dhcp(ctx, dhcp);
            return;
        }
        if let Ok(frame) = decode_frame(bytes) {
            if let FrameBody::IpReply { ip, ack, .. } = frame.body {
                if !frame_tag_ok(&self.shared_key, &frame) {
                    self.log(ctx.now(), format!("IP_reply for {ip} rejected: bad tag"));
                    return;
                }
                if ack && self.unacked.remove(&ip).is_some() {
                    self.log(ctx.now(), format!("IP_reply for {ip}: table update acknowledged"));
                }
            }
        }
    }

    fn on_dhcp(&mut self, ctx: &mut Ctx<'_, Command>, dhcp: DhcpFrame) {
        let now = ctx.now();
        match dhcp.kind {
            DhcpKind::Discover => {
                // Re-offer an existing lease for the same client, else the
                // next free address.
                let offered = self
                    .leases
                    .iter()
                    .find(|(_, &mac)| mac == dhcp.client_mac)
                    .map(|(&ip, _)| ip)
                    .or_else(|| self.next_free());
                let Some(ip) = offered else {
                    self.log(now, format!("pool exhausted: no offer for {}", dhcp.client_mac));
                    return;
                };
                self.offers.insert(dhcp.client_mac, ip);
                ctx.send(encode_dhcp(&DhcpFrame {
                    dest: dhcp.client_mac,
                    src: ctx.mac(),
                    kind: DhcpKind::Offer,
                    client_mac: dhcp.client_mac,
                    ip,
                    central_mac: MacAddr::ZERO,
                }));
            }
            DhcpKind::Request => {
                let renewal = self.leases.get(&dhcp.ip) == Some(&dhcp.client_mac);
                let offered = self.offers.get(&dhcp.client_mac) == Some(&dhcp.ip);
                if !renewal && !offered {
                    self.log(
                        now,
                        format!("request for {} by {} ignored: not offered", dhcp.ip, dhcp.client_mac),
                    );
                    return;
                }
                self.offers.remove(&dhcp.client_mac);
                self.leases.insert(dhcp.ip, dhcp.client_mac);
                let central_mac = match self.mode {
                    Mode::Secure => self.central_mac,
                    Mode::Baseline => MacAddr::ZERO,
                };
                ctx.send(encode_dhcp(&DhcpFrame {
                    dest: dhcp.client_mac,
                    src: ctx.mac(),
                    kind: DhcpKind::Ack,
                    client_mac: dhcp.client_mac,
                    ip: dhcp.ip,
                    central_mac,
                }));
                if renewal {
                    self.log(now, format!("lease {} renewed for {}", dhcp.ip, dhcp.client_mac));
                    return;
                }
                if self.mode == Mode::Secure {
                    self.unacked.insert(dhcp.ip, dhcp.client_mac);
                    self.send_ip_send(ctx, dhcp.ip, dhcp.client_mac);
                    ctx.set_timer(self.config.ip_send_retransmit, token(TAG_IP_SEND, dhcp.ip));
                }
            }
            DhcpKind::Offer | DhcpKind::Ack => {}
        }
    }

    pub(super) fn on_timer(&mut self, ctx: &mut Ctx<'_, Command>, timer: TimerToken) {
        if token_tag(timer) != TAG_IP_SEND {
            return;
        }
        let ip = token_ip(timer);
        let Some(&mac) = self.unacked.get(&ip) else {
            return;
        };
        self.log(ctx.now(), format!("IP_reply for {ip} missing: retransmitting IP_send"));
        self.send_ip_send(ctx, ip, mac);
        ctx.set_timer(self.config.ip_send_retransmit, token(TAG_IP_SEND, ip));
    }

    pub(super) fn on_command(&mut self, ctx: &mut Ctx<'_, Command>, _cmd: Command) {
        self.log(ctx.now(), "command ignored: dhcp server takes none");
    }
}
