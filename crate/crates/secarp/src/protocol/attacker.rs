//! Attacker behaviors: the two spoofing attacks from the threat model plus
//! the denial-of-service flood against the Central Server.

use std::net::Ipv4Addr;

use crate::simnet::{Ctx, Tick, TimerToken};
use crate::wire::{decode_frame, encode_frame, ArpOp, Frame, FrameBody, MacAddr, StdArp};

use super::{token, token_tag, Command, Mode, TAG_FLOOD};

/// What the attacker does when its `Act` command fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttackerStrategy {
    /// Forge one ARP reply claiming `victim_ip` maps to the attacker's own
    /// MAC — sent to the Central Server in secure mode, broadcast to poison
    /// host caches in baseline mode.
    SpoofMapping { victim_ip: Ipv4Addr },
    /// Race a genuine MAC change: assume the victim's vacated old MAC and
    /// answer the verification probes from it.
    RaceOldMac {
        victim_old_mac: MacAddr,
        victim_ip: Ipv4Addr,
    },
    /// Flood the Central Server with forged change claims, cycling the
    /// layer-2 source over `spoof_macs` to exhaust their rate-limit buckets.
    DosFloodCentral {
        claims_per_tick: u32,
        duration: Tick,
        spoof_macs: Vec<MacAddr>,
    },
    /// Inert: the victim-directed DOS is modeled by a delivery policy.
    DosVictim,
}

struct FloodState {
    until: Tick,
    counter: u32,
}

pub struct Attacker {
    mode: Mode,
    strategy: AttackerStrategy,
    central_mac: Option<MacAddr>,
    flood: Option<FloodState>,
    pub forged_claims_sent: u64,
    pub probes_answered: u64,
    pub nochange_received: u32,
    pub ack_received: u32,
    pub events: Vec<String>,
}

impl Attacker {
    pub fn new(mode: Mode, strategy: AttackerStrategy, central_mac: Option<MacAddr>) -> Self {
        Attacker {
            mode,
            strategy,
            central_mac,
            flood: None,
            forged_claims_sent: 0,
            probes_answered: 0,
            nochange_received: 0,
            ack_received: 0,
            events: Vec::new(),
        }
    }

    fn log(&mut self, now: Tick, msg: impl Into<String>) {
        self.events.push(format!("t={now} {}", msg.into()));
    }

    fn forged_claim(src: MacAddr, dest: MacAddr, ip: Ipv4Addr, claimed_mac: MacAddr) -> Vec<u8> {
        encode_frame(&Frame {
            dest,
            src,
            body: FrameBody::StdArp(StdArp {
                op: ArpOp::Reply,
                sender_mac: claimed_mac,
                sender_ip: ip,
                target_mac: dest,
                target_ip: Ipv4Addr::UNSPECIFIED,
            }),
        })
    }

    fn flood_burst(&mut self, ctx: &mut Ctx<'_, Command>) {
        let AttackerStrategy::DosFloodCentral {
            claims_per_tick,
            spoof_macs,
            ..
        } = &self.strategy
        else {
            return;
        };
        let Some(central) = self.central_mac else {
            return;
        };
        let Some(flood) = &mut self.flood else {
            return;
        };
        for _ in 0..*claims_per_tick {
            let spoofed = spoof_macs[flood.counter as usize % spoof_macs.len()];
            // Claims target addresses outside the pool; their job is to
            // drain buckets, not to survive the table lookup.
            let fake_ip = Ipv4Addr::new(172, 16, (flood.counter >> 8) as u8, flood.counter as u8);
            let bytes = Self::forged_claim(spoofed, central, fake_ip, ctx.mac());
            ctx.send(bytes);
            flood.counter = flood.counter.wrapping_add(1);
            self.forged_claims_sent += 1;
        }
        if ctx.now() < flood.until {
            ctx.set_timer(1, token(TAG_FLOOD, Ipv4Addr::UNSPECIFIED));
        } else {
            self.flood = None;
            self.log(ctx.now(), "flood window over".to_string());
        }
    }

    pub(super) fn on_command(&mut self, ctx: &mut Ctx<'_, Command>, cmd: Command) {
        if cmd != Command::Act {
            self.log(ctx.now(), "host command ignored by attacker".to_string());
            return;
        }
        let now = ctx.now();
        match self.strategy.clone() {
            AttackerStrategy::SpoofMapping { victim_ip } => {
                let bytes = match (self.mode, self.central_mac) {
                    (Mode::Secure, Some(central)) => {
                        self.log(now, format!("forged claim {victim_ip} -> {} to central", ctx.mac()));
                        Self::forged_claim(ctx.mac(), central, victim_ip, ctx.mac())
                    }
                    (Mode::Secure, None) => {
                        self.log(now, "spoof aborted: central unknown".to_string());
                        return;
                    }
                    (Mode::Baseline, _) => {
                        self.log(now, format!("broadcast poison {victim_ip} -> {}", ctx.mac()));
                        Self::forged_claim(ctx.mac(), MacAddr::BROADCAST, victim_ip, ctx.mac())
                    }
                };
                self.forged_claims_sent += 1;
                ctx.send(bytes);
            }
            AttackerStrategy::RaceOldMac { victim_old_mac, .. } => {
                self.log(now, format!("assuming vacated MAC {victim_old_mac}"));
                ctx.rebind(victim_old_mac);
            }
            AttackerStrategy::DosFloodCentral { duration, .. } => {
                self.log(now, format!("flood starts, window {duration} ticks"));
                self.flood = Some(FloodState {
                    until: now + duration,
                    counter: 0,
                });
                self.flood_burst(ctx);
            }
            AttackerStrategy::DosVictim => {}
        }
    }

    pub(super) fn on_frame(&mut self, ctx: &mut Ctx<'_, Command>, bytes: &[u8]) {
        let Ok(frame) = decode_frame(bytes) else {
            return;
        };
        match frame.body {
            FrameBody::ArpCheck { ip, .. } => {
                // The race: answer probes for the victim's IP from the old
                // MAC we now hold. No signature check — the attacker does
                // not care whether the probe is genuine.
                if let AttackerStrategy::RaceOldMac { victim_ip, .. } = &self.strategy {
                    if ip == *victim_ip {
                        self.probes_answered += 1;
                        ctx.send(encode_frame(&Frame {
                            dest: frame.src,
                            src: ctx.mac(),
                            body: FrameBody::StdArp(StdArp {
                                op: ArpOp::Reply,
                                sender_mac: ctx.mac(),
                                sender_ip: ip,
                                target_mac: frame.src,
                                target_ip: Ipv4Addr::UNSPECIFIED,
                            }),
                        }));
                    }
                }
            }
            FrameBody::ArpNoChange { ip, .. } => {
                self.nochange_received += 1;
                self.log(ctx.now(), format!("received ARP_NoChange for {ip}"));
            }
            FrameBody::ArpAck { ip, .. } => {
                self.ack_received += 1;
                self.log(ctx.now(), format!("received ARP_Ack for {ip}"));
            }
            _ => {}
        }
    }

    pub(super) fn on_timer(&mut self, ctx: &mut Ctx<'_, Command>, timer: TimerToken) {
        if token_tag(timer) == TAG_FLOOD {
            self.flood_burst(ctx);
        }
    }
}
