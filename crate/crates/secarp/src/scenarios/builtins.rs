//! Canned scenarios, one per protocol claim: the join/resolve/MAC-change
//! message-count comparisons, both spoofing attacks, the flood against the
//! Central Server, and the Monte Carlo probe-detection experiment.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use crate::protocol::Mode;
use crate::wire::MacAddr;

use super::{
    AttackerSpec, Expectations, Scenario, ScriptEvent, StrategySpec, Verdict,
};

const MAC_A: MacAddr = MacAddr([0x02, 0, 0, 0, 0, 0x0A]);
const MAC_B: MacAddr = MacAddr([0x02, 0, 0, 0, 0, 0x0B]);
const MAC_VICTIM: MacAddr = MacAddr([0x02, 0, 0, 0, 0, 0x0C]);
const MAC_A_NEW: MacAddr = MacAddr([0x02, 0, 0, 0, 0, 0x1A]);
const MAC_VICTIM_NEW: MacAddr = MacAddr([0x02, 0, 0, 0, 0, 0x1F]);
const MAC_ATTACKER: MacAddr = MacAddr([0x02, 0x66, 0, 0, 0, 0x66]);

// Leases are granted in join order from the pool base.
const IP_FIRST: Ipv4Addr = Ipv4Addr::new(10, 0, 0, 10);
const IP_SECOND: Ipv4Addr = Ipv4Addr::new(10, 0, 0, 11);

pub fn builtin_names() -> &'static [&'static str] {
    &[
        "join",
        "resolve",
        "mac-change-clean",
        "attack-type1",
        "attack-type2",
        "dos-central",
        "dos-victim-montecarlo",
    ]
}

fn host(name: &str, mac: MacAddr) -> super::HostSpec {
    super::HostSpec {
        name: name.to_string(),
        mac,
    }
}

fn counts(entries: &[(&str, u64)]) -> BTreeMap<String, u64> {
    entries
        .iter()
        .map(|(label, count)| (label.to_string(), *count))
        .collect()
}

/// A builtin by name and mode. Attack-type2 and the DOS scenarios exist only
/// in secure mode; the rest come in both flavors.
pub fn builtin(name: &str, mode: Mode) -> Option<Scenario> {
    let join_cost = match mode {
        Mode::Secure => 6,
        Mode::Baseline => 4,
    };
    let base = Scenario {
        name: name.to_string(),
        mode,
        ..Scenario::default()
    };
    let scenario = match name {
        "join" => Scenario {
            hosts: vec![host("a", MAC_A)],
            script: vec![ScriptEvent::Join {
                at: 0,
                host: "a".into(),
            }],
            expect: Expectations {
                episode_counts: counts(&[("join:a", join_cost)]),
                ..Expectations::default()
            },
            ..base
        },
        "resolve" => Scenario {
            hosts: vec![host("a", MAC_A), host("b", MAC_B)],
            script: vec![
                ScriptEvent::Join {
                    at: 0,
                    host: "a".into(),
                },
                ScriptEvent::Join {
                    at: 20,
                    host: "b".into(),
                },
                ScriptEvent::Resolve {
                    at: 50,
                    host: "a".into(),
                    target_ip: IP_SECOND,
                },
            ],
            expect: Expectations {
                episode_counts: counts(&[
                    ("join:a", join_cost),
                    ("join:b", join_cost),
                    ("resolve:a->10.0.0.11", 2),
                ]),
                ..Expectations::default()
            },
            ..base
        },
        "mac-change-clean" => Scenario {
            hosts: vec![host("a", MAC_A), host("b", MAC_B)],
            script: vec![
                ScriptEvent::Join {
                    at: 0,
                    host: "a".into(),
                },
                ScriptEvent::Join {
                    at: 20,
                    host: "b".into(),
                },
                ScriptEvent::ChangeMac {
                    at: 50,
                    host: "a".into(),
                    new_mac: MAC_A_NEW,
                },
            ],
            expect: Expectations {
                episode_counts: counts(&[
                    ("join:a", join_cost),
                    ("join:b", join_cost),
                    (
                        "mac-change:a",
                        match mode {
                            Mode::Secure => 52,
                            Mode::Baseline => 1,
                        },
                    ),
                ]),
                ..Expectations::default()
            },
            ..base
        },
        "attack-type1" => Scenario {
            hosts: vec![host("victim", MAC_VICTIM), host("b", MAC_B)],
            attacker: Some(AttackerSpec {
                mac: MAC_ATTACKER,
                strategy: StrategySpec::SpoofMapping {
                    victim_ip: IP_FIRST,
                },
            }),
            script: vec![
                ScriptEvent::Join {
                    at: 0,
                    host: "victim".into(),
                },
                ScriptEvent::Join {
                    at: 20,
                    host: "b".into(),
                },
                ScriptEvent::Attack { at: 50 },
            ],
            expect: Expectations {
                verdict: Some(match mode {
                    Mode::Secure => Verdict::Blocked,
                    Mode::Baseline => Verdict::Succeeded,
                }),
                ..Expectations::default()
            },
            ..base
        },
        "attack-type2" => {
            if mode == Mode::Baseline {
                return None;
            }
            Scenario {
                hosts: vec![host("victim", MAC_VICTIM)],
                attacker: Some(AttackerSpec {
                    mac: MAC_ATTACKER,
                    strategy: StrategySpec::RaceOldMac {
                        victim_old_mac: MAC_VICTIM,
                        victim_ip: IP_FIRST,
                    },
                }),
                script: vec![
                    ScriptEvent::Join {
                        at: 0,
                        host: "victim".into(),
                    },
                    ScriptEvent::ChangeMac {
                        at: 50,
                        host: "victim".into(),
                        new_mac: MAC_VICTIM_NEW,
                    },
                    ScriptEvent::Attack { at: 51 },
                ],
                expect: Expectations {
                    verdict: Some(Verdict::BlockedWithRecovery),
                    ..Expectations::default()
                },
                ..base
            }
        }
        "dos-central" => {
            if mode == Mode::Baseline {
                return None;
            }
            Scenario {
                hosts: vec![host("victim", MAC_VICTIM), host("b", MAC_B)],
                attacker: Some(AttackerSpec {
                    mac: MAC_ATTACKER,
                    strategy: StrategySpec::DosFloodCentral {
                        claims_per_tick: 2,
                        duration: 1000,
                        spoof_macs: vec![
                            MacAddr([0x02, 0x66, 0, 0, 0, 0x01]),
                            MacAddr([0x02, 0x66, 0, 0, 0, 0x02]),
                            MacAddr([0x02, 0x66, 0, 0, 0, 0x03]),
                            MacAddr([0x02, 0x66, 0, 0, 0, 0x04]),
                        ],
                    },
                }),
                script: vec![
                    ScriptEvent::Join {
                        at: 0,
                        host: "victim".into(),
                    },
                    ScriptEvent::Join {
                        at: 20,
                        host: "b".into(),
                    },
                    ScriptEvent::Attack { at: 100 },
                    // Mid-phase in the aggregate bucket's 50-tick refill
                    // cycle, and the 300-tick retry cadence keeps every
                    // in-flood retry mid-phase too, so the genuine claim is
                    // shed until the flood window closes.
                    ScriptEvent::ChangeMac {
                        at: 425,
                        host: "victim".into(),
                        new_mac: MAC_VICTIM_NEW,
                    },
                ],
                max_time: 20_000,
                expect: Expectations {
                    verdict: Some(Verdict::Blocked),
                    ..Expectations::default()
                },
                ..base
            }
        }
        "dos-victim-montecarlo" => {
            if mode == Mode::Baseline {
                return None;
            }
            Scenario {
                hosts: vec![host("victim", MAC_VICTIM)],
                attacker: Some(AttackerSpec {
                    mac: MAC_ATTACKER,
                    strategy: StrategySpec::SpoofMapping {
                        victim_ip: IP_FIRST,
                    },
                }),
                script: vec![
                    ScriptEvent::Join {
                        at: 0,
                        host: "victim".into(),
                    },
                    // The DOS against the victim: nine of ten frames toward
                    // it are lost, probes included.
                    ScriptEvent::SetPolicy {
                        at: 30,
                        toward: "victim".into(),
                        p_drop: 0.9,
                        delay: 1,
                    },
                    ScriptEvent::Attack { at: 40 },
                ],
                repeat: 10_000,
                expect: Expectations {
                    // 1 - 0.9^50 = 0.994846, tolerance ±0.005.
                    mc_estimate_within: Some((0.98985, 0.99985)),
                    ..Expectations::default()
                },
                ..base
            }
        }
        _ => return None,
    };
    Some(scenario)
}

/// All builtins in secure mode plus the baseline variants used by the §5
/// comparisons and the vulnerability contrast.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut scenarios = Vec::new();
    for name in builtin_names() {
        if let Some(s) = builtin(name, Mode::Secure) {
            scenarios.push(s);
        }
    }
    for name in ["join", "resolve", "mac-change-clean", "attack-type1"] {
        if let Some(s) = builtin(name, Mode::Baseline) {
            scenarios.push(s);
        }
    }
    scenarios
}
