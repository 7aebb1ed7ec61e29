//! Acceptance suite. Each test checks one advertised property of the
//! artifact end to end and prints a PASS line; a failed assertion is the
//! FAIL line. Tolerances are pinned in the assertions.

use std::collections::BTreeMap;
use std::net::Ipv4Addr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secarp::crypto::{
    derive_bytes, issue_certificate, sign_frame, tag_frame, verify, verify_tag, KeyPair,
    SharedKey, SignerIdentity,
};
use secarp::protocol::{
    Attacker, AttackerStrategy, CentralConfig, CentralServer, Command, DhcpConfig, DhcpServer,
    Host, HostConfig, Mode, ProtocolNode,
};
use secarp::scenarios::{builtin, builtin_scenarios, run_scenario, Verdict};
use secarp::simnet::{Simulation, Tick};
use secarp::wire::{
    compute_fcs, decode_frame, encode_frame, ArpOp, Frame, FrameBody, FrameKind, MacAddr,
    SignedAuth, StdArp,
};

fn mac(last: u8) -> MacAddr {
    MacAddr([0x02, 0, 0, 0, 0, last])
}

fn ip(last: u8) -> Ipv4Addr {
    Ipv4Addr::new(10, 0, 0, last)
}

fn run_builtin(name: &str, mode: Mode, seed: u64) -> secarp::scenarios::Report {
    let mut scenario = builtin(name, mode).unwrap_or_else(|| panic!("no builtin {name}"));
    scenario.seed = seed;
    run_scenario(&scenario).expect("scenario runs").report
}

fn episode_total(report: &secarp::scenarios::Report, label: &str) -> u64 {
    report
        .episodes
        .iter()
        .find(|e| e.label == label)
        .unwrap_or_else(|| panic!("episode {label:?} missing"))
        .total
}

/// Criterion 1: the §5 message tallies, exactly, each scenario in under a
/// second.
#[test]
fn criterion_1_message_counts() {
    let cases: [(&str, Mode, &str, u64); 6] = [
        ("join", Mode::Secure, "join:a", 6),
        ("join", Mode::Baseline, "join:a", 4),
        ("resolve", Mode::Secure, "resolve:a->10.0.0.11", 2),
        ("resolve", Mode::Baseline, "resolve:a->10.0.0.11", 2),
        ("mac-change-clean", Mode::Secure, "mac-change:a", 52),
        ("mac-change-clean", Mode::Baseline, "mac-change:a", 1),
    ];
    for (name, mode, label, expected) in cases {
        let started = Instant::now();
        let report = run_builtin(name, mode, 7);
        let elapsed = started.elapsed();
        assert_eq!(
            episode_total(&report, label),
            expected,
            "{name} ({}) episode {label}",
            mode.label()
        );
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "{name} ({}) took {elapsed:?}",
            mode.label()
        );
    }
    // The 52 decomposes as 1 claim + 50 probes + 1 ack.
    let report = run_builtin("mac-change-clean", Mode::Secure, 7);
    let change = report
        .episodes
        .iter()
        .find(|e| e.label == "mac-change:a")
        .unwrap();
    assert_eq!(change.by_kind.get("arp-reply"), Some(&1));
    assert_eq!(change.by_kind.get("ARP_Check"), Some(&50));
    assert_eq!(change.by_kind.get("ARP_Ack"), Some(&1));
    println!("ACCEPTANCE 1 (message counts 6/4, 2/2, 52/1): PASS");
}

/// Criterion 2: spoofed-mapping attack blocked on 100/100 seeds; the forged
/// mapping never enters the table at any instant.
#[test]
fn criterion_2_attack_type1_blocked_all_seeds() {
    let attacker_mac = MacAddr([0x02, 0x66, 0, 0, 0, 0x66]);
    for seed in 1..=100 {
        let report = run_builtin("attack-type1", Mode::Secure, seed);
        assert_eq!(report.verdict, Verdict::Blocked, "seed {seed}");
        assert!(
            report.table_history.iter().all(|e| e.mac != attacker_mac),
            "seed {seed}: forged mapping entered the table: {:?}",
            report.table_history
        );
        assert_eq!(
            report.table.get(&ip(10)),
            Some(&mac(0x0C)),
            "seed {seed}: victim entry lost"
        );
    }
    println!("ACCEPTANCE 2 (attack type 1 blocked, 100/100 seeds): PASS");
}

/// Criterion 3: the raced MAC change is refused with ARP_NoChange and the
/// genuine host recovers via a fresh join, on 100/100 seeds.
#[test]
fn criterion_3_attack_type2_recovery_all_seeds() {
    for seed in 1..=100 {
        let report = run_builtin("attack-type2", Mode::Secure, seed);
        assert_eq!(report.verdict, Verdict::BlockedWithRecovery, "seed {seed}");
        let victim = &report.hosts["victim"];
        assert!(
            victim.outcomes.iter().any(|o| o.contains("ARP_NoChange")),
            "seed {seed}: no ARP_NoChange delivered: {:?}",
            victim.outcomes
        );
        assert_eq!(victim.joins_completed, 2, "seed {seed}");
        let new_ip = victim.ip.expect("fresh lease");
        assert_eq!(
            report.table.get(&new_ip),
            Some(&victim.mac),
            "seed {seed}: recovered entry wrong"
        );
    }
    println!("ACCEPTANCE 3 (attack type 2 recovery, 100/100 seeds): PASS");
}

/// Criterion 4: with per-probe delivery probability 0.1 and 50 probes, the
/// old entry is kept with frequency within ±0.005 of 1 − 0.9^50, over
/// 10,000 trials, in under 10 s.
#[test]
fn criterion_4_detection_probability_monte_carlo() {
    let expected = 1.0 - 0.9f64.powi(50); // independent closed form
    let started = Instant::now();
    let scenario = builtin("dos-victim-montecarlo", Mode::Secure).unwrap();
    assert_eq!(scenario.repeat, 10_000);
    let report = run_scenario(&scenario).unwrap().report;
    let elapsed = started.elapsed();
    let mc = report.monte_carlo.expect("monte carlo aggregate");
    assert_eq!(mc.trials, 10_000);
    assert!(
        (mc.estimate - expected).abs() <= 0.005,
        "estimate {} vs closed form {expected}",
        mc.estimate
    );
    let se_expected = (mc.estimate * (1.0 - mc.estimate) / mc.trials as f64).sqrt();
    assert!((mc.std_error - se_expected).abs() < 1e-12);
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 (detection probability {:.5} ≈ {expected:.5} ± 0.005, {} trials): PASS",
        mc.estimate, mc.trials
    );
}

/// Criterion 5: the same attack that baseline mode cannot stop is blocked in
/// secure mode.
#[test]
fn criterion_5_baseline_vulnerability_contrast() {
    let baseline = run_builtin("attack-type1", Mode::Baseline, 7);
    assert_eq!(baseline.verdict, Verdict::Succeeded);
    let attacker_mac = MacAddr([0x02, 0x66, 0, 0, 0, 0x66]);
    let poisoned = baseline
        .hosts
        .values()
        .any(|h| h.cache.get(&ip(10)) == Some(&attacker_mac));
    assert!(poisoned, "baseline cache must be poisoned");

    let secure = run_builtin("attack-type1", Mode::Secure, 7);
    assert_eq!(secure.verdict, Verdict::Blocked);
    assert!(secure
        .hosts
        .values()
        .all(|h| h.cache.get(&ip(10)) != Some(&attacker_mac)));
    println!("ACCEPTANCE 5 (baseline poisoned, secure blocked): PASS");
}

// --- criterion 6 support -------------------------------------------------

/// Independent bitwise CRC-32 oracle (reflected, IEEE 802.3 polynomial).
fn crc32_reference(data: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &byte in data {
        crc ^= u32::from(byte);
        for _ in 0..8 {
            crc = if crc & 1 != 0 {
                (crc >> 1) ^ 0xEDB8_8320
            } else {
                crc >> 1
            };
        }
    }
    crc ^ 0xFFFF_FFFF
}

fn gen_mac(rng: &mut ChaCha8Rng) -> MacAddr {
    MacAddr(rng.random())
}

fn gen_ip(rng: &mut ChaCha8Rng) -> Ipv4Addr {
    Ipv4Addr::from(rng.random::<u32>())
}

fn gen_arp(rng: &mut ChaCha8Rng) -> StdArp {
    StdArp {
        op: if rng.random() {
            ArpOp::Request
        } else {
            ArpOp::Reply
        },
        sender_mac: gen_mac(rng),
        sender_ip: gen_ip(rng),
        target_mac: gen_mac(rng),
        target_ip: gen_ip(rng),
    }
}

fn gen_signed_auth(rng: &mut ChaCha8Rng) -> SignedAuth {
    let mut signature = [0u8; 64];
    rng.fill(&mut signature[..]);
    let mut certificate = vec![0u8; rng.random_range(0..200)];
    rng.fill(&mut certificate[..]);
    SignedAuth {
        signature,
        certificate,
    }
}

fn gen_frame(rng: &mut ChaCha8Rng, variant: usize) -> Frame {
    let body = match variant {
        0 => FrameBody::IpSend {
            ip: gen_ip(rng),
            mac: gen_mac(rng),
            tag: rng.random(),
        },
        1 => FrameBody::IpReply {
            ip: gen_ip(rng),
            mac: gen_mac(rng),
            ack: rng.random(),
            tag: rng.random(),
        },
        2 => FrameBody::ArpCheck {
            ip: gen_ip(rng),
            auth: gen_signed_auth(rng),
        },
        3 => FrameBody::ArpNoChange {
            ip: gen_ip(rng),
            auth: gen_signed_auth(rng),
        },
        4 => FrameBody::ArpAck {
            ip: gen_ip(rng),
            auth: gen_signed_auth(rng),
        },
        5 => FrameBody::SignedArpReply {
            arp: gen_arp(rng),
            auth: gen_signed_auth(rng),
        },
        _ => FrameBody::StdArp(gen_arp(rng)),
    };
    Frame {
        dest: gen_mac(rng),
        src: gen_mac(rng),
        body,
    }
}

/// One golden frame per message type with recognizable field values.
fn golden_frames() -> Vec<(&'static str, Frame)> {
    let auth = SignedAuth {
        signature: [0xAB; 64],
        certificate: vec![0xCD; 40],
    };
    let arp = StdArp {
        op: ArpOp::Reply,
        sender_mac: MacAddr([0x31; 6]),
        sender_ip: Ipv4Addr::new(10, 0, 0, 7),
        target_mac: MacAddr([0x32; 6]),
        target_ip: Ipv4Addr::new(10, 0, 0, 9),
    };
    let dest = MacAddr([0x21; 6]);
    let src = MacAddr([0x22; 6]);
    vec![
        (
            "IP_send",
            Frame {
                dest,
                src,
                body: FrameBody::IpSend {
                    ip: Ipv4Addr::new(10, 0, 0, 7),
                    mac: MacAddr([0x41; 6]),
                    tag: [0x51; 32],
                },
            },
        ),
        (
            "IP_reply",
            Frame {
                dest,
                src,
                body: FrameBody::IpReply {
                    ip: Ipv4Addr::new(10, 0, 0, 7),
                    mac: MacAddr([0x41; 6]),
                    ack: true,
                    tag: [0x51; 32],
                },
            },
        ),
        (
            "ARP_Check",
            Frame {
                dest,
                src,
                body: FrameBody::ArpCheck {
                    ip: Ipv4Addr::new(10, 0, 0, 7),
                    auth: auth.clone(),
                },
            },
        ),
        (
            "ARP_NoChange",
            Frame {
                dest,
                src,
                body: FrameBody::ArpNoChange {
                    ip: Ipv4Addr::new(10, 0, 0, 7),
                    auth: auth.clone(),
                },
            },
        ),
        (
            "ARP_Ack",
            Frame {
                dest,
                src,
                body: FrameBody::ArpAck {
                    ip: Ipv4Addr::new(10, 0, 0, 7),
                    auth: auth.clone(),
                },
            },
        ),
        (
            "signed-ARP-reply",
            Frame {
                dest,
                src,
                body: FrameBody::SignedArpReply { arp, auth },
            },
        ),
        ("std-ARP", Frame {
            dest,
            src,
            body: FrameBody::StdArp(arp),
        }),
    ]
}

struct FieldCheck {
    name: &'static str,
    offset: usize,
    expected: Vec<u8>,
}

fn field(name: &'static str, offset: usize, expected: &[u8]) -> FieldCheck {
    FieldCheck {
        name,
        offset,
        expected: expected.to_vec(),
    }
}

/// The enumerated field layouts: every field's offset, width, and content
/// for the golden frames, tiling each frame completely.
fn layout_tables() -> Vec<(&'static str, Vec<FieldCheck>)> {
    let sig = [0xAB; 64];
    let cert = [0xCD; 40];
    let tag = [0x51; 32];
    let common = |ethertype: u16| {
        vec![
            field("dest", 0, &[0x21; 6]),
            field("src", 6, &[0x22; 6]),
            field("ethertype", 12, &ethertype.to_be_bytes()),
        ]
    };
    let arp_payload = |at: usize| {
        vec![
            field("htype", at, &[0, 1]),
            field("ptype", at + 2, &[0x08, 0x00]),
            field("hlen", at + 4, &[6]),
            field("plen", at + 5, &[4]),
            field("oper", at + 6, &[0, 2]),
            field("sender_mac", at + 8, &[0x31; 6]),
            field("sender_ip", at + 14, &[10, 0, 0, 7]),
            field("target_mac", at + 18, &[0x32; 6]),
            field("target_ip", at + 24, &[10, 0, 0, 9]),
        ]
    };
    let signed_auth = |at: usize| {
        let mut fields = vec![
            field("auth_kind", at, &[0x02]),
            field("signature", at + 1, &sig),
            field("cert_len", at + 65, &[0, 40]),
            field("certificate", at + 67, &cert),
        ];
        fields.push(FieldCheck {
            name: "fcs",
            offset: at + 107,
            expected: Vec::new(), // checked against the CRC oracle
        });
        fields
    };

    let mut tables = Vec::new();

    let mut ip_send = common(0x88B5);
    ip_send.push(field("msg_type", 14, &[0x01]));
    ip_send.push(field("ip", 15, &[10, 0, 0, 7]));
    ip_send.push(field("host_mac", 19, &[0x41; 6]));
    ip_send.push(field("auth_kind", 25, &[0x01]));
    ip_send.push(field("tag", 26, &tag));
    ip_send.push(FieldCheck {
        name: "fcs",
        offset: 58,
        expected: Vec::new(),
    });
    tables.push(("IP_send", ip_send));

    let mut ip_reply = common(0x88B5);
    ip_reply.push(field("msg_type", 14, &[0x02]));
    ip_reply.push(field("ip", 15, &[10, 0, 0, 7]));
    ip_reply.push(field("host_mac", 19, &[0x41; 6]));
    ip_reply.push(field("ack", 25, &[0x01]));
    ip_reply.push(field("auth_kind", 26, &[0x01]));
    ip_reply.push(field("tag", 27, &tag));
    ip_reply.push(FieldCheck {
        name: "fcs",
        offset: 59,
        expected: Vec::new(),
    });
    tables.push(("IP_reply", ip_reply));

    for (name, code, marker) in [
        ("ARP_Check", 0x03u8, b"ACH"),
        ("ARP_NoChange", 0x04, b"ANC"),
        ("ARP_Ack", 0x05, b"ACK"),
    ] {
        let mut t = common(0x88B5);
        t.push(field("msg_type", 14, &[code]));
        t.push(field("marker", 15, marker));
        t.push(field("ip", 18, &[10, 0, 0, 7]));
        t.extend(signed_auth(22));
        tables.push((name, t));
    }

    let mut signed_reply = common(0x88B5);
    signed_reply.push(field("msg_type", 14, &[0x06]));
    signed_reply.extend(arp_payload(15));
    signed_reply.extend(signed_auth(43));
    tables.push(("signed-ARP-reply", signed_reply));

    let mut std_arp = common(0x0806);
    std_arp.extend(arp_payload(14));
    std_arp.push(FieldCheck {
        name: "fcs",
        offset: 42,
        expected: Vec::new(),
    });
    tables.push(("std-ARP", std_arp));

    tables
}

/// Criterion 6: round-trip identity for 10,000 random frames of every type,
/// 100% rejection of single-byte corruptions of one golden frame per type,
/// and field offsets/widths pinned by a layout table.
#[test]
fn criterion_6_codec_properties() {
    // Round trips.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DEC);
    for variant in 0..7 {
        for _ in 0..10_000 {
            let frame = gen_frame(&mut rng, variant);
            let bytes = encode_frame(&frame);
            assert_eq!(decode_frame(&bytes).expect("round trip decodes"), frame);
        }
    }

    // Corruption sweeps and the independent FCS oracle.
    for (name, frame) in golden_frames() {
        let bytes = encode_frame(&frame);
        let fcs = u32::from_be_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
        assert_eq!(
            fcs,
            crc32_reference(&bytes[..bytes.len() - 4]),
            "{name}: trailer disagrees with the reference CRC-32"
        );
        assert_eq!(fcs, compute_fcs(&bytes[..bytes.len() - 4]));
        let mut rejected = 0usize;
        let mut total = 0usize;
        for position in 0..bytes.len() {
            for pattern in [0x01u8, 0x80, 0xFF] {
                let mut corrupt = bytes.clone();
                corrupt[position] ^= pattern;
                total += 1;
                if decode_frame(&corrupt).is_err() {
                    rejected += 1;
                }
            }
        }
        assert_eq!(rejected, total, "{name}: some corruption went undetected");
    }

    // Layout table.
    let frames: BTreeMap<&str, Frame> = golden_frames().into_iter().collect();
    for (name, fields) in layout_tables() {
        let bytes = encode_frame(&frames[name]);
        let mut covered = 0usize;
        for check in &fields {
            if check.name == "fcs" {
                assert_eq!(
                    check.offset + 4,
                    bytes.len(),
                    "{name}: fcs must be the final 4 bytes"
                );
                covered += 4;
                continue;
            }
            assert_eq!(
                &bytes[check.offset..check.offset + check.expected.len()],
                check.expected.as_slice(),
                "{name}: field {} at offset {}",
                check.name,
                check.offset
            );
            covered += check.expected.len();
        }
        assert_eq!(covered, bytes.len(), "{name}: layout table must tile the frame");
    }
    println!("ACCEPTANCE 6 (codec round-trip, corruption rejection, layout): PASS");
}

/// Criterion 7: zero false accepts over 10,000 forged tags and 10,000
/// forged signatures; receivers reject tampered signed frames without
/// touching table or cache.
#[test]
fn criterion_7_auth_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA07);

    let key = SharedKey::new(derive_bytes(1, "tag-key"));
    let msg = b"IP_send 10.0.0.5 02:00:00:00:00:0a";
    let mut accepts = 0;
    for _ in 0..10_000 {
        let forged: [u8; 32] = rng.random();
        if verify_tag(&key, msg, &forged) {
            accepts += 1;
        }
    }
    assert_eq!(accepts, 0, "forged tags accepted");

    let root = KeyPair::from_seed(derive_bytes(2, "root"));
    let subject = KeyPair::from_seed(derive_bytes(3, "subject"));
    let cert = issue_certificate(&root, "central", &subject.public_bytes());
    let mut accepts = 0;
    for _ in 0..10_000 {
        let mut forged = [0u8; 64];
        rng.fill(&mut forged[..]);
        if verify(&cert, msg, &forged, &root.trust_root()) {
            accepts += 1;
        }
    }
    assert_eq!(accepts, 0, "forged signatures accepted");

    // Receivers: a simulation seeded with one honest join, then bombarded
    // with tampered frames. Neither the table nor any cache may move.
    let seed = 42;
    let root = KeyPair::from_seed(derive_bytes(seed, "trust-root"));
    let identity = SignerIdentity::issue(&root, "central-server", derive_bytes(seed, "central"));
    let shared = SharedKey::new(derive_bytes(seed, "dhcp-central"));
    let central_mac = mac(0x01);
    let dhcp_mac = mac(0x02);
    let host_mac = mac(0x0A);

    let mut sim: Simulation<ProtocolNode> = Simulation::new(seed);
    let central_id = sim
        .register_node(
            central_mac,
            ProtocolNode::Central(CentralServer::new(
                identity.clone(),
                shared.clone(),
                CentralConfig::default(),
            )),
        )
        .unwrap();
    sim.register_node(
        dhcp_mac,
        ProtocolNode::Dhcp(DhcpServer::new(
            Mode::Secure,
            ip(10),
            8,
            shared.clone(),
            central_mac,
            DhcpConfig::default(),
        )),
    )
    .unwrap();
    let host_id = sim
        .register_node(
            host_mac,
            ProtocolNode::Host(Host::new(
                "h",
                Mode::Secure,
                root.trust_root(),
                HostConfig::default(),
            )),
        )
        .unwrap();
    let attacker_id = sim
        .register_node(
            MacAddr([0x02, 0x66, 0, 0, 0, 0x66]),
            ProtocolNode::Attacker(Attacker::new(Mode::Secure, AttackerStrategy::DosVictim, None)),
        )
        .unwrap();

    sim.schedule_command(0, host_id, "join:h", Command::StartJoin);
    // A pending resolution for an address the central cannot answer keeps
    // the host receptive to (tampered) signed replies.
    sim.schedule_command(50, host_id, "resolve:h", Command::Resolve { target: ip(77) });

    let refresh_fcs = |bytes: &mut Vec<u8>| {
        let n = bytes.len();
        let fcs = compute_fcs(&bytes[..n - 4]);
        bytes[n - 4..].copy_from_slice(&fcs.to_be_bytes());
    };

    // Tampered IP_send: correct tag computed, then the payload flipped.
    let mut ip_send = Frame {
        dest: central_mac,
        src: dhcp_mac,
        body: FrameBody::IpSend {
            ip: ip(99),
            mac: mac(0x55),
            tag: [0; 32],
        },
    };
    tag_frame(&shared, &mut ip_send);
    let mut bytes = encode_frame(&ip_send);
    bytes[18] ^= 0x01; // an ip octet; the tag no longer covers the content
    refresh_fcs(&mut bytes);
    sim.inject_frame(52, attacker_id, bytes);

    // Signed reply for the pending resolution with one signature byte
    // flipped.
    let mut reply = Frame {
        dest: host_mac,
        src: central_mac,
        body: FrameBody::SignedArpReply {
            arp: StdArp {
                op: ArpOp::Reply,
                sender_mac: MacAddr([0x02, 0x66, 0, 0, 0, 0x66]),
                sender_ip: ip(77),
                target_mac: host_mac,
                target_ip: Ipv4Addr::UNSPECIFIED,
            },
            auth: SignedAuth::placeholder(identity.certificate_bytes()),
        },
    };
    sign_frame(&identity, &mut reply);
    let mut bytes = encode_frame(&reply);
    bytes[50] ^= 0x01; // inside the signature
    refresh_fcs(&mut bytes);
    sim.inject_frame(53, attacker_id, bytes);

    // Signed reply under a self-issued certificate (wrong trust anchor).
    let fake_root = KeyPair::from_seed(derive_bytes(seed, "fake-root"));
    let fake_identity =
        SignerIdentity::issue(&fake_root, "central-server", derive_bytes(seed, "fake"));
    let mut forged = Frame {
        dest: host_mac,
        src: central_mac,
        body: FrameBody::SignedArpReply {
            arp: StdArp {
                op: ArpOp::Reply,
                sender_mac: MacAddr([0x02, 0x66, 0, 0, 0, 0x66]),
                sender_ip: ip(77),
                target_mac: host_mac,
                target_ip: Ipv4Addr::UNSPECIFIED,
            },
            auth: SignedAuth::placeholder(fake_identity.certificate_bytes()),
        },
    };
    sign_frame(&fake_identity, &mut forged);
    sim.inject_frame(54, attacker_id, encode_frame(&forged));

    // Tampered probe: the host must stay silent.
    let mut check = Frame {
        dest: host_mac,
        src: central_mac,
        body: FrameBody::ArpCheck {
            ip: ip(10),
            auth: SignedAuth::placeholder(identity.certificate_bytes()),
        },
    };
    sign_frame(&identity, &mut check);
    let mut bytes = encode_frame(&check);
    bytes[40] ^= 0x01;
    refresh_fcs(&mut bytes);
    sim.inject_frame(60, attacker_id, bytes);

    sim.run_until_quiescent(10_000).unwrap();

    let central = sim.node(central_id).as_central().unwrap();
    assert_eq!(central.table().len(), 1, "only the honest join installed");
    assert_eq!(central.table().get(&ip(10)), Some(&host_mac));
    assert_eq!(central.table_log.len(), 1);

    let host = sim.node(host_id).as_host().unwrap();
    assert!(host.arp_cache.is_empty(), "tampered replies must not cache");
    assert_eq!(host.resolution_failures, vec![ip(77)]);
    // The host never answered the tampered probe.
    let host_arp_replies = sim
        .trace()
        .entries()
        .iter()
        .filter(|e| e.src == host_id && e.kind == FrameKind::ArpReply)
        .count();
    assert_eq!(host_arp_replies, 0);

    println!("ACCEPTANCE 7 (zero false accepts in 20,000 forgeries; receivers unmoved): PASS");
}

/// Criterion 8: identical (scenario, seed) pairs produce byte-identical
/// traces and reports, for every builtin.
#[test]
fn criterion_8_determinism() {
    for scenario in builtin_scenarios() {
        let a = run_scenario(&scenario).unwrap();
        let b = run_scenario(&scenario).unwrap();
        assert_eq!(
            a.trace, b.trace,
            "{} ({}): traces differ",
            scenario.name,
            scenario.mode.label()
        );
        let ja = serde_json::to_string(&a.report).unwrap();
        let jb = serde_json::to_string(&b.report).unwrap();
        assert_eq!(
            ja, jb,
            "{} ({}): reports differ",
            scenario.name,
            scenario.mode.label()
        );
    }
    println!("ACCEPTANCE 8 (double-run determinism on every builtin): PASS");
}

/// Criterion 9: under the flood the genuine change request is first
/// rate-limited, then succeeds by retrying after the flood window; no
/// forged entry ever appears.
#[test]
fn criterion_9_dos_retry() {
    let scenario = builtin("dos-central", Mode::Secure).unwrap();
    let report = run_scenario(&scenario).unwrap().report;
    assert_eq!(report.verdict, Verdict::Blocked);

    // The claim was sent more than once: the retry rule fired.
    let change = report
        .episodes
        .iter()
        .find(|e| e.label == "mac-change:victim")
        .expect("change episode");
    let claims = change.by_kind.get("arp-reply").copied().unwrap_or(0);
    assert!(claims >= 2, "expected retries, saw {claims} claim(s)");

    // Success only after the flood window (attack at 100, duration 1000).
    let flood_end: Tick = 1100;
    let victim = &report.hosts["victim"];
    let ack_time: Tick = victim
        .outcomes
        .iter()
        .find_map(|o| {
            o.contains("ARP_Ack")
                .then(|| o.trim_start_matches("t=").split_whitespace().next())
                .flatten()
                .and_then(|t| t.parse().ok())
        })
        .expect("change eventually acknowledged");
    assert!(
        ack_time > flood_end,
        "ack at t={ack_time} inside the flood window"
    );

    // Exactly one probe burst ran: the admitted retry.
    assert_eq!(change.by_kind.get("ARP_Check"), Some(&50));

    // No forged entry at any instant.
    let attacker_mac = report.attacker.as_ref().unwrap().mac;
    assert!(report.table_history.iter().all(|e| e.mac != attacker_mac));
    for event in &report.table_history {
        assert!(
            report.leases.contains_key(&event.ip) || event.cause.starts_with("check-expired"),
            "unexpected install {event:?}"
        );
    }
    assert_eq!(report.table.get(&ip(10)), Some(&MacAddr([0x02, 0, 0, 0, 0, 0x1F])));
    println!("ACCEPTANCE 9 (flood: rate-limited, retried, no forged entry): PASS");
}
