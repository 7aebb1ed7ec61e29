//! Declarative experiments: scenario descriptions, the runner, reports with
//! per-episode message counts and attack verdicts, and the secure-versus-
//! baseline comparison.
//!
//! A scenario names its hosts, an optional attacker, and a time-ordered
//! script of joins, resolutions, MAC changes, attacks, and delivery-policy
//! changes. Running it builds a fresh simulation, derives all key material
//! from the seed, plays the script to quiescence, and distills the trace and
//! node state into a [`Report`]. With `repeat > 1` the runner executes
//! independent trials under counter-derived seeds and aggregates a Monte
//! Carlo estimate.

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{derive_bytes, KeyPair, SharedKey, SignerIdentity};
use crate::protocol::{
    Attacker, AttackerStrategy, CentralConfig, CentralServer, ChangeOutcome, Command, DhcpConfig,
    DhcpServer, Host, HostConfig, Mode, ProtocolNode,
};
use crate::simnet::{DeliveryPolicy, NodeId, SimError, Simulation, Tick};
use crate::wire::MacAddr;

mod builtins;

pub use builtins::{builtin, builtin_names, builtin_scenarios};

/// One scripted event. Times must be nondecreasing across the script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum ScriptEvent {
    /// A host starts the DHCP join.
    Join { at: Tick, host: String },
    /// A host resolves an IP through ARP.
    Resolve {
        at: Tick,
        host: String,
        target_ip: Ipv4Addr,
    },
    /// A host changes its MAC and announces it.
    ChangeMac {
        at: Tick,
        host: String,
        new_mac: MacAddr,
    },
    /// A host renews its lease.
    Renew { at: Tick, host: String },
    /// The attacker acts out its strategy.
    Attack { at: Tick },
    /// Delivery toward one node changes (loss injection).
    SetPolicy {
        at: Tick,
        toward: String,
        p_drop: f64,
        #[serde(default = "default_delay")]
        delay: Tick,
    },
}

fn default_delay() -> Tick {
    1
}

impl ScriptEvent {
    pub fn at(&self) -> Tick {
        match self {
            ScriptEvent::Join { at, .. }
            | ScriptEvent::Resolve { at, .. }
            | ScriptEvent::ChangeMac { at, .. }
            | ScriptEvent::Renew { at, .. }
            | ScriptEvent::Attack { at }
            | ScriptEvent::SetPolicy { at, .. } => *at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub name: String,
    pub mac: MacAddr,
}

/// Serializable attacker strategy description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StrategySpec {
    SpoofMapping {
        victim_ip: Ipv4Addr,
    },
    RaceOldMac {
        victim_old_mac: MacAddr,
        victim_ip: Ipv4Addr,
    },
    DosFloodCentral {
        claims_per_tick: u32,
        duration: Tick,
        spoof_macs: Vec<MacAddr>,
    },
    DosVictim,
}

impl StrategySpec {
    fn to_strategy(&self) -> AttackerStrategy {
        match self {
            StrategySpec::SpoofMapping { victim_ip } => AttackerStrategy::SpoofMapping {
                victim_ip: *victim_ip,
            },
            StrategySpec::RaceOldMac {
                victim_old_mac,
                victim_ip,
            } => AttackerStrategy::RaceOldMac {
                victim_old_mac: *victim_old_mac,
                victim_ip: *victim_ip,
            },
            StrategySpec::DosFloodCentral {
                claims_per_tick,
                duration,
                spoof_macs,
            } => AttackerStrategy::DosFloodCentral {
                claims_per_tick: *claims_per_tick,
                duration: *duration,
                spoof_macs: spoof_macs.clone(),
            },
            StrategySpec::DosVictim => AttackerStrategy::DosVictim,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            StrategySpec::SpoofMapping { .. } => "attack:spoof-mapping",
            StrategySpec::RaceOldMac { .. } => "attack:race-old-mac",
            StrategySpec::DosFloodCentral { .. } => "attack:dos-flood",
            StrategySpec::DosVictim => "attack:dos-victim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackerSpec {
    pub mac: MacAddr,
    pub strategy: StrategySpec,
}

/// Infrastructure knobs and protocol config overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub central: CentralConfig,
    pub host: HostConfig,
    pub dhcp: DhcpConfig,
    pub pool_base: Ipv4Addr,
    pub pool_size: u32,
    pub central_mac: MacAddr,
    pub dhcp_mac: MacAddr,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            central: CentralConfig::default(),
            host: HostConfig::default(),
            dhcp: DhcpConfig::default(),
            pool_base: Ipv4Addr::new(10, 0, 0, 10),
            pool_size: 32,
            central_mac: MacAddr([0x02, 0xAA, 0, 0, 0, 0x01]),
            dhcp_mac: MacAddr([0x02, 0xAA, 0, 0, 0, 0x02]),
        }
    }
}

/// Built-in pass/fail conditions checked after a run; the CLI turns failures
/// into exit code 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Expectations {
    /// Exact total message count per episode label.
    pub episode_counts: BTreeMap<String, u64>,
    pub verdict: Option<Verdict>,
    /// Closed interval the Monte Carlo estimate must fall in.
    pub mc_estimate_within: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub seed: u64,
    pub hosts: Vec<HostSpec>,
    pub attacker: Option<AttackerSpec>,
    pub script: Vec<ScriptEvent>,
    pub config: ScenarioConfig,
    pub repeat: u32,
    pub max_time: Tick,
    pub expect: Expectations,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: String::new(),
            mode: Mode::Secure,
            seed: 0,
            hosts: Vec::new(),
            attacker: None,
            script: Vec::new(),
            config: ScenarioConfig::default(),
            repeat: 1,
            max_time: 10_000,
            expect: Expectations::default(),
        }
    }
}

/// Outcome of an attack scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "BLOCKED")]
    Blocked,
    #[serde(rename = "BLOCKED-WITH-RECOVERY")]
    BlockedWithRecovery,
    #[serde(rename = "SUCCEEDED")]
    Succeeded,
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Blocked => "BLOCKED",
            Verdict::BlockedWithRecovery => "BLOCKED-WITH-RECOVERY",
            Verdict::Succeeded => "SUCCEEDED",
            Verdict::NotApplicable => "N/A",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub label: String,
    pub total: u64,
    pub by_kind: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostReport {
    pub mac: MacAddr,
    pub ip: Option<Ipv4Addr>,
    pub cache: BTreeMap<Ipv4Addr, MacAddr>,
    pub joins_completed: u32,
    pub outcomes: Vec<String>,
    pub resolution_failures: Vec<Ipv4Addr>,
}

/// One table install, for auditing what entered the table and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEvent {
    pub time: Tick,
    pub ip: Ipv4Addr,
    pub mac: MacAddr,
    pub cause: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackerReport {
    pub mac: MacAddr,
    pub forged_claims_sent: u64,
    pub probes_answered: u64,
    pub nochange_received: u32,
    pub ack_received: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Everything a run measured. Counts are recomputed from the raw trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub mode: Mode,
    pub seed: u64,
    pub final_time: Tick,
    pub total_messages: u64,
    pub episodes: Vec<EpisodeReport>,
    pub table: BTreeMap<Ipv4Addr, MacAddr>,
    /// Every install the central applied, in order.
    pub table_history: Vec<TableEvent>,
    pub leases: BTreeMap<Ipv4Addr, MacAddr>,
    pub hosts: BTreeMap<String, HostReport>,
    pub attacker: Option<AttackerReport>,
    pub verdict: Verdict,
    pub monte_carlo: Option<MonteCarlo>,
}

/// A run's report plus the raw trace it was distilled from.
pub struct RunOutput {
    pub report: Report,
    pub trace: String,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("ValidationError: {0}")]
    Validation(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn validate(scenario: &Scenario) -> Result<(), ScenarioError> {
    let fail = |msg: String| Err(ScenarioError::Validation(msg));
    if scenario.hosts.is_empty() {
        return fail("scenario needs at least one host".into());
    }
    if scenario.repeat == 0 {
        return fail("repeat must be at least 1".into());
    }
    let mut names = std::collections::BTreeSet::new();
    let mut macs = std::collections::BTreeSet::new();
    macs.insert(scenario.config.dhcp_mac);
    if scenario.mode == Mode::Secure {
        macs.insert(scenario.config.central_mac);
    }
    for host in &scenario.hosts {
        if ["central", "dhcp", "attacker"].contains(&host.name.as_str()) {
            return fail(format!("host name {:?} is reserved", host.name));
        }
        if !names.insert(host.name.clone()) {
            return fail(format!("duplicate host name {:?}", host.name));
        }
        if !macs.insert(host.mac) {
            return fail(format!("duplicate MAC {}", host.mac));
        }
    }
    if let Some(attacker) = &scenario.attacker {
        if !macs.insert(attacker.mac) {
            return fail(format!("duplicate MAC {}", attacker.mac));
        }
    }
    let mut last = 0;
    for event in &scenario.script {
        if event.at() < last {
            return fail(format!("script times must be nondecreasing (t={})", event.at()));
        }
        last = event.at();
        match event {
            ScriptEvent::Join { host, .. }
            | ScriptEvent::Resolve { host, .. }
            | ScriptEvent::ChangeMac { host, .. }
            | ScriptEvent::Renew { host, .. } => {
                if !names.contains(host) {
                    return fail(format!("script references unknown host {host:?}"));
                }
            }
            ScriptEvent::Attack { .. } => {
                if scenario.attacker.is_none() {
                    return fail("attack event without an attacker".into());
                }
            }
            ScriptEvent::SetPolicy { toward, p_drop, .. } => {
                let known = names.contains(toward)
                    || toward == "dhcp"
                    || (toward == "central" && scenario.mode == Mode::Secure)
                    || (toward == "attacker" && scenario.attacker.is_some());
                if !known {
                    return fail(format!("policy references unknown node {toward:?}"));
                }
                if !(0.0..=1.0).contains(p_drop) {
                    return fail(format!("p_drop {p_drop} out of [0,1]"));
                }
            }
        }
    }
    if scenario.config.central.check_timeout <= 2 {
        return fail("check_timeout must exceed twice the hop delay".into());
    }
    Ok(())
}

struct BuiltSim {
    sim: Simulation<ProtocolNode>,
    host_ids: BTreeMap<String, NodeId>,
    central_id: Option<NodeId>,
    dhcp_id: NodeId,
    attacker_id: Option<NodeId>,
}

fn build_sim(scenario: &Scenario, seed: u64) -> Result<BuiltSim, ScenarioError> {
    let mut sim = Simulation::new(seed);
    let cfg = &scenario.config;

    let root = KeyPair::from_seed(derive_bytes(seed, "trust-root"));
    let identity = SignerIdentity::issue(&root, "central-server", derive_bytes(seed, "central"));
    let shared_key = SharedKey::new(derive_bytes(seed, "dhcp-central"));

    let central_id = match scenario.mode {
        Mode::Secure => Some(sim.register_node(
            cfg.central_mac,
            ProtocolNode::Central(CentralServer::new(
                identity,
                shared_key.clone(),
                cfg.central,
            )),
        )?),
        Mode::Baseline => None,
    };
    let dhcp_id = sim.register_node(
        cfg.dhcp_mac,
        ProtocolNode::Dhcp(DhcpServer::new(
            scenario.mode,
            cfg.pool_base,
            cfg.pool_size,
            shared_key,
            cfg.central_mac,
            cfg.dhcp,
        )),
    )?;

    let mut host_ids = BTreeMap::new();
    for spec in &scenario.hosts {
        let host = Host::new(&spec.name, scenario.mode, root.trust_root(), cfg.host);
        let id = sim.register_node(spec.mac, ProtocolNode::Host(host))?;
        host_ids.insert(spec.name.clone(), id);
    }

    let attacker_id = match &scenario.attacker {
        Some(spec) => {
            let central = (scenario.mode == Mode::Secure).then_some(cfg.central_mac);
            let attacker = Attacker::new(scenario.mode, spec.strategy.to_strategy(), central);
            Some(sim.register_node(spec.mac, ProtocolNode::Attacker(attacker))?)
        }
        None => None,
    };

    for event in &scenario.script {
        match event {
            ScriptEvent::Join { at, host } => {
                sim.schedule_command(*at, host_ids[host], format!("join:{host}"), Command::StartJoin);
            }
            ScriptEvent::Resolve { at, host, target_ip } => {
                sim.schedule_command(
                    *at,
                    host_ids[host],
                    format!("resolve:{host}->{target_ip}"),
                    Command::Resolve { target: *target_ip },
                );
            }
            ScriptEvent::ChangeMac { at, host, new_mac } => {
                sim.schedule_command(
                    *at,
                    host_ids[host],
                    format!("mac-change:{host}"),
                    Command::ChangeMac { new_mac: *new_mac },
                );
            }
            ScriptEvent::Renew { at, host } => {
                sim.schedule_command(*at, host_ids[host], format!("renew:{host}"), Command::Renew);
            }
            ScriptEvent::Attack { at } => {
                let spec = scenario.attacker.as_ref().expect("validated");
                let id = attacker_id.expect("validated");
                sim.schedule_command(*at, id, spec.strategy.label(), Command::Act);
            }
            ScriptEvent::SetPolicy {
                at,
                toward,
                p_drop,
                delay,
            } => {
                let id = match toward.as_str() {
                    "attacker" => attacker_id.expect("validated"),
                    "dhcp" => dhcp_id,
                    "central" => central_id.expect("validated"),
                    name => host_ids[name],
                };
                sim.schedule_policy_change(
                    *at,
                    id,
                    DeliveryPolicy {
                        p_drop: *p_drop,
                        delay: *delay,
                    },
                );
            }
        }
    }

    Ok(BuiltSim {
        sim,
        host_ids,
        central_id,
        dhcp_id,
        attacker_id,
    })
}

/// True iff every host holding a lease is reachable exactly as the central
/// table says.
fn table_consistent(built: &BuiltSim) -> bool {
    let Some(central_id) = built.central_id else {
        return true;
    };
    let table = built.sim.node(central_id).as_central().expect("central").table();
    built.host_ids.values().all(|&id| {
        let host = built.sim.node(id).as_host().expect("host");
        match host.ip {
            Some(ip) => table.get(&ip) == Some(&built.sim.mac_of(id)),
            None => true,
        }
    })
}

fn compute_verdict(scenario: &Scenario, built: &BuiltSim) -> Verdict {
    let Some(attacker_spec) = &scenario.attacker else {
        return Verdict::NotApplicable;
    };

    match scenario.mode {
        Mode::Baseline => {
            // The attack worked if any host cache holds a mapping that
            // disagrees with the leases actually granted.
            let leases = built
                .sim
                .node(built.dhcp_id)
                .as_dhcp()
                .expect("dhcp")
                .leases();
            let poisoned = built.host_ids.values().any(|&id| {
                let host = built.sim.node(id).as_host().expect("host");
                host.arp_cache
                    .iter()
                    .any(|(ip, mac)| leases.get(ip).is_some_and(|true_mac| true_mac != mac))
            });
            if poisoned {
                Verdict::Succeeded
            } else {
                Verdict::Blocked
            }
        }
        Mode::Secure => {
            let central_id = built.central_id.expect("secure mode has a central");
            let central = built.sim.node(central_id).as_central().expect("central");
            // Forged mapping: any install pointing at a MAC the attacker
            // introduced. The attacker never legitimately joins.
            let attacker_macs: Vec<MacAddr> = match &attacker_spec.strategy {
                StrategySpec::RaceOldMac { victim_old_mac, .. } => {
                    vec![attacker_spec.mac, *victim_old_mac]
                }
                _ => vec![attacker_spec.mac],
            };
            let forged_install = central.table_log.iter().any(|change| {
                attacker_macs.contains(&change.mac)
                    && !matches!(change.cause, crate::protocol::TableChangeCause::IpSend)
            });
            if forged_install || !table_consistent(built) {
                return Verdict::Succeeded;
            }
            match &attacker_spec.strategy {
                StrategySpec::RaceOldMac { .. } => {
                    // The genuine host must have been refused, rejoined, and
                    // ended with a fresh valid lease.
                    let recovered = built.host_ids.values().any(|&id| {
                        let host = built.sim.node(id).as_host().expect("host");
                        let refused = host
                            .outcomes
                            .iter()
                            .any(|(_, o)| matches!(o, ChangeOutcome::NoChange(_)));
                        refused && host.joins_completed >= 2 && host.ip.is_some()
                    });
                    if recovered {
                        Verdict::BlockedWithRecovery
                    } else {
                        Verdict::Succeeded
                    }
                }
                StrategySpec::DosFloodCentral { .. } => {
                    // The legitimate change must have gone through despite
                    // the flood.
                    let acked = built.host_ids.values().any(|&id| {
                        let host = built.sim.node(id).as_host().expect("host");
                        host.outcomes
                            .iter()
                            .any(|(_, o)| matches!(o, ChangeOutcome::Ack(_)))
                    });
                    if acked {
                        Verdict::Blocked
                    } else {
                        Verdict::Succeeded
                    }
                }
                StrategySpec::SpoofMapping { .. } | StrategySpec::DosVictim => Verdict::Blocked,
            }
        }
    }
}

fn run_once(scenario: &Scenario, seed: u64) -> Result<(Report, String), ScenarioError> {
    let mut built = build_sim(scenario, seed)?;
    let final_time = built.sim.run_until_quiescent(scenario.max_time)?;

    let episodes: Vec<EpisodeReport> = built
        .sim
        .episodes()
        .map(|(id, label)| EpisodeReport {
            label: label.to_string(),
            total: built.sim.trace().sends_in_episode(id),
            by_kind: built
                .sim
                .trace()
                .kind_counts(id)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        })
        .collect();

    let (table, table_history) = match built.central_id {
        Some(id) => {
            let central = built.sim.node(id).as_central().expect("central");
            let history = central
                .table_log
                .iter()
                .map(|change| TableEvent {
                    time: change.time,
                    ip: change.ip,
                    mac: change.mac,
                    cause: match &change.cause {
                        crate::protocol::TableChangeCause::IpSend => "ip-send".to_string(),
                        crate::protocol::TableChangeCause::CheckExpired { old_mac } => {
                            format!("check-expired (was {old_mac})")
                        }
                    },
                })
                .collect();
            (central.table().clone(), history)
        }
        None => (BTreeMap::new(), Vec::new()),
    };
    let leases = built
        .sim
        .node(built.dhcp_id)
        .as_dhcp()
        .expect("dhcp")
        .leases()
        .clone();
    let hosts: BTreeMap<String, HostReport> = built
        .host_ids
        .iter()
        .map(|(name, &id)| {
            let host = built.sim.node(id).as_host().expect("host");
            let outcomes = host
                .outcomes
                .iter()
                .map(|(t, o)| match o {
                    ChangeOutcome::Ack(ip) => format!("t={t} ARP_Ack({ip})"),
                    ChangeOutcome::NoChange(ip) => format!("t={t} ARP_NoChange({ip})"),
                })
                .collect();
            (
                name.clone(),
                HostReport {
                    mac: built.sim.mac_of(id),
                    ip: host.ip,
                    cache: host.arp_cache.clone(),
                    joins_completed: host.joins_completed,
                    outcomes,
                    resolution_failures: host.resolution_failures.clone(),
                },
            )
        })
        .collect();

    let attacker = built.attacker_id.map(|id| {
        let a = built.sim.node(id).as_attacker().expect("attacker");
        AttackerReport {
            mac: built.sim.mac_of(id),
            forged_claims_sent: a.forged_claims_sent,
            probes_answered: a.probes_answered,
            nochange_received: a.nochange_received,
            ack_received: a.ack_received,
        }
    });

    let verdict = compute_verdict(scenario, &built);
    let report = Report {
        scenario: scenario.name.clone(),
        mode: scenario.mode,
        seed,
        final_time,
        total_messages: built.sim.trace().total_sends(),
        episodes,
        table,
        table_history,
        leases,
        hosts,
        attacker,
        verdict,
        monte_carlo: None,
    };
    Ok((report, built.sim.trace().lines()))
}

/// Run a scenario to a deterministic report. With `repeat > 1`, trials run
/// under seeds `seed + 0..repeat`; the report carries the first trial's
/// detail plus the aggregate, where a trial counts as a success when its
/// verdict is a blocked one.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput, ScenarioError> {
    validate(scenario)?;
    let (mut report, trace) = run_once(scenario, scenario.seed)?;
    if scenario.repeat > 1 {
        let mut successes = 0u64;
        for i in 0..u64::from(scenario.repeat) {
            let seed = scenario.seed.wrapping_add(i);
            let (trial, _) = if i == 0 {
                (report.clone(), String::new())
            } else {
                run_once(scenario, seed)?
            };
            if matches!(trial.verdict, Verdict::Blocked | Verdict::BlockedWithRecovery) {
                successes += 1;
            }
        }
        let trials = u64::from(scenario.repeat);
        let estimate = successes as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        report.monte_carlo = Some(MonteCarlo {
            trials,
            successes,
            estimate,
            std_error,
        });
    }
    Ok(RunOutput { report, trace })
}

/// Expectation failures for a finished run; empty means all hold.
pub fn verify_expectations(scenario: &Scenario, report: &Report) -> Vec<String> {
    let mut failures = Vec::new();
    for (label, &want) in &scenario.expect.episode_counts {
        match report.episodes.iter().find(|e| &e.label == label) {
            Some(episode) if episode.total == want => {}
            Some(episode) => failures.push(format!(
                "episode {label:?}: expected {want} messages, measured {}",
                episode.total
            )),
            None => failures.push(format!("episode {label:?} missing from report")),
        }
    }
    if let Some(want) = scenario.expect.verdict {
        if report.verdict != want {
            failures.push(format!(
                "verdict: expected {want}, measured {}",
                report.verdict
            ));
        }
    }
    if let Some((lo, hi)) = scenario.expect.mc_estimate_within {
        match &report.monte_carlo {
            Some(mc) if (lo..=hi).contains(&mc.estimate) => {}
            Some(mc) => failures.push(format!(
                "monte carlo estimate {} outside [{lo}, {hi}]",
                mc.estimate
            )),
            None => failures.push("monte carlo aggregate missing".to_string()),
        }
    }
    failures
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub secure: u64,
    pub baseline: u64,
    pub delta: i64,
}

/// Side-by-side message counts of the same scenario family in both modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub rows: Vec<CompareRow>,
}

pub fn compare(secure: &Report, baseline: &Report) -> Result<Comparison, ScenarioError> {
    if secure.scenario != baseline.scenario
        || secure.mode != Mode::Secure
        || baseline.mode != Mode::Baseline
    {
        return Err(ScenarioError::Validation(format!(
            "MismatchedScenario: cannot compare {:?} ({}) with {:?} ({})",
            secure.scenario,
            secure.mode.label(),
            baseline.scenario,
            baseline.mode.label()
        )));
    }
    let mut labels: Vec<&String> = secure.episodes.iter().map(|e| &e.label).collect();
    for episode in &baseline.episodes {
        if !labels.contains(&&episode.label) {
            labels.push(&episode.label);
        }
    }
    let count = |report: &Report, label: &str| {
        report
            .episodes
            .iter()
            .find(|e| e.label == label)
            .map_or(0, |e| e.total)
    };
    let rows = labels
        .into_iter()
        .map(|label| {
            let s = count(secure, label);
            let b = count(baseline, label);
            CompareRow {
                label: label.clone(),
                secure: s,
                baseline: b,
                delta: s as i64 - b as i64,
            }
        })
        .collect();
    Ok(Comparison {
        scenario: secure.scenario.clone(),
        rows,
    })
}

impl Comparison {
    /// Plain-text table for terminal output.
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        let width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain(["episode".len()])
            .max()
            .unwrap_or(8);
        out.push_str(&format!(
            "{:<width$}  {:>8}  {:>8}  {:>6}\n",
            "episode", "secure", "baseline", "delta"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>8}  {:>8}  {:>+6}\n",
                row.label, row.secure, row.baseline, row.delta
            ));
        }
        out
    }
}
