//! Deterministic discrete-event simulation of a single layer-2 broadcast
//! domain.
//!
//! Time is integer ticks. Events fire in (time, sequence) order, with
//! sequence numbers assigned at scheduling time, so a given (scenario, seed)
//! pair always replays the exact same trace. One seeded generator owned by
//! the simulation is consumed only for delivery-drop decisions, in event
//! order.
//!
//! Frames are routed on the destination MAC as bound at send time: a frame
//! sent to a vacated MAC is traced as dropped, and a frame already in flight
//! follows the node that held the MAC when it was sent.

use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::wire::{classify, peek_dest, FrameKind, MacAddr};

pub type Tick = u64;
pub type TimerToken = u64;

/// Handle to a registered node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Handle to one protocol transaction; trace entries carry it so message
/// counts can be attributed per transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpisodeId(pub u32);

/// Per-destination delivery behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryPolicy {
    pub p_drop: f64,
    pub delay: Tick,
}

impl Default for DeliveryPolicy {
    fn default() -> Self {
        DeliveryPolicy {
            p_drop: 0.0,
            delay: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disposition {
    Delivered,
    Dropped,
}

impl Disposition {
    pub fn label(&self) -> &'static str {
        match self {
            Disposition::Delivered => "delivered",
            Disposition::Dropped => "dropped",
        }
    }
}

/// One trace record: a send operation produces one entry per intended
/// recipient, all sharing the send id.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub time: Tick,
    pub send_id: u64,
    pub episode: Option<EpisodeId>,
    pub src: NodeId,
    pub src_mac: MacAddr,
    pub dest: MacAddr,
    pub kind: FrameKind,
    pub disposition: Disposition,
}

impl TraceEntry {
    pub fn line(&self) -> String {
        let episode = match self.episode {
            Some(e) => e.0.to_string(),
            None => "-".to_string(),
        };
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.time,
            self.send_id,
            episode,
            self.src,
            self.src_mac,
            self.dest,
            self.kind,
            self.disposition.label()
        )
    }
}

/// Append-only log of every send, one entry per intended recipient.
#[derive(Debug, Default)]
pub struct Trace {
    entries: Vec<TraceEntry>,
}

impl Trace {
    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&entry.line());
            out.push('\n');
        }
        out
    }

    /// Number of send operations in an episode. Entries of one send are
    /// contiguous and share a send id, so deduping against the previous id
    /// suffices.
    pub fn sends_in_episode(&self, episode: EpisodeId) -> u64 {
        self.count_sends(|e| e.episode == Some(episode))
    }

    pub fn total_sends(&self) -> u64 {
        self.count_sends(|_| true)
    }

    fn count_sends(&self, select: impl Fn(&TraceEntry) -> bool) -> u64 {
        let mut count = 0;
        let mut last = None;
        for entry in &self.entries {
            if select(entry) && last != Some(entry.send_id) {
                count += 1;
                last = Some(entry.send_id);
            }
        }
        count
    }

    /// Send operations per message kind within an episode.
    pub fn kind_counts(&self, episode: EpisodeId) -> BTreeMap<&'static str, u64> {
        let mut counts = BTreeMap::new();
        let mut last = None;
        for entry in &self.entries {
            if entry.episode == Some(episode) && last != Some(entry.send_id) {
                *counts.entry(entry.kind.label()).or_insert(0) += 1;
                last = Some(entry.send_id);
            }
        }
        counts
    }
}

/// A node behavior driven entirely by delivered frames, timers, and scripted
/// commands. Nodes hold no reference to the simulation or to each other.
pub trait Node {
    type Command;

    fn on_frame(&mut self, ctx: &mut Ctx<'_, Self::Command>, bytes: &[u8]);
    fn on_timer(&mut self, ctx: &mut Ctx<'_, Self::Command>, token: TimerToken);
    fn on_command(&mut self, ctx: &mut Ctx<'_, Self::Command>, cmd: Self::Command);
}

pub(crate) enum Action<C> {
    Send(Vec<u8>),
    SetTimer { delay: Tick, token: TimerToken },
    Rebind(MacAddr),
    ScheduleCommand { delay: Tick, label: String, cmd: C },
}

impl<C> Action<C> {
    /// Sent frame bytes, if this action is a send. Test support.
    #[cfg(test)]
    pub(crate) fn as_send(&self) -> Option<&[u8]> {
        match self {
            Action::Send(bytes) => Some(bytes),
            _ => None,
        }
    }
}

/// The node's view of the simulation during a callback. Effects are applied
/// in order after the callback returns.
pub struct Ctx<'a, C> {
    now: Tick,
    node: NodeId,
    mac: MacAddr,
    actions: &'a mut Vec<Action<C>>,
}

impl<'a, C> Ctx<'a, C> {
    /// Detached context collecting actions into a caller-owned vector.
    /// Test support for driving node state machines without a simulation.
    #[cfg(test)]
    pub(crate) fn detached(
        now: Tick,
        node: NodeId,
        mac: MacAddr,
        actions: &'a mut Vec<Action<C>>,
    ) -> Self {
        Ctx {
            now,
            node,
            mac,
            actions,
        }
    }
}

impl<C> Ctx<'_, C> {
    pub fn now(&self) -> Tick {
        self.now
    }

    pub fn node_id(&self) -> NodeId {
        self.node
    }

    /// The node's currently bound MAC.
    pub fn mac(&self) -> MacAddr {
        self.mac
    }

    pub fn send(&mut self, bytes: Vec<u8>) {
        self.actions.push(Action::Send(bytes));
    }

    pub fn set_timer(&mut self, delay: Tick, token: TimerToken) {
        self.actions.push(Action::SetTimer { delay, token });
    }

    /// Rebind this node to a new MAC (models a MAC change). Ignored with a
    /// sim-log note if the MAC is taken.
    pub fn rebind(&mut self, new_mac: MacAddr) {
        self.actions.push(Action::Rebind(new_mac));
        self.mac = new_mac;
    }

    /// Schedule a command to self under a fresh episode — used when a node
    /// starts a new logical transaction (e.g. the rejoin after ARP_NoChange).
    pub fn schedule_command(&mut self, delay: Tick, label: impl Into<String>, cmd: C) {
        self.actions.push(Action::ScheduleCommand {
            delay,
            label: label.into(),
            cmd,
        });
    }
}

enum EventKind<C> {
    Deliver { to: NodeId, bytes: Vec<u8> },
    Timer { node: NodeId, token: TimerToken },
    Command { node: NodeId, cmd: C },
    SetPolicy { node: NodeId, policy: DeliveryPolicy },
    Inject { from: NodeId, bytes: Vec<u8> },
}

struct Scheduled<C> {
    time: Tick,
    seq: u64,
    episode: Option<EpisodeId>,
    kind: EventKind<C>,
}

impl<C> PartialEq for Scheduled<C> {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}
impl<C> Eq for Scheduled<C> {}
impl<C> PartialOrd for Scheduled<C> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<C> Ord for Scheduled<C> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert for earliest-first.
        (other.time, other.seq).cmp(&(self.time, self.seq))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("DuplicateMac: {0} is already bound")]
    DuplicateMac(MacAddr),
    #[error("InvalidMac: {0} cannot be a node address")]
    InvalidMac(MacAddr),
    #[error("TimeLimitExceeded: {pending} events still pending at tick {at}")]
    TimeLimitExceeded { at: Tick, pending: usize },
}

struct NodeEntry<N> {
    node: N,
    mac: MacAddr,
}

/// A single broadcast domain. Owns all node state; single-threaded.
pub struct Simulation<N: Node> {
    now: Tick,
    seq: u64,
    send_seq: u64,
    rng: ChaCha8Rng,
    nodes: Vec<NodeEntry<N>>,
    mac_index: BTreeMap<MacAddr, NodeId>,
    queue: BinaryHeap<Scheduled<N::Command>>,
    default_policy: DeliveryPolicy,
    policies: BTreeMap<NodeId, DeliveryPolicy>,
    trace: Trace,
    episode_labels: Vec<String>,
    notes: Vec<String>,
}

impl<N: Node> Simulation<N> {
    pub fn new(seed: u64) -> Self {
        Simulation {
            now: 0,
            seq: 0,
            send_seq: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: Vec::new(),
            mac_index: BTreeMap::new(),
            queue: BinaryHeap::new(),
            default_policy: DeliveryPolicy::default(),
            policies: BTreeMap::new(),
            trace: Trace::default(),
            episode_labels: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn register_node(&mut self, mac: MacAddr, node: N) -> Result<NodeId, SimError> {
        if mac.is_broadcast() || mac == MacAddr::ZERO {
            return Err(SimError::InvalidMac(mac));
        }
        if self.mac_index.contains_key(&mac) {
            return Err(SimError::DuplicateMac(mac));
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeEntry { node, mac });
        self.mac_index.insert(mac, id);
        Ok(id)
    }

    pub fn set_default_policy(&mut self, policy: DeliveryPolicy) {
        self.default_policy = policy;
    }

    pub fn set_policy(&mut self, dest: NodeId, policy: DeliveryPolicy) {
        self.policies.insert(dest, policy);
    }

    /// Schedule a scripted command under a fresh episode.
    pub fn schedule_command(
        &mut self,
        at: Tick,
        node: NodeId,
        label: impl Into<String>,
        cmd: N::Command,
    ) -> EpisodeId {
        let episode = self.new_episode(label.into());
        self.push_event(at, Some(episode), EventKind::Command { node, cmd });
        episode
    }

    /// Schedule a mid-run delivery-policy change toward a node.
    pub fn schedule_policy_change(&mut self, at: Tick, node: NodeId, policy: DeliveryPolicy) {
        self.push_event(at, None, EventKind::SetPolicy { node, policy });
    }

    /// Schedule raw bytes to be transmitted by `from` at `at`, as if the
    /// node had sent them itself — the hook for crafted or corrupted frames.
    pub fn inject_frame(&mut self, at: Tick, from: NodeId, bytes: Vec<u8>) {
        self.push_event(at, None, EventKind::Inject { from, bytes });
    }

    /// Process events in deterministic order until the queue empties or an
    /// event beyond `max_time` would fire.
    pub fn run_until_quiescent(&mut self, max_time: Tick) -> Result<Tick, SimError> {
        while let Some(head) = self.queue.peek() {
            if head.time > max_time {
                return Err(SimError::TimeLimitExceeded {
                    at: self.now,
                    pending: self.queue.len(),
                });
            }
            let event = self.queue.pop().expect("peeked");
            debug_assert!(event.time >= self.now, "time went backwards");
            self.now = event.time;
            match event.kind {
                EventKind::Deliver { to, bytes } => {
                    self.dispatch(to, event.episode, |node, ctx| node.on_frame(ctx, &bytes));
                }
                EventKind::Timer { node, token } => {
                    self.dispatch(node, event.episode, |n, ctx| n.on_timer(ctx, token));
                }
                EventKind::Command { node, cmd } => {
                    self.dispatch(node, event.episode, |n, ctx| n.on_command(ctx, cmd));
                }
                EventKind::SetPolicy { node, policy } => {
                    self.policies.insert(node, policy);
                }
                EventKind::Inject { from, bytes } => {
                    self.process_send(from, event.episode, bytes);
                }
            }
        }
        Ok(self.now)
    }

    pub fn now(&self) -> Tick {
        self.now
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn node(&self, id: NodeId) -> &N {
        &self.nodes[id.0 as usize].node
    }

    pub fn mac_of(&self, id: NodeId) -> MacAddr {
        self.nodes[id.0 as usize].mac
    }

    pub fn episode_label(&self, episode: EpisodeId) -> &str {
        &self.episode_labels[episode.0 as usize]
    }

    pub fn episodes(&self) -> impl Iterator<Item = (EpisodeId, &str)> {
        self.episode_labels
            .iter()
            .enumerate()
            .map(|(i, label)| (EpisodeId(i as u32), label.as_str()))
    }

    fn new_episode(&mut self, label: String) -> EpisodeId {
        let id = EpisodeId(self.episode_labels.len() as u32);
        self.episode_labels.push(label);
        id
    }

    fn push_event(&mut self, time: Tick, episode: Option<EpisodeId>, kind: EventKind<N::Command>) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Scheduled {
            time,
            seq,
            episode,
            kind,
        });
    }

    fn dispatch(
        &mut self,
        node_id: NodeId,
        episode: Option<EpisodeId>,
        f: impl FnOnce(&mut N, &mut Ctx<'_, N::Command>),
    ) {
        let mut actions = Vec::new();
        let mac = self.nodes[node_id.0 as usize].mac;
        {
            let mut ctx = Ctx {
                now: self.now,
                node: node_id,
                mac,
                actions: &mut actions,
            };
            f(&mut self.nodes[node_id.0 as usize].node, &mut ctx);
        }
        for action in actions {
            match action {
                Action::Send(bytes) => self.process_send(node_id, episode, bytes),
                Action::SetTimer { delay, token } => {
                    self.push_event(
                        self.now + delay,
                        episode,
                        EventKind::Timer {
                            node: node_id,
                            token,
                        },
                    );
                }
                Action::Rebind(new_mac) => self.apply_rebind(node_id, new_mac),
                Action::ScheduleCommand { delay, label, cmd } => {
                    let new_episode = self.new_episode(label);
                    self.push_event(
                        self.now + delay,
                        Some(new_episode),
                        EventKind::Command { node: node_id, cmd },
                    );
                }
            }
        }
    }

    fn apply_rebind(&mut self, node_id: NodeId, new_mac: MacAddr) {
        if new_mac.is_broadcast() || new_mac == MacAddr::ZERO {
            self.notes
                .push(format!("t={} rebind of {node_id} to invalid {new_mac} ignored", self.now));
            return;
        }
        if let Some(&holder) = self.mac_index.get(&new_mac) {
            if holder != node_id {
                self.notes.push(format!(
                    "t={} rebind of {node_id} to {new_mac} ignored: bound to {holder}",
                    self.now
                ));
                return;
            }
            return; // already bound to self
        }
        let old = self.nodes[node_id.0 as usize].mac;
        self.mac_index.remove(&old);
        self.mac_index.insert(new_mac, node_id);
        self.nodes[node_id.0 as usize].mac = new_mac;
    }

    fn policy_for(&self, dest: NodeId) -> DeliveryPolicy {
        self.policies
            .get(&dest)
            .copied()
            .unwrap_or(self.default_policy)
    }

    fn process_send(&mut self, from: NodeId, episode: Option<EpisodeId>, bytes: Vec<u8>) {
        let send_id = self.send_seq;
        self.send_seq += 1;
        let src_mac = self.nodes[from.0 as usize].mac;
        let kind = classify(&bytes);

        let Some(dest) = peek_dest(&bytes) else {
            // Too short to route; traced so the send stays visible.
            self.trace.entries.push(TraceEntry {
                time: self.now,
                send_id,
                episode,
                src: from,
                src_mac,
                dest: MacAddr::ZERO,
                kind: FrameKind::Malformed,
                disposition: Disposition::Dropped,
            });
            return;
        };

        let recipients: Vec<NodeId> = if dest.is_broadcast() {
            (0..self.nodes.len() as u32)
                .map(NodeId)
                .filter(|&id| id != from)
                .collect()
        } else {
            match self.mac_index.get(&dest) {
                Some(&id) => vec![id],
                None => Vec::new(),
            }
        };

        if recipients.is_empty() {
            self.trace.entries.push(TraceEntry {
                time: self.now,
                send_id,
                episode,
                src: from,
                src_mac,
                dest,
                kind,
                disposition: Disposition::Dropped,
            });
            return;
        }

        for recipient in recipients {
            let policy = self.policy_for(recipient);
            let dropped = policy.p_drop > 0.0 && self.rng.random_bool(policy.p_drop.min(1.0));
            self.trace.entries.push(TraceEntry {
                time: self.now,
                send_id,
                episode,
                src: from,
                src_mac,
                dest,
                kind,
                disposition: if dropped {
                    Disposition::Dropped
                } else {
                    Disposition::Delivered
                },
            });
            if !dropped {
                self.push_event(
                    self.now + policy.delay,
                    episode,
                    EventKind::Deliver {
                        to: recipient,
                        bytes: bytes.clone(),
                    },
                );
            }
        }
    }
}
