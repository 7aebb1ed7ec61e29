//! Centralized secure address resolution: wire codecs, authentication
//! primitives, the node state machines, and a deterministic discrete-event
//! simulator with scenario-driven attack and performance experiments.
//!
//! The scheme routes every ARP request and reply through a Central Server
//! that holds the authoritative IP→MAC table. Resolution answers come back
//! digitally signed; a claimed MAC change is only committed after a burst of
//! signed ARP_Check probes at the previous MAC goes unanswered. The
//! [`scenarios`] module reproduces the message-count comparisons against
//! standard ARP/DHCP and the spoofing-attack outcomes.

pub mod crypto;
pub mod protocol;
pub mod scenarios;
pub mod simnet;
pub mod wire;
