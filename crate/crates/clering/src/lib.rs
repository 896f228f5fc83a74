//! Simulator for a compact self-stabilizing leader-election protocol on
//! unoriented rings of distinct-id nodes under the state-sharing model.
//!
//! The protocol elects the maximum-id node as the unique leader and builds a
//! spanning tree rooted there, starting from an arbitrary initial
//! configuration, using O(log log n) bits per node. Nodes compare ids
//! lazily, one most-significant-bit rank per phase, while a distributed
//! binary-counter pipeline (hyper-nodes of B̂ consecutive nodes, one stored
//! bit each) continuously re-verifies the tree structure and doubles as a
//! cycle detector for fake parent structures.
//!
//! Crate layout:
//!
//! * [`identifiers`] — msb/bit-rank arithmetic on node ids.
//! * [`protocol`] — per-node registers, the full guard catalog, and the
//!   guarded commands (the rule system itself).
//! * [`topology`] — rings, configurations, the canonical text format and
//!   its SHA-256 digest.
//! * [`generators`] — reset / random / adversarial-cycle / impostor /
//!   legitimate initial configurations.
//! * [`scheduler`] — synchronous, random-distributed (weakly fair),
//!   central, and scripted daemons; steps, rounds, traces, replay.
//! * [`checkers`] — potential functions, attractor-set flags, hyper-node
//!   extraction, closure/attractor/memory/non-silence verdicts.

pub mod checkers;
pub mod identifiers;
pub mod protocol;
pub mod scheduler;
pub mod topology;
