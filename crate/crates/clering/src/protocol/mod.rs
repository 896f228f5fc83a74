//! The protocol itself: register file, guard catalog, and rule commands.
//!
//! A node's behavior is a single lookup: [`enabled_rule`] maps its view to
//! the unique fireable rule (or none), and [`apply_rule`] maps view + rule
//! to the next register file. Everything else in the crate — topologies,
//! schedulers, checkers — is built around those two functions.

pub mod commands;
pub mod predicates;
pub mod state;

pub use commands::apply_rule;
pub use predicates::{enabled_rule, eval_predicate, NodeView, PredicateId};
pub use state::{AddMark, ElecTuple, NodeState, PipeCell, Port, RuleId, StateError};

/// Convenience: the enabled rule and the state it would write, in one call.
#[must_use]
pub fn step_node(view: &NodeView) -> Option<(RuleId, NodeState)> {
    let rule = enabled_rule(view)?;
    Some((rule, apply_rule(view, rule)))
}
