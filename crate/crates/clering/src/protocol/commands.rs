//! Rule commands: the state each rule writes when it fires.
//!
//! `apply_rule` assumes the rule's guard holds on the view (which
//! `enabled_rule` guarantees); where a guard admits several documented
//! sub-cases the command re-derives the active one from the same
//! predicates, so guard and action can never disagree.

use crate::identifiers::bit;
use crate::protocol::predicates::{
    add_plus, best, broad_db, clean_v1a, clean_va, clean_vb, t_start_db, up_p, wave_b, NodeView,
};
use crate::protocol::state::{AddMark, ElecTuple, NodeState, PipeCell, RuleId};

/// The node's next register file after firing `rule`.
///
/// Neighbors are never written: the state-sharing model only lets a node
/// read its neighbors and write itself.
#[must_use]
pub fn apply_rule(view: &NodeView, rule: RuleId) -> NodeState {
    let mut s = *view.own;
    match rule {
        RuleId::Error => return NodeState::reset(),

        RuleId::Start => {
            let m = bit(1, view.id);
            return NodeState::start(m, bit((m + 1) as u32, view.id));
        }

        RuleId::Passive => {
            let q = best(view).expect("Passive fires only toward a Best neighbor");
            let x = view.nbr[q as usize];
            s.leader = false;
            s.p = Some(q);
            s.d = if x.d == 0 || x.d == x.b_hat { 1 } else { x.d + 1 };
            // The stored bit comes from the cell the target currently
            // publishes for this join point: a root's head cell, the cell
            // addressed past an interior node, or a tail's relayed head
            // cell of the next value.
            s.d_b = if x.d == 0 {
                x.pl.bit().unwrap_or(0)
            } else if x.d < x.b_hat {
                x.hc.bit().unwrap_or(0)
            } else {
                x.pl.bit().unwrap_or(0)
            };
            s.b_hat = x.b_hat;
            s.elec = x.elec;
            s.add = AddMark::Empty;
            s.pl = PipeCell::Empty;
            s.hc = PipeCell::Empty;
        }

        RuleId::RootStartdB => {
            let advance = t_start_db(view)
                && children_any_mirror(view)
                && s.pl.pos().is_some_and(|pos| pos >= 1 && pos < s.b_hat);
            s.pl = match s.pl.pos() {
                Some(pos) if advance => PipeCell::cell(pos + 1, 0),
                _ => PipeCell::cell(1, 0),
            };
        }

        RuleId::RootInc => {
            // The position just revealed becomes the claim's one-rank
            // memory; encounters behind this front are decided against it.
            let w = s.b_hat + 1;
            let i = if s.elec.phase >= w { 1 } else { s.elec.phase + 1 };
            s.elec = ElecTuple::new(s.b_hat, i, bit(i as u32, view.id), s.elec.bit_position, 0);
        }

        RuleId::Update => {
            if up_p(view) && wave_b(view) {
                let par = view.parent().expect("Update copy requires a parent");
                s.elec = par.elec;
            } else {
                s.elec.control = 1;
            }
        }

        RuleId::HyperBinAdd => {
            s.add = if add_plus(view) {
                AddMark::Plus
            } else {
                AddMark::Ok
            };
        }

        RuleId::HyperBroad => {
            if broad_db(view) {
                let bit = match s.add {
                    AddMark::Plus => 1 - s.d_b,
                    _ => s.d_b,
                };
                s.pl = PipeCell::cell(s.d, bit);
                s.add = AddMark::Empty;
            } else {
                let par = view.parent().expect("Broad relay requires a parent");
                s.pl = par.pl;
            }
        }

        RuleId::HyperVerif => {
            let par = view.parent().expect("Verif requires a parent");
            s.hc = if s.d == 1 { par.pl } else { par.hc };
        }

        RuleId::HyperCleanM => {
            if clean_v1a(view) {
                s.hc = PipeCell::Wipe;
            } else if clean_vb(view) || clean_va(view) {
                s.hc = PipeCell::Empty;
            } else {
                s.pl = PipeCell::Empty;
            }
        }
    }
    s
}

/// At least one child has actually mirrored the root's current cell (used
/// to pick the advance case of the root publication command).
fn children_any_mirror(view: &NodeView) -> bool {
    crate::protocol::predicates::children(view)
        .iter()
        .any(|q| view.nbr[q as usize].hc == view.own.pl)
}
