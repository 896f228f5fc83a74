//! The guard catalog: every predicate the rule system evaluates over a
//! node's sight (its own registers plus both neighbors' registers).
//!
//! Conventions used throughout:
//!
//! * All comparisons against pipeline cells are ⊥-safe: ⊥ and the wipe
//!   marker have no position/bit, so any arithmetic comparison involving
//!   them is simply false.
//! * Set-valued helpers (children, Best, EqB̂, …) return ports; a predicate
//!   written "X ≠ ∅" is the boolean emptiness test on that set.
//! * `W = B̂ + 1` is the number of election phases; phase arithmetic wraps
//!   at W (after the last rank the next phase is 1).
//!
//! The error family is split in two tiers. `Er_T` (structure, phase, wave
//! and memory-shape errors) is what the Ψ potential counts and is designed
//! to never arise fresh from legal moves — only from adversarial initial
//! states. `Er_Hyper`/`Er_Elec` (bit mismatches found by the verification
//! pipeline, infeasible election claims) are *detections*: they fire in the
//! middle of otherwise clean executions precisely when the configuration is
//! structurally wrong (fake cycles, impostor roots) and trigger the same
//! reset epidemic without ever being counted by Ψ.

use crate::identifiers::{bit, Id};
use crate::protocol::state::{AddMark, NodeState, PipeCell, Port, RuleId};

// ═══════════════════════════════════════════════════════════════════════
// Node view
// ═══════════════════════════════════════════════════════════════════════

/// Everything one node can see when evaluating its guards: its own id and
/// registers, and both neighbors' ids and registers, indexed by port.
/// `nbr_back[q]` is the port of the neighbor behind port `q` that faces
/// this node — the state-sharing model lets a node recognize whether a
/// neighbor's parent pointer selects it.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub id: Id,
    pub own: &'a NodeState,
    pub nbr_ids: [Id; 2],
    pub nbr: [&'a NodeState; 2],
    pub nbr_back: [Port; 2],
}

impl<'a> NodeView<'a> {
    /// The parent's registers, if a parent port is set.
    #[must_use]
    pub fn parent(&self) -> Option<&'a NodeState> {
        self.own.p.map(|q| self.nbr[q as usize])
    }

    /// Number of election phases for this node's claimed strength.
    #[must_use]
    pub fn w(&self) -> i32 {
        self.own.b_hat + 1
    }

    /// The same sight re-centered on a hypothetical own record: commands
    /// use this to evaluate guards against the state they are about to
    /// write while the neighbors stay at their pre-step snapshot.
    #[must_use]
    pub fn with_own<'b>(&self, own: &'b NodeState) -> NodeView<'b>
    where
        'a: 'b,
    {
        NodeView {
            id: self.id,
            own,
            nbr_ids: self.nbr_ids,
            nbr: self.nbr,
            nbr_back: self.nbr_back,
        }
    }
}

/// A subset of a node's (at most two) ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PortSet(u8);

impl PortSet {
    pub const EMPTY: Self = Self(0);

    pub fn insert(&mut self, q: Port) {
        self.0 |= 1 << q;
    }

    #[must_use]
    pub fn contains(&self, q: Port) -> bool {
        self.0 & (1 << q) != 0
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    #[must_use]
    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = Port> + '_ {
        (0u8..2).filter(|q| self.contains(*q))
    }

    /// Both ports — the full neighborhood.
    pub const FULL: Self = Self(0b11);

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    fn collect(view: &NodeView, mut f: impl FnMut(Port, &NodeState) -> bool) -> Self {
        let mut s = Self::EMPTY;
        for q in 0u8..2 {
            if f(q, view.nbr[q as usize]) {
                s.insert(q);
            }
        }
        s
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Neighborhood sets
// ═══════════════════════════════════════════════════════════════════════

/// Neighbors claiming the same strength: equal B̂ and equal Bit-Strong.
#[must_use]
pub fn eq_bhat(view: &NodeView) -> PortSet {
    PortSet::collect(view, |_, u| {
        u.b_hat == view.own.b_hat && u.elec.bit_strong == view.own.elec.bit_strong
    })
}

/// Subset of `set` agreeing with this node on Elec components 0..2
/// (Bit-Strong, Phase, Bit-Position).
#[must_use]
pub fn eq_m_e_i(view: &NodeView, set: PortSet) -> PortSet {
    PortSet::collect(view, |q, u| {
        set.contains(q) && view.own.elec.agrees3(&u.elec)
    })
}

/// Subset of `set` whose Control component equals `val`.
#[must_use]
pub fn eq_m_e_x_control(view: &NodeView, val: i8, set: PortSet) -> PortSet {
    PortSet::collect(view, |q, u| set.contains(q) && u.elec.control == val)
}

/// Same-strength neighbors exactly one phase behind (with wrap at W) whose
/// current position equals this node's `prev` — the same claim, one rank
/// stale. A trailing record revealing a *different* position at the shared
/// rank belongs to a rival reign and is deliberately excluded: that
/// encounter is a contest, not a lag.
#[must_use]
pub fn inf_ph(view: &NodeView) -> PortSet {
    let ph = view.own.elec.phase;
    let w = view.w();
    PortSet::collect(view, |q, u| {
        eq_bhat(view).contains(q)
            && (u.elec.phase == ph - 1 || (ph == 1 && u.elec.phase == w))
            && u.elec.bit_position == view.own.elec.prev
    })
}

/// Same-strength neighbors exactly one phase ahead (with wrap at W) whose
/// `prev` equals this node's current position — the same claim, one rank
/// newer. A leading record that remembers a *different* position at this
/// node's rank is a rival that advanced past an unsettled comparison; it
/// never counts as "already past this phase".
#[must_use]
pub fn sup_ph(view: &NodeView) -> PortSet {
    let ph = view.own.elec.phase;
    let w = view.w();
    PortSet::collect(view, |q, u| {
        eq_bhat(view).contains(q)
            && (u.elec.phase == ph + 1 || (ph == w && u.elec.phase == 1))
            && u.elec.prev == view.own.elec.bit_position
    })
}

/// Candidate children: same-strength neighbors that either agree on the
/// wave prefix (components 0..2) or lag exactly one phase behind.
#[must_use]
pub fn cand_children(view: &NodeView) -> PortSet {
    eq_m_e_i(view, eq_bhat(view)).union(inf_ph(view))
}

/// The children: candidate children at the next hyper-node offset
/// (d+1 inside a chain; offset 1 below a root or a chain tail) whose
/// parent pointer actually selects this node — a same-shape neighbor
/// hanging off a different tree is not a child.
#[must_use]
pub fn children(view: &NodeView) -> PortSet {
    let d = view.own.d;
    let bh = view.own.b_hat;
    let cand = cand_children(view);
    PortSet::collect(view, |q, u| {
        cand.contains(q)
            && u.p == Some(view.nbr_back[q as usize])
            && (((0..bh).contains(&d) && u.d == d + 1) || ((d == 0 || d == bh) && u.d == 1))
    })
}

/// Neighbors that are neither children nor one phase ahead but agree on
/// the wave prefix (lateral same-wave contacts; their control flag belongs
/// to their own tree's wave and is not this node's business).
#[must_use]
pub fn other(view: &NodeView) -> PortSet {
    let ch = children(view);
    let sup = sup_ph(view);
    PortSet::collect(view, |q, u| {
        !ch.contains(q) && !sup.contains(q) && u.elec.agrees3(&view.own.elec)
    })
}

/// All children satisfy `f` (vacuously true without children).
pub fn vch(view: &NodeView, f: impl Fn(&NodeState) -> bool) -> bool {
    children(view).iter().all(|q| f(view.nbr[q as usize]))
}

/// Children mirror check for the broadcast track: every child's receiving
/// cell (PL below a chain interior, HC below a chain tail) equals `cell`
/// or is still ⊥ (fresh joiners re-synchronize on the next wave).
#[must_use]
pub fn mch(view: &NodeView, cell: PipeCell) -> bool {
    let tail = view.own.d == view.own.b_hat;
    vch(view, |u| {
        let mirror = if tail { u.hc } else { u.pl };
        mirror == cell || mirror.is_empty()
    })
}

// ═══════════════════════════════════════════════════════════════════════
// Defection target (Best)
// ═══════════════════════════════════════════════════════════════════════

/// The best neighbor to defect to, if any.
///
/// Tier 1: any neighbor advertising a strictly larger Bit-Strong than this
/// node's B̂ (a stronger tree); among those, the maximum strength, lowest
/// port. Tier 2: among same-strength same-phase neighbors, a strictly
/// larger Bit-Position (a lexicographically larger root id at the current
/// rank); maximum position, lowest port. Tier 3 decides phase-skewed
/// encounters on the rank the two records share: a neighbor one phase
/// ahead whose `prev` beats this node's current position already won that
/// rank (forward arm), and a neighbor one phase behind whose current
/// position beats this node's `prev` is a comparison this node's reign
/// advanced past and loses retroactively (backward arm). Equal shared-rank
/// positions are a genuine tie and trigger nothing.
#[must_use]
pub fn best(view: &NodeView) -> Option<Port> {
    let max_bs = view.nbr.iter().map(|u| u.elec.bit_strong).max().unwrap();
    if max_bs > view.own.b_hat {
        return (0u8..2).find(|&q| view.nbr[q as usize].elec.bit_strong == max_bs);
    }
    let peers = eq_bhat(view);
    let own = view.own.elec;
    let ph = own.phase;
    let w = view.w();
    let max_bp = (0u8..2)
        .filter(|&q| peers.contains(q) && view.nbr[q as usize].elec.phase == ph)
        .map(|q| view.nbr[q as usize].elec.bit_position)
        .filter(|&b| b > own.bit_position)
        .max();
    if let Some(max_bp) = max_bp {
        return (0u8..2).find(|&q| {
            peers.contains(q)
                && view.nbr[q as usize].elec.phase == ph
                && view.nbr[q as usize].elec.bit_position == max_bp
        });
    }
    let forward = (0u8..2).find(|&q| {
        let u = view.nbr[q as usize];
        peers.contains(q)
            && (u.elec.phase == ph + 1 || (ph == w && u.elec.phase == 1))
            && u.elec.prev > own.bit_position
    });
    if forward.is_some() {
        return forward;
    }
    (0u8..2).find(|&q| {
        let u = view.nbr[q as usize];
        peers.contains(q)
            && (u.elec.phase == ph - 1 || (ph == 1 && u.elec.phase == w))
            && u.elec.bit_position > own.prev
    })
}

// ═══════════════════════════════════════════════════════════════════════
// Reset / start layer
// ═══════════════════════════════════════════════════════════════════════

/// Memory part of the reset record: dB = 0, Add = ⊥, HC = ⊥.
#[must_use]
pub fn m_reset(s: &NodeState) -> bool {
    s.d_b == 0 && s.add == AddMark::Empty && s.hc.is_empty()
}

/// The full reset record.
#[must_use]
pub fn nd_reset(s: &NodeState) -> bool {
    s.is_full_reset()
}

/// Root shape: elected, offset 0, no parent, B̂ = own msb.
#[must_use]
pub fn is_root(s: &NodeState, id: Id) -> bool {
    s.leader && s.d == 0 && s.p.is_none() && s.b_hat == bit(1, id)
}

/// A node that has just executed Start: reset memory except for a freshly
/// published PL, root shape, and the phase-1 election tuple (whose `prev`
/// carries the id's rank-W position, the wrap-consistent seed).
#[must_use]
pub fn nd_start(s: &NodeState, id: Id) -> bool {
    let m = bit(1, id);
    m_reset(s)
        && !s.pl.is_empty()
        && is_root(s, id)
        && s.elec.bit_strong == m
        && s.elec.phase == 1
        && s.elec.bit_position == m
        && s.elec.prev == bit((m + 1) as u32, id)
        && (s.elec.control == 0 || s.elec.control == 1)
}

/// Neighbors currently holding the reset record.
#[must_use]
pub fn ng_reset(view: &NodeView) -> PortSet {
    PortSet::collect(view, |_, u| nd_reset(u))
}

/// Neighbors that have already restarted.
#[must_use]
pub fn ng_start(view: &NodeView) -> PortSet {
    PortSet::collect(view, |q, u| nd_start(u, view.nbr_ids[q as usize]))
}

/// Reset epidemic: any reset neighbor forces a reset, except on nodes that
/// are themselves reset or freshly restarted.
#[must_use]
pub fn t_reset(view: &NodeView) -> bool {
    !nd_reset(view.own) && !nd_start(view.own, view.id) && !ng_reset(view).is_empty()
}

/// A reset node restarts once its whole neighborhood has joined the reset
/// wave (reset or already restarted).
#[must_use]
pub fn t_start(view: &NodeView) -> bool {
    nd_reset(view.own) && ng_reset(view).union(ng_start(view)) == PortSet::FULL
}

// ═══════════════════════════════════════════════════════════════════════
// Tree structure
// ═══════════════════════════════════════════════════════════════════════

/// The legal parent/child offset relation: d = d_p + 1 inside a chain, and
/// offset 1 below a root (d_p = 0) or a chain tail (d_p = B̂).
#[must_use]
pub fn dist_rel(d: i32, d_p: i32, b_hat: i32) -> bool {
    ((0..b_hat).contains(&d_p) && d == d_p + 1) || ((d_p == 0 || d_p == b_hat) && d == 1)
}

/// Well-formed passive node: attached, consistent strength claim, and a
/// strength no smaller than its own strongest bit (otherwise it should be
/// contending itself).
#[must_use]
pub fn pass_nd(view: &NodeView) -> bool {
    let s = view.own;
    match view.parent() {
        Some(par) => {
            !s.leader
                && s.d > 0
                && s.b_hat == par.b_hat
                && s.b_hat >= bit(1, view.id)
                && s.elec.bit_strong == s.b_hat
        }
        None => false,
    }
}

/// Parent coherence for wave copying: no better option, and the offset
/// relation holds toward the parent.
#[must_use]
pub fn coh_p(view: &NodeView) -> bool {
    match view.parent() {
        Some(par) => {
            best(view).is_none()
                && view.own.b_hat == par.b_hat
                && dist_rel(view.own.d, par.d, view.own.b_hat)
        }
        None => false,
    }
}

/// Offset incoherence with no better neighbor to defect to.
#[must_use]
pub fn er_d(view: &NodeView) -> bool {
    if best(view).is_some() || view.own.d <= 0 {
        return false;
    }
    match view.parent() {
        Some(par) => !dist_rel(view.own.d, par.d, view.own.b_hat),
        None => true,
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Election waves
// ═══════════════════════════════════════════════════════════════════════

/// The broadcast wave has fully passed this node's subtree: every child
/// agrees on (Bit-Strong, Phase, Bit-Position) and has echoed Control = 1.
/// Vacuously true at leaves.
#[must_use]
pub fn wave_b(view: &NodeView) -> bool {
    let ch = children(view);
    ch.is_empty() || (eq_m_e_i(view, ch) == ch && eq_m_e_x_control(view, 1, ch) == ch)
}

/// The parent carries the next phase of this node's own wave (next phase
/// with wrap, `prev` matching this node's current position) and has not
/// yet echoed. The prev conjunct keeps a node from copying a wave that
/// never went through its own rank — a parent rewritten by a rival reign
/// has to win the comparison first, not smuggle its phase down the tree.
#[must_use]
pub fn up_p(view: &NodeView) -> bool {
    match view.parent() {
        Some(par) => {
            par.elec.control == 0
                && (par.elec.phase == view.own.elec.phase + 1
                    || (view.own.elec.phase >= view.w() && par.elec.phase == 1))
                && par.elec.prev == view.own.elec.bit_position
        }
        None => false,
    }
}

/// Echo precondition: neither this node nor its parent has echoed yet.
#[must_use]
pub fn up_e(view: &NodeView) -> bool {
    view.own.elec.control == 0 && view.parent().is_some_and(|par| par.elec.control == 0)
}

/// No unresolved rival claim on a non-child port: every such neighbor
/// either agrees with this node's tuple (merged, or a lateral contact in
/// the same wave), has verifiably passed this phase (exactly one ahead
/// with wrap, and remembering this node's position at the shared rank —
/// a genuine tie that advanced), or carries a strictly weaker strength
/// claim (it defects on its own schedule and never needed this phase's
/// verdict). Anything else — a same-strength claim still behind, a
/// same-phase claim with a different position, or a leading claim whose
/// memory of this rank disagrees — pins the echo: the phase is not
/// finished at this frontier until the comparison resolves, so a losing
/// tree can never escape its verdict by finishing a wave early.
#[must_use]
pub fn frontier_clear(view: &NodeView) -> bool {
    let ch = children(view);
    let own = view.own.elec;
    let w = view.w();
    (0u8..2).all(|q| {
        if ch.contains(q) {
            return true;
        }
        let u = view.nbr[q as usize];
        u.elec.agrees3(&own)
            || u.elec.bit_strong < own.bit_strong
            || (u.elec.bit_strong == own.bit_strong
                && (u.elec.phase == own.phase + 1 || (own.phase == w && u.elec.phase == 1))
                && u.elec.prev == own.bit_position)
    })
}

/// Ready to echo: all children have echoed THIS phase (the bare control
/// flag is not enough — a child lagging one phase still carries last
/// phase's echo, so the check also demands prefix agreement), the
/// frontier holds no unresolved rival claim, and this node's verification
/// track shows the end-of-epoch wipe. The wipe conjunct paces the wave
/// against the pipeline — an echo certifies that one full verification
/// epoch has flowed through this node during the phase, so the election
/// can never spin faster than the detection machinery underneath it.
#[must_use]
pub fn up_back(view: &NodeView) -> bool {
    up_e(view) && wave_b(view) && frontier_clear(view) && view.own.hc.is_wipe()
}

/// A phase value `new_ph` (at strength `new_bhat`/`new_bs`) would not
/// itself trip any phase-gap error against the current neighborhood.
/// Voluntary Elec moves (Update, Passive) are gated on this: a legal copy
/// must never manufacture a fresh error.
#[must_use]
pub fn phase_move_safe(view: &NodeView, new_bhat: i32, new_bs: i32, new_ph: i32) -> bool {
    let w = new_bhat + 1;
    let peer_phases: Vec<i32> = view
        .nbr
        .iter()
        .filter(|u| u.b_hat == new_bhat && u.elec.bit_strong == new_bs)
        .map(|u| u.elec.phase)
        .collect();
    let (Some(&min), Some(&max)) = (peer_phases.iter().min(), peer_phases.iter().max()) else {
        return true;
    };
    !phase_gap_flags(new_ph, w, min, max)
}

/// The four phase-gap error shapes, shared by `Er_Phase` and the move gate.
fn phase_gap_flags(ph: i32, w: i32, min: i32, max: i32) -> bool {
    (ph == w && !(min == 1 || min == w - 1 || min == w))
        || (ph != w && ph - min > 1)
        || (ph == 1 && !(max == 1 || max == 2 || max == w))
        || (ph != 1 && max - ph > 1)
}

/// Wave copy / echo trigger.
#[must_use]
pub fn t_update(view: &NodeView) -> bool {
    if !coh_p(view) {
        return false;
    }
    let copy = up_p(view) && wave_b(view) && {
        let par = view.parent().expect("coh_p implies parent");
        phase_move_safe(view, view.own.b_hat, par.elec.bit_strong, par.elec.phase)
    };
    copy || up_back(view)
}

/// Phase increment at the root: the subtree has echoed and every neighbor
/// is accounted for — a child, verifiably one phase ahead (a tie that
/// advanced), or a lateral contact carrying the same tuple. A neighbor
/// that fits none of these (weaker and unconverted, still behind, or
/// revealing a different position) pins the increment: the comparison at
/// this rank is not finished at this root's own doorstep. Contests further
/// away do not pin — a reign that advances past a remote unsettled rank
/// is caught retroactively through `prev` when the fronts meet.
#[must_use]
pub fn t_inc(view: &NodeView) -> bool {
    is_root(view.own, view.id)
        && wave_b(view)
        && children(view).union(sup_ph(view)).union(other(view)) == PortSet::FULL
}

// ═══════════════════════════════════════════════════════════════════════
// Defection
// ═══════════════════════════════════════════════════════════════════════

/// Neighbor `x` currently publishes the cell a joiner at the next offset
/// would need: its own first cell below a root, the cell addressed to
/// offset d_x+1 inside a chain, or the head cell of the next value below a
/// chain tail.
#[must_use]
pub fn pass_db(x: &NodeState) -> bool {
    if x.d == 0 {
        return x.pl == PipeCell::cell(1, 0);
    }
    if x.d > 0 && x.d < x.b_hat {
        return x.hc.pos() == Some(x.d + 1);
    }
    if x.d == x.b_hat && x.d > 0 {
        return x.pl.pos() == Some(1);
    }
    false
}

/// Defect to the best neighbor: possible once that neighbor publishes the
/// joiner's bit, this node's own subtree has completed the current wave,
/// and the adopted tuple would not manufacture a phase-gap error.
#[must_use]
pub fn t_pass(view: &NodeView) -> bool {
    if view.own.d <= -1 {
        return false;
    }
    let Some(q) = best(view) else {
        return false;
    };
    let target = view.nbr[q as usize];
    pass_db(target)
        && wave_b(view)
        && phase_move_safe(view, target.b_hat, target.elec.bit_strong, target.elec.phase)
}

// ═══════════════════════════════════════════════════════════════════════
// Hyper-node pipeline: distributed increment (BinAdd)
// ═══════════════════════════════════════════════════════════════════════

/// Carry passes through this bit: the chain tail always receives the
/// increment's carry; an interior bit receives one iff its chain child
/// carried and stored a 1.
#[must_use]
pub fn add_plus(view: &NodeView) -> bool {
    if view.own.d == view.own.b_hat {
        return true;
    }
    !children(view).is_empty()
        && vch(view, |u| u.add == AddMark::Plus)
        && vch(view, |u| u.d_b == 1)
}

/// No carry here: the chain child either absorbed it (stored 0 under a
/// carry) or never carried.
#[must_use]
pub fn add_ok(view: &NodeView) -> bool {
    !children(view).is_empty()
        && (vch(view, |u| u.add == AddMark::Ok)
            || (vch(view, |u| u.add == AddMark::Plus) && vch(view, |u| u.d_b == 0)))
}

/// Take a carry mark: unmarked, broadcast track idle, children exist, the
/// parent has consumed its previous mark, the tracks below are drained, and
/// the mark value is determined.
#[must_use]
pub fn t_add(view: &NodeView) -> bool {
    let s = view.own;
    let add_nd = s.add == AddMark::Empty && s.pl.is_empty();
    let add_p = s.d == 1 || view.parent().is_some_and(|par| par.add == AddMark::Empty);
    let tail = s.d == s.b_hat;
    let add_ch = vch(view, |u| if tail { u.hc.is_empty() } else { u.pl.is_empty() });
    add_nd && add_p && add_ch && (add_plus(view) || add_ok(view))
}

// ═══════════════════════════════════════════════════════════════════════
// Hyper-node pipeline: broadcast (Broad)
// ═══════════════════════════════════════════════════════════════════════

/// Publish this node's own slot of the incremented value: the chain head
/// publishes into an empty track; an interior node publishes once it has
/// relayed everything above its slot, its children mirrored the last relay,
/// and its parent's track is already clear (the parent's clear is what
/// retires the mirror this node's own cell will wait on).
#[must_use]
pub fn broad_db(view: &NodeView) -> bool {
    let s = view.own;
    if s.d == 1 {
        return s.pl.is_empty();
    }
    s.d > 1
        && s.pl.pos() == Some(s.d - 1)
        && mch(view, s.pl)
        && view.parent().is_some_and(|par| par.pl.is_empty())
}

/// Relay the parent's next broadcast cell: either the head cell into an
/// empty track above empty mirrors, or the successor of the cell the
/// children just mirrored (stopping at the slot just above this node's
/// own, where `broad_db` takes over).
#[must_use]
pub fn broad_p(view: &NodeView) -> bool {
    let s = view.own;
    let Some(par) = view.parent() else {
        return false;
    };
    let first = s.pl.is_empty() && par.pl.pos() == Some(1) && mch(view, PipeCell::Empty);
    let next = match (s.pl.pos(), par.pl.pos()) {
        (Some(mine), Some(theirs)) => mch(view, s.pl) && theirs == mine + 1 && mine != s.d - 1,
        _ => false,
    };
    first || next
}

/// Broadcast trigger (the enclosing rule family also requires a live carry
/// mark, which every relaying node still holds until it publishes).
#[must_use]
pub fn t_broad(view: &NodeView) -> bool {
    broad_db(view) || broad_p(view)
}

// ═══════════════════════════════════════════════════════════════════════
// Hyper-node pipeline: verification (Verif)
// ═══════════════════════════════════════════════════════════════════════

/// Acquire the first cell of this node's verification window: the chain
/// head takes the parent chain's head cell; deeper nodes take exactly the
/// cell addressed to their own slot.
#[must_use]
pub fn vrf_1g(view: &NodeView) -> bool {
    let Some(par) = view.parent() else {
        return false;
    };
    if view.own.d == 1 {
        par.pl.pos() == Some(1)
    } else {
        view.own.d > 1 && par.hc.pos() == Some(view.own.d)
    }
}

/// Advance flow control shared by both tracks: a frontier node absorbs any
/// deeper-addressed cell; an interior node advances onto its child's slot
/// only over drained children, and past it only over children that
/// mirrored the current cell (⊥ children are joiners catching up on the
/// next wave).
fn vrf_flow(view: &NodeView, source_pos: i32) -> bool {
    let d = view.own.d;
    let ch = children(view);
    if ch.is_empty() {
        return source_pos > d;
    }
    let start = source_pos == d + 1 && vch(view, |u| u.hc.is_empty());
    let broad = source_pos > d && vch(view, |u| u.hc == view.own.hc || u.hc.is_empty());
    start || broad
}

/// Chain head walks the parent chain's published cells in order.
#[must_use]
pub fn vrf_1(view: &NodeView) -> bool {
    let s = view.own;
    let Some(par) = view.parent() else {
        return false;
    };
    match (s.hc.pos(), par.pl.pos()) {
        (Some(mine), Some(theirs)) if s.d == 1 && theirs == mine + 1 => vrf_flow(view, theirs),
        _ => false,
    }
}

/// Interior node walks its chain parent's verification track in order.
#[must_use]
pub fn vrf_g(view: &NodeView) -> bool {
    let s = view.own;
    let Some(par) = view.parent() else {
        return false;
    };
    if s.d <= 1 || par.elec != s.elec {
        return false;
    }
    match (s.hc.pos(), par.hc.pos()) {
        (Some(mine), Some(theirs)) if theirs == mine + 1 => vrf_flow(view, theirs),
        _ => false,
    }
}

/// Verification step trigger.
#[must_use]
pub fn t_verif(view: &NodeView) -> bool {
    if view.own.hc.is_empty() {
        vrf_1g(view)
    } else {
        vrf_1(view) || vrf_g(view)
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Hyper-node pipeline: track cleanup (CleanM)
// ═══════════════════════════════════════════════════════════════════════

/// Wipe a fully-walked verification track (the last cell has position B̂),
/// bottom-up: the chain tail wipes freely, interior nodes once their
/// children wiped or re-joined empty.
#[must_use]
pub fn clean_v1a(view: &NodeView) -> bool {
    let s = view.own;
    s.hc.pos() == Some(s.b_hat)
        && (s.d == s.b_hat || vch(view, |u| u.hc.is_wipe() || u.hc.is_empty()))
}

/// Drain a wiped track at the chain head once its children drained.
#[must_use]
pub fn clean_vb(view: &NodeView) -> bool {
    view.own.d == 1 && view.own.hc.is_wipe() && vch(view, |u| u.hc.is_empty())
}

/// Drain a wiped track in the chain interior, bottom-up below a wiped
/// parent (children of a tail are the next chain's heads, whose broadcast
/// mirror must be retired instead).
#[must_use]
pub fn clean_va(view: &NodeView) -> bool {
    let s = view.own;
    if s.d <= 1 || !s.hc.is_wipe() {
        return false;
    }
    let parent_wiped = view.parent().is_some_and(|par| par.hc.is_wipe());
    parent_wiped
        && ((s.d < s.b_hat && vch(view, |u| u.hc.is_empty()))
            || (s.d == s.b_hat && vch(view, |u| u.pl.is_empty())))
}

/// Clear the broadcast track top-down once this node's own published cell
/// has been mirrored and the parent has already cleared.
#[must_use]
pub fn clean_c(view: &NodeView) -> bool {
    let s = view.own;
    s.pl.pos() == Some(s.d)
        && mch(view, s.pl)
        && (s.d == 1 || view.parent().is_some_and(|par| par.pl.is_empty()))
}

/// Cleanup trigger.
#[must_use]
pub fn t_clean_m(view: &NodeView) -> bool {
    clean_v1a(view) || clean_vb(view) || clean_va(view) || clean_c(view)
}

// ═══════════════════════════════════════════════════════════════════════
// Root publication
// ═══════════════════════════════════════════════════════════════════════

/// Root publication step: advance once the children mirrored the current
/// cell (fresh ⊥ children re-synchronize at the next wrap and never block,
/// but at least one real mirror is required so the root never outruns an
/// entirely empty audience), or republish the head cell when the children
/// have drained a wave whose tail cell the root still holds.
#[must_use]
pub fn t_start_db(view: &NodeView) -> bool {
    if !is_root(view.own, view.id) || children(view).is_empty() {
        return false;
    }
    let mirrors_ok = vch(view, |u| u.hc == view.own.pl || u.hc.is_empty());
    let any_mirror = children(view)
        .iter()
        .any(|q| view.nbr[q as usize].hc == view.own.pl);
    let advance = mirrors_ok && any_mirror;
    let republish =
        view.own.pl.pos().is_some_and(|pos| pos >= 2) && vch(view, |u| u.hc.is_empty());
    advance || republish
}

// ═══════════════════════════════════════════════════════════════════════
// Error family: Er_T (counted by Ψ)
// ═══════════════════════════════════════════════════════════════════════

/// Structurally unattached or incoherently attached, with no better
/// neighbor to defect to. (Nodes with a live defection target are waiting,
/// not wrong; fake maximal-strength arcs have no target and flag here.)
#[must_use]
pub fn er_nd(view: &NodeView) -> bool {
    let unattached = !is_root(view.own, view.id)
        && !pass_nd(view)
        && !nd_reset(view.own)
        && best(view).is_none();
    unattached || (pass_nd(view) && er_d(view))
}

/// Phase-gap errors against same-strength neighbors.
#[must_use]
pub fn er_phase(view: &NodeView) -> bool {
    if view.own.d < 0 {
        return false;
    }
    let phases: Vec<i32> = eq_bhat(view)
        .iter()
        .map(|q| view.nbr[q as usize].elec.phase)
        .collect();
    let (Some(&min), Some(&max)) = (phases.iter().min(), phases.iter().max()) else {
        return false;
    };
    phase_gap_flags(view.own.elec.phase, view.w(), min, max)
}

/// No same-phase same-position buddy, nobody one phase ahead, and no
/// defection target: this node's claimed position is unsupported.
#[must_use]
pub fn er_bp(view: &NodeView) -> bool {
    if view.own.d <= 0 {
        return false;
    }
    let peers = eq_bhat(view);
    let buddy = peers.iter().any(|q| {
        let u = view.nbr[q as usize];
        u.elec.phase == view.own.elec.phase && u.elec.bit_position == view.own.elec.bit_position
    });
    !buddy && sup_ph(view).is_empty() && best(view).is_none()
}

/// Wave-marker inconsistencies: echoed without a completed subtree, or —
/// while wave-coherent with the parent (same claimed strength and wave
/// prefix, so the parent's echo vouched for this node) — lagging behind an
/// echoed parent without echoing. A node mid-defection whose tuple does
/// not match its new parent is outside that parent's wave and stays quiet.
#[must_use]
pub fn er_control(view: &NodeView) -> bool {
    let s = view.own;
    (s.elec.control == 1 && !wave_b(view))
        || (s.elec.control == 0
            && view.parent().is_some_and(|par| {
                par.elec.control == 1
                    && par.b_hat == s.b_hat
                    && par.elec.agrees3(&s.elec)
            }))
}

/// Root memory shape: a root never carries a mark or a verification cell,
/// and its broadcast cell is ⊥ or a zero-bit at a position within
/// 1..=max(B̂,1).
#[must_use]
pub fn er_m_root(view: &NodeView) -> bool {
    let s = view.own;
    if s.d != 0 {
        return false;
    }
    let pl_ok = match s.pl {
        PipeCell::Empty => true,
        PipeCell::Cell { pos, bit } => bit == 0 && pos >= 1 && pos <= s.b_hat.max(1),
        PipeCell::Wipe => false,
    };
    s.add != AddMark::Empty || !s.hc.is_empty() || !pl_ok
}

/// A marked interior bit whose entire (nonempty) chain below has already
/// consumed its marks: the mark is stale.
#[must_use]
pub fn er_m_add(view: &NodeView) -> bool {
    let s = view.own;
    s.d > 0
        && s.d < s.b_hat
        && s.add != AddMark::Empty
        && !children(view).is_empty()
        && vch(view, |u| u.add == AddMark::Empty)
}

/// Broadcast-track shapes no legal interleaving produces.
#[must_use]
pub fn er_pl(view: &NodeView) -> bool {
    let s = view.own;
    if s.d < 1 {
        return false;
    }
    // Shape: the wipe marker is legal in HC only; positions never exceed
    // this node's own slot.
    if s.pl.is_wipe() {
        return true;
    }
    let Some(pos) = s.pl.pos() else {
        return false;
    };
    if pos > s.d {
        return true;
    }
    // Stale cell under a cleared parent (the parent clears only after this
    // node's mirror retired, so a shallower cell can no longer be consumed).
    let stale = best(view).is_none()
        && view
            .parent()
            .is_some_and(|par| s.d > 1 && par.pl.is_empty() && pos < par.d);
    // Relay sequencing: inside an agreeing tree a node's relay cell trails
    // its parent's by at most one position, bit-identical at equal
    // positions.
    let seq = s.d > 1
        && best(view).is_none()
        && view.parent().is_some_and(|par| {
            par.elec == s.elec
                && match (par.pl, s.pl) {
                    (PipeCell::Cell { pos: q, bit: b }, PipeCell::Cell { pos: c, bit }) => {
                        !(q - c == 0 || q - c == 1) || (q == c && b != bit)
                    }
                    _ => false,
                }
        });
    stale || seq
}

/// Verification-track shapes no legal interleaving produces.
#[must_use]
pub fn er_hc(view: &NodeView) -> bool {
    let s = view.own;
    if s.d < 1 || s.d > s.b_hat {
        return false;
    }
    // Window shape: cells this node holds are addressed to its own slot or
    // deeper. An empty track is always tolerated — the next wave refills it
    // from the parent, so fresh joiners never count as damaged.
    if let Some(pos) = s.hc.pos() {
        if pos < s.d || pos > s.b_hat {
            return true;
        }
    }
    er_hc_seq(view)
}

/// Verification sequencing against the source track (the parent chain's PL
/// at the head, the chain parent's HC inside): the source leads this
/// node's window by 0 or 1, wipes meet only drained-or-terminal windows,
/// and equal positions carry equal bits.
#[must_use]
pub fn er_hc_seq(view: &NodeView) -> bool {
    let s = view.own;
    if s.d < 1 || s.d > s.b_hat || best(view).is_some() {
        return false;
    }
    let Some(par) = view.parent() else {
        return false;
    };
    if par.elec != s.elec {
        return false;
    }
    let head = s.d == 1;
    let source = if head { par.pl } else { par.hc };
    match (source, s.hc) {
        (PipeCell::Cell { pos: sp, bit: sb }, PipeCell::Cell { pos: cp, bit: cb }) => {
            let lead = sp - cp;
            let legal_lead = lead == 0 || lead == 1 || (head && sp == 1 && cp == s.b_hat);
            let bits_ok = sp != cp || sb == cb;
            !legal_lead || !bits_ok
        }
        (PipeCell::Empty, PipeCell::Cell { pos: cp, .. }) => {
            if head {
                cp != s.b_hat
            } else {
                true
            }
        }
        // The source's wipe may land in the same step as this node's grab
        // of the terminal cell, so Wipe over a real cell is damage only
        // when the cell is not terminal.
        (PipeCell::Wipe, PipeCell::Cell { pos: cp, .. }) => cp != s.b_hat,
        (PipeCell::Cell { pos: sp, .. }, PipeCell::Wipe) => {
            if head {
                !(sp == 1 || sp == s.b_hat)
            } else {
                sp != s.b_hat
            }
        }
        (PipeCell::Empty, PipeCell::Wipe) => !head,
        _ => false,
    }
}

/// Memory-shape errors.
#[must_use]
pub fn er_mem(view: &NodeView) -> bool {
    er_m_root(view) || er_m_add(view) || er_pl(view) || er_hc(view)
}

/// The Ψ-counted error predicate. Gated off next to reset neighbors: the
/// epidemic handles those, and post-flush propagation must not re-raise Ψ.
#[must_use]
pub fn er_t(view: &NodeView) -> bool {
    ng_reset(view).is_empty()
        && (er_nd(view) || er_phase(view) || er_bp(view) || er_control(view) || er_mem(view))
}

// ═══════════════════════════════════════════════════════════════════════
// Error family: pipeline detections (not counted by Ψ)
// ═══════════════════════════════════════════════════════════════════════

/// Increment overflow: a carry reaches the strongest bit while it stores a
/// one — the chain's value has no successor, which on a verified structure
/// can only mean the parent "tree" closes into a cycle.
#[must_use]
pub fn er_add(view: &NodeView) -> bool {
    let s = view.own;
    s.d == 1
        && s.d_b == 1
        && !children(view).is_empty()
        && vch(view, |u| u.add == AddMark::Plus)
        && vch(view, |u| u.d_b == 1)
}

/// Bit mismatch at the chain head: the parent chain publishes a head cell
/// whose bit differs from this node's stored bit.
#[must_use]
pub fn er_h1(view: &NodeView) -> bool {
    view.own.d == 1
        && view
            .parent()
            .is_some_and(|par| par.pl.pos() == Some(1) && par.pl.bit() != Some(view.own.d_b))
}

/// Bit mismatch in the chain interior: the cell addressed to this node's
/// slot carries the wrong bit.
#[must_use]
pub fn er_hg(view: &NodeView) -> bool {
    view.own.d > 1
        && view.parent().is_some_and(|par| {
            par.hc.pos() == Some(view.own.d) && par.hc.bit() != Some(view.own.d_b)
        })
}

/// Verification-pipeline detection, evaluated only inside an agreeing tree
/// (tuple equality with the parent) so wave copies never false-fire.
#[must_use]
pub fn er_hyper(view: &NodeView) -> bool {
    er_add(view)
        || (view.parent().is_some_and(|par| par.elec == view.own.elec)
            && (er_h1(view) || er_hg(view)))
}

/// Election-claim feasibility. Two layers:
///
/// * Shape (checked on every claim-carrier): the four revealed components
///   of one id must cohere — positions strictly descend along ranks, an
///   exhausted prefix never resumes, rank 1 is the strength itself, and
///   the wrap rank W sits below every other position. No reachable write
///   produces an incoherent claim, so a shape break is always planted
///   garbage.
/// * Dominance (checked where the node's own strongest bit matches the
///   claimed strength): SOME id at least as large as this node's could
///   have produced the claimed positions at the current rank AND at the
///   remembered previous rank. The witness is the lexicographically
///   maximal completion of each rank constraint: intermediate ranks packed
///   directly below the strength, every bit below the claimed position
///   set. If even that witness is smaller than this node's id — or no
///   strictly descending rank chain fits at all — the claimed root cannot
///   dominate this node and the claim is a lie.
#[must_use]
pub fn er_elec(view: &NodeView) -> bool {
    let s = view.own;
    let e = s.elec;
    let ph = e.phase;
    if s.d < 0 || ph < 1 || e.bit_strong != s.b_hat {
        return false;
    }
    let shape_ok = if ph == 1 {
        // At phase 1 `prev` is the wrap rank W; for B̂ = 0 the cycle has a
        // single rank and W coincides with rank 1 itself.
        e.prev == -1 || (0..e.bit_strong).contains(&e.prev) || (e.bit_strong == 0 && e.prev == 0)
    } else {
        let descend = e.bit_position == -1 || e.prev > e.bit_position;
        let no_resume = e.prev != -1 || (e.bit_position == -1 && ph >= 3);
        let rank_one = if ph == 2 {
            e.prev == e.bit_strong
        } else {
            e.prev < e.bit_strong
        };
        descend && no_resume && rank_one
    };
    if !shape_ok {
        return true;
    }
    if s.b_hat != bit(1, view.id) {
        return false;
    }
    let prev_rank = if ph == 1 { s.b_hat + 1 } else { ph - 1 };
    !claim_feasible(s.b_hat, ph, e.bit_position, view.id)
        || !claim_feasible(s.b_hat, prev_rank, e.prev, view.id)
}

/// Whether any id ≥ `id` has `b_hat` as its strongest bit and position
/// `bp` (−1 = exhausted) at rank `ph`.
#[must_use]
pub fn claim_feasible(b_hat: i32, ph: i32, bp: i32, id: Id) -> bool {
    if b_hat < 0 || ph < 1 {
        return false;
    }
    let witness: u128 = if bp >= 0 {
        // Ranks 1..ph strictly descend from b_hat to bp; maximal witness
        // packs ranks 2..ph−1 directly below the strength and sets every
        // bit below bp.
        if bp > b_hat || (ph == 1 && bp != b_hat) || (ph >= 2 && b_hat - bp < ph - 1) {
            return false;
        }
        let mids: u128 = (0..ph - 1).map(|t| 1u128 << (b_hat - t) as u32).sum();
        let high = if ph == 1 { 1u128 << b_hat as u32 } else { mids };
        high | (1u128 << bp as u32) | ((1u128 << bp as u32) - 1)
    } else {
        // Exhausted at rank ph: the id has at most ph−1 set bits, the
        // strongest at b_hat.
        if ph < 2 {
            return false;
        }
        let avail = (ph - 1).min(b_hat + 1);
        (0..avail).map(|t| 1u128 << (b_hat - t) as u32).sum()
    };
    witness >= id as u128
}

/// The complete error trigger.
#[must_use]
pub fn t_er(view: &NodeView) -> bool {
    er_t(view) || er_hyper(view) || er_elec(view)
}

// ═══════════════════════════════════════════════════════════════════════
// Rule dispatch
// ═══════════════════════════════════════════════════════════════════════

/// The unique enabled rule at this view, or `None` when the node is
/// disabled. Families are evaluated in listing order; within the root and
/// hyper-node families the documented alternative order applies.
#[must_use]
pub fn enabled_rule(view: &NodeView) -> Option<RuleId> {
    if t_er(view) || t_reset(view) {
        return Some(RuleId::Error);
    }
    if view.own.d == -1 {
        return t_start(view).then_some(RuleId::Start);
    }
    if t_pass(view) {
        return Some(RuleId::Passive);
    }
    if view.own.d == 0 {
        if t_start_db(view) {
            return Some(RuleId::RootStartdB);
        }
        return t_inc(view).then_some(RuleId::RootInc);
    }
    // d > 0 from here.
    if t_update(view) {
        return Some(RuleId::Update);
    }
    // The pipeline family runs whenever the parent agrees on strength and
    // the three wave components; the echo flag is deliberately ignored so
    // cells keep flowing while a control flip travels the tree (the echo
    // itself waits for the end-of-epoch wipe, so blocking the pipeline on
    // it would deadlock the wave).
    if view.parent().is_some_and(|par| {
        par.b_hat == view.own.b_hat && par.elec.agrees3(&view.own.elec)
    }) {
        if t_add(view) {
            return Some(RuleId::HyperBinAdd);
        }
        if view.own.add != AddMark::Empty && t_broad(view) {
            return Some(RuleId::HyperBroad);
        }
        if t_verif(view) {
            return Some(RuleId::HyperVerif);
        }
        if t_clean_m(view) {
            return Some(RuleId::HyperCleanM);
        }
    }
    None
}

// ═══════════════════════════════════════════════════════════════════════
// Named predicate evaluation
// ═══════════════════════════════════════════════════════════════════════

/// Every nullary catalog predicate, addressable by name for diagnostics.
/// (Parametric helpers — VCh, MCh, EqMEi, EqMEx — are plain functions.)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateId {
    NdReset,
    NdStart,
    Root,
    PassNd,
    CohP,
    ErD,
    Ch,
    Best,
    WaveB,
    UpP,
    UpBack,
    TReset,
    TStart,
    TPass,
    TUpdate,
    TInc,
    TStartDb,
    TAdd,
    TBroad,
    TVerif,
    TCleanM,
    ErNd,
    ErPhase,
    ErBp,
    ErControl,
    ErMRoot,
    ErMAdd,
    ErPl,
    ErHc,
    ErMem,
    ErT,
    ErAdd,
    ErH1,
    ErHg,
    ErHyper,
    ErElec,
    TEr,
}

impl PredicateId {
    pub const ALL: [(&'static str, PredicateId); 37] = [
        ("NdReset", Self::NdReset),
        ("NdStart", Self::NdStart),
        ("Root", Self::Root),
        ("PassNd", Self::PassNd),
        ("Coh_p", Self::CohP),
        ("Er_d", Self::ErD),
        ("Ch", Self::Ch),
        ("Best", Self::Best),
        ("Wave_B", Self::WaveB),
        ("Up_p", Self::UpP),
        ("Up_Back", Self::UpBack),
        ("T.Reset", Self::TReset),
        ("T.Start", Self::TStart),
        ("T.Pass", Self::TPass),
        ("T.Update", Self::TUpdate),
        ("T.Inc", Self::TInc),
        ("T.StartdB", Self::TStartDb),
        ("T.Add", Self::TAdd),
        ("T.Broad", Self::TBroad),
        ("T.Verif", Self::TVerif),
        ("T.CleanM", Self::TCleanM),
        ("Er_Nd", Self::ErNd),
        ("Er_Phase", Self::ErPhase),
        ("Er_Bp", Self::ErBp),
        ("Er_Control", Self::ErControl),
        ("Er_MRoot", Self::ErMRoot),
        ("Er_MAdd", Self::ErMAdd),
        ("Er_PL", Self::ErPl),
        ("Er_HC", Self::ErHc),
        ("Er_Mem", Self::ErMem),
        ("Er_T", Self::ErT),
        ("Er_Add", Self::ErAdd),
        ("Er_H1", Self::ErH1),
        ("Er_Hg", Self::ErHg),
        ("Er_Hyper", Self::ErHyper),
        ("Er_Elec", Self::ErElec),
        ("T.Er", Self::TEr),
    ];

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, p)| *p)
    }
}

/// Evaluate a named predicate on a view.
#[must_use]
pub fn eval_predicate(pred: PredicateId, view: &NodeView) -> bool {
    match pred {
        PredicateId::NdReset => nd_reset(view.own),
        PredicateId::NdStart => nd_start(view.own, view.id),
        PredicateId::Root => is_root(view.own, view.id),
        PredicateId::PassNd => pass_nd(view),
        PredicateId::CohP => coh_p(view),
        PredicateId::ErD => er_d(view),
        PredicateId::Ch => !children(view).is_empty(),
        PredicateId::Best => best(view).is_some(),
        PredicateId::WaveB => wave_b(view),
        PredicateId::UpP => up_p(view),
        PredicateId::UpBack => up_back(view),
        PredicateId::TReset => t_reset(view),
        PredicateId::TStart => t_start(view),
        PredicateId::TPass => t_pass(view),
        PredicateId::TUpdate => t_update(view),
        PredicateId::TInc => t_inc(view),
        PredicateId::TStartDb => t_start_db(view),
        PredicateId::TAdd => t_add(view),
        PredicateId::TBroad => t_broad(view),
        PredicateId::TVerif => t_verif(view),
        PredicateId::TCleanM => t_clean_m(view),
        PredicateId::ErNd => er_nd(view),
        PredicateId::ErPhase => er_phase(view),
        PredicateId::ErBp => er_bp(view),
        PredicateId::ErControl => er_control(view),
        PredicateId::ErMRoot => er_m_root(view),
        PredicateId::ErMAdd => er_m_add(view),
        PredicateId::ErPl => er_pl(view),
        PredicateId::ErHc => er_hc(view),
        PredicateId::ErMem => er_mem(view),
        PredicateId::ErT => er_t(view),
        PredicateId::ErAdd => er_add(view),
        PredicateId::ErH1 => er_h1(view),
        PredicateId::ErHg => er_hg(view),
        PredicateId::ErHyper => er_hyper(view),
        PredicateId::ErElec => er_elec(view),
        PredicateId::TEr => t_er(view),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::state::ElecTuple;

    // Line fixture with ring orientation: the port-0 neighbor faces back on
    // its port 1 and vice versa, so a child behind port 1 needs p = Some(0).
    fn view<'a>(
        id: Id,
        own: &'a NodeState,
        n0: (Id, &'a NodeState),
        n1: (Id, &'a NodeState),
    ) -> NodeView<'a> {
        NodeView {
            id,
            own,
            nbr_ids: [n0.0, n1.0],
            nbr: [n0.1, n1.1],
            nbr_back: [1, 0],
        }
    }

    #[test]
    fn reset_fixpoint_is_error_free_next_to_resets() {
        let r = NodeState::reset();
        let v = view(5, &r, (3, &r), (6, &r));
        assert!(nd_reset(v.own));
        assert!(!t_er(&v));
        assert!(!t_reset(&v));
        assert!(t_start(&v), "fully reset neighborhood enables Start");
        assert_eq!(enabled_rule(&v), Some(RuleId::Start));
    }

    #[test]
    fn reset_epidemic_reaches_non_reset_neighbors() {
        let r = NodeState::reset();
        let root = NodeState::start(2, -1); // id 5 = 101: rank-3 bit exhausted
        let v = view(5, &root, (3, &r), (6, &root));
        assert!(t_reset(&v) || nd_start(v.own, v.id));
        // A started node is exempt from the epidemic…
        assert!(nd_start(&root, 5));
        // …but an ordinary passive node is not.
        let mut passive = NodeState::start(2, -1);
        passive.leader = false;
        passive.d = 1;
        passive.p = Some(0);
        let v2 = view(6, &passive, (3, &r), (5, &root));
        assert!(t_reset(&v2));
        assert_eq!(enabled_rule(&v2), Some(RuleId::Error));
    }

    #[test]
    fn garbage_offset_without_better_neighbor_is_an_error() {
        // A node claiming d = 5 with incoherent surroundings and no
        // stronger neighbor must flag.
        let mut junk = NodeState::start(3, -1);
        junk.leader = false;
        junk.d = 5;
        junk.p = Some(0);
        junk.b_hat = 3;
        let weak = NodeState::start(1, -1); // strength 1 < 3: not a Best target
        let v = view(11, &junk, (2, &weak), (3, &weak)); // parent port 0
        assert!(best(&v).is_none());
        assert!(er_nd(&v), "d exceeding B̂ breaks the offset relation");
        assert_eq!(enabled_rule(&v), Some(RuleId::Error));
    }

    #[test]
    fn orphaned_child_with_stronger_neighbor_waits_instead_of_flagging() {
        let mut child = NodeState::start(2, -1);
        child.leader = false;
        child.d = 1;
        child.p = Some(0);
        child.b_hat = 2;
        child.elec = ElecTuple::new(2, 1, 2, -1, 0);
        let mut strong = NodeState::start(3, -1);
        strong.elec = ElecTuple::new(3, 1, 3, -1, 0);
        let v = view(4, &child, (5, &strong), (2, &strong));
        assert_eq!(best(&v), Some(0));
        assert!(!er_nd(&v), "a live defection target suppresses Er_Nd");
    }

    #[test]
    fn inc_fires_on_echoed_root_with_covered_neighborhood() {
        // Root id 11 (msb 3) at phase 1; both neighbors are children that
        // copied the tuple and echoed Control = 1.
        let root = NodeState::start(3, -1);
        let mut child = NodeState::start(3, -1);
        child.leader = false;
        child.d = 1;
        child.p = Some(0);
        child.elec = ElecTuple::new(3, 1, 3, -1, 1);
        child.pl = PipeCell::Empty;
        let v = view(11, &root, (5, &child), (6, &child));
        assert!(wave_b(&v));
        assert!(t_inc(&v));
    }

    #[test]
    fn skewed_fronts_defect_on_the_shared_rank() {
        // Two strength-6 reigns meet one phase apart. The leading reign's
        // root is 89 = 1011001 (rank 2 at position 4, rank 3 at 3); the
        // trailing front carries root 98 = 1100010 (rank 2 at position 5).
        let mut ahead = NodeState::start(6, -1);
        ahead.leader = false;
        ahead.d = 1;
        ahead.p = Some(0);
        ahead.elec = ElecTuple::new(6, 3, 3, 4, 0);
        let mut trail = ahead;
        trail.elec = ElecTuple::new(6, 2, 5, 6, 0);
        // The leading record loses rank 2 retroactively: 5 beats the 4 it
        // remembers revealing there.
        let v = view(40, &ahead, (44, &ahead), (35, &trail));
        assert_eq!(best(&v), Some(1));
        // The trailing record wins the same encounter: nothing to defect
        // to, and its frontier pins instead of clearing.
        let v2 = view(35, &trail, (40, &ahead), (33, &trail));
        assert_eq!(best(&v2), None);
        assert!(!frontier_clear(&v2));
        // A genuine tie — the leading record remembers exactly the
        // trailing one's position — is tolerated on both sides.
        let mut tied = ahead;
        tied.elec = ElecTuple::new(6, 3, 3, 5, 0);
        let v3 = view(35, &trail, (40, &tied), (33, &trail));
        assert_eq!(best(&v3), None);
        assert!(frontier_clear(&v3));
        assert!(!sup_ph(&v3).is_empty());
    }

    #[test]
    fn infeasible_previous_rank_is_detected() {
        // A claim can be feasible at its current rank yet already
        // convicted by what it revealed one rank earlier: (strength 6,
        // phase 3, position 3) admits ids up to 1101111 = 111, but a
        // rank-2 position of 4 caps the claimed root at 1011111 = 95 —
        // a lie next to id 98.
        let mut s = NodeState::start(6, -1);
        s.leader = false;
        s.d = 2;
        s.p = Some(0);
        s.elec = ElecTuple::new(6, 3, 3, 4, 0);
        let n = NodeState::start(6, -1);
        let v = view(98, &s, (99, &n), (97, &n));
        assert!(er_elec(&v));
        // The same record is silent next to a dominated bystander…
        let v2 = view(95, &s, (99, &n), (97, &n));
        assert!(!er_elec(&v2));
        // …and a coherent shape is required of every claim carrier:
        // positions must strictly descend along ranks.
        let mut bad = s;
        bad.elec = ElecTuple::new(6, 3, 4, 3, 0);
        let v3 = view(34, &bad, (99, &n), (97, &n));
        assert!(er_elec(&v3));
    }

    #[test]
    fn election_claim_feasibility_frozen_cases() {
        // Root 12's claims as seen by neighbors sharing msb 3.
        assert!(claim_feasible(3, 1, 3, 11));
        assert!(claim_feasible(3, 2, 2, 11));
        assert!(claim_feasible(3, 3, -1, 11)); // 11 under 12: never flags
        assert!(!claim_feasible(3, 3, -1, 13)); // 13 under 12: phase 3
        assert!(!claim_feasible(4, 2, 2, 24)); // 23's claim under 24: phase 2
        assert!(claim_feasible(4, 2, 2, 23)); // …but fine for 23 itself
        assert!(claim_feasible(4, 2, 3, 25)); // 24's phase-2 claim: witness 31
        assert!(!claim_feasible(4, 3, -1, 25)); // 24 under 25: caught at phase 3
        assert!(claim_feasible(4, 3, -1, 21)); // prefix-equal exhausted: silent
        // Phase 1 must claim the strength itself.
        assert!(!claim_feasible(3, 1, 2, 9));
    }

    #[test]
    fn guard_families_are_exclusive_after_dispatch() {
        // enabled_rule picks by priority; verify the underlying family
        // triggers cannot co-fire outside the documented overlaps on a
        // clean root view.
        let root = NodeState::start(3, -1);
        let r = NodeState::reset();
        let v = view(11, &root, (5, &r), (6, &r));
        // Reset neighbors: the started root is exempt from the epidemic
        // and must not error.
        assert!(!t_er(&v));
        assert!(!t_reset(&v));
        assert_eq!(enabled_rule(&v), None);
    }
}
