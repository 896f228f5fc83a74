//! Per-node register file.
//!
//! Every node exposes the same small set of shared registers; neighbors read
//! them directly (state-sharing model). Domains are all bounded by
//! K = msb(max id) + 1, which is what gives the protocol its O(log log n)
//! space bound:
//!
//! ```text
//!   leader ∈ {0,1}      elected flag
//!   p      ∈ {∅,0,1}    parent port (∅ = no parent)
//!   d      ∈ {−1,0,1..} −1 = reset, 0 = root, ≥1 = offset inside hyper-node
//!   dB     ∈ {0,1}      this node's stored bit of its hyper-node's value
//!   B̂      ∈ {−1,0,..}  claimed hyper-node length = msb of the root's id
//!   Elec   = (Bit-Strong, Phase, Bit-Position, Prev, Control)
//!   Add    ∈ {⊥,+,ok}   carry mark of the distributed increment
//!   PL,HC  pipeline cells: ⊥ | (pos,bit) | (−1,−1) wipe marker
//! ```

use thiserror::Error;

/// Port index on a ring node: each node has exactly two.
pub type Port = u8;

/// The election tuple (Bit-Strong, Phase, Bit-Position, Prev, Control).
///
/// `bit_strong` is the advertised root-id msb, `phase` the current
/// comparison round, `bit_position` the root id's bit at rank `phase`
/// (−1 once exhausted), `prev` the position the same claim revealed at the
/// previous rank (rank W = B̂+1 when phase is 1, by the cyclic schedule),
/// and `control` the wave marker (0 = broadcast pending, 1 = subtree
/// echoed; −1 only inside the reset tuple).
///
/// `prev` is the one-rank memory that keeps phase-skewed encounters sound:
/// when two fronts meet one phase apart, the trailing claim is compared
/// against what the leading claim revealed at the trailing rank, so the
/// contest is always decided on the rank where the ids actually differ —
/// even when one side already advanced past it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElecTuple {
    pub bit_strong: i32,
    pub phase: i32,
    pub bit_position: i32,
    pub prev: i32,
    pub control: i8,
}

impl ElecTuple {
    /// The reset value (−1, 0, −1, −1, −1).
    pub const RESET: Self = Self {
        bit_strong: -1,
        phase: 0,
        bit_position: -1,
        prev: -1,
        control: -1,
    };

    #[must_use]
    pub const fn new(bit_strong: i32, phase: i32, bit_position: i32, prev: i32, control: i8) -> Self {
        Self {
            bit_strong,
            phase,
            bit_position,
            prev,
            control,
        }
    }

    /// Fresh-root tuple for a node whose id has msb `m`: phase 1 claims the
    /// node's own strongest bit. `prev` is seeded with the id's rank-W
    /// position — the value a full reign cycle would have revealed just
    /// before wrapping back to phase 1 — so wrap-around comparisons stay
    /// consistent for reigns of any age.
    #[must_use]
    pub const fn start(m: i32, prev: i32) -> Self {
        Self::new(m, 1, m, prev, 0)
    }

    /// Agreement on the first three components (Bit-Strong, Phase,
    /// Bit-Position) — the wave-synchronization comparison.
    #[must_use]
    pub fn agrees3(&self, other: &Self) -> bool {
        self.bit_strong == other.bit_strong
            && self.phase == other.phase
            && self.bit_position == other.bit_position
    }
}

/// Carry mark of the distributed binary increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AddMark {
    /// ⊥ — not participating in the current increment wave.
    #[default]
    Empty,
    /// `+` — a carry passes through this bit (publish ¬dB).
    Plus,
    /// `ok` — no carry here (publish dB unchanged).
    Ok,
}

/// One pipeline cell of the PL (broadcast-down) or HC (verify) track.
///
/// A real cell `(pos, bit)` carries the claimed bit for hyper-node offset
/// `pos` (1-based, ≤ B̂). `Wipe` = (−1,−1) marks a consumed verification
/// track being cleared bottom-up; it is legal in HC only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PipeCell {
    /// ⊥ — empty slot.
    #[default]
    Empty,
    /// A positioned bit claim.
    Cell { pos: i32, bit: u8 },
    /// The (−1,−1) wipe marker.
    Wipe,
}

impl PipeCell {
    #[must_use]
    pub const fn cell(pos: i32, bit: u8) -> Self {
        Self::Cell { pos, bit }
    }

    /// Position of a real cell, `None` for ⊥ and wipe.
    #[must_use]
    pub fn pos(&self) -> Option<i32> {
        match self {
            Self::Cell { pos, .. } => Some(*pos),
            _ => None,
        }
    }

    /// Bit of a real cell, `None` for ⊥ and wipe.
    #[must_use]
    pub fn bit(&self) -> Option<u8> {
        match self {
            Self::Cell { bit, .. } => Some(*bit),
            _ => None,
        }
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    #[must_use]
    pub fn is_wipe(&self) -> bool {
        matches!(self, Self::Wipe)
    }

    #[must_use]
    pub fn is_real(&self) -> bool {
        matches!(self, Self::Cell { .. })
    }
}

/// The complete register file of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeState {
    pub leader: bool,
    pub p: Option<Port>,
    pub d: i32,
    pub d_b: u8,
    pub b_hat: i32,
    pub elec: ElecTuple,
    pub add: AddMark,
    pub pl: PipeCell,
    pub hc: PipeCell,
}

impl NodeState {
    /// The full reset record: leader 0, no parent, d = −1, dB = 0, B̂ = −1,
    /// Elec = (−1,0,−1,−1,−1), Add = PL = HC = ⊥.
    #[must_use]
    pub const fn reset() -> Self {
        Self {
            leader: false,
            p: None,
            d: -1,
            d_b: 0,
            b_hat: -1,
            elec: ElecTuple::RESET,
            add: AddMark::Empty,
            pl: PipeCell::Empty,
            hc: PipeCell::Empty,
        }
    }

    /// True iff this is exactly the reset record.
    #[must_use]
    pub fn is_full_reset(&self) -> bool {
        *self == Self::reset()
    }

    /// Fresh-root record for a node whose id has msb `m` and rank-W bit
    /// position `prev`: leader, d = 0, no parent, B̂ = m,
    /// Elec = (m,1,m,prev,0), and the first published cell PL = (1,0).
    #[must_use]
    pub const fn start(m: i32, prev: i32) -> Self {
        Self {
            leader: true,
            p: None,
            d: 0,
            d_b: 0,
            b_hat: m,
            elec: ElecTuple::start(m, prev),
            add: AddMark::Empty,
            pl: PipeCell::cell(1, 0),
            hc: PipeCell::Empty,
        }
    }

    /// Structural validity of a single register file: pure domain bounds
    /// given `max_msb` = msb of the largest id in play, plus the hard joint
    /// invariant that d = −1 is exactly the reset record. The bounds cover
    /// the full evolution closure of loadable states (garbage arcs can
    /// transiently push d and cell positions past B̂ before the error layer
    /// clears them), so any state the simulator can ever write restores
    /// losslessly through parse → validate.
    pub fn validate(&self, max_msb: i32) -> Result<(), StateError> {
        let m = max_msb;
        if self.d == -1 && !self.is_full_reset() {
            return Err(StateError::PartialReset);
        }
        if !(-1..=m + 3).contains(&self.d) {
            return Err(StateError::Domain("d", self.d));
        }
        if !(-1..=m + 2).contains(&self.b_hat) {
            return Err(StateError::Domain("bhat", self.b_hat));
        }
        if !(-1..=m + 2).contains(&self.elec.bit_strong) {
            return Err(StateError::Domain("elec.bit_strong", self.elec.bit_strong));
        }
        if !(0..=m + 3).contains(&self.elec.phase) {
            return Err(StateError::Domain("elec.phase", self.elec.phase));
        }
        if !(-1..=m + 2).contains(&self.elec.bit_position) {
            return Err(StateError::Domain("elec.bit_position", self.elec.bit_position));
        }
        if !(-1..=m + 2).contains(&self.elec.prev) {
            return Err(StateError::Domain("elec.prev", self.elec.prev));
        }
        if !(-1..=1).contains(&self.elec.control) {
            return Err(StateError::Domain("elec.control", self.elec.control as i32));
        }
        for (name, cell) in [("pl", self.pl), ("hc", self.hc)] {
            if let PipeCell::Cell { pos, bit } = cell {
                if bit > 1 {
                    return Err(StateError::Domain(name, bit as i32));
                }
                if pos < 1 || pos > m + 3 {
                    return Err(StateError::Domain(name, pos));
                }
            }
        }
        if self.d_b > 1 {
            return Err(StateError::Domain("dB", self.d_b as i32));
        }
        if let Some(port) = self.p {
            if port > 1 {
                return Err(StateError::Domain("p", port as i32));
            }
        }
        Ok(())
    }
}

/// Violations of the register-file invariants.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("d = -1 requires the full reset record")]
    PartialReset,
    #[error("field {0} outside its domain: {1}")]
    Domain(&'static str, i32),
}

/// The ten rules of the protocol, named by family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    Error,
    Start,
    Passive,
    RootStartdB,
    RootInc,
    Update,
    HyperBinAdd,
    HyperBroad,
    HyperVerif,
    HyperCleanM,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::Error,
        RuleId::Start,
        RuleId::Passive,
        RuleId::RootStartdB,
        RuleId::RootInc,
        RuleId::Update,
        RuleId::HyperBinAdd,
        RuleId::HyperBroad,
        RuleId::HyperVerif,
        RuleId::HyperCleanM,
    ];

    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            RuleId::Error => "Error",
            RuleId::Start => "Start",
            RuleId::Passive => "Passive",
            RuleId::RootStartdB => "Root_StartdB",
            RuleId::RootInc => "Root_Inc",
            RuleId::Update => "Update",
            RuleId::HyperBinAdd => "Hyper_BinAdd",
            RuleId::HyperBroad => "Hyper_Broad",
            RuleId::HyperVerif => "Hyper_Verif",
            RuleId::HyperCleanM => "Hyper_CleanM",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_record_shape() {
        let r = NodeState::reset();
        assert!(!r.leader);
        assert_eq!(r.p, None);
        assert_eq!(r.d, -1);
        assert_eq!(r.b_hat, -1);
        assert_eq!(r.elec, ElecTuple::new(-1, 0, -1, -1, -1));
        assert!(r.add == AddMark::Empty && r.pl.is_empty() && r.hc.is_empty());
        assert!(r.is_full_reset());
        r.validate(4).unwrap();
    }

    #[test]
    fn start_record_for_msb_three() {
        // A fresh root with id 15 = 1111: msb 3, rank-4 (= W) bit at 0.
        let s = NodeState::start(3, 0);
        assert!(s.leader);
        assert_eq!(s.d, 0);
        assert_eq!(s.b_hat, 3);
        assert_eq!(s.elec, ElecTuple::new(3, 1, 3, 0, 0));
        assert_eq!(s.pl, PipeCell::cell(1, 0));
        s.validate(3).unwrap();
    }

    #[test]
    fn partial_reset_is_invalid() {
        let mut bad = NodeState::reset();
        bad.leader = true;
        assert_eq!(bad.validate(4), Err(StateError::PartialReset));
    }

    #[test]
    fn domain_bounds_reject_out_of_range_fields() {
        // Start on an msb-0 id (id 1: no rank-1 bit beyond the msb) writes
        // PL=(1,0) with B̂=0: legal.
        let s = NodeState::start(0, -1);
        s.validate(4).unwrap();
        // Positions are bounded by the global evolution closure, not B̂.
        let mut deep = s;
        deep.pl = PipeCell::cell(7, 0);
        deep.validate(4).unwrap();
        let mut bad = s;
        bad.pl = PipeCell::cell(8, 0);
        assert_eq!(bad.validate(4), Err(StateError::Domain("pl", 8)));
        let mut bad_d = s;
        bad_d.d = 8;
        assert_eq!(bad_d.validate(4), Err(StateError::Domain("d", 8)));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(RuleId::parse(r.name()), Some(r));
        }
        assert_eq!(RuleId::parse("NotARule"), None);
    }
}
