//! Configuration-level measurements: potential functions, legitimacy
//! regions, hyper-node chain values, and the memory bound.
//!
//! The potentials quantify distance from the attractor regions:
//!
//! * `L`  — number of raised leader flags (target 1).
//! * `Ψ`  — number of nodes whose structural error trigger holds. Legal
//!          moves never raise Ψ, so Ψ = 0 is closed under execution.
//! * `Φ`  — accumulated parent/offset incoherence of attached nodes that
//!          have no defection target; Φ = 0 iff no offset error remains.
//! * `Λ`  — counting discrepancy between adjacent complete chains (a
//!          verified tree has every child chain at parent value + 1).
//! * `Ξ`  — spread of claimed strengths below the ring's current maximum.
//! * `Π`  — spread of election tuples below the current front-runner.
//! * `P`  — distance of claimed strengths from the eventual winner's msb.
//! * `E`  — surviving roots that are already provably beaten at the
//!          current comparison rank.

use thiserror::Error;

use crate::identifiers::{bit, msb_position};
use crate::protocol::predicates::{best, er_t, eval_predicate, PredicateId};
use crate::protocol::state::NodeState;
use crate::topology::Configuration;

/// All potentials and region flags of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialReport {
    pub l: i64,
    pub psi: i64,
    pub phi: i64,
    pub lambda: i64,
    pub xi: i64,
    pub pi: i64,
    pub p_strength: i64,
    pub e_beaten: i64,
    /// Ψ = 0: no structural errors (closed under every daemon).
    pub gamma_tef: bool,
    /// Ψ = Φ = Λ = 0 and some leader flag: counting-free region.
    pub gamma_cf: bool,
    /// Ψ = P = E = 0: the eventual winner's strength rules the ring.
    pub gamma_ief: bool,
    /// Exactly one leader flag.
    pub gamma_le: bool,
}

/// Compute every potential in one pass.
#[must_use]
pub fn potentials(config: &Configuration) -> PotentialReport {
    let n = config.len();
    let states = &config.states;

    let l = states.iter().filter(|s| s.leader).count() as i64;
    let psi = (0..n).filter(|&i| er_t(&config.view(i))).count() as i64;

    // Φ: offset incoherence toward the parent for settled attached nodes.
    let mut phi = 0i64;
    for i in 0..n {
        let v = config.view(i);
        let s = v.own;
        if s.d <= 0 || best(&v).is_some() {
            continue;
        }
        let contribution = match v.parent() {
            None => i64::from(s.d),
            Some(par) if par.d == -1 => i64::from(s.d),
            Some(par) if (0..s.b_hat).contains(&par.d) => {
                i64::from((s.d - par.d - 1).abs())
            }
            Some(par) => {
                debug_assert!(par.d >= s.b_hat || par.d == 0 || s.b_hat <= 0);
                i64::from((s.d - 1).abs())
            }
        };
        phi += contribution;
    }

    // Λ: |value(chain) − value(parent chain) − 1| over complete chains whose
    // parent chain is itself complete (chains directly below a root have no
    // parent chain value and are exempt).
    let chains = hyper_nodes(config);
    let mut lambda = 0i64;
    for chain in &chains {
        let Some(value) = chain.value else { continue };
        let Some(parent_tail) = chain.parent_tail else {
            continue;
        };
        if config.states[parent_tail].d == 0 {
            continue;
        }
        if let Some(parent_chain) = chains
            .iter()
            .find(|c| c.complete() && c.members.contains(&parent_tail))
        {
            if let Some(pv) = parent_chain.value {
                lambda += (value as i64 - pv as i64 - 1).abs();
            }
        }
    }

    // Ξ and Π: spread below the configuration's own current maxima.
    let max_bhat = states.iter().map(|s| s.b_hat).max().unwrap_or(-1);
    let xi: i64 = states
        .iter()
        .map(|s| i64::from((max_bhat - s.b_hat).abs()))
        .sum();
    let max_ph = states.iter().map(|s| s.elec.phase).max().unwrap_or(0);
    let front: Vec<&NodeState> = states
        .iter()
        .filter(|s| s.elec.phase == max_ph)
        .collect();
    let max_bp = front
        .iter()
        .map(|s| s.elec.bit_position)
        .max()
        .unwrap_or(-1);
    let max_c = front
        .iter()
        .map(|s| i32::from(s.elec.control))
        .max()
        .unwrap_or(-1);
    let pi: i64 = states
        .iter()
        .map(|s| {
            i64::from((s.elec.bit_strong - max_bhat).abs())
                + i64::from((s.elec.phase - max_ph).abs())
                + i64::from((s.elec.bit_position - max_bp).abs())
                + i64::from((i32::from(s.elec.control) - max_c).abs())
        })
        .sum();

    // P and E: distance from the eventual winner.
    let max_id = *config.ring.ids().iter().max().expect("nonempty ring");
    let max_fb = msb_position(max_id).expect("positive ids") as i32;
    let p_strength: i64 = states
        .iter()
        .map(|s| i64::from((max_fb - s.b_hat).abs()))
        .sum();
    let min_ph = states.iter().map(|s| s.elec.phase).min().unwrap_or(0);
    let e_beaten: i64 = if min_ph < 1 {
        0
    } else {
        (0..n)
            .filter(|&i| {
                states[i].d == 0
                    && bit(min_ph as u32, config.ring.id(i)) < bit(min_ph as u32, max_id)
            })
            .count() as i64
    };

    let gamma_tef = psi == 0;
    let gamma_cf = psi == 0 && phi == 0 && lambda == 0 && l > 0;
    let gamma_ief = psi == 0 && p_strength == 0 && e_beaten == 0;
    let gamma_le = l == 1;
    PotentialReport {
        l,
        psi,
        phi,
        lambda,
        xi,
        pi,
        p_strength,
        e_beaten,
        gamma_tef,
        gamma_cf,
        gamma_ief,
        gamma_le,
    }
}

/// A maximal parent-linked run of chain members (d = 1, 2, …) hanging off
/// one attachment point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Node indices, head (d = 1) first.
    pub members: Vec<usize>,
    /// Ring index of the node the head's parent pointer selects, when the
    /// pointer is set.
    pub parent_tail: Option<usize>,
    /// Claimed length (the head's B̂).
    pub claimed_len: i32,
    /// The chain's binary value, present iff the chain is complete.
    pub value: Option<u64>,
}

impl Chain {
    /// A chain is complete when it has exactly B̂ members with offsets
    /// 1..=B̂.
    #[must_use]
    pub fn complete(&self) -> bool {
        self.value.is_some()
    }
}

/// Chain-value extraction failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("node {0} is not a chain head (d must be 1)")]
    NotAHead(usize),
    #[error("chain starting at node {head} is incomplete: {got} of {want} members")]
    Incomplete { head: usize, got: i32, want: i32 },
}

/// All chains in the configuration, one per head (d = 1) node.
///
/// Members are linked by parent pointers with incrementing offsets and
/// equal B̂; the walk stops at the claimed length, at a break, or when the
/// offsets leave the chain range.
#[must_use]
pub fn hyper_nodes(config: &Configuration) -> Vec<Chain> {
    (0..config.len())
        .filter(|&i| config.states[i].d == 1)
        .map(|head| walk_chain(config, head))
        .collect()
}

fn walk_chain(config: &Configuration, head: usize) -> Chain {
    let n = config.len();
    let states = &config.states;
    let b_hat = states[head].b_hat;
    let parent_tail = states[head]
        .p
        .map(|q| config.ring.neighbor(head, q).0);
    let mut members = vec![head];
    let mut at = head;
    // Follow the unique neighbor that points back at `at` with the next
    // offset and the same claimed length.
    'walk: while states[at].d < b_hat && (members.len() as i32) < b_hat.max(0) + 1 {
        for q in 0u8..2 {
            let (u, r) = config.ring.neighbor(at, q);
            let su = &states[u];
            if su.p == Some(r)
                && su.d == states[at].d + 1
                && su.b_hat == b_hat
                && !members.contains(&u)
            {
                members.push(u);
                at = u;
                continue 'walk;
            }
        }
        break;
    }
    debug_assert!(members.len() <= n);
    let complete = b_hat >= 1 && members.len() as i32 == b_hat;
    let value = complete.then(|| {
        members
            .iter()
            .fold(0u64, |acc, &i| (acc << 1) | u64::from(states[i].d_b))
    });
    Chain {
        members,
        parent_tail,
        claimed_len: b_hat,
        value,
    }
}

/// The value of the complete chain headed at `head`.
pub fn chain_value(config: &Configuration, head: usize) -> Result<u64, ChainError> {
    if config.states[head].d != 1 {
        return Err(ChainError::NotAHead(head));
    }
    let chain = walk_chain(config, head);
    chain.value.ok_or(ChainError::Incomplete {
        head,
        got: chain.members.len() as i32,
        want: chain.claimed_len,
    })
}

/// Per-node register budget in bits for rings whose largest id has
/// K = msb + 1 bits: the constant-domain registers cost 14 bits (leader,
/// parent, stored bit, the two pipeline tags, the control flag, and the
/// two three-valued settlement signals), six K-bounded fields cost
/// ⌈log₂(K+3)⌉ each, and the offset costs ⌈log₂(K+1)⌉.
#[must_use]
pub fn memory_bits(k: u32) -> u32 {
    let w = ceil_log2(k + 3);
    let d = ceil_log2(k + 1);
    14 + 6 * w + d
}

/// Memory budget of a configuration's id domain.
#[must_use]
pub fn memory_bits_of(config: &Configuration) -> u32 {
    memory_bits(config.ring.max_msb() as u32 + 1)
}

fn ceil_log2(x: u32) -> u32 {
    debug_assert!(x >= 1);
    32 - (x - 1).leading_zeros()
}

/// Structural legitimacy: the maximum id holds the unique leader flag with
/// the root record shape, every other node is attached, and the parent
/// pointers form a spanning tree rooted there.
#[must_use]
pub fn is_structurally_legitimate(config: &Configuration) -> bool {
    let n = config.len();
    let states = &config.states;
    let winner = config.ring.max_id_index();
    let max_fb = config.ring.max_msb();

    let root_ok = states[winner].leader
        && states[winner].d == 0
        && states[winner].p.is_none()
        && states[winner].b_hat == max_fb;
    if !root_ok {
        return false;
    }
    for (i, s) in states.iter().enumerate() {
        if i == winner {
            continue;
        }
        if s.leader || s.d < 1 || s.p.is_none() || s.b_hat != max_fb {
            return false;
        }
    }
    // Every node must reach the root by following parents, without cycles.
    for start in 0..n {
        let mut at = start;
        let mut hops = 0;
        while at != winner {
            let Some(q) = states[at].p else { return false };
            at = config.ring.neighbor(at, q).0;
            hops += 1;
            if hops > n {
                return false;
            }
        }
    }
    true
}

/// Count the Ψ predicate through the public named-predicate interface —
/// used by tests to cross-check the potential computation.
#[must_use]
pub fn psi_by_name(config: &Configuration) -> i64 {
    (0..config.len())
        .filter(|&i| eval_predicate(PredicateId::ErT, &config.view(i)))
        .count() as i64
}
