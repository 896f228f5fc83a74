//! Ring topologies and configurations.
//!
//! A ring is a cyclic sequence of uniquely-identified nodes where each node
//! has exactly two ports. Rings are *unoriented*: a node's two ports carry
//! no global sense of direction, so the wiring records, for each port, both
//! the neighbor and the neighbor's reciprocal port.
//!
//! A configuration is a ring plus one register file per node. Configurations
//! have a canonical single-line-per-item text form ("clering-config v1")
//! whose SHA-256 digest identifies the configuration exactly; traces and the
//! replay machinery are built on that digest.

use std::fmt::Write as _;

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::identifiers::{msb_position, Id};
use crate::protocol::state::{AddMark, ElecTuple, NodeState, PipeCell, Port, Sig, StateError};
use crate::protocol::NodeView;

/// Magic first line of the canonical configuration format.
pub const CONFIG_HEADER: &str = "clering-config v1";

/// An unoriented ring: ids plus, for each node and port, the neighbor and
/// the port the neighbor uses for the reverse direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    ids: Vec<Id>,
    wiring: Vec<[(usize, Port); 2]>,
}

impl Ring {
    /// Build a ring from explicit wiring. Checks id uniqueness/positivity,
    /// port-reciprocity, and 2-regular cyclic connectivity.
    pub fn from_wiring(ids: Vec<Id>, wiring: Vec<[(usize, Port); 2]>) -> Result<Self, ConfigError> {
        let n = ids.len();
        if n < 2 {
            return Err(ConfigError::TooSmall(n));
        }
        if wiring.len() != n {
            return Err(ConfigError::WiringCount {
                expected: n,
                found: wiring.len(),
            });
        }
        if ids.contains(&0) {
            return Err(ConfigError::ZeroId);
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return Err(ConfigError::DuplicateId);
        }
        for (i, ports) in wiring.iter().enumerate() {
            for (q, &(j, r)) in ports.iter().enumerate() {
                if j >= n || r > 1 {
                    return Err(ConfigError::WiringRange { node: i, port: q as Port });
                }
                if wiring[j][r as usize] != (i, q as Port) {
                    return Err(ConfigError::WiringReciprocity { node: i, port: q as Port });
                }
                if j == i {
                    return Err(ConfigError::SelfLoop { node: i });
                }
            }
        }
        // Walk the cycle: starting over port 1 of node 0, never re-entering
        // through the port we left by, we must visit all n nodes and return.
        let mut visited = vec![false; n];
        let (mut at, mut in_port) = {
            let (j, r) = wiring[0][1];
            (j, r)
        };
        visited[0] = true;
        let mut count = 1usize;
        while at != 0 {
            if visited[at] {
                return Err(ConfigError::NotARing);
            }
            visited[at] = true;
            count += 1;
            let out_port = 1 - in_port;
            let (j, r) = wiring[at][out_port as usize];
            at = j;
            in_port = r;
        }
        if count != n {
            return Err(ConfigError::NotARing);
        }
        Ok(Self { ids, wiring })
    }

    /// A ring over `ids` in listed order, with each node's port labels
    /// flipped independently at random: a seeded unoriented ring.
    pub fn random_orientation(ids: Vec<Id>, rng: &mut impl Rng) -> Result<Self, ConfigError> {
        let n = ids.len();
        let swaps: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        Self::with_port_swaps(ids, &swaps)
    }

    /// A ring over `ids` in listed order with explicit per-node port swaps
    /// (false: port 1 faces the next node; true: port 0 does).
    pub fn with_port_swaps(ids: Vec<Id>, swaps: &[bool]) -> Result<Self, ConfigError> {
        let n = ids.len();
        if n < 2 {
            return Err(ConfigError::TooSmall(n));
        }
        // Outgoing port toward node (i+1): 1 normally, 0 when swapped.
        let out = |i: usize| -> Port {
            if swaps[i] {
                0
            } else {
                1
            }
        };
        let mut wiring = vec![[(0usize, 0 as Port); 2]; n];
        for i in 0..n {
            let j = (i + 1) % n;
            let qi = out(i);
            let qj = 1 - out(j); // j's port facing back toward i
            wiring[i][qi as usize] = (j, qj);
            wiring[j][qj as usize] = (i, qi);
        }
        Self::from_wiring(ids, wiring)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[must_use]
    pub fn id(&self, i: usize) -> Id {
        self.ids[i]
    }

    #[must_use]
    pub fn ids(&self) -> &[Id] {
        &self.ids
    }

    /// Neighbor index and reciprocal port behind `(node, port)`.
    #[must_use]
    pub fn neighbor(&self, i: usize, q: Port) -> (usize, Port) {
        self.wiring[i][q as usize]
    }

    /// msb of the largest id: the K−1 bound all register domains refer to.
    #[must_use]
    pub fn max_msb(&self) -> i32 {
        let max = *self.ids.iter().max().expect("rings are nonempty");
        msb_position(max).expect("ids are positive") as i32
    }

    /// Index of the maximum id (the node that must win the election).
    #[must_use]
    pub fn max_id_index(&self) -> usize {
        (0..self.len())
            .max_by_key(|&i| self.ids[i])
            .expect("rings are nonempty")
    }
}

/// A ring plus one register file per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub ring: Ring,
    pub states: Vec<NodeState>,
}

impl Configuration {
    /// All nodes in the given state.
    #[must_use]
    pub fn uniform(ring: Ring, state: NodeState) -> Self {
        let states = vec![state; ring.len()];
        Self { ring, states }
    }

    /// All nodes reset.
    #[must_use]
    pub fn reset(ring: Ring) -> Self {
        Self::uniform(ring, NodeState::reset())
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.ring.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// The view node `i` evaluates its guards on.
    #[must_use]
    pub fn view(&self, i: usize) -> NodeView<'_> {
        let (j0, r0) = self.ring.neighbor(i, 0);
        let (j1, r1) = self.ring.neighbor(i, 1);
        NodeView {
            id: self.ring.id(i),
            own: &self.states[i],
            nbr_ids: [self.ring.id(j0), self.ring.id(j1)],
            nbr: [&self.states[j0], &self.states[j1]],
            nbr_back: [r0, r1],
        }
    }

    /// Validate every register file against the ring's id domain.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = self.ring.max_msb();
        for (i, s) in self.states.iter().enumerate() {
            s.validate(m)
                .map_err(|source| ConfigError::InvalidState { node: i, source })?;
        }
        Ok(())
    }

    /// Canonical text form. Decoding the result and re-encoding reproduces
    /// it byte for byte.
    #[must_use]
    pub fn encode(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        let _ = writeln!(out, "{CONFIG_HEADER}");
        let _ = writeln!(out, "n {n}");
        let ids: Vec<String> = self.ring.ids.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "ids {}", ids.join(" "));
        let wires: Vec<String> = (0..n)
            .map(|i| {
                let (j, r) = self.ring.neighbor(i, 0);
                let (k, s) = self.ring.neighbor(i, 1);
                format!("{j}.{r},{k}.{s}")
            })
            .collect();
        let _ = writeln!(out, "wiring {}", wires.join(" "));
        for (i, st) in self.states.iter().enumerate() {
            let p = match st.p {
                None => "NOPARENT".to_string(),
                Some(q) => q.to_string(),
            };
            let _ = writeln!(
                out,
                "node {i} leader={} p={p} d={} dB={} bhat={} elec={},{},{},{} add={} pl={} hc={} sig={},{}",
                u8::from(st.leader),
                st.d,
                st.d_b,
                st.b_hat,
                st.elec.bit_strong,
                st.elec.phase,
                st.elec.bit_position,
                st.elec.control,
                encode_add(st.add),
                encode_cell(st.pl),
                encode_cell(st.hc),
                st.sig[0].token(),
                st.sig[1].token(),
            );
        }
        out
    }

    /// Parse the canonical text form.
    pub fn decode(text: &str) -> Result<Self, ConfigError> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().ok_or(ConfigError::Empty)?;
        if header.1 != CONFIG_HEADER {
            return Err(ConfigError::BadHeader(header.1.to_string()));
        }

        let (ln, n_line) = lines.next().ok_or(ConfigError::Truncated)?;
        let n: usize = parse_tagged(n_line, "n", ln)?
            .parse()
            .map_err(|_| syntax(ln, "node count"))?;

        let (ln, ids_line) = lines.next().ok_or(ConfigError::Truncated)?;
        let ids: Vec<Id> = parse_tagged(ids_line, "ids", ln)?
            .split(' ')
            .map(|t| t.parse().map_err(|_| syntax(ln, "id list")))
            .collect::<Result<_, _>>()?;
        if ids.len() != n {
            return Err(syntax(ln, "id count mismatch"));
        }

        let (ln, wiring_line) = lines.next().ok_or(ConfigError::Truncated)?;
        let wiring: Vec<[(usize, Port); 2]> = parse_tagged(wiring_line, "wiring", ln)?
            .split(' ')
            .map(|tok| parse_wiring_token(tok, ln))
            .collect::<Result<_, _>>()?;
        if wiring.len() != n {
            return Err(syntax(ln, "wiring count mismatch"));
        }

        let mut states = Vec::with_capacity(n);
        for expect in 0..n {
            let (ln, line) = lines.next().ok_or(ConfigError::Truncated)?;
            states.push(parse_node_line(line, expect, ln)?);
        }
        if let Some((ln, extra)) = lines.next() {
            if !extra.trim().is_empty() {
                return Err(syntax(ln, "trailing content"));
            }
        }

        let ring = Ring::from_wiring(ids, wiring)?;
        let config = Self { ring, states };
        config.validate()?;
        Ok(config)
    }

    /// SHA-256 of the canonical text, lowercase hex.
    #[must_use]
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.encode().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in hash {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

fn encode_add(a: AddMark) -> &'static str {
    match a {
        AddMark::Empty => "BOT",
        AddMark::Plus => "+",
        AddMark::Ok => "ok",
    }
}

fn encode_cell(c: PipeCell) -> String {
    match c {
        PipeCell::Empty => "BOT".to_string(),
        PipeCell::Wipe => "-1,-1".to_string(),
        PipeCell::Cell { pos, bit } => format!("{pos},{bit}"),
    }
}

fn syntax(line0: usize, what: &str) -> ConfigError {
    ConfigError::Syntax {
        line: line0 + 1,
        what: what.to_string(),
    }
}

fn parse_tagged<'a>(line: &'a str, tag: &str, ln: usize) -> Result<&'a str, ConfigError> {
    line.strip_prefix(tag)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| syntax(ln, tag))
}

fn parse_wiring_token(tok: &str, ln: usize) -> Result<[(usize, Port); 2], ConfigError> {
    let err = || syntax(ln, "wiring token");
    let (a, b) = tok.split_once(',').ok_or_else(err)?;
    let parse_end = |s: &str| -> Result<(usize, Port), ConfigError> {
        let (j, r) = s.split_once('.').ok_or_else(err)?;
        Ok((
            j.parse().map_err(|_| err())?,
            r.parse().map_err(|_| err())?,
        ))
    };
    Ok([parse_end(a)?, parse_end(b)?])
}

fn parse_node_line(line: &str, expect: usize, ln: usize) -> Result<NodeState, ConfigError> {
    let mut toks = line.split(' ');
    if toks.next() != Some("node") {
        return Err(syntax(ln, "node line"));
    }
    let idx: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| syntax(ln, "node index"))?;
    if idx != expect {
        return Err(syntax(ln, "node index order"));
    }
    let mut field = |tag: &str| -> Result<String, ConfigError> {
        let tok = toks.next().ok_or_else(|| syntax(ln, "missing field"))?;
        tok.strip_prefix(tag)
            .and_then(|rest| rest.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| syntax(ln, tag))
    };
    let leader = match field("leader")?.as_str() {
        "0" => false,
        "1" => true,
        _ => return Err(syntax(ln, "leader")),
    };
    let p = match field("p")?.as_str() {
        "NOPARENT" => None,
        "0" => Some(0),
        "1" => Some(1),
        _ => return Err(syntax(ln, "p")),
    };
    let d: i32 = field("d")?.parse().map_err(|_| syntax(ln, "d"))?;
    let d_b: u8 = field("dB")?.parse().map_err(|_| syntax(ln, "dB"))?;
    let b_hat: i32 = field("bhat")?.parse().map_err(|_| syntax(ln, "bhat"))?;
    let elec_raw = field("elec")?;
    let parts: Vec<&str> = elec_raw.split(',').collect();
    if parts.len() != 4 {
        return Err(syntax(ln, "elec"));
    }
    let elec = ElecTuple::new(
        parts[0].parse().map_err(|_| syntax(ln, "elec"))?,
        parts[1].parse().map_err(|_| syntax(ln, "elec"))?,
        parts[2].parse().map_err(|_| syntax(ln, "elec"))?,
        parts[3].parse().map_err(|_| syntax(ln, "elec"))?,
    );
    let add = match field("add")?.as_str() {
        "BOT" => AddMark::Empty,
        "+" => AddMark::Plus,
        "ok" => AddMark::Ok,
        _ => return Err(syntax(ln, "add")),
    };
    let pl = parse_cell(&field("pl")?, ln)?;
    let hc = parse_cell(&field("hc")?, ln)?;
    let sig_raw = field("sig")?;
    let (s0, s1) = sig_raw.split_once(',').ok_or_else(|| syntax(ln, "sig"))?;
    let sig = [
        Sig::parse(s0).ok_or_else(|| syntax(ln, "sig"))?,
        Sig::parse(s1).ok_or_else(|| syntax(ln, "sig"))?,
    ];
    if toks.next().is_some() {
        return Err(syntax(ln, "extra fields"));
    }
    Ok(NodeState {
        leader,
        p,
        d,
        d_b,
        b_hat,
        elec,
        add,
        pl,
        hc,
        sig,
    })
}

fn parse_cell(raw: &str, ln: usize) -> Result<PipeCell, ConfigError> {
    if raw == "BOT" {
        return Ok(PipeCell::Empty);
    }
    if raw == "-1,-1" {
        return Ok(PipeCell::Wipe);
    }
    let (pos, bit) = raw.split_once(',').ok_or_else(|| syntax(ln, "cell"))?;
    Ok(PipeCell::Cell {
        pos: pos.parse().map_err(|_| syntax(ln, "cell pos"))?,
        bit: bit.parse().map_err(|_| syntax(ln, "cell bit"))?,
    })
}

/// Configuration construction and parsing failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("empty input")]
    Empty,
    #[error("input ends before all sections are present")]
    Truncated,
    #[error("bad header line: {0:?}")]
    BadHeader(String),
    #[error("line {line}: malformed {what}")]
    Syntax { line: usize, what: String },
    #[error("ring needs at least 2 nodes, got {0}")]
    TooSmall(usize),
    #[error("expected {expected} wiring entries, found {found}")]
    WiringCount { expected: usize, found: usize },
    #[error("node {node} port {port}: endpoint out of range")]
    WiringRange { node: usize, port: Port },
    #[error("node {node} port {port}: reverse link does not match")]
    WiringReciprocity { node: usize, port: Port },
    #[error("node {node}: self-loop")]
    SelfLoop { node: usize },
    #[error("wiring does not form a single cycle")]
    NotARing,
    #[error("ids must be nonzero")]
    ZeroId,
    #[error("duplicate id")]
    DuplicateId,
    #[error("node {node}: {source}")]
    InvalidState {
        node: usize,
        #[source]
        source: StateError,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring5() -> Ring {
        Ring::with_port_swaps(vec![3, 11, 7, 5, 6], &[false; 5]).unwrap()
    }

    #[test]
    fn oriented_ring_wiring_is_reciprocal_and_cyclic() {
        let r = ring5();
        assert_eq!(r.len(), 5);
        for i in 0..5 {
            for q in 0..2u8 {
                let (j, back) = r.neighbor(i, q);
                assert_eq!(r.neighbor(j, back), (i, q));
            }
        }
        assert_eq!(r.max_msb(), 3);
        assert_eq!(r.max_id_index(), 1);
    }

    #[test]
    fn random_orientations_stay_reciprocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 4, 9, 17] {
            let ids: Vec<Id> = (1..=n as Id).collect();
            let r = Ring::random_orientation(ids, &mut rng).unwrap();
            for i in 0..n {
                for q in 0..2u8 {
                    let (j, back) = r.neighbor(i, q);
                    assert_eq!(r.neighbor(j, back), (i, q));
                    assert_ne!(j, i);
                }
            }
        }
    }

    #[test]
    fn two_node_ring_sees_the_same_neighbor_twice() {
        let r = Ring::with_port_swaps(vec![2, 5], &[false, false]).unwrap();
        assert_eq!(r.neighbor(0, 0).0, 1);
        assert_eq!(r.neighbor(0, 1).0, 1);
    }

    #[test]
    fn broken_reciprocity_is_rejected() {
        let wiring = vec![
            [(1, 0), (2, 0)],
            [(0, 0), (2, 1)],
            [(1, 1), (0, 1)], // ports crossed: 2.0 should answer 0.1
        ];
        assert!(matches!(
            Ring::from_wiring(vec![1, 2, 3], wiring),
            Err(ConfigError::WiringReciprocity { .. })
        ));
    }

    #[test]
    fn encode_decode_round_trips_byte_identically() {
        let mut config = Configuration::reset(ring5());
        config.states[1] = NodeState::start(3);
        config.states[2].d_b = 0;
        let text = config.encode();
        let back = Configuration::decode(&text).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.encode(), text);
        assert_eq!(back.digest(), config.digest());
    }

    #[test]
    fn digest_tracks_state_changes() {
        let a = Configuration::reset(ring5());
        let mut b = a.clone();
        b.states[3].d_b = 1;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            Configuration::decode("nonsense"),
            Err(ConfigError::BadHeader(_))
        ));
        let text = format!("{CONFIG_HEADER}\nn x\n");
        assert_eq!(
            Configuration::decode(&text),
            Err(ConfigError::Syntax {
                line: 2,
                what: "node count".into()
            })
        );
        let good = Configuration::reset(ring5()).encode();
        let broken = good.replace("add=BOT", "add=??");
        assert!(matches!(
            Configuration::decode(&broken),
            Err(ConfigError::Syntax { line: 5, .. })
        ));
    }

    #[test]
    fn views_expose_the_right_neighbors() {
        let mut config = Configuration::reset(ring5());
        config.states[0] = NodeState::start(1);
        let v = config.view(1);
        assert_eq!(v.id, 11);
        // Node 1's port 0 faces node 0 (unswapped orientation).
        assert_eq!(v.nbr_ids, [3, 7]);
        assert!(v.nbr[0].leader);
        assert!(!v.nbr[1].leader);
    }
}
