//! Execution drivers: daemons, steps, rounds, traces, replay.
//!
//! A *step* fires a nonempty set of enabled nodes chosen by the daemon; all
//! selected nodes read the same pre-step snapshot (composite atomicity) and
//! their writes land together. A *round* is accounted with an obligation
//! set: when a round opens, every currently-enabled node is an obligation;
//! firing or becoming disabled discharges a node; the round closes with the
//! step that discharges the last one. This makes "rounds" meaningful under
//! every daemon, including fully central ones.
//!
//! The distributed random daemon carries a per-node starvation counter
//! (steps spent continuously enabled but unserved). A node reaching the
//! fairness bound is force-included, which makes every generated schedule
//! weakly fair by construction, not just almost surely.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::protocol::state::RuleId;
use crate::protocol::{apply_rule, enabled_rule};
use crate::topology::{ConfigError, Configuration};

/// Magic first line of the trace format.
pub const TRACE_HEADER: &str = "clering-trace v1";

/// How the daemon chooses among enabled nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DaemonPolicy {
    /// Every enabled node fires every step.
    Synchronous,
    /// Each enabled node independently with probability `p`; an empty draw
    /// falls back to one uniform pick, and starved nodes are force-included
    /// at the fairness bound.
    RandomDistributed { p: f64 },
    /// Exactly one enabled node, uniformly at random.
    Central,
}

impl DaemonPolicy {
    /// Canonical token used on the trace `daemon` line.
    #[must_use]
    pub fn describe(&self, fairness: usize) -> String {
        match self {
            Self::Synchronous => "sync".to_string(),
            Self::RandomDistributed { p } => format!("random p={p:.3} fairness={fairness}"),
            Self::Central => "central".to_string(),
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The caller's stop condition held.
    Stopped,
    /// No node was enabled.
    Silent,
    /// The step budget ran out first.
    Budget,
}

impl Outcome {
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            Self::Stopped => "stopped",
            Self::Silent => "silent",
            Self::Budget => "budget",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stopped" => Some(Self::Stopped),
            "silent" => Some(Self::Silent),
            "budget" => Some(Self::Budget),
            _ => None,
        }
    }
}

/// Violations of the step contract.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("a step must fire at least one node")]
    EmptySelection,
    #[error("node {node} was selected but has no enabled rule")]
    Disabled { node: usize },
}

/// One full driver: configuration, daemon state, and round accounting.
#[derive(Debug, Clone)]
pub struct Driver {
    pub config: Configuration,
    policy: DaemonPolicy,
    rng: ChaCha8Rng,
    seed: u64,
    fairness: usize,
    starve: Vec<usize>,
    obligation: Vec<bool>,
    obligations_left: usize,
    pub steps: usize,
    pub rounds: usize,
    /// Step indices (1-based) after which a round closed.
    pub round_boundaries: Vec<usize>,
}

/// What one driver step did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// Nodes fired; `round_closed` when this step ended a round.
    Fired {
        firings: Vec<(usize, RuleId)>,
        round_closed: bool,
    },
    /// Nothing was enabled.
    Silent,
}

impl Driver {
    /// Driver with the default fairness bound 8n.
    #[must_use]
    pub fn new(config: Configuration, policy: DaemonPolicy, seed: u64) -> Self {
        let f = 8 * config.len();
        Self::with_fairness(config, policy, seed, f)
    }

    #[must_use]
    pub fn with_fairness(
        config: Configuration,
        policy: DaemonPolicy,
        seed: u64,
        fairness: usize,
    ) -> Self {
        let n = config.len();
        Self {
            config,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            fairness,
            starve: vec![0; n],
            obligation: vec![false; n],
            obligations_left: 0,
            steps: 0,
            rounds: 0,
            round_boundaries: Vec::new(),
        }
    }

    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[must_use]
    pub fn policy(&self) -> DaemonPolicy {
        self.policy
    }

    #[must_use]
    pub fn fairness(&self) -> usize {
        self.fairness
    }

    /// Which nodes currently have an enabled rule.
    #[must_use]
    pub fn enabled(&self) -> Vec<Option<RuleId>> {
        (0..self.config.len())
            .map(|i| enabled_rule(&self.config.view(i)))
            .collect()
    }

    /// Daemon choice among the enabled nodes. Empty iff nothing is enabled.
    pub fn select(&mut self, enabled: &[Option<RuleId>]) -> Vec<usize> {
        let live: Vec<usize> = (0..enabled.len()).filter(|&i| enabled[i].is_some()).collect();
        if live.is_empty() {
            return Vec::new();
        }
        let mut chosen: Vec<usize> = match self.policy {
            DaemonPolicy::Synchronous => live.clone(),
            DaemonPolicy::Central => {
                let k = self.rng.gen_range(0..live.len());
                vec![live[k]]
            }
            DaemonPolicy::RandomDistributed { p } => {
                let mut picks: Vec<usize> = live
                    .iter()
                    .copied()
                    .filter(|_| self.rng.gen_bool(p))
                    .collect();
                // Weak fairness: nodes about to hit the bound must fire now.
                for &i in &live {
                    if self.starve[i] + 1 >= self.fairness && !picks.contains(&i) {
                        picks.push(i);
                    }
                }
                if picks.is_empty() {
                    let k = self.rng.gen_range(0..live.len());
                    picks.push(live[k]);
                }
                picks.sort_unstable();
                picks
            }
        };
        chosen.sort_unstable();
        chosen
    }

    /// Fire `selection` as one composite step: every selected node computes
    /// against the same pre-step snapshot. Returns the rules fired, sorted
    /// by node index.
    pub fn apply_selection(
        &mut self,
        selection: &[usize],
    ) -> Result<Vec<(usize, RuleId)>, StepError> {
        if selection.is_empty() {
            return Err(StepError::EmptySelection);
        }
        let mut writes = Vec::with_capacity(selection.len());
        for &i in selection {
            let view = self.config.view(i);
            let rule = enabled_rule(&view).ok_or(StepError::Disabled { node: i })?;
            writes.push((i, rule, apply_rule(&view, rule)));
        }
        let mut firings = Vec::with_capacity(writes.len());
        for (i, rule, state) in writes {
            self.config.states[i] = state;
            firings.push((i, rule));
        }
        firings.sort_unstable_by_key(|&(i, _)| i);
        Ok(firings)
    }

    /// One full daemon step with round and fairness bookkeeping.
    pub fn step(&mut self) -> Result<StepOutcome, StepError> {
        let enabled_pre = self.enabled();
        if enabled_pre.iter().all(Option::is_none) {
            return Ok(StepOutcome::Silent);
        }
        // Open a round if none is pending.
        if self.obligations_left == 0 {
            for (i, e) in enabled_pre.iter().enumerate() {
                self.obligation[i] = e.is_some();
            }
            self.obligations_left = self.obligation.iter().filter(|&&b| b).count();
        }
        let selection = self.select(&enabled_pre);
        let firings = self.apply_selection(&selection)?;
        self.steps += 1;

        let enabled_post = self.enabled();
        for i in 0..self.config.len() {
            let served = selection.binary_search(&i).is_ok();
            // Starvation streak: broken by service or by losing the rule.
            if served || enabled_pre[i].is_none() || enabled_post[i].is_none() {
                self.starve[i] = 0;
            } else {
                self.starve[i] += 1;
                debug_assert!(
                    self.starve[i] < self.fairness,
                    "fairness bound violated at node {i}"
                );
            }
            // Obligations discharge by service or disablement.
            if self.obligation[i] && (served || enabled_post[i].is_none()) {
                self.obligation[i] = false;
                self.obligations_left -= 1;
            }
        }
        let round_closed = self.obligations_left == 0;
        if round_closed {
            self.rounds += 1;
            self.round_boundaries.push(self.steps);
        }
        Ok(StepOutcome::Fired {
            firings,
            round_closed,
        })
    }
}

/// Aggregate result of a run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: Outcome,
    pub steps: usize,
    pub rounds: usize,
    pub round_boundaries: Vec<usize>,
    pub final_config: Configuration,
}

/// Live progress handed to the stop condition after every step.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub steps: usize,
    pub rounds: usize,
    pub round_closed: bool,
}

/// Drive until the stop condition holds, the budget runs out, or nothing is
/// enabled. No trace is produced — this is the fast path the acceptance
/// loops use.
pub fn simulate(
    config: Configuration,
    policy: DaemonPolicy,
    seed: u64,
    max_steps: usize,
    mut stop: impl FnMut(&Configuration, Progress) -> bool,
) -> RunReport {
    let mut driver = Driver::new(config, policy, seed);
    let outcome = loop {
        if driver.steps >= max_steps {
            break Outcome::Budget;
        }
        match driver.step().expect("daemon selections are always legal") {
            StepOutcome::Silent => break Outcome::Silent,
            StepOutcome::Fired { round_closed, .. } => {
                let progress = Progress {
                    steps: driver.steps,
                    rounds: driver.rounds,
                    round_closed,
                };
                if stop(&driver.config, progress) {
                    break Outcome::Stopped;
                }
            }
        }
    };
    RunReport {
        outcome,
        steps: driver.steps,
        rounds: driver.rounds,
        round_boundaries: driver.round_boundaries,
        final_config: driver.config,
    }
}

/// Like [`simulate`], but additionally emits the full replayable trace:
/// header, initial configuration, one digested line per step, round
/// boundaries, and the end line.
pub fn run_with_trace(
    config: Configuration,
    policy: DaemonPolicy,
    seed: u64,
    max_steps: usize,
    mut stop: impl FnMut(&Configuration, Progress) -> bool,
) -> (RunReport, String) {
    let mut driver = Driver::new(config, policy, seed);
    let mut trace = String::new();
    let _ = writeln!(trace, "{TRACE_HEADER}");
    let _ = writeln!(
        trace,
        "daemon {} seed {}",
        policy.describe(driver.fairness()),
        seed
    );
    trace.push_str(&driver.config.encode());
    let _ = writeln!(trace, "endconfig");

    let outcome = loop {
        if driver.steps >= max_steps {
            break Outcome::Budget;
        }
        match driver.step().expect("daemon selections are always legal") {
            StepOutcome::Silent => break Outcome::Silent,
            StepOutcome::Fired {
                firings,
                round_closed,
            } => {
                let body: Vec<String> = firings
                    .iter()
                    .map(|(i, r)| format!("{i}:{}", r.name()))
                    .collect();
                let _ = writeln!(
                    trace,
                    "step {} {} {}",
                    driver.steps,
                    body.join(","),
                    driver.config.digest()
                );
                if round_closed {
                    let _ = writeln!(trace, "round {}", driver.steps);
                }
                let progress = Progress {
                    steps: driver.steps,
                    rounds: driver.rounds,
                    round_closed,
                };
                if stop(&driver.config, progress) {
                    break Outcome::Stopped;
                }
            }
        }
    };
    let _ = writeln!(
        trace,
        "end {} steps={} rounds={}",
        outcome.name(),
        driver.steps,
        driver.rounds
    );
    let report = RunReport {
        outcome,
        steps: driver.steps,
        rounds: driver.rounds,
        round_boundaries: driver.round_boundaries,
        final_config: driver.config,
    };
    (report, trace)
}

// ═══════════════════════════════════════════════════════════════════════
// Replay
// ═══════════════════════════════════════════════════════════════════════

/// Replay verification failures.
#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("bad trace header: {0:?}")]
    BadHeader(String),
    #[error("trace ends unexpectedly")]
    Truncated,
    #[error("line {line}: malformed {what}")]
    Syntax { line: usize, what: String },
    #[error("embedded configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("step {step}: node {node} fired {recorded} but {actual} is enabled")]
    RuleMismatch {
        step: usize,
        node: usize,
        recorded: String,
        actual: String,
    },
    #[error("step {step}: digest mismatch (trace {recorded}, replay {actual})")]
    DigestMismatch {
        step: usize,
        recorded: String,
        actual: String,
    },
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: StepError,
    },
    #[error("round boundary after step {step} {found} in replay but {expected} in trace")]
    RoundMismatch {
        step: usize,
        found: &'static str,
        expected: &'static str,
    },
    #[error("end line mismatch: trace says {recorded:?}, replay computed {actual:?}")]
    EndMismatch { recorded: String, actual: String },
}

/// Result of a verified replay.
#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub outcome: Outcome,
    pub steps: usize,
    pub rounds: usize,
    pub final_config: Configuration,
}

/// Re-execute a trace and verify every recorded step: the fired rule of
/// every node, the post-step digest, the round boundaries, and the end
/// line. Returns the reconstructed final state on success.
pub fn replay(text: &str) -> Result<ReplayReport, ReplayError> {
    let mut lines = text.lines().enumerate().peekable();
    let (_, header) = lines.next().ok_or(ReplayError::Truncated)?;
    if header != TRACE_HEADER {
        return Err(ReplayError::BadHeader(header.to_string()));
    }
    let (ln, daemon_line) = lines.next().ok_or(ReplayError::Truncated)?;
    if !daemon_line.starts_with("daemon ") || !daemon_line.contains(" seed ") {
        return Err(ReplayError::Syntax {
            line: ln + 1,
            what: "daemon line".to_string(),
        });
    }

    // The embedded configuration runs until the endconfig sentinel.
    let mut config_text = String::new();
    loop {
        let (_, line) = lines.next().ok_or(ReplayError::Truncated)?;
        if line == "endconfig" {
            break;
        }
        config_text.push_str(line);
        config_text.push('\n');
    }
    let config = Configuration::decode(&config_text)?;

    // Replay driver: rounds are re-derived with the same obligation logic;
    // the daemon is replaced by the recorded selections.
    let mut driver = Driver::new(config, DaemonPolicy::Synchronous, 0);
    let mut pending_round: Option<usize> = None;
    for (ln, line) in lines {
        let lineno = ln + 1;
        if let Some(rest) = line.strip_prefix("step ") {
            if pending_round.is_some() {
                return Err(ReplayError::RoundMismatch {
                    step: driver.steps,
                    found: "absent",
                    expected: "present",
                });
            }
            let mut parts = rest.split(' ');
            let k: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| ReplayError::Syntax {
                    line: lineno,
                    what: "step index".to_string(),
                })?;
            let body = parts.next().ok_or(ReplayError::Truncated)?;
            let digest = parts.next().ok_or(ReplayError::Truncated)?;
            if k != driver.steps + 1 {
                return Err(ReplayError::Syntax {
                    line: lineno,
                    what: "step numbering".to_string(),
                });
            }
            let mut selection = Vec::new();
            let mut recorded_rules = Vec::new();
            for tok in body.split(',') {
                let (node, rule) = tok.split_once(':').ok_or_else(|| ReplayError::Syntax {
                    line: lineno,
                    what: "firing token".to_string(),
                })?;
                let node: usize = node.parse().map_err(|_| ReplayError::Syntax {
                    line: lineno,
                    what: "firing node".to_string(),
                })?;
                selection.push(node);
                recorded_rules.push((node, rule.to_string()));
            }
            // Check the recorded rules against the replayed guards before
            // firing.
            for (node, recorded) in &recorded_rules {
                let actual = enabled_rule(&driver.config.view(*node));
                let actual_name = actual.map_or("(disabled)", |r| r.name());
                if Some(recorded.as_str()) != actual.map(|r| r.name()) {
                    return Err(ReplayError::RuleMismatch {
                        step: k,
                        node: *node,
                        recorded: recorded.clone(),
                        actual: actual_name.to_string(),
                    });
                }
            }
            let round_before = driver.rounds;
            replay_one(&mut driver, &selection).map_err(|source| ReplayError::Step {
                step: k,
                source,
            })?;
            let actual = driver.config.digest();
            if actual != digest {
                return Err(ReplayError::DigestMismatch {
                    step: k,
                    recorded: digest.to_string(),
                    actual,
                });
            }
            if driver.rounds > round_before {
                pending_round = Some(driver.steps);
            }
        } else if let Some(rest) = line.strip_prefix("round ") {
            let k: usize = rest.parse().map_err(|_| ReplayError::Syntax {
                line: lineno,
                what: "round index".to_string(),
            })?;
            if pending_round != Some(k) {
                return Err(ReplayError::RoundMismatch {
                    step: driver.steps,
                    found: "present",
                    expected: "absent",
                });
            }
            pending_round = None;
        } else if let Some(rest) = line.strip_prefix("end ") {
            if pending_round.is_some() {
                return Err(ReplayError::RoundMismatch {
                    step: driver.steps,
                    found: "absent",
                    expected: "present",
                });
            }
            let actual = format!(
                "{} steps={} rounds={}",
                end_outcome_name(&driver),
                driver.steps,
                driver.rounds
            );
            // The recorded outcome token is trusted for `stopped` vs
            // `budget` (both depend on the original caller's limits); the
            // counters must match exactly, and `silent` must be accurate.
            let mut parts = rest.split(' ');
            let outcome_tok = parts.next().unwrap_or_default();
            let outcome =
                Outcome::parse(outcome_tok).ok_or_else(|| ReplayError::Syntax {
                    line: lineno,
                    what: "outcome".to_string(),
                })?;
            let counters = parts.collect::<Vec<_>>().join(" ");
            let expected_counters =
                format!("steps={} rounds={}", driver.steps, driver.rounds);
            if counters != expected_counters
                || (outcome == Outcome::Silent && end_outcome_name(&driver) != "silent")
            {
                return Err(ReplayError::EndMismatch {
                    recorded: rest.to_string(),
                    actual,
                });
            }
            return Ok(ReplayReport {
                outcome,
                steps: driver.steps,
                rounds: driver.rounds,
                final_config: driver.config,
            });
        } else if line.trim().is_empty() {
            continue;
        } else {
            return Err(ReplayError::Syntax {
                line: lineno,
                what: "unrecognized line".to_string(),
            });
        }
    }
    Err(ReplayError::Truncated)
}

fn end_outcome_name(driver: &Driver) -> &'static str {
    if driver.enabled().iter().all(Option::is_none) {
        "silent"
    } else {
        "live"
    }
}

/// Apply one recorded selection with the driver's round bookkeeping but
/// without consulting its daemon.
fn replay_one(driver: &mut Driver, selection: &[usize]) -> Result<(), StepError> {
    let enabled_pre = driver.enabled();
    if driver.obligations_left == 0 {
        for (i, e) in enabled_pre.iter().enumerate() {
            driver.obligation[i] = e.is_some();
        }
        driver.obligations_left = driver.obligation.iter().filter(|&&b| b).count();
    }
    let mut sorted = selection.to_vec();
    sorted.sort_unstable();
    driver.apply_selection(&sorted)?;
    driver.steps += 1;
    let enabled_post = driver.enabled();
    for i in 0..driver.config.len() {
        let served = sorted.binary_search(&i).is_ok();
        if driver.obligation[i] && (served || enabled_post[i].is_none()) {
            driver.obligation[i] = false;
            driver.obligations_left -= 1;
        }
    }
    if driver.obligations_left == 0 {
        driver.rounds += 1;
        driver.round_boundaries.push(driver.steps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identifiers::Id;
    use crate::topology::Ring;

    fn reset_ring(ids: Vec<Id>) -> Configuration {
        let n = ids.len();
        Configuration::reset(Ring::with_port_swaps(ids, &vec![false; n]).unwrap())
    }

    #[test]
    fn synchronous_reset_ring_starts_everyone_at_once() {
        let mut driver = Driver::new(
            reset_ring(vec![3, 11, 7, 5, 6]),
            DaemonPolicy::Synchronous,
            1,
        );
        match driver.step().unwrap() {
            StepOutcome::Fired {
                firings,
                round_closed,
            } => {
                assert_eq!(firings.len(), 5);
                assert!(firings.iter().all(|&(_, r)| r == RuleId::Start));
                assert!(round_closed, "serving every enabled node closes the round");
            }
            StepOutcome::Silent => panic!("reset ring must be live"),
        }
        assert!(driver.config.states.iter().all(|s| s.d == 0 && s.leader));
    }

    #[test]
    fn central_daemon_fires_exactly_one_node() {
        let mut driver = Driver::new(reset_ring(vec![3, 11, 7, 5, 6]), DaemonPolicy::Central, 9);
        for _ in 0..10 {
            match driver.step().unwrap() {
                StepOutcome::Fired { firings, .. } => assert_eq!(firings.len(), 1),
                StepOutcome::Silent => panic!("live configuration"),
            }
        }
        assert_eq!(driver.steps, 10);
    }

    #[test]
    fn random_daemon_never_yields_an_empty_step() {
        let mut driver = Driver::new(
            reset_ring(vec![3, 11, 7, 5, 6]),
            DaemonPolicy::RandomDistributed { p: 0.0 },
            4,
        );
        for _ in 0..30 {
            match driver.step().unwrap() {
                StepOutcome::Fired { firings, .. } => assert!(!firings.is_empty()),
                StepOutcome::Silent => panic!("live configuration"),
            }
        }
    }

    #[test]
    fn starvation_counters_respect_the_fairness_bound() {
        // p = 0 forces single uniform picks, maximizing starvation pressure;
        // the debug assertion inside step() checks the bound every step.
        let mut driver = Driver::with_fairness(
            reset_ring(vec![3, 11, 7, 5, 6, 12, 9]),
            DaemonPolicy::RandomDistributed { p: 0.0 },
            11,
            6,
        );
        for _ in 0..200 {
            driver.step().unwrap();
        }
        assert!(driver.starve.iter().all(|&c| c < 6));
    }

    #[test]
    fn selecting_a_disabled_node_is_an_error() {
        let mut driver = Driver::new(
            reset_ring(vec![3, 11, 7, 5, 6]),
            DaemonPolicy::Synchronous,
            1,
        );
        // Fire everyone (Start), then force-select a node that is now quiet.
        driver.step().unwrap();
        let enabled = driver.enabled();
        if let Some(dead) = (0..5).find(|&i| enabled[i].is_none()) {
            assert_eq!(
                driver.apply_selection(&[dead]),
                Err(StepError::Disabled { node: dead })
            );
        }
        assert_eq!(
            driver.apply_selection(&[]),
            Err(StepError::EmptySelection)
        );
    }

    #[test]
    fn same_seed_same_trace_different_seed_diverges() {
        let config = reset_ring(vec![3, 11, 7, 5, 6]);
        let run = |seed| {
            run_with_trace(
                config.clone(),
                DaemonPolicy::RandomDistributed { p: 0.5 },
                seed,
                40,
                |_, _| false,
            )
            .1
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn traces_replay_and_verify() {
        let config = reset_ring(vec![3, 11, 7, 5, 6]);
        let (report, trace) = run_with_trace(
            config,
            DaemonPolicy::RandomDistributed { p: 0.5 },
            8,
            60,
            |_, _| false,
        );
        let verified = replay(&trace).expect("own traces must verify");
        assert_eq!(verified.steps, report.steps);
        assert_eq!(verified.rounds, report.rounds);
        assert_eq!(verified.outcome, Outcome::Budget);
        assert_eq!(
            verified.final_config.digest(),
            report.final_config.digest()
        );
    }

    #[test]
    fn tampered_traces_are_rejected() {
        let config = reset_ring(vec![3, 11, 7, 5, 6]);
        let (_, trace) = run_with_trace(config, DaemonPolicy::Central, 8, 30, |_, _| false);
        // Corrupt one digest hex digit.
        let tampered = trace.replacen("step 3 ", "step 3 ", 1);
        let pos = tampered.find("step 3").unwrap();
        let line_end = tampered[pos..].find('\n').unwrap() + pos;
        let mut bad = tampered.clone();
        let target = bad[pos..line_end].to_string();
        let flipped = if target.ends_with('0') {
            format!("{}1", &target[..target.len() - 1])
        } else {
            format!("{}0", &target[..target.len() - 1])
        };
        bad.replace_range(pos..line_end, &flipped);
        assert!(matches!(
            replay(&bad),
            Err(ReplayError::DigestMismatch { step: 3, .. })
        ));
    }

    #[test]
    fn budget_outcome_is_reported() {
        let report = simulate(
            reset_ring(vec![3, 11, 7, 5, 6]),
            DaemonPolicy::Synchronous,
            1,
            5,
            |_, _| false,
        );
        assert_eq!(report.outcome, Outcome::Budget);
        assert_eq!(report.steps, 5);
    }

    #[test]
    fn rounds_count_obligation_sets_under_central_daemon() {
        let mut driver = Driver::new(reset_ring(vec![3, 11, 7, 5, 6]), DaemonPolicy::Central, 3);
        // All five nodes are obligated (Start enabled); a central daemon
        // needs ≥ … steps, and the round closes exactly when the last
        // obligated node fires or loses its rule.
        let mut steps_to_first_round = 0;
        loop {
            match driver.step().unwrap() {
                StepOutcome::Fired { round_closed, .. } => {
                    steps_to_first_round += 1;
                    if round_closed {
                        break;
                    }
                }
                StepOutcome::Silent => panic!("live"),
            }
        }
        assert!(steps_to_first_round >= 3, "five obligations, one per step, though neighbors' starts can disable a reset node's Start only after it becomes startable again");
        assert_eq!(driver.rounds, 1);
        assert_eq!(driver.round_boundaries, vec![steps_to_first_round]);
    }
}
