//! Temporary long-run probe (removed before finalization).

use clering::checkers::is_structurally_legitimate;
use clering::scheduler::{simulate, DaemonPolicy, Outcome};
use clering::topology::{Configuration, Ring};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn long_run() {
    let n = 32usize;
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 1000 + 17);
    let mut ids: Vec<u64> = (1..=n as u64).map(|i| i * 3 + (n as u64 % 5)).collect();
    ids.shuffle(&mut rng);
    let ring = Ring::random_orientation(ids, &mut rng).unwrap();
    let config = Configuration::reset(ring);
    let report = simulate(config, DaemonPolicy::Synchronous, 0, 2_000_000, |c, _| {
        is_structurally_legitimate(c)
    });
    println!(
        "outcome={:?} steps={} rounds={}",
        report.outcome, report.steps, report.rounds
    );
    assert_eq!(report.outcome, Outcome::Stopped);
}
