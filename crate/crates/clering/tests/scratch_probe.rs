//! Temporary calibration probe (removed before finalization).

use clering::checkers::{is_structurally_legitimate, potentials};
use clering::scheduler::{simulate, DaemonPolicy, Outcome};
use clering::topology::{Configuration, Ring};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn probe_convergence_stats() {
    let mut worst_sync_rounds = 0usize;
    for n in [4usize, 5, 6, 8, 12, 16, 24, 32] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 1000 + 17);
        for trial in 0..10 {
            let mut ids: Vec<u64> = (1..=n as u64).map(|i| i * 3 + (n as u64 % 5)).collect();
            ids.shuffle(&mut rng);
            let ring = Ring::random_orientation(ids, &mut rng).unwrap();
            let config = Configuration::reset(ring);
            let budget = 3000 * n;
            let report = simulate(config, DaemonPolicy::Synchronous, trial, budget, |c, _| {
                is_structurally_legitimate(c)
            });
            if report.outcome != Outcome::Stopped {
                let rep = potentials(&report.final_config);
                panic!(
                    "n={n} trial={trial}: {:?} after {} steps {:?}\n{}",
                    report.outcome,
                    report.steps,
                    rep,
                    report.final_config.encode()
                );
            }
            worst_sync_rounds = worst_sync_rounds.max(report.rounds);
            if trial == 0 {
                println!(
                    "sync   n={n:3} steps={:5} rounds={:5} rounds/n={:.1}",
                    report.steps,
                    report.rounds,
                    report.rounds as f64 / n as f64
                );
            }
        }
    }
    println!("worst sync rounds: {worst_sync_rounds}");

    // Random daemon: convergence + typical round counts.
    for n in [5usize, 8, 12] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64 + 99);
        for trial in 0..5 {
            let mut ids: Vec<u64> = (1..=n as u64).map(|i| i * 7 + 1).collect();
            ids.shuffle(&mut rng);
            let ring = Ring::random_orientation(ids, &mut rng).unwrap();
            let config = Configuration::reset(ring);
            let report = simulate(
                config,
                DaemonPolicy::RandomDistributed { p: 0.5 },
                trial * 31 + 5,
                30000 * n,
                |c, _| is_structurally_legitimate(c),
            );
            if report.outcome != Outcome::Stopped {
                let rep = potentials(&report.final_config);
                panic!(
                    "random n={n} trial={trial}: {:?} after {} steps {:?}\n{}",
                    report.outcome,
                    report.steps,
                    rep,
                    report.final_config.encode()
                );
            }
            if trial == 0 {
                println!(
                    "random n={n:3} steps={:6} rounds={:5}",
                    report.steps, report.rounds
                );
            }
        }
    }
}
