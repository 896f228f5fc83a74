//! Temporary event tracer (removed before finalization).

use clering::identifiers::msb_position;
use clering::scheduler::{DaemonPolicy, Driver, StepOutcome};
use clering::protocol::RuleId;
use clering::topology::{Configuration, Ring};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn line(config: &Configuration, i: usize) -> String {
    let s = &config.states[i];
    format!(
        "node {i} (id {:2}): p={:?} d={:2} b{:2} e=({},{},{},{}) sig={:?} pl={:?} hc={:?}",
        config.ring.id(i),
        s.p,
        s.d,
        s.b_hat,
        s.elec.bit_strong,
        s.elec.phase,
        s.elec.bit_position,
        s.elec.control,
        s.sig,
        s.pl,
        s.hc,
    )
}

#[test]
#[ignore]
fn watch_node() {
    let n = 32usize;
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 1000 + 17);
    let mut ids: Vec<u64> = (1..=n as u64).map(|i| i * 3 + (n as u64 % 5)).collect();
    ids.shuffle(&mut rng);
    let ring = Ring::random_orientation(ids, &mut rng).unwrap();
    for i in 0..n {
        let (a, _) = ring.neighbor(i, 0);
        let (b, _) = ring.neighbor(i, 1);
        println!(
            "node {i}: id={} msb={:?} ports->({a},{b})",
            ring.id(i),
            msb_position(ring.id(i))
        );
    }
    let strong: Vec<usize> = (0..n)
        .filter(|&i| msb_position(ring.id(i)) == Ok(6))
        .collect();
    println!("strong (msb 6) nodes: {strong:?}");
    let config = Configuration::reset(ring);
    let mut driver = Driver::new(config, DaemonPolicy::Synchronous, 0);
    let mut errors = 0usize;
    for step in 1..=4000 {
        let pre = driver.config.clone();
        let fired = match driver.step().unwrap() {
            StepOutcome::Silent => {
                println!("silent at step {step}");
                break;
            }
            StepOutcome::Fired { firings, .. } => firings,
        };
        for (i, r) in &fired {
            let id = pre.ring.id(*i);
            let is_strong = msb_position(id) == Ok(6);
            let interesting = match r {
                RuleId::RootInc => true,
                RuleId::Passive | RuleId::Error => is_strong,
                _ => false,
            };
            if interesting {
                println!("step {step}: node {i} (id {id}) fired {r:?}");
                if *r != RuleId::RootInc {
                    let (l, _) = pre.ring.neighbor(*i, 0);
                    let (rn, _) = pre.ring.neighbor(*i, 1);
                    println!("  pre : {}", line(&pre, *i));
                    println!("  n.0 : {}", line(&pre, l));
                    println!("  n.1 : {}", line(&pre, rn));
                } else {
                    println!("  post: {}", line(&driver.config, *i));
                }
            }
            if *r == RuleId::Error {
                errors += 1;
                if errors > 40 {
                    println!("error flood, stopping at step {step}");
                    return;
                }
            }
        }
    }
}
