// SPDX-License-Identifier: Apache-2.0

//! Lock a benchmark, then recover the key with the oracle-guided SAT attack.
//!
//! cargo run --release -p lutlock --example sat_attack [file.bench] [policy] [n] [seconds]

use std::path::PathBuf;

use lutlock::analysis::AnalysisConfig;
use lutlock::attack::{sat_attack, AttackLimits, Kpc, SolverKind};
use lutlock::locker::{obfuscate, Policy, PolicyKind};
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85/c880.bench")
    });
    let kind: PolicyKind = args.next().as_deref().unwrap_or("RND").parse()?;
    let target: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(16);
    let seconds: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(60.0);

    let original = read_bench(&path)?;
    let locked = obfuscate(&original, &Policy::new(kind), target, &AnalysisConfig::default())?;
    let kpc = Kpc::from(&locked);
    println!("{} key bits over {} LUTs", kpc.key_bits(), locked.stats.achieved);

    let r = sat_attack(&kpc, &original, AttackLimits::seconds(seconds), &SolverKind::Cadical)?;
    println!(
        "{} iterations, {} solver calls, {:.3} s ({:.3} s in the solver)",
        r.iterations, r.solver_calls, r.seconds, r.solver_seconds
    );
    if r.timed_out {
        println!("time limit reached");
    } else {
        println!("recovered key verified: {}", r.verified);
    }
    Ok(())
}
