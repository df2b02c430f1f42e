// SPDX-License-Identifier: Apache-2.0

//! Lock a netlist with one policy and show the selection trace.
//!
//! cargo run -p lutlock --example obfuscate [file.bench] [policy] [n]

use std::path::PathBuf;

use lutlock::analysis::AnalysisConfig;
use lutlock::locker::{obfuscate, write_trace_file, Policy, PolicyKind};
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85/c432.bench")
    });
    let kind: PolicyKind = args.next().as_deref().unwrap_or("NB2_MO_HSC").parse()?;
    let target: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);

    let n = read_bench(&path)?;
    let r = obfuscate(&n, &Policy::new(kind), target, &AnalysisConfig::default())?;
    println!(
        "{kind}: {}/{} gates replaced, {} key bits, {} timing rejections",
        r.stats.achieved,
        r.stats.requested,
        r.key_bits(),
        r.stats.timing_rejections
    );
    print!("{}", write_trace_file(&n, &r));

    // The embedded key restores the original function.
    let unlocked = r.obfuscated.with_key(&r.correct_key)?;
    let words: Vec<u64> = (0..n.primary_inputs().len() as u64)
        .map(|i| 0x9e37_79b9_7f4a_7c15u64.rotate_left(i as u32 * 7))
        .collect();
    println!("64 vectors agree: {}", unlocked.output_words(&words) == n.output_words(&words));
    Ok(())
}
