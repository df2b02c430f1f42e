// SPDX-License-Identifier: Apache-2.0

//! Count the keys that unlock a fully LUT-replaced OR/AND circuit.
//!
//! o = AND(OR(A, B), OR(C, D)) has more than one correct key once all three
//! gates are LUTs: complementing both first-level tables and swapping the
//! second-level table to match gives the same function.
//!
//! cargo run -p lutlock --example count_keys

use std::path::PathBuf;

use lutlock::attack::{count_valid_keys, to_kpc, CountMode, SolverKind};
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/fixtures");
    let original = read_bench(dir.join("demorgan_or_and.bench"))?;
    let locked = read_bench(dir.join("demorgan_or_and_locked.bench"))?;
    let kpc = to_kpc(&locked);

    let exact = count_valid_keys(&kpc, &original, CountMode::exact(), &SolverKind::Cadical)?;
    println!(
        "{} valid keys out of 2^{} ({} refinements)",
        exact.valid, exact.key_bits, exact.refinements
    );

    let sample = CountMode::Sample {
        samples: 1 << 14,
        seed: 1,
    };
    let est = count_valid_keys(&kpc, &original, sample, &SolverKind::Cadical)?;
    println!(
        "sampling estimate: {:.2} ({} of {} samples)",
        est.estimate, est.valid, est.samples
    );
    Ok(())
}
