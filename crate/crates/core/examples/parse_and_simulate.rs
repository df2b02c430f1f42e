// SPDX-License-Identifier: Apache-2.0

//! Parse a bench file, print its shape and simulate one input vector.
//!
//! cargo run -p lutlock --example parse_and_simulate [file.bench]

use std::path::PathBuf;

use lutlock::netlist::{read_bench, write_bench};
use lutlock::Assignment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85/c17.bench")
    });
    let n = read_bench(&path)?;
    println!(
        "{}: {} inputs, {} outputs, {} gates",
        n.name(),
        n.primary_inputs().len(),
        n.primary_outputs().len(),
        n.gate_count()
    );

    // Alternate 1/0 across the inputs.
    let pi: Assignment = n
        .primary_inputs()
        .iter()
        .enumerate()
        .map(|(i, &id)| (n.net_name(id).to_string(), i % 2 == 0))
        .collect();
    let values = n.simulate(&pi, &Assignment::new())?;
    for &po in n.primary_outputs() {
        let name = n.net_name(po);
        println!("{name} = {}", values[name] as u8);
    }

    let again = lutlock::netlist::parse_bench(&write_bench(&n))?;
    println!("round trip isomorphic: {}", n.isomorphic(&again));
    Ok(())
}
