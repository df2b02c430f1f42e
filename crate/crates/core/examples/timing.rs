// SPDX-License-Identifier: Apache-2.0

//! Unit-delay timing: critical path, per-output slack totals and the gates
//! that could become LUTs without exceeding a 10% delay budget.
//!
//! cargo run -p lutlock --example timing [file.bench]

use std::path::PathBuf;

use lutlock::analysis::{delay_estimate_after_replacement, timing, tps_of_output, DelayModel};
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85/c880.bench")
    });
    let n = read_bench(&path)?;
    let t = timing(&n, DelayModel::default());
    let cp = t.critical_path_delay;
    println!("critical path delay: {cp}");

    for &po in n.primary_outputs().iter().take(8) {
        println!(
            "  {:<8} arrival {:>4}  tps {:>6}",
            n.net_name(po),
            t.arrival(po),
            tps_of_output(&n, &t, po)?
        );
    }

    let budget = 1.1 * cp + 1e-9;
    let mut fits = 0;
    for (g, gate) in n.gates() {
        if !gate.is_lut() && delay_estimate_after_replacement(&n, &t, g)? <= budget {
            fits += 1;
        }
    }
    println!("{fits} of {} gates fit the budget {budget:.2}", n.gate_count());
    Ok(())
}
