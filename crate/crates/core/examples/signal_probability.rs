// SPDX-License-Identifier: Apache-2.0

//! List the most skewed gates of a netlist.
//!
//! cargo run -p lutlock --example signal_probability [file.bench] [top]

use std::path::PathBuf;

use lutlock::analysis::signal_probabilities;
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85/c432.bench")
    });
    let top: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let n = read_bench(&path)?;
    let p = signal_probabilities(&n, 0.5);

    let mut gates: Vec<_> = n.gates().map(|(id, _)| id).collect();
    gates.sort_by(|&a, &b| p.sps(b).total_cmp(&p.sps(a)).then(n.name_rank(a).cmp(&n.name_rank(b))));
    println!("{:<10} {:>8} {:>8}", "gate", "p1", "sps");
    for &g in gates.iter().take(top) {
        println!("{:<10} {:>8.4} {:>8.4}", n.net_name(g), p.p1(g), p.sps(g));
    }
    Ok(())
}
