// SPDX-License-Identifier: Apache-2.0

//! A small policy sweep: every policy on c432 and c880 at a few LUT counts.
//! Rows go to a CSV as they finish, and rerunning skips rows already there.
//!
//! cargo run --release -p lutlock --example sweep [out.csv]

use std::path::PathBuf;

use lutlock::harness::{render_summary, run_sweep, summarize, RunConfig};
use lutlock::locker::PolicyKind;
use lutlock::netlist::read_bench;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let csv = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lutlock_sweep.csv"));
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/iscas85");
    let benches = ["c432", "c880"]
        .iter()
        .map(|b| Ok((b.to_string(), read_bench(dir.join(format!("{b}.bench")))?)))
        .collect::<Result<Vec<_>, Box<dyn std::error::Error>>>()?;

    let mut cfg = RunConfig::desk();
    cfg.n_grid = vec![2, 4, 8];
    cfg.seeds = vec![0, 1];
    cfg.time_limit = 30.0;

    let records = run_sweep(&benches, &PolicyKind::ALL, &cfg, &csv, |r| {
        eprintln!("{} {} n={} seed={}: {} iterations", r.benchmark, r.policy, r.n_luts, r.seed, r.iterations)
    })?;
    println!("{} rows in {}", records.len(), csv.display());
    print!("{}", render_summary(&summarize(&records)));
    Ok(())
}
