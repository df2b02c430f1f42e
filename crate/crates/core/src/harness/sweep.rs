// SPDX-License-Identifier: Apache-2.0

//! Factorial policy sweeps: benchmark × policy × n × seed.
//!
//! Cells run on a pool of worker threads; a single writer appends each
//! finished row to the CSV and flushes it, so an interrupted sweep loses at
//! most the cells in flight. Rerunning skips every cell already present.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::stats::{exp_fit, median, spearman, ExpFit};
use super::RunConfig;
use crate::attack::{sat_attack, Kpc};
use crate::locker::{obfuscate, PolicyKind};
use crate::netlist::Netlist;

/// One CSV row. Column order is the field order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRecord {
    pub benchmark: String,
    pub policy: String,
    pub n_luts: usize,
    pub seed: u64,
    pub iterations: usize,
    pub seconds: f64,
    pub key_bits: usize,
    pub verified: bool,
    pub timed_out: bool,
}

pub type CellId = (String, String, usize, u64);

impl SweepRecord {
    pub fn cell(&self) -> CellId {
        (self.benchmark.clone(), self.policy.clone(), self.n_luts, self.seed)
    }
}

/// Locks `n` with `policy` and attacks the result. Lock or attack failures
/// yield a row with both flags false.
pub fn run_cell(
    name: &str,
    n: &Netlist,
    policy: PolicyKind,
    n_luts: usize,
    seed: u64,
    cfg: &RunConfig,
) -> SweepRecord {
    let mut rec = SweepRecord {
        benchmark: name.to_string(),
        policy: policy.name().to_string(),
        n_luts,
        seed,
        iterations: 0,
        seconds: 0.0,
        key_bits: 0,
        verified: false,
        timed_out: false,
    };
    let start = Instant::now();
    let Ok(locked) = obfuscate(n, &cfg.policy(policy, seed), n_luts, &cfg.analysis()) else {
        return rec;
    };
    rec.key_bits = locked.key_bits();
    if let Ok(a) = sat_attack(&Kpc::from(&locked), n, cfg.limits(), &cfg.solver) {
        rec.iterations = a.iterations;
        rec.verified = a.verified;
        rec.timed_out = a.timed_out;
    }
    rec.seconds = start.elapsed().as_secs_f64();
    rec
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}

/// Runs every missing cell and returns all rows for the requested grid, in
/// grid order. Rows already in `csv_path` are reused.
pub fn run_sweep(
    benches: &[(String, Netlist)],
    policies: &[PolicyKind],
    cfg: &RunConfig,
    csv_path: &Path,
    mut progress: impl FnMut(&SweepRecord),
) -> Result<Vec<SweepRecord>, csv::Error> {
    let existing = if csv_path.exists() {
        read_csv(csv_path)?
    } else {
        Vec::new()
    };
    let done: HashSet<CellId> = existing.iter().map(SweepRecord::cell).collect();
    let mut grid = Vec::new();
    for (bi, (name, _)) in benches.iter().enumerate() {
        for &p in policies {
            for &n in &cfg.n_grid {
                for &s in &cfg.seeds {
                    grid.push((bi, name.clone(), p, n, s));
                }
            }
        }
    }
    let todo: Vec<_> = grid
        .iter()
        .filter(|(_, name, p, n, s)| !done.contains(&(name.clone(), p.name().to_string(), *n, *s)))
        .cloned()
        .collect();

    let file = OpenOptions::new().create(true).append(true).open(csv_path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut writer = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    let mut new_rows = Vec::new();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let mut write_error = None;
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.min(todo.len()).max(1) {
            let tx = tx.clone();
            let (next, todo) = (&next, &todo);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((bi, name, p, n, s)) = todo.get(i) else {
                    break;
                };
                let rec = run_cell(name, &benches[*bi].1, *p, *n, *s, cfg);
                if tx.send(rec).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for rec in rx {
            if write_error.is_none() {
                if let Err(e) = writer.serialize(&rec).and_then(|_| writer.flush().map_err(Into::into)) {
                    write_error = Some(e);
                }
            }
            progress(&rec);
            new_rows.push(rec);
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    let mut by_cell: BTreeMap<CellId, SweepRecord> = BTreeMap::new();
    for r in existing.into_iter().chain(new_rows) {
        by_cell.insert(r.cell(), r);
    }
    Ok(grid
        .iter()
        .filter_map(|(_, name, p, n, s)| by_cell.remove(&(name.clone(), p.name().to_string(), *n, *s)))
        .collect())
}

/// Growth statistics of one benchmark/policy pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicySummary {
    pub benchmark: String,
    pub policy: String,
    /// (n, median iterations) in increasing n.
    pub medians: Vec<(usize, f64)>,
    pub spearman: Option<f64>,
    pub fit: Option<ExpFit>,
    pub timed_out: usize,
}

pub fn summarize(records: &[SweepRecord]) -> Vec<PolicySummary> {
    let mut groups: BTreeMap<(String, String), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    let mut timeouts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in records {
        let key = (r.benchmark.clone(), r.policy.clone());
        groups
            .entry(key.clone())
            .or_default()
            .entry(r.n_luts)
            .or_default()
            .push(r.iterations as f64);
        *timeouts.entry(key).or_default() += r.timed_out as usize;
    }
    groups
        .into_iter()
        .map(|(key, per_n)| {
            let medians: Vec<(usize, f64)> = per_n
                .iter()
                .map(|(&n, v)| (n, median(v).unwrap()))
                .collect();
            let x: Vec<f64> = medians.iter().map(|m| m.0 as f64).collect();
            let y: Vec<f64> = medians.iter().map(|m| m.1).collect();
            PolicySummary {
                timed_out: timeouts[&key],
                benchmark: key.0,
                policy: key.1,
                spearman: spearman(&x, &y),
                fit: exp_fit(&x, &y),
                medians,
            }
        })
        .collect()
}

pub fn render_summary(s: &[PolicySummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Machine-local results: DIP iterations of the SAT attack on this host and solver."
    );
    let _ = writeln!(
        out,
        "# fit: ln(1 + median iterations) = a + b*n, least squares over the n grid."
    );
    for p in s {
        let medians: Vec<String> = p.medians.iter().map(|(n, m)| format!("{n}:{m}")).collect();
        let rho = p.spearman.map_or("n/a".into(), |r| format!("{r:.3}"));
        let fit = p.fit.map_or("n/a".into(), |f| {
            format!("a={:.3} b={:.4} r2={:.3}", f.intercept, f.rate, f.r_squared)
        });
        let _ = writeln!(
            out,
            "{} {} medians[{}] spearman={} fit[{}] timeouts={}",
            p.benchmark,
            p.policy,
            medians.join(" "),
            rho,
            fit,
            p.timed_out
        );
    }
    out
}
