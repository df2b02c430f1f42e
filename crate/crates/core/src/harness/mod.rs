// SPDX-License-Identifier: Apache-2.0

//! Command implementations and the experiment runner.

mod commands;
mod config;
pub mod stats;
mod sweep;

pub use commands::{
    cmd_attack, cmd_count_keys, cmd_obfuscate, cmd_verify, instance_name, read_key, render_count,
    render_equivalence, summarize as summarize_obfuscation, write_atomic, AttackOutput,
    AttackReport, CmdError, DipReport, ObfuscateOutput, EXIT_INCONSISTENT, EXIT_IO, EXIT_OK,
    EXIT_PARSE, EXIT_TIMEOUT, EXIT_UNVERIFIED,
};
pub use config::{ConfigError, RunConfig};
pub use sweep::{read_csv, render_summary, run_cell, run_sweep, summarize, CellId, PolicySummary, SweepRecord};

use std::path::{Path, PathBuf};

use crate::netlist::{read_bench, LoadError, Netlist};

/// Bench files under `path` (or `path` itself), sorted by file name.
pub fn load_corpus(path: &Path) -> Result<Vec<(String, Netlist)>, CmdError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|source| CmdError::Io {
                path: path.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("bench")))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(CmdError::Invalid(format!("no .bench files in {}", path.display())));
    }
    files
        .iter()
        .map(|f| {
            let n = read_bench(f)?;
            Ok((n.name().to_string(), n))
        })
        .collect::<Result<_, LoadError>>()
        .map_err(CmdError::from)
}
