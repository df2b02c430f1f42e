// SPDX-License-Identifier: Apache-2.0

//! The subcommands of the `lutlock` binary.
//!
//! Every output file is written under a `.partial` name and renamed into
//! place once complete.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::attack::{
    check_equivalence, count_valid_keys, sat_attack, to_kpc, AttackError, AttackResult, CountMode,
    Equivalence, KeyCount,
};
use crate::locker::{
    obfuscate, parse_key_file, write_key_file, write_trace_file, KeyFileError, LockError,
    ObfuscationResult, PolicyKind,
};
use crate::netlist::{read_bench, write_bench, Assignment, LoadError, Netlist};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNVERIFIED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;
pub const EXIT_INCONSISTENT: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    KeyFile {
        path: PathBuf,
        source: KeyFileError,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lock(#[from] LockError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Load(LoadError::Io { .. }) | CmdError::Io { .. } => EXIT_IO,
            CmdError::Attack(AttackError::Inconsistent) => EXIT_INCONSISTENT,
            CmdError::Attack(AttackError::Solver(_)) => EXIT_IO,
            _ => EXIT_PARSE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CmdError + '_ {
    move |source| CmdError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `path.partial` and renames it to `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CmdError> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    std::fs::write(&partial, contents).map_err(io_err(&partial))?;
    std::fs::rename(&partial, path).map_err(io_err(path))
}

fn ensure_dir(dir: &Path) -> Result<(), CmdError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn read_key(path: &Path) -> Result<Assignment, CmdError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_key_file(&text).map_err(|source| CmdError::KeyFile {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug)]
pub struct ObfuscateOutput {
    pub result: ObfuscationResult,
    pub bench: PathBuf,
    pub key: PathBuf,
    pub trace: PathBuf,
    pub summary: String,
}

/// Base name for the files of one locked instance.
pub fn instance_name(bench: &str, policy: PolicyKind, n: usize, seed: u64) -> String {
    format!("{bench}_{policy}_n{n}_s{seed}")
}

pub fn summarize(name: &str, r: &ObfuscationResult) -> String {
    let s = &r.stats;
    let mut line = format!(
        "{name} {}: replaced {}/{} gates, {} key bits, {} timing rejections, {} other rejections, {} cone switches",
        r.policy.kind,
        s.achieved,
        s.requested,
        r.key_bits(),
        s.timing_rejections,
        s.other_rejections,
        s.cone_switches
    );
    if s.exhausted {
        line.push_str(" [target unreachable]");
    }
    line
}

/// Locks `bench` and writes the locked bench file, key file and trace.
pub fn cmd_obfuscate(
    bench: &Path,
    policy: PolicyKind,
    n: usize,
    seed: u64,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<ObfuscateOutput, CmdError> {
    if n == 0 {
        return Err(CmdError::Invalid("--n must be at least 1".into()));
    }
    let original = read_bench(bench)?;
    let result = obfuscate(&original, &cfg.policy(policy, seed), n, &cfg.analysis())?;
    ensure_dir(out_dir)?;
    let name = instance_name(original.name(), policy, n, seed);
    let mut locked = result.obfuscated.clone();
    locked.set_name(name.clone());
    let bench_path = out_dir.join(format!("{name}.bench"));
    let key_path = out_dir.join(format!("{name}.key"));
    let trace_path = out_dir.join(format!("{name}.trace"));
    write_atomic(&bench_path, &write_bench(&locked))?;
    write_atomic(&key_path, &write_key_file(&locked, &result.correct_key))?;
    write_atomic(&trace_path, &write_trace_file(&original, &result))?;
    Ok(ObfuscateOutput {
        summary: summarize(original.name(), &result),
        result,
        bench: bench_path,
        key: key_path,
        trace: trace_path,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DipReport {
    pub inputs: String,
    pub outputs: String,
}

/// Serialised attack outcome.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AttackReport {
    pub locked: String,
    pub oracle: String,
    pub iterations: usize,
    pub solver_calls: usize,
    pub seconds: f64,
    pub solver_seconds: f64,
    pub verified: bool,
    pub timed_out: bool,
    pub key_bits: usize,
    pub key: BTreeMap<String, u8>,
    pub dips: Vec<DipReport>,
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl AttackReport {
    pub fn new(locked: &str, oracle: &str, r: &AttackResult) -> AttackReport {
        AttackReport {
            locked: locked.to_string(),
            oracle: oracle.to_string(),
            iterations: r.iterations,
            solver_calls: r.solver_calls,
            seconds: r.seconds,
            solver_seconds: r.solver_seconds,
            verified: r.verified,
            timed_out: r.timed_out,
            key_bits: r.key_bits,
            key: r.recovered_key.iter().map(|(k, &v)| (k.clone(), v as u8)).collect(),
            dips: r
                .dips
                .iter()
                .map(|d| DipReport {
                    inputs: bits(&d.inputs),
                    outputs: bits(&d.outputs),
                })
                .collect(),
        }
    }

    /// Line-oriented form: `field value` lines, then `dip` and `key` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "locked {}", self.locked);
        let _ = writeln!(out, "oracle {}", self.oracle);
        let _ = writeln!(out, "iterations {}", self.iterations);
        let _ = writeln!(out, "solver_calls {}", self.solver_calls);
        let _ = writeln!(out, "seconds {:.6}", self.seconds);
        let _ = writeln!(out, "solver_seconds {:.6}", self.solver_seconds);
        let _ = writeln!(out, "verified {}", self.verified);
        let _ = writeln!(out, "timed_out {}", self.timed_out);
        let _ = writeln!(out, "key_bits {}", self.key_bits);
        for d in &self.dips {
            let _ = writeln!(out, "dip {} {}", d.inputs, d.outputs);
        }
        for (k, v) in &self.key {
            let _ = writeln!(out, "key {k} {v}");
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.timed_out {
            EXIT_TIMEOUT
        } else if self.verified {
            EXIT_OK
        } else {
            EXIT_UNVERIFIED
        }
    }
}

#[derive(Debug)]
pub struct AttackOutput {
    pub report: AttackReport,
    pub json: PathBuf,
    pub text: PathBuf,
}

/// Attacks `locked` with `original` as the oracle and writes
/// `<locked>.attack.json` and `<locked>.attack.txt`.
pub fn cmd_attack(
    locked: &Path,
    original: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<AttackOutput, CmdError> {
    let locked_n = read_bench(locked)?;
    let oracle = read_bench(original)?;
    let result = sat_attack(&to_kpc(&locked_n), &oracle, cfg.limits(), &cfg.solver)?;
    let report = AttackReport::new(locked_n.name(), oracle.name(), &result);
    ensure_dir(out_dir)?;
    let json = out_dir.join(format!("{}.attack.json", locked_n.name()));
    let text = out_dir.join(format!("{}.attack.txt", locked_n.name()));
    let body = serde_json::to_string_pretty(&report).expect("serialisable") + "\n";
    write_atomic(&json, &body)?;
    write_atomic(&text, &report.to_text())?;
    Ok(AttackOutput { report, json, text })
}

fn unlocked(locked: &Netlist, key: Option<&Path>) -> Result<Netlist, CmdError> {
    if locked.key_luts().is_empty() {
        return Ok(locked.clone());
    }
    let Some(path) = key else {
        return Err(CmdError::Invalid("locked netlist needs --key".into()));
    };
    let key = read_key(path)?;
    locked
        .with_key(&key)
        .map_err(|e| CmdError::Attack(AttackError::Sim(e)))
}

/// Checks `locked` under `key` against `original`.
pub fn cmd_verify(
    locked: &Path,
    key: Option<&Path>,
    original: &Path,
    cfg: &RunConfig,
) -> Result<Equivalence, CmdError> {
    let l = read_bench(locked)?;
    let o = read_bench(original)?;
    let u = unlocked(&l, key)?;
    Ok(check_equivalence(&u, &o, &cfg.solver, None)?)
}

pub fn render_equivalence(e: &Equivalence) -> String {
    match e {
        Equivalence::Equivalent => "EQUIVALENT".into(),
        Equivalence::Unknown => "UNKNOWN".into(),
        Equivalence::Different { witness } => {
            let w: Vec<String> = witness.iter().map(|(k, v)| format!("{k}={}", *v as u8)).collect();
            format!("DIFFERENT {}", w.join(" "))
        }
    }
}

pub fn cmd_count_keys(
    locked: &Path,
    original: &Path,
    mode: CountMode,
    cfg: &RunConfig,
) -> Result<KeyCount, CmdError> {
    let l = read_bench(locked)?;
    let o = read_bench(original)?;
    Ok(count_valid_keys(&to_kpc(&l), &o, mode, &cfg.solver)?)
}

pub fn render_count(c: &KeyCount) -> String {
    if c.exact {
        c.valid.to_string()
    } else if c.samples > 0 {
        format!(
            "{:.3e} (estimate: {} of {} sampled keys valid, {} key bits)",
            c.estimate, c.valid, c.samples, c.key_bits
        )
    } else {
        format!("{} (lower bound: enumeration stopped early)", c.valid)
    }
}
