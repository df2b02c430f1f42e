// SPDX-License-Identifier: Apache-2.0

//! Key and selection-trace files.
//!
//! A key file holds one `name = 0|1` line per key bit, in canonical order.
//! Blank lines and `#` comments are ignored on input.

use std::fmt::Write as _;

use super::{ObfuscationResult, RejectReason};
use crate::netlist::{Assignment, Netlist};

/// Writes `key` in the order given by `n.key_bit_names()`, followed by any
/// bits the netlist does not name.
pub fn write_key_file(n: &Netlist, key: &Assignment) -> String {
    let mut out = String::new();
    let names = n.key_bit_names();
    for name in &names {
        if let Some(&b) = key.get(name) {
            let _ = writeln!(out, "{name} = {}", b as u8);
        }
    }
    for (name, &b) in key {
        if !names.contains(name) {
            let _ = writeln!(out, "{name} = {}", b as u8);
        }
    }
    out
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("key file line {line}: {message}")]
pub struct KeyFileError {
    pub line: usize,
    pub message: String,
}

pub fn parse_key_file(text: &str) -> Result<Assignment, KeyFileError> {
    let mut key = Assignment::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| KeyFileError { line, message };
        let (name, value) = body
            .split_once('=')
            .ok_or_else(|| err("expected `name = 0|1`".into()))?;
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err(format!("bad key name `{name}`")));
        }
        let bit = match value.trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("bad key value `{other}`"))),
        };
        if key.insert(name.to_string(), bit).is_some() {
            return Err(err(format!("duplicate key bit `{name}`")));
        }
    }
    Ok(key)
}

/// Tab-separated trace: one `select` line per replaced gate, preceded by
/// `reject` lines for the candidates passed over before it.
pub fn write_trace_file(original: &Netlist, r: &ObfuscationResult) -> String {
    let name = |id| original.net_name(id);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# policy={} alpha={} beta={} gamma={} seed={} requested={} achieved={} exhausted={}",
        r.policy.kind,
        r.policy.alpha,
        r.policy.beta,
        r.policy.gamma,
        r.policy.seed,
        r.stats.requested,
        r.stats.achieved,
        r.stats.exhausted
    );
    let _ = writeln!(out, "# reject\tgate\treason");
    let _ = writeln!(
        out,
        "# select\tstep\tgate\toutput\treach\tfanout\tsps\tdepth\tcandidates"
    );
    let emit_rejects = |out: &mut String, rej: &[(crate::NetId, RejectReason)]| {
        for &(g, reason) in rej {
            let _ = writeln!(out, "reject\t{}\t{}", name(g), reason.label());
        }
    };
    for rec in &r.trace.records {
        emit_rejects(&mut out, &rec.rejections);
        let candidates: Vec<&str> = rec.candidates.iter().map(|c| name(c.gate)).collect();
        let _ = writeln!(
            out,
            "select\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}",
            rec.step,
            name(rec.gate),
            rec.output.map(name).unwrap_or("-"),
            rec.chosen.reach,
            rec.chosen.fanout,
            rec.chosen.sps,
            rec.chosen.depth,
            candidates.join(",")
        );
    }
    out
}
