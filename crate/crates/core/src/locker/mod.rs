// SPDX-License-Identifier: Apache-2.0

//! Gate-selection policies and LUT replacement.
//!
//! Every policy except [`PolicyKind::Rnd`] works output by output: it picks
//! the primary output with the best slack/cone-size weight, seeds a
//! candidate list with that output's driver and repeatedly replaces the
//! best-ranked candidate, feeding the replaced gate's fan-ins back into the
//! list. [`PolicyKind::Nb2MoHsc`] skips one logic level on every expansion
//! so that no two replaced gates are directly connected.

mod files;
mod select;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use files::{parse_key_file, write_key_file, write_trace_file, KeyFileError};
pub use select::{rank_candidates, select_output, CandidateMetrics, OutputScores};

use crate::analysis::{
    delay_estimate_after_replacement, signal_probabilities, timing, AnalysisConfig, ProbMap,
    TimingInfo,
};
use crate::netlist::{key_bit_name, Assignment, Gate, GateKind, NetId, Netlist, NetlistError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Rnd,
    Fic,
    Hsc,
    MfoHsc,
    MoHsc,
    Nb2MoHsc,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Rnd,
        PolicyKind::Fic,
        PolicyKind::Hsc,
        PolicyKind::MfoHsc,
        PolicyKind::MoHsc,
        PolicyKind::Nb2MoHsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Rnd => "RND",
            PolicyKind::Fic => "FIC",
            PolicyKind::Hsc => "HSC",
            PolicyKind::MfoHsc => "MFO_HSC",
            PolicyKind::MoHsc => "MO_HSC",
            PolicyKind::Nb2MoHsc => "NB2_MO_HSC",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = LockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| LockError::InvalidPolicy(format!("unknown policy `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Policy {
    pub kind: PolicyKind,
    /// Weight of normalised total positive slack in output selection.
    pub alpha: f64,
    /// Weight of normalised fan-in cone size in output selection.
    pub beta: f64,
    /// Allowed critical-path overhead, as a fraction of the original.
    pub gamma: f64,
    pub seed: u64,
}

impl Policy {
    pub fn new(kind: PolicyKind) -> Policy {
        Policy {
            kind,
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.1,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Policy {
        self.seed = seed;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Policy {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<(), LockError> {
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.alpha + self.beta > 0.0) {
            return Err(LockError::InvalidPolicy(
                "alpha and beta must be non-negative with a positive sum".into(),
            ));
        }
        if !(self.gamma >= 0.0) {
            return Err(LockError::InvalidPolicy("gamma must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LockError {
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("target number of LUTs must be at least 1")]
    InvalidTarget,
    #[error("netlist has no gates")]
    EmptyNetlist,
    #[error("every primary output is exhausted")]
    AllOutputsForbidden,
    #[error("gate `{0}` has more inputs than the widest allowed LUT")]
    Oversized(String),
    #[error("gate `{0}` is already a LUT")]
    AlreadyLut(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Why a candidate was passed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// Replacement would push the critical path past the budget.
    Timing,
    /// Wider than the widest allowed LUT.
    Oversized,
    /// A LUT in the input netlist.
    AlreadyLut,
    /// Replaced earlier in the run; visited but not replaced again.
    AlreadyReplaced,
    /// Adjacent to a replaced gate under the no-back-to-back rule.
    Forbidden,
}

impl RejectReason {
    pub fn label(self) -> &'static str {
        match self {
            RejectReason::Timing => "timing",
            RejectReason::Oversized => "oversized",
            RejectReason::AlreadyLut => "already_lut",
            RejectReason::AlreadyReplaced => "already_replaced",
            RejectReason::Forbidden => "forbidden",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub gate: NetId,
    /// Output whose cone was being locked; `None` for random selection.
    pub output: Option<NetId>,
    pub chosen: CandidateMetrics,
    /// Candidate list, best first, when the gate was chosen.
    pub candidates: Vec<CandidateMetrics>,
    /// Candidates passed over since the previous record.
    pub rejections: Vec<(NetId, RejectReason)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionTrace {
    pub records: Vec<TraceRecord>,
    /// Outputs in the order their cones were visited.
    pub selected_outputs: Vec<NetId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObfuscationStats {
    pub requested: usize,
    pub achieved: usize,
    pub timing_rejections: usize,
    pub other_rejections: usize,
    /// Times the locker moved on to another output's cone.
    pub cone_switches: usize,
    /// Fewer gates than requested could be replaced.
    pub exhausted: bool,
}

#[derive(Clone, Debug)]
pub struct ObfuscationResult {
    pub policy: Policy,
    /// Locked netlist; replaced gates are key LUTs holding the correct key.
    pub obfuscated: Netlist,
    pub correct_key: Assignment,
    pub trace: SelectionTrace,
    pub stats: ObfuscationStats,
}

impl ObfuscationResult {
    /// Replaced gates in replacement order.
    pub fn replaced(&self) -> Vec<NetId> {
        self.trace.records.iter().map(|r| r.gate).collect()
    }

    pub fn key_bits(&self) -> usize {
        self.correct_key.len()
    }
}

/// Turns plain gate `g` into a key LUT with the same inputs and output net.
/// Returns the new netlist, the key-bit names and their correct values.
pub fn replace_with_lut(
    n: &Netlist,
    g: NetId,
    max_lut_inputs: usize,
) -> Result<(Netlist, Vec<String>, Vec<bool>), LockError> {
    let gate = n.require_gate(g)?;
    let name = n.net_name(g);
    if gate.is_lut() {
        return Err(LockError::AlreadyLut(name.to_string()));
    }
    if gate.arity() > max_lut_inputs {
        return Err(LockError::Oversized(name.to_string()));
    }
    let content = gate.function();
    let names = (0..content.len()).map(|i| key_bit_name(name, i)).collect();
    let lut = Gate {
        kind: GateKind::Lut,
        inputs: gate.inputs.clone(),
        lut_content: Some(content.clone()),
        content_is_key: true,
    };
    Ok((n.with_gate(g, lut), names, content))
}

/// Structural metrics that do not change when gates become LUTs.
struct Metrics {
    probs: ProbMap,
    reach: Vec<usize>,
    fanout: Vec<usize>,
}

impl Metrics {
    fn compute(n: &Netlist, cfg: &AnalysisConfig) -> Metrics {
        let words = n.primary_outputs().len().div_ceil(64).max(1);
        let mut sets = vec![vec![0u64; words]; n.net_count()];
        for (k, &o) in n.primary_outputs().iter().enumerate() {
            sets[o.index()][k / 64] |= 1 << (k % 64);
        }
        for &id in n.topo_order().iter().rev() {
            let mine = sets[id.index()].clone();
            for &i in &n.gate(id).unwrap().inputs {
                for (w, m) in sets[i.index()].iter_mut().zip(&mine) {
                    *w |= m;
                }
            }
        }
        let reach = sets
            .iter()
            .map(|s| s.iter().map(|w| w.count_ones() as usize).sum())
            .collect();
        let fanout = n
            .nets()
            .map(|id| {
                n.consumers(id).len() + n.primary_outputs().iter().filter(|&&o| o == id).count()
            })
            .collect();
        Metrics {
            probs: signal_probabilities(n, cfg.pi_p1),
            reach,
            fanout,
        }
    }

    fn of(&self, gate: NetId, depth: usize) -> CandidateMetrics {
        CandidateMetrics {
            gate,
            reach: self.reach[gate.index()],
            fanout: self.fanout[gate.index()],
            sps: self.probs.sps(gate),
            depth,
        }
    }
}

struct Run<'a> {
    original: &'a Netlist,
    policy: Policy,
    cfg: AnalysisConfig,
    metrics: Metrics,
    threshold: f64,
    current: Netlist,
    timing: TimingInfo,
    replaced: Vec<bool>,
    timing_rejected: Vec<bool>,
    forbidden: Vec<bool>,
    key: Assignment,
    trace: SelectionTrace,
    stats: ObfuscationStats,
    pending_rejections: Vec<(NetId, RejectReason)>,
}

impl<'a> Run<'a> {
    fn reject(&mut self, gate: NetId, reason: RejectReason) {
        match reason {
            RejectReason::Timing => {
                self.stats.timing_rejections += 1;
                self.timing_rejected[gate.index()] = true;
            }
            RejectReason::AlreadyReplaced => {}
            _ => self.stats.other_rejections += 1,
        }
        self.pending_rejections.push((gate, reason));
    }

    /// Static eligibility, then the timing budget against the current netlist.
    fn check(&mut self, gate: NetId) -> Option<RejectReason> {
        if self.replaced[gate.index()] {
            return Some(RejectReason::AlreadyReplaced);
        }
        if self.forbidden[gate.index()] {
            return Some(RejectReason::Forbidden);
        }
        let g = self.original.gate(gate).unwrap();
        if g.is_lut() {
            return Some(RejectReason::AlreadyLut);
        }
        if g.arity() > self.cfg.max_lut_inputs {
            return Some(RejectReason::Oversized);
        }
        if self.timing_rejected[gate.index()] {
            return Some(RejectReason::Timing);
        }
        let estimate = delay_estimate_after_replacement(&self.current, &self.timing, gate)
            .expect("plain gate");
        if estimate > self.threshold + 1e-9 {
            return Some(RejectReason::Timing);
        }
        None
    }

    fn replace(
        &mut self,
        gate: NetId,
        output: Option<NetId>,
        chosen: CandidateMetrics,
        candidates: Vec<CandidateMetrics>,
    ) {
        let (next, names, values) =
            replace_with_lut(&self.current, gate, self.cfg.max_lut_inputs).expect("checked");
        self.current = next;
        self.timing = timing(&self.current, self.cfg.delay);
        self.key.extend(names.into_iter().zip(values));
        self.replaced[gate.index()] = true;
        self.stats.achieved += 1;
        if self.policy.kind == PolicyKind::Nb2MoHsc {
            let g = self.original.gate(gate).unwrap();
            for &f in &g.inputs {
                self.forbidden[f.index()] = true;
            }
            for &c in self.original.consumers(gate) {
                self.forbidden[c.index()] = true;
            }
        }
        self.trace.records.push(TraceRecord {
            step: self.stats.achieved,
            gate,
            output,
            chosen,
            candidates,
            rejections: std::mem::take(&mut self.pending_rejections),
        });
    }

    fn fanin_gates(&self, gate: NetId) -> impl Iterator<Item = NetId> + '_ {
        self.original
            .gate(gate)
            .unwrap()
            .inputs
            .iter()
            .copied()
            .filter(|&i| !self.original.is_input(i))
    }

    /// Gates to enqueue after visiting `gate`: its fan-ins, or for the
    /// no-back-to-back policy the fan-ins of its fan-ins.
    fn expansion(&self, gate: NetId, skip_level: bool) -> Vec<NetId> {
        if skip_level {
            self.fanin_gates(gate)
                .flat_map(|f| self.fanin_gates(f).collect::<Vec<_>>())
                .filter(|&gp| !self.forbidden[gp.index()])
                .collect()
        } else {
            self.fanin_gates(gate).collect()
        }
    }

    fn run_random(&mut self, target: usize) {
        let mut order: Vec<NetId> = self.original.topo_order().to_vec();
        order.sort_by_key(|&g| self.original.name_rank(g));
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.policy.seed));
        for g in order {
            if self.stats.achieved == target {
                break;
            }
            match self.check(g) {
                None => {
                    let m = self.metrics.of(g, 0);
                    self.replace(g, None, m, Vec::new());
                }
                Some(reason) => self.reject(g, reason),
            }
        }
    }

    fn run_cones(&mut self, target: usize) {
        let initial = timing(self.original, self.cfg.delay);
        let scores = OutputScores::compute(
            self.original,
            &initial,
            self.policy.alpha,
            self.policy.beta,
        );
        let skip_level = self.policy.kind == PolicyKind::Nb2MoHsc;
        let mut forbidden_outputs = BTreeSet::new();
        while self.stats.achieved < target {
            let Ok(po) = scores.best(self.original, &forbidden_outputs) else {
                break;
            };
            if !self.trace.selected_outputs.is_empty() {
                self.stats.cone_switches += 1;
            }
            self.trace.selected_outputs.push(po);
            let cone = self.original.fanin_cone(po);
            let mut enqueued = vec![false; self.original.net_count()];
            let mut list: Vec<NetId> = Vec::new();
            if !self.original.is_input(po) {
                enqueued[po.index()] = true;
                list.push(po);
            }
            while !list.is_empty() && self.stats.achieved < target {
                let mut ranked: Vec<CandidateMetrics> = list
                    .iter()
                    .map(|&g| self.metrics.of(g, cone.depth[&g]))
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(self.policy.seed);
                rank_candidates(self.policy.kind, self.original, &mut ranked, &mut rng);
                let best = ranked[0].clone();
                list.retain(|&g| g != best.gate);
                let expand = match self.check(best.gate) {
                    None => {
                        self.replace(best.gate, Some(po), best.clone(), ranked);
                        Some(skip_level)
                    }
                    Some(RejectReason::AlreadyReplaced) => {
                        self.reject(best.gate, RejectReason::AlreadyReplaced);
                        Some(skip_level)
                    }
                    // A forbidden gate is the skipped level itself.
                    Some(RejectReason::Forbidden) => {
                        self.reject(best.gate, RejectReason::Forbidden);
                        Some(false)
                    }
                    Some(reason) => {
                        self.reject(best.gate, reason);
                        None
                    }
                };
                if let Some(skip) = expand {
                    for g in self.expansion(best.gate, skip) {
                        if !enqueued[g.index()] {
                            enqueued[g.index()] = true;
                            list.push(g);
                        }
                    }
                }
            }
            if self.stats.achieved < target {
                forbidden_outputs.insert(po);
            }
        }
    }
}

/// Replaces up to `target` gates of `n` with key LUTs under `policy`.
///
/// Fewer than `target` gates are replaced only when every candidate has been
/// rejected; `stats.exhausted` is then set.
pub fn obfuscate(
    n: &Netlist,
    policy: &Policy,
    target: usize,
    cfg: &AnalysisConfig,
) -> Result<ObfuscationResult, LockError> {
    policy.validate()?;
    if target == 0 {
        return Err(LockError::InvalidTarget);
    }
    if n.gate_count() == 0 {
        return Err(LockError::EmptyNetlist);
    }
    let initial = timing(n, cfg.delay);
    let mut run = Run {
        original: n,
        policy: *policy,
        cfg: *cfg,
        metrics: Metrics::compute(n, cfg),
        threshold: (1.0 + policy.gamma) * initial.critical_path_delay,
        current: n.clone(),
        timing: initial,
        replaced: vec![false; n.net_count()],
        timing_rejected: vec![false; n.net_count()],
        forbidden: vec![false; n.net_count()],
        key: Assignment::new(),
        trace: SelectionTrace::default(),
        stats: ObfuscationStats {
            requested: target,
            ..Default::default()
        },
        pending_rejections: Vec::new(),
    };
    if policy.kind == PolicyKind::Rnd {
        run.run_random(target);
    } else {
        run.run_cones(target);
    }
    run.stats.exhausted = run.stats.achieved < target;
    Ok(ObfuscationResult {
        policy: *policy,
        obfuscated: run.current,
        correct_key: run.key,
        trace: run.trace,
        stats: run.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    #[test]
    fn replacement_key_values() {
        let n = parse_bench(
            "INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\nOUTPUT(z)\nx = AND(a, b)\ny = NOT(a)\nz = XOR(a, b)",
        )
        .unwrap();
        let id = |s| n.net_id(s).unwrap();
        let (lx, names, vals) = replace_with_lut(&n, id("x"), 6).unwrap();
        assert_eq!(names, ["k_x_0", "k_x_1", "k_x_2", "k_x_3"]);
        assert_eq!(vals, [false, false, false, true]);
        assert!(lx.gate(id("x")).unwrap().is_key_lut());
        let (_, names, vals) = replace_with_lut(&n, id("y"), 6).unwrap();
        assert_eq!(names.len(), 2);
        assert_eq!(vals, [true, false]);
        let (_, _, vals) = replace_with_lut(&n, id("z"), 6).unwrap();
        assert_eq!(vals, [false, true, true, false]);
        assert!(matches!(
            replace_with_lut(&lx, id("x"), 6),
            Err(LockError::AlreadyLut(_))
        ));
        assert!(matches!(
            replace_with_lut(&n, id("x"), 1),
            Err(LockError::Oversized(_))
        ));
    }

    #[test]
    fn policy_names_round_trip() {
        for p in PolicyKind::ALL {
            assert_eq!(p.name().parse::<PolicyKind>().unwrap(), p);
        }
        assert_eq!("nb2-mo-hsc".parse::<PolicyKind>().unwrap(), PolicyKind::Nb2MoHsc);
        assert!("xyz".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn invalid_arguments() {
        let n = parse_bench("INPUT(a)\nOUTPUT(x)\nx = NOT(a)").unwrap();
        let cfg = AnalysisConfig::default();
        let p = Policy::new(PolicyKind::Fic);
        assert_eq!(obfuscate(&n, &p, 0, &cfg).unwrap_err(), LockError::InvalidTarget);
        let empty = parse_bench("INPUT(a)\nOUTPUT(a)").unwrap();
        assert_eq!(obfuscate(&empty, &p, 1, &cfg).unwrap_err(), LockError::EmptyNetlist);
        let mut bad = p;
        bad.alpha = 0.0;
        bad.beta = 0.0;
        assert!(matches!(obfuscate(&n, &bad, 1, &cfg), Err(LockError::InvalidPolicy(_))));
    }

    #[test]
    fn exhaustion_is_partial_not_fatal() {
        let n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(x)\nx = AND(a, b)").unwrap();
        let cfg = AnalysisConfig::default();
        // A LUT doubles the delay of a one-gate circuit, so allow it.
        let p = Policy::new(PolicyKind::MoHsc).with_gamma(1.0);
        let r = obfuscate(&n, &p, 3, &cfg).unwrap();
        assert_eq!(r.stats.achieved, 1);
        assert!(r.stats.exhausted);
        assert_eq!(r.key_bits(), 4);
        let strict = obfuscate(&n, &Policy::new(PolicyKind::MoHsc), 1, &cfg).unwrap();
        assert_eq!(strict.stats.achieved, 0);
        assert_eq!(strict.stats.timing_rejections, 1);
    }
}
