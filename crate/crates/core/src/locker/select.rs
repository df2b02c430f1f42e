// SPDX-License-Identifier: Apache-2.0

//! Output selection and candidate ranking.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{LockError, PolicyKind};
use crate::analysis::{tps_of_output, TimingInfo};
use crate::netlist::{NetId, Netlist};

/// Fixed per-output weights `α·TPS* + β·FIC*`, normalised by the maxima over
/// all outputs of the netlist.
#[derive(Clone, Debug)]
pub struct OutputScores {
    pub outputs: Vec<NetId>,
    pub tps: Vec<f64>,
    pub cone_size: Vec<usize>,
    pub weight: Vec<f64>,
}

impl OutputScores {
    pub fn compute(n: &Netlist, t: &TimingInfo, alpha: f64, beta: f64) -> OutputScores {
        let outputs = n.primary_outputs().to_vec();
        let tps: Vec<f64> = outputs
            .iter()
            .map(|&o| tps_of_output(n, t, o).expect("primary output"))
            .collect();
        let cone_size: Vec<usize> = outputs.iter().map(|&o| n.fanin_cone(o).len()).collect();
        let max_tps = tps.iter().copied().fold(0.0, f64::max);
        let max_cone = cone_size.iter().copied().max().unwrap_or(0);
        let weight = tps
            .iter()
            .zip(&cone_size)
            .map(|(&tp, &size)| {
                let tps_star = if max_tps > 0.0 { tp / max_tps } else { 0.0 };
                let fic_star = if max_cone > 0 {
                    size as f64 / max_cone as f64
                } else {
                    0.0
                };
                alpha * tps_star + beta * fic_star
            })
            .collect();
        OutputScores {
            outputs,
            tps,
            cone_size,
            weight,
        }
    }

    /// Highest-weight output not in `forbidden`; ties go to the lower name.
    pub fn best(&self, n: &Netlist, forbidden: &BTreeSet<NetId>) -> Result<NetId, LockError> {
        self.outputs
            .iter()
            .zip(&self.weight)
            .filter(|(o, _)| !forbidden.contains(o))
            .max_by(|(a, wa), (b, wb)| {
                quantize(**wa)
                    .cmp(&quantize(**wb))
                    .then(n.name_rank(**b).cmp(&n.name_rank(**a)))
            })
            .map(|(&o, _)| o)
            .ok_or(LockError::AllOutputsForbidden)
    }
}

/// Picks the next output whose fan-in cone will be locked.
pub fn select_output(
    n: &Netlist,
    t: &TimingInfo,
    forbidden: &BTreeSet<NetId>,
    alpha: f64,
    beta: f64,
) -> Result<NetId, LockError> {
    OutputScores::compute(n, t, alpha, beta).best(n, forbidden)
}

/// Metrics of a replacement candidate at decision time.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateMetrics {
    pub gate: NetId,
    /// Number of primary outputs reachable from the gate.
    pub reach: usize,
    pub fanout: usize,
    pub sps: f64,
    /// Breadth-first depth inside the current output's fan-in cone.
    pub depth: usize,
}

/// Floats compared at 1e-9 resolution so equal skews tie deterministically.
pub(crate) fn quantize(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

/// Orders candidates best-first for `policy`. Only [`PolicyKind::Rnd`] uses
/// `rng`.
pub fn rank_candidates<R: Rng>(
    policy: PolicyKind,
    n: &Netlist,
    candidates: &mut [CandidateMetrics],
    rng: &mut R,
) {
    let id = |c: &CandidateMetrics| n.name_rank(c.gate);
    let skew = |c: &CandidateMetrics| -quantize(c.sps);
    match policy {
        PolicyKind::Rnd => {
            candidates.sort_by_key(id);
            candidates.shuffle(rng);
        }
        PolicyKind::Fic => candidates.sort_by_key(|c| (c.depth, id(c))),
        PolicyKind::Hsc => candidates.sort_by_key(|c| (skew(c), id(c))),
        PolicyKind::MfoHsc => candidates.sort_by_key(|c| (c.fanout, skew(c), id(c))),
        PolicyKind::MoHsc | PolicyKind::Nb2MoHsc => {
            candidates.sort_by_key(|c| (c.reach, skew(c), id(c)))
        }
    }
}
