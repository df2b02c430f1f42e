// SPDX-License-Identifier: Apache-2.0

//! Signal probabilities under the independent-inputs approximation.

use crate::netlist::{Driver, GateKind, NetId, Netlist, NetlistError};

/// Probability of logic 1 per net, indexed by [`NetId::index`].
#[derive(Clone, Debug)]
pub struct ProbMap {
    p1: Vec<f64>,
}

impl ProbMap {
    pub fn p1(&self, net: NetId) -> f64 {
        self.p1[net.index()]
    }

    pub fn get(&self, n: &Netlist, net: &str) -> Result<f64, NetlistError> {
        Ok(self.p1(n.require_net(net)?))
    }

    /// Signal probability skew `|Pr(0) - Pr(1)|` of `net`.
    pub fn sps(&self, net: NetId) -> f64 {
        sps_of(self.p1(net))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p1
    }
}

pub fn sps_of(p1: f64) -> f64 {
    (1.0 - 2.0 * p1).abs()
}

/// Skew of a named net.
pub fn sps(n: &Netlist, p: &ProbMap, net: &str) -> Result<f64, NetlistError> {
    Ok(p.sps(n.require_net(net)?))
}

/// Propagates `pi_p1` from every primary input in topological order.
///
/// Gate inputs are treated as independent, so reconvergent fan-out makes the
/// result approximate; on fan-out-free logic it is exact. LUTs (key LUTs
/// included) use their stored content.
pub fn signal_probabilities(n: &Netlist, pi_p1: f64) -> ProbMap {
    assert!((0.0..=1.0).contains(&pi_p1), "input probability out of range");
    let mut p1 = vec![0.0; n.net_count()];
    for &i in n.primary_inputs() {
        p1[i.index()] = pi_p1;
    }
    for &id in n.topo_order() {
        let Driver::Gate(g) = n.driver(id) else {
            unreachable!()
        };
        let ins: Vec<f64> = g.inputs.iter().map(|i| p1[i.index()]).collect();
        let all = || ins.iter().product::<f64>();
        let any = || 1.0 - ins.iter().map(|p| 1.0 - p).product::<f64>();
        let parity = || {
            ins.iter()
                .fold(0.0, |acc, &p| acc * (1.0 - p) + p * (1.0 - acc))
        };
        let v = match g.kind {
            GateKind::And => all(),
            GateKind::Nand => 1.0 - all(),
            GateKind::Or => any(),
            GateKind::Nor => 1.0 - any(),
            GateKind::Xor => parity(),
            GateKind::Xnor => 1.0 - parity(),
            GateKind::Not => 1.0 - ins[0],
            GateKind::Buff => ins[0],
            GateKind::Lut => {
                let content = g.lut_content.as_ref().unwrap();
                let k = ins.len();
                content
                    .iter()
                    .enumerate()
                    .filter(|(_, &bit)| bit)
                    .map(|(pattern, _)| {
                        (0..k)
                            .map(|j| {
                                if (pattern >> (k - 1 - j)) & 1 == 1 {
                                    ins[j]
                                } else {
                                    1.0 - ins[j]
                                }
                            })
                            .product::<f64>()
                    })
                    .sum()
            }
        };
        p1[id.index()] = v.clamp(0.0, 1.0);
    }
    ProbMap { p1 }
}
