// SPDX-License-Identifier: Apache-2.0

//! Unit-delay static timing.

use crate::netlist::{Driver, Gate, GateKind, NetId, Netlist, NetlistError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayModel {
    pub gate_delay: f64,
    pub lut_delay: f64,
}

impl Default for DelayModel {
    fn default() -> Self {
        DelayModel {
            gate_delay: 1.0,
            lut_delay: 2.0,
        }
    }
}

impl DelayModel {
    pub fn delay(&self, kind: GateKind) -> f64 {
        if kind == GateKind::Lut {
            self.lut_delay
        } else {
            self.gate_delay
        }
    }
}

/// Arrival, required time and slack per net, indexed by [`NetId::index`].
#[derive(Clone, Debug)]
pub struct TimingInfo {
    pub arrival: Vec<f64>,
    pub required: Vec<f64>,
    pub slack: Vec<f64>,
    pub critical_path_delay: f64,
    pub model: DelayModel,
}

impl TimingInfo {
    pub fn arrival(&self, net: NetId) -> f64 {
        self.arrival[net.index()]
    }

    pub fn required(&self, net: NetId) -> f64 {
        self.required[net.index()]
    }

    pub fn slack(&self, net: NetId) -> f64 {
        self.slack[net.index()]
    }

    pub fn gate_delay(&self, kind: GateKind) -> f64 {
        self.model.delay(kind)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TimingError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("`{0}` is not a primary output")]
    NotAnOutput(String),
    #[error("`{0}` is already a LUT")]
    AlreadyLut(String),
}

/// Forward arrival and backward required-time propagation. Primary outputs
/// are required at the critical path delay; nets that reach no output are
/// given the same requirement.
pub fn timing(n: &Netlist, model: DelayModel) -> TimingInfo {
    let mut arrival = vec![0.0f64; n.net_count()];
    for &id in n.topo_order() {
        let g = gate(n, id);
        let latest = g
            .inputs
            .iter()
            .map(|i| arrival[i.index()])
            .fold(0.0, f64::max);
        arrival[id.index()] = latest + model.delay(g.kind);
    }
    let critical_path_delay = n
        .primary_outputs()
        .iter()
        .map(|o| arrival[o.index()])
        .fold(0.0, f64::max);

    let mut required = vec![f64::INFINITY; n.net_count()];
    for &o in n.primary_outputs() {
        required[o.index()] = critical_path_delay;
    }
    for &id in n.topo_order().iter().rev() {
        if required[id.index()].is_infinite() {
            required[id.index()] = critical_path_delay;
        }
        let g = gate(n, id);
        let need = required[id.index()] - model.delay(g.kind);
        for &i in &g.inputs {
            required[i.index()] = required[i.index()].min(need);
        }
    }
    for r in required.iter_mut() {
        if r.is_infinite() {
            *r = critical_path_delay;
        }
    }
    let slack = required
        .iter()
        .zip(&arrival)
        .map(|(r, a)| r - a)
        .collect();
    TimingInfo {
        arrival,
        required,
        slack,
        critical_path_delay,
        model,
    }
}

fn gate(n: &Netlist, id: NetId) -> &Gate {
    match n.driver(id) {
        Driver::Gate(g) => g,
        Driver::Input => unreachable!("topological order lists gates only"),
    }
}

/// Total positive slack of the fan-in cone of `po`: the sum of positive
/// per-gate slack over every gate in the cone.
pub fn tps_of_output(n: &Netlist, t: &TimingInfo, po: NetId) -> Result<f64, TimingError> {
    if !n.is_output(po) {
        return Err(TimingError::NotAnOutput(n.net_name(po).to_string()));
    }
    Ok(n
        .fanin_cone(po)
        .gates
        .iter()
        .map(|&g| t.slack(g).max(0.0))
        .sum())
}

/// Longest input-to-output path through `g` if `g` became a LUT now.
pub fn delay_estimate_after_replacement(
    n: &Netlist,
    t: &TimingInfo,
    g: NetId,
) -> Result<f64, TimingError> {
    let gate = n.require_gate(g)?;
    if gate.is_lut() {
        return Err(TimingError::AlreadyLut(n.net_name(g).to_string()));
    }
    let penalty = t.model.lut_delay - t.model.delay(gate.kind);
    let downstream = t.critical_path_delay - t.required(g);
    Ok(t.arrival(g) + penalty + downstream)
}
