// SPDX-License-Identifier: Apache-2.0

//! Combinational gate-level netlists.
//!
//! A [`Netlist`] is immutable once built. Every net is either a primary
//! input or the output of exactly one [`Gate`]; a gate is identified by the
//! net it drives. Derived netlists (for example after a gate has been turned
//! into a LUT) are produced by [`Netlist::with_gate`], which reuses the
//! structural indices of the source.

mod bench;
mod sim;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;

pub use bench::{parse_bench, read_bench, write_bench, LoadError};

/// Map from net (or key-bit) name to a logic value.
pub type Assignment = BTreeMap<String, bool>;

/// Widest LUT the toolkit will create or accept as a replacement candidate.
pub const DEFAULT_MAX_LUT_INPUTS: usize = 6;

/// Dense index of a net inside one [`Netlist`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub(crate) u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buff,
    Lut,
}

impl GateKind {
    pub const PLAIN: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buff,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buff => "BUFF",
            GateKind::Lut => "LUT",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GateKind> {
        let kind = match word.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "INV" => GateKind::Not,
            "BUFF" | "BUF" => GateKind::Buff,
            "LUT" => GateKind::Lut,
            _ => return None,
        };
        Some(kind)
    }

    /// Whether `arity` inputs is legal for this kind.
    pub fn accepts_arity(self, arity: usize, max_lut_inputs: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buff => arity == 1,
            GateKind::Lut => (1..=max_lut_inputs).contains(&arity),
            _ => arity >= 2,
        }
    }

    /// Output of a plain gate for the given input values.
    ///
    /// Panics when called on [`GateKind::Lut`], whose function lives in the
    /// gate's content rather than its kind.
    pub fn eval(self, inputs: impl IntoIterator<Item = bool>) -> bool {
        let mut it = inputs.into_iter();
        match self {
            GateKind::And => it.all(|b| b),
            GateKind::Nand => !it.all(|b| b),
            GateKind::Or => it.any(|b| b),
            GateKind::Nor => !it.any(|b| b),
            GateKind::Xor => it.fold(false, |acc, b| acc ^ b),
            GateKind::Xnor => !it.fold(false, |acc, b| acc ^ b),
            GateKind::Not => !it.next().expect("NOT needs an input"),
            GateKind::Buff => it.next().expect("BUFF needs an input"),
            GateKind::Lut => panic!("LUT function is given by its content"),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Truth table of a plain gate of the given arity.
///
/// Bit `i` is the output for the input pattern whose binary value is `i`,
/// with the first input as the most significant bit.
pub fn truth_table(kind: GateKind, arity: usize) -> Vec<bool> {
    (0..1usize << arity)
        .map(|pattern| kind.eval(pattern_bits(pattern, arity)))
        .collect()
}

/// Input values for `pattern`, first input most significant.
pub fn pattern_bits(pattern: usize, arity: usize) -> impl Iterator<Item = bool> {
    (0..arity).map(move |j| (pattern >> (arity - 1 - j)) & 1 == 1)
}

/// Index into a LUT content vector for the given input values.
pub fn pattern_index(inputs: impl IntoIterator<Item = bool>) -> usize {
    inputs.into_iter().fold(0, |acc, b| (acc << 1) | b as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    /// Present iff `kind == Lut`; length `2^inputs.len()`.
    pub lut_content: Option<Vec<bool>>,
    /// The content bits are key bits hidden from the attacker.
    pub content_is_key: bool,
}

impl Gate {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_lut(&self) -> bool {
        self.kind == GateKind::Lut
    }

    pub fn is_key_lut(&self) -> bool {
        self.is_lut() && self.content_is_key
    }

    /// Truth table of the gate under its stored content.
    pub fn function(&self) -> Vec<bool> {
        match &self.lut_content {
            Some(bits) => bits.clone(),
            None => truth_table(self.kind, self.arity()),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: net `{net}` is used but never defined")]
    UndefinedNet { net: String, line: usize },
    #[error("line {line}: net `{net}` is defined more than once")]
    DuplicateDefinition { net: String, line: usize },
    #[error("combinational cycle through net `{net}`")]
    Cycle { net: String },
    #[error("line {line}: LUT `{net}` literal has {found} hex digits, expected {expected}")]
    LutLengthMismatch {
        net: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {kind} gate `{net}` cannot take {arity} inputs")]
    BadArity {
        net: String,
        kind: GateKind,
        arity: usize,
        line: usize,
    },
    #[error("line {line}: sequential element `{element}` is not supported")]
    Sequential { element: String, line: usize },
    #[error("unknown net `{0}`")]
    UnknownNet(String),
    #[error("`{0}` is not driven by a gate")]
    NotAGate(String),
}

/// Where a net's value comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Driver {
    Input,
    Gate(Gate),
}

#[derive(Clone, Debug)]
pub struct Netlist {
    name: String,
    names: Vec<String>,
    lookup: HashMap<String, NetId>,
    drivers: Vec<Driver>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    /// Consuming gates, one entry per input slot.
    fanouts: Vec<Vec<NetId>>,
    /// Gates only, drivers before consumers, ties by name.
    topo: Vec<NetId>,
    /// Position of each net in name order.
    name_rank: Vec<u32>,
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn net_count(&self) -> usize {
        self.names.len()
    }

    pub fn gate_count(&self) -> usize {
        self.topo.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.names[net.index()]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.lookup.get(name).copied()
    }

    pub fn require_net(&self, name: &str) -> Result<NetId, NetlistError> {
        self.net_id(name)
            .ok_or_else(|| NetlistError::UnknownNet(name.to_string()))
    }

    pub fn nets(&self) -> impl Iterator<Item = NetId> {
        (0..self.names.len() as u32).map(NetId)
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn driver(&self, net: NetId) -> &Driver {
        &self.drivers[net.index()]
    }

    pub fn gate(&self, net: NetId) -> Option<&Gate> {
        match &self.drivers[net.index()] {
            Driver::Gate(g) => Some(g),
            Driver::Input => None,
        }
    }

    pub fn require_gate(&self, net: NetId) -> Result<&Gate, NetlistError> {
        self.gate(net)
            .ok_or_else(|| NetlistError::NotAGate(self.net_name(net).to_string()))
    }

    pub fn is_input(&self, net: NetId) -> bool {
        matches!(self.drivers[net.index()], Driver::Input)
    }

    pub fn is_output(&self, net: NetId) -> bool {
        self.outputs.contains(&net)
    }

    /// Gates consuming `net`, one entry per input slot.
    pub fn consumers(&self, net: NetId) -> &[NetId] {
        &self.fanouts[net.index()]
    }

    /// Gates in topological order (drivers first, ties by net name).
    pub fn topo_order(&self) -> &[NetId] {
        &self.topo
    }

    /// Gate ids iterated in topological order.
    pub fn gates(&self) -> impl Iterator<Item = (NetId, &Gate)> {
        self.topo
            .iter()
            .map(move |&id| (id, self.gate(id).expect("topo lists gates only")))
    }

    /// Rank of the net's name in ascending name order; the universal tie-break.
    pub fn name_rank(&self, net: NetId) -> u32 {
        self.name_rank[net.index()]
    }

    /// Gates whose content bits are key bits, sorted by gate name.
    pub fn key_luts(&self) -> Vec<NetId> {
        let mut luts: Vec<NetId> = self
            .gates()
            .filter(|(_, g)| g.is_key_lut())
            .map(|(id, _)| id)
            .collect();
        luts.sort_by_key(|&id| self.name_rank(id));
        luts
    }

    /// Key-bit names in canonical order: key LUTs by gate name, then bit index.
    pub fn key_bit_names(&self) -> Vec<String> {
        self.key_luts()
            .into_iter()
            .flat_map(|id| {
                let width = 1usize << self.gate(id).unwrap().arity();
                let name = self.net_name(id);
                (0..width).map(move |i| key_bit_name(name, i))
            })
            .collect()
    }

    /// Transitive fan-in of `root`, by breadth-first search toward the inputs.
    pub fn fanin_cone(&self, root: NetId) -> FaninCone {
        let mut cone = FaninCone::default();
        if self.is_input(root) {
            return cone;
        }
        let mut depth = vec![usize::MAX; self.net_count()];
        let mut queue = VecDeque::from([root]);
        depth[root.index()] = 0;
        while let Some(net) = queue.pop_front() {
            cone.gates.push(net);
            cone.depth.insert(net, depth[net.index()]);
            let gate = self.gate(net).unwrap();
            for &input in &gate.inputs {
                if depth[input.index()] == usize::MAX && !self.is_input(input) {
                    depth[input.index()] = depth[net.index()] + 1;
                    queue.push_back(input);
                }
            }
        }
        cone
    }

    /// Primary outputs reachable from the output of `gate`.
    pub fn reachable_outputs(&self, gate: NetId) -> Result<BTreeSet<NetId>, NetlistError> {
        self.require_gate(gate)?;
        let mut seen = vec![false; self.net_count()];
        let mut stack = vec![gate];
        seen[gate.index()] = true;
        while let Some(net) = stack.pop() {
            for &c in self.consumers(net) {
                if !seen[c.index()] {
                    seen[c.index()] = true;
                    stack.push(c);
                }
            }
        }
        Ok(self
            .outputs
            .iter()
            .copied()
            .filter(|o| seen[o.index()])
            .collect())
    }

    /// Consumer slots of `gate`'s output: gate input pins plus primary outputs.
    pub fn fanout_count(&self, gate: NetId) -> Result<usize, NetlistError> {
        self.require_gate(gate)?;
        let po_slots = self.outputs.iter().filter(|&&o| o == gate).count();
        Ok(self.consumers(gate).len() + po_slots)
    }

    /// Returns a copy with `gate` replaced. The input list must be unchanged.
    pub fn with_gate(&self, net: NetId, gate: Gate) -> Netlist {
        let old = self.gate(net).expect("with_gate on a primary input");
        assert_eq!(old.inputs, gate.inputs, "with_gate cannot rewire");
        let mut out = self.clone();
        out.drivers[net.index()] = Driver::Gate(gate);
        out
    }

    /// Fills every key LUT's content from `key`; the LUTs stay flagged as key LUTs.
    pub fn with_key(&self, key: &Assignment) -> Result<Netlist, SimError> {
        let mut out = self.clone();
        for id in self.key_luts() {
            let gate = self.gate(id).unwrap();
            let bits = (0..1usize << gate.arity())
                .map(|i| {
                    let name = key_bit_name(self.net_name(id), i);
                    key.get(&name).copied().ok_or(SimError::MissingKey(name))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut g = gate.clone();
            g.lut_content = Some(bits);
            out.drivers[id.index()] = Driver::Gate(g);
        }
        Ok(out)
    }

    /// Key assignment read back from the stored content of the key LUTs.
    pub fn embedded_key(&self) -> Assignment {
        let mut key = Assignment::new();
        for id in self.key_luts() {
            let bits = self.gate(id).unwrap().lut_content.as_ref().unwrap();
            for (i, &b) in bits.iter().enumerate() {
                key.insert(key_bit_name(self.net_name(id), i), b);
            }
        }
        key
    }

    /// Structural equality: same nets, drivers, input orders and LUT
    /// contents. Key LUT contents are ignored since they are not part of
    /// the written form.
    pub fn isomorphic(&self, other: &Netlist) -> bool {
        let names = |n: &Netlist, ids: &[NetId]| -> Vec<String> {
            ids.iter().map(|&i| n.net_name(i).to_string()).collect()
        };
        if names(self, &self.inputs) != names(other, &other.inputs)
            || names(self, &self.outputs) != names(other, &other.outputs)
            || self.net_count() != other.net_count()
        {
            return false;
        }
        self.nets().all(|id| {
            let Some(oid) = other.net_id(self.net_name(id)) else {
                return false;
            };
            match (self.driver(id), other.driver(oid)) {
                (Driver::Input, Driver::Input) => true,
                (Driver::Gate(a), Driver::Gate(b)) => {
                    a.kind == b.kind
                        && a.content_is_key == b.content_is_key
                        && names(self, &a.inputs) == names(other, &b.inputs)
                        && (a.content_is_key || a.lut_content == b.lut_content)
                }
                _ => false,
            }
        })
    }
}

/// Name of the `index`-th content bit of key LUT `gate`.
pub fn key_bit_name(gate: &str, index: usize) -> String {
    format!("k_{gate}_{index}")
}

#[derive(Clone, Debug, Default)]
pub struct FaninCone {
    /// Gates in breadth-first order from the root.
    pub gates: Vec<NetId>,
    /// Breadth-first depth; the root's driver is at depth 0.
    pub depth: HashMap<NetId, usize>,
}

impl FaninCone {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn contains(&self, net: NetId) -> bool {
        self.depth.contains_key(&net)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("no value for primary input `{0}`")]
    MissingInput(String),
    #[error("no value for key bit `{0}`")]
    MissingKey(String),
}

/// Incremental construction of a [`Netlist`]; names are resolved at
/// [`NetlistBuilder::build`], so gates may reference nets defined later.
#[derive(Clone, Debug, Default)]
pub struct NetlistBuilder {
    name: String,
    max_lut_inputs: usize,
    inputs: Vec<(String, usize)>,
    outputs: Vec<(String, usize)>,
    gates: Vec<PendingGate>,
}

#[derive(Clone, Debug)]
struct PendingGate {
    net: String,
    kind: GateKind,
    inputs: Vec<String>,
    lut_content: Option<Vec<bool>>,
    content_is_key: bool,
    line: usize,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            max_lut_inputs: DEFAULT_MAX_LUT_INPUTS,
            ..Default::default()
        }
    }

    pub fn max_lut_inputs(mut self, max: usize) -> Self {
        self.max_lut_inputs = max;
        self
    }

    pub fn input(&mut self, net: &str) -> &mut Self {
        self.inputs.push((net.to_string(), 0));
        self
    }

    pub fn output(&mut self, net: &str) -> &mut Self {
        self.outputs.push((net.to_string(), 0));
        self
    }

    pub fn gate(&mut self, net: &str, kind: GateKind, inputs: &[&str]) -> &mut Self {
        assert_ne!(kind, GateKind::Lut, "use NetlistBuilder::lut");
        self.push_gate(net, kind, inputs, None, false, 0);
        self
    }

    /// A LUT with known content (bit `i` = output for input pattern `i`).
    pub fn lut(&mut self, net: &str, inputs: &[&str], content: Vec<bool>) -> &mut Self {
        self.push_gate(net, GateKind::Lut, inputs, Some(content), false, 0);
        self
    }

    /// A key LUT; `content` is the correct key.
    pub fn key_lut(&mut self, net: &str, inputs: &[&str], content: Vec<bool>) -> &mut Self {
        self.push_gate(net, GateKind::Lut, inputs, Some(content), true, 0);
        self
    }

    pub(crate) fn input_at(&mut self, net: &str, line: usize) {
        self.inputs.push((net.to_string(), line));
    }

    pub(crate) fn output_at(&mut self, net: &str, line: usize) {
        self.outputs.push((net.to_string(), line));
    }

    pub(crate) fn push_gate(
        &mut self,
        net: &str,
        kind: GateKind,
        inputs: &[&str],
        lut_content: Option<Vec<bool>>,
        content_is_key: bool,
        line: usize,
    ) {
        self.gates.push(PendingGate {
            net: net.to_string(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            lut_content,
            content_is_key,
            line,
        });
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        let mut names = Vec::new();
        let mut lookup = HashMap::new();
        let mut define = |net: &str, line: usize| -> Result<NetId, NetlistError> {
            if lookup.contains_key(net) {
                return Err(NetlistError::DuplicateDefinition {
                    net: net.to_string(),
                    line,
                });
            }
            let id = NetId(names.len() as u32);
            names.push(net.to_string());
            lookup.insert(net.to_string(), id);
            Ok(id)
        };
        let mut inputs = Vec::new();
        for (net, line) in &self.inputs {
            inputs.push(define(net, *line)?);
        }
        for g in &self.gates {
            define(&g.net, g.line)?;
            if g.inputs.contains(&g.net) {
                return Err(NetlistError::Cycle { net: g.net.clone() });
            }
        }

        let resolve = |net: &str, line: usize| {
            lookup
                .get(net)
                .copied()
                .ok_or_else(|| NetlistError::UndefinedNet {
                    net: net.to_string(),
                    line,
                })
        };
        let mut drivers: Vec<Driver> = vec![Driver::Input; names.len()];
        for g in self.gates {
            if !g.kind.accepts_arity(g.inputs.len(), self.max_lut_inputs.max(1)) {
                return Err(NetlistError::BadArity {
                    net: g.net,
                    kind: g.kind,
                    arity: g.inputs.len(),
                    line: g.line,
                });
            }
            let content_ok = match (&g.lut_content, g.kind) {
                (Some(bits), GateKind::Lut) => bits.len() == 1 << g.inputs.len(),
                (None, GateKind::Lut) => false,
                (Some(_), _) => false,
                (None, _) => true,
            };
            if !content_ok {
                let width = 1usize << g.inputs.len();
                return Err(NetlistError::LutLengthMismatch {
                    net: g.net,
                    line: g.line,
                    expected: width,
                    found: g.lut_content.map_or(0, |c| c.len()),
                });
            }
            let id = lookup[&g.net];
            let ins = g
                .inputs
                .iter()
                .map(|i| resolve(i, g.line))
                .collect::<Result<Vec<_>, _>>()?;
            drivers[id.index()] = Driver::Gate(Gate {
                kind: g.kind,
                inputs: ins,
                lut_content: g.lut_content,
                content_is_key: g.kind == GateKind::Lut && g.content_is_key,
            });
        }
        let mut outputs = Vec::new();
        let mut seen_outputs = BTreeSet::new();
        for (net, line) in &self.outputs {
            if !seen_outputs.insert(net.clone()) {
                return Err(NetlistError::DuplicateDefinition {
                    net: net.clone(),
                    line: *line,
                });
            }
            outputs.push(resolve(net, *line)?);
        }

        let mut fanouts = vec![Vec::new(); names.len()];
        for (i, d) in drivers.iter().enumerate() {
            if let Driver::Gate(g) = d {
                for &input in &g.inputs {
                    fanouts[input.index()].push(NetId(i as u32));
                }
            }
        }
        let mut order: Vec<u32> = (0..names.len() as u32).collect();
        order.sort_by(|&a, &b| names[a as usize].cmp(&names[b as usize]));
        let mut name_rank = vec![0u32; names.len()];
        for (rank, &id) in order.iter().enumerate() {
            name_rank[id as usize] = rank as u32;
        }

        let topo = topological_gates(&drivers, &fanouts, &name_rank).map_err(|id| {
            NetlistError::Cycle {
                net: names[id.index()].clone(),
            }
        })?;

        Ok(Netlist {
            name: self.name,
            names,
            lookup,
            drivers,
            inputs,
            outputs,
            fanouts,
            topo,
            name_rank,
        })
    }
}

/// Kahn's algorithm with a name-ordered ready set. On a cycle, returns the
/// lowest-named gate left unordered.
fn topological_gates(
    drivers: &[Driver],
    fanouts: &[Vec<NetId>],
    name_rank: &[u32],
) -> Result<Vec<NetId>, NetId> {
    let mut pending = vec![0usize; drivers.len()];
    let mut ready = BinaryHeap::new();
    let mut gate_total = 0;
    for (i, d) in drivers.iter().enumerate() {
        if let Driver::Gate(g) = d {
            gate_total += 1;
            pending[i] = g
                .inputs
                .iter()
                .filter(|inp| matches!(drivers[inp.index()], Driver::Gate(_)))
                .count();
            if pending[i] == 0 {
                ready.push(Reverse((name_rank[i], i as u32)));
            }
        }
    }
    let mut topo = Vec::with_capacity(gate_total);
    while let Some(Reverse((_, i))) = ready.pop() {
        topo.push(NetId(i));
        for &c in &fanouts[i as usize] {
            pending[c.index()] -= 1;
            if pending[c.index()] == 0 {
                ready.push(Reverse((name_rank[c.index()], c.0)));
            }
        }
    }
    if topo.len() < gate_total {
        let stuck = (0..drivers.len())
            .filter(|&i| matches!(drivers[i], Driver::Gate(_)) && pending[i] > 0)
            .min_by_key(|&i| name_rank[i])
            .unwrap();
        return Err(NetId(stuck as u32));
    }
    Ok(topo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shared() -> Netlist {
        // o = AND(a, n1), n1 = OR(b, c); p = NOT(n1)
        let mut b = NetlistBuilder::new("shared");
        b.input("a").input("b").input("c").output("o").output("p");
        b.gate("o", GateKind::And, &["a", "n1"]);
        b.gate("n1", GateKind::Or, &["b", "c"]);
        b.gate("p", GateKind::Not, &["n1"]);
        b.build().unwrap()
    }

    #[test]
    fn cone_depths_follow_bfs() {
        let n = shared();
        let o = n.net_id("o").unwrap();
        let n1 = n.net_id("n1").unwrap();
        let cone = n.fanin_cone(o);
        assert_eq!(cone.gates, vec![o, n1]);
        assert_eq!(cone.depth[&o], 0);
        assert_eq!(cone.depth[&n1], 1);
        assert!(n.fanin_cone(n.net_id("a").unwrap()).is_empty());
    }

    #[test]
    fn fanout_counts_gate_and_output_slots() {
        let n = shared();
        assert_eq!(n.fanout_count(n.net_id("n1").unwrap()).unwrap(), 2);
        assert_eq!(n.fanout_count(n.net_id("o").unwrap()).unwrap(), 1);
        assert!(matches!(
            n.fanout_count(n.net_id("a").unwrap()),
            Err(NetlistError::NotAGate(_))
        ));
    }

    #[test]
    fn fanout_with_two_gates_and_a_po() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").input("b").output("x").output("y").output("z");
        b.gate("x", GateKind::And, &["a", "b"]);
        b.gate("y", GateKind::Not, &["x"]);
        b.gate("z", GateKind::Or, &["x", "b"]);
        let n = b.build().unwrap();
        assert_eq!(n.fanout_count(n.net_id("x").unwrap()).unwrap(), 3);
    }

    #[test]
    fn reachable_outputs_of_reconvergent_fanout() {
        // g4 fans out twice, both branches end in o2.
        let mut b = NetlistBuilder::new("reconv");
        b.input("a").input("b").input("c").output("o1").output("o2");
        b.gate("g4", GateKind::Nand, &["a", "b"]);
        b.gate("x", GateKind::Not, &["g4"]);
        b.gate("y", GateKind::Or, &["g4", "c"]);
        b.gate("o2", GateKind::And, &["x", "y"]);
        b.gate("o1", GateKind::Xor, &["a", "c"]);
        let n = b.build().unwrap();
        let g4 = n.net_id("g4").unwrap();
        assert_eq!(n.fanout_count(g4).unwrap(), 2);
        let reach = n.reachable_outputs(g4).unwrap();
        assert_eq!(reach, BTreeSet::from([n.net_id("o2").unwrap()]));
        let o1 = n.net_id("o1").unwrap();
        assert_eq!(n.reachable_outputs(o1).unwrap(), BTreeSet::from([o1]));
    }

    #[test]
    fn topo_ties_break_by_name() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").output("z").output("m");
        b.gate("z", GateKind::Not, &["a"]);
        b.gate("m", GateKind::Buff, &["a"]);
        let n = b.build().unwrap();
        let names: Vec<_> = n.topo_order().iter().map(|&i| n.net_name(i)).collect();
        assert_eq!(names, ["m", "z"]);
    }

    #[test]
    fn chain_orders_by_edges() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").output("g2");
        b.gate("g2", GateKind::Not, &["g1"]);
        b.gate("g1", GateKind::Not, &["a"]);
        let n = b.build().unwrap();
        let names: Vec<_> = n.topo_order().iter().map(|&i| n.net_name(i)).collect();
        assert_eq!(names, ["g1", "g2"]);
    }

    #[test]
    fn longer_cycle_is_rejected() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").output("x");
        b.gate("x", GateKind::And, &["a", "y"]);
        b.gate("y", GateKind::Not, &["x"]);
        assert_eq!(
            b.build().unwrap_err(),
            NetlistError::Cycle { net: "x".into() }
        );
    }

    #[test]
    fn arity_rules() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").output("x");
        b.gate("x", GateKind::And, &["a"]);
        assert!(matches!(b.build(), Err(NetlistError::BadArity { .. })));
        assert!(GateKind::Lut.accepts_arity(6, 6));
        assert!(!GateKind::Lut.accepts_arity(7, 6));
        assert!(!GateKind::Not.accepts_arity(2, 6));
    }

    #[test]
    fn truth_tables_use_msb_first_indexing() {
        assert_eq!(truth_table(GateKind::And, 2), [false, false, false, true]);
        assert_eq!(truth_table(GateKind::Xor, 2), [false, true, true, false]);
        assert_eq!(truth_table(GateKind::Not, 1), [true, false]);
        assert_eq!(pattern_index([true, false]), 2);
        assert_eq!(pattern_bits(2, 2).collect::<Vec<_>>(), [true, false]);
    }

    #[test]
    fn key_bit_names_are_canonical() {
        let mut b = NetlistBuilder::new("t");
        b.input("a").input("b").output("y").output("x");
        b.key_lut("y", &["a", "b"], truth_table(GateKind::And, 2));
        b.key_lut("x", &["a"], truth_table(GateKind::Not, 1));
        let n = b.build().unwrap();
        assert_eq!(
            n.key_bit_names(),
            ["k_x_0", "k_x_1", "k_y_0", "k_y_1", "k_y_2", "k_y_3"]
        );
        let key = n.embedded_key();
        assert!(key["k_y_3"]);
        assert!(key["k_x_0"]);
        let rekeyed = n.with_key(&key).unwrap();
        assert_eq!(rekeyed.embedded_key(), key);
    }
}
