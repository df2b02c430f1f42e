// SPDX-License-Identifier: Apache-2.0

//! Tseitin encoding of netlists with constant folding.
//!
//! Nets are encoded as [`Signal`]s: either a known constant or a solver
//! literal. Gates whose inputs are all constant never reach the solver,
//! which keeps per-DIP constraint copies small.

use std::collections::HashMap;

use super::Kpc;
use crate::netlist::{pattern_bits, GateKind, NetId, Netlist};

/// Anything that accepts fresh variables and clauses.
pub trait ClauseSink {
    fn new_var(&mut self) -> i32;
    fn add_clause(&mut self, lits: &[i32]);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    Const(bool),
    Lit(i32),
}

impl Signal {
    pub fn negate(self) -> Signal {
        match self {
            Signal::Const(b) => Signal::Const(!b),
            Signal::Lit(l) => Signal::Lit(-l),
        }
    }

    fn negate_if(self, flip: bool) -> Signal {
        if flip {
            self.negate()
        } else {
            self
        }
    }

    /// Value under a model given as a literal lookup.
    pub fn value(self, lit_value: impl Fn(i32) -> bool) -> bool {
        match self {
            Signal::Const(b) => b,
            Signal::Lit(l) => lit_value(l),
        }
    }
}

/// In-memory clause list.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    pub num_vars: i32,
    pub clauses: Vec<Vec<i32>>,
    /// Primary-input signals, shared by every copy.
    pub inputs: Vec<Signal>,
    /// One entry per circuit copy.
    pub copies: Vec<CopyVars>,
    /// Literal that is true iff some output pair differs (miters only).
    pub diff: Option<i32>,
}

#[derive(Clone, Debug, Default)]
pub struct CopyVars {
    /// Key-bit signals in canonical key order.
    pub key: Vec<Signal>,
    /// Per-net signals indexed by [`NetId::index`].
    pub nets: Vec<Signal>,
}

impl ClauseSink for Cnf {
    fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars
    }

    fn add_clause(&mut self, lits: &[i32]) {
        debug_assert!(!lits.is_empty());
        self.clauses.push(lits.to_vec());
    }
}

/// Encodes one netlist into any clause sink.
pub(crate) struct Encoder<'a> {
    n: &'a Netlist,
    /// Offset of each key LUT's first key bit in the canonical key order.
    key_offset: HashMap<NetId, usize>,
}

impl<'a> Encoder<'a> {
    pub(crate) fn new(n: &'a Netlist) -> Encoder<'a> {
        let mut key_offset = HashMap::new();
        let mut next = 0;
        for g in n.key_luts() {
            key_offset.insert(g, next);
            next += 1 << n.gate(g).unwrap().arity();
        }
        Encoder { n, key_offset }
    }

    /// Nets whose value depends on some key LUT.
    pub(crate) fn key_dependent(&self) -> Vec<bool> {
        let mut dep = vec![false; self.n.net_count()];
        for &id in self.n.topo_order() {
            let g = self.n.gate(id).unwrap();
            dep[id.index()] = self.key_offset.contains_key(&id)
                || g.inputs.iter().any(|i| dep[i.index()]);
        }
        dep
    }

    /// Encodes every net. With `keys = None` key LUTs use their stored
    /// content. With `shared = Some((nets, dep))`, nets with `dep[i] ==
    /// false` reuse the signal from `nets`.
    pub(crate) fn encode(
        &self,
        sink: &mut impl ClauseSink,
        inputs: &[Signal],
        keys: Option<&[Signal]>,
        shared: Option<(&[Signal], &[bool])>,
    ) -> Vec<Signal> {
        let n = self.n;
        let mut nets = vec![Signal::Const(false); n.net_count()];
        for (&pi, &s) in n.primary_inputs().iter().zip(inputs) {
            nets[pi.index()] = s;
        }
        for &id in n.topo_order() {
            if let Some((prev, dep)) = shared {
                if !dep[id.index()] {
                    nets[id.index()] = prev[id.index()];
                    continue;
                }
            }
            let g = n.gate(id).unwrap();
            let ins: Vec<Signal> = g.inputs.iter().map(|i| nets[i.index()]).collect();
            nets[id.index()] = match (g.kind, keys) {
                (GateKind::Lut, Some(keys)) if g.content_is_key => {
                    let off = self.key_offset[&id];
                    key_lut(sink, &ins, &keys[off..off + (1 << ins.len())])
                }
                (GateKind::Lut, _) => table(sink, &ins, g.lut_content.as_ref().unwrap()),
                (kind, _) => plain(sink, kind, &ins),
            };
        }
        nets
    }
}

fn plain(sink: &mut impl ClauseSink, kind: GateKind, ins: &[Signal]) -> Signal {
    match kind {
        GateKind::Buff => ins[0],
        GateKind::Not => ins[0].negate(),
        GateKind::And => and(sink, ins.iter().copied()),
        GateKind::Nand => and(sink, ins.iter().copied()).negate(),
        GateKind::Or => and(sink, ins.iter().map(|s| s.negate())).negate(),
        GateKind::Nor => and(sink, ins.iter().map(|s| s.negate())),
        GateKind::Xor => xor(sink, ins),
        GateKind::Xnor => xor(sink, ins).negate(),
        GateKind::Lut => unreachable!("LUTs are encoded from their tables"),
    }
}

pub(crate) fn and(sink: &mut impl ClauseSink, ins: impl Iterator<Item = Signal>) -> Signal {
    let mut lits: Vec<i32> = Vec::new();
    for s in ins {
        match s {
            Signal::Const(false) => return Signal::Const(false),
            Signal::Const(true) => {}
            Signal::Lit(l) => {
                if lits.contains(&-l) {
                    return Signal::Const(false);
                }
                if !lits.contains(&l) {
                    lits.push(l);
                }
            }
        }
    }
    match lits.len() {
        0 => Signal::Const(true),
        1 => Signal::Lit(lits[0]),
        _ => {
            let o = sink.new_var();
            for &l in &lits {
                sink.add_clause(&[-o, l]);
            }
            let mut big: Vec<i32> = lits.iter().map(|l| -l).collect();
            big.push(o);
            sink.add_clause(&big);
            Signal::Lit(o)
        }
    }
}

pub(crate) fn xor2(sink: &mut impl ClauseSink, a: Signal, b: Signal) -> Signal {
    match (a, b) {
        (Signal::Const(x), s) | (s, Signal::Const(x)) => s.negate_if(x),
        (Signal::Lit(x), Signal::Lit(y)) if x == y => Signal::Const(false),
        (Signal::Lit(x), Signal::Lit(y)) if x == -y => Signal::Const(true),
        (Signal::Lit(x), Signal::Lit(y)) => {
            let o = sink.new_var();
            sink.add_clause(&[-o, x, y]);
            sink.add_clause(&[-o, -x, -y]);
            sink.add_clause(&[o, -x, y]);
            sink.add_clause(&[o, x, -y]);
            Signal::Lit(o)
        }
    }
}

fn xor(sink: &mut impl ClauseSink, ins: &[Signal]) -> Signal {
    ins[1..]
        .iter()
        .fold(ins[0], |acc, &s| xor2(sink, acc, s))
}

/// Literals that falsify "inputs equal `pattern`", or `None` when a
/// constant input already rules the pattern out.
fn mismatch(ins: &[Signal], pattern: usize) -> Option<Vec<i32>> {
    let mut out = Vec::new();
    for (s, bit) in ins.iter().zip(pattern_bits(pattern, ins.len())) {
        match *s {
            Signal::Const(c) if c != bit => return None,
            Signal::Const(_) => {}
            Signal::Lit(l) => out.push(if bit { -l } else { l }),
        }
    }
    Some(out)
}

/// Concrete truth table, cofactored by constant inputs.
fn table(sink: &mut impl ClauseSink, ins: &[Signal], content: &[bool]) -> Signal {
    let live: Vec<(usize, Vec<i32>)> = (0..content.len())
        .filter_map(|p| mismatch(ins, p).map(|m| (p, m)))
        .collect();
    let first = content[live[0].0];
    if live.iter().all(|(p, _)| content[*p] == first) {
        return Signal::Const(first);
    }
    if live.len() == 2 {
        // One free input: the table is that input or its negation.
        let (p, m) = &live[1];
        let lit = -m[0];
        return Signal::Lit(lit).negate_if(!content[*p]);
    }
    let o = sink.new_var();
    for (p, m) in live {
        let mut clause = m;
        clause.push(if content[p] { o } else { -o });
        sink.add_clause(&clause);
    }
    Signal::Lit(o)
}

/// Key LUT: for every pattern `p`, `(inputs = p) -> (out <-> key[p])`.
fn key_lut(sink: &mut impl ClauseSink, ins: &[Signal], keys: &[Signal]) -> Signal {
    let live: Vec<(usize, Vec<i32>)> = (0..keys.len())
        .filter_map(|p| mismatch(ins, p).map(|m| (p, m)))
        .collect();
    if live.len() == 1 {
        return keys[live[0].0];
    }
    let first = keys[live[0].0];
    if matches!(first, Signal::Const(_)) && live.iter().all(|(p, _)| keys[*p] == first) {
        return first;
    }
    let o = sink.new_var();
    for (p, m) in live {
        match keys[p] {
            Signal::Const(b) => {
                let mut clause = m;
                clause.push(if b { o } else { -o });
                sink.add_clause(&clause);
            }
            Signal::Lit(k) => {
                let mut pos = m.clone();
                pos.extend([-k, o]);
                sink.add_clause(&pos);
                let mut neg = m;
                neg.extend([k, -o]);
                sink.add_clause(&neg);
            }
        }
    }
    Signal::Lit(o)
}

fn fresh(sink: &mut impl ClauseSink, count: usize) -> Vec<Signal> {
    (0..count).map(|_| Signal::Lit(sink.new_var())).collect()
}

/// Gate-consistency clauses for `copies` copies of the key-programmable
/// circuit. Copies share primary-input variables; key and internal
/// variables are distinct per copy.
pub fn encode_cnf(k: &Kpc, copies: usize) -> Cnf {
    let mut cnf = Cnf::default();
    let enc = Encoder::new(&k.netlist);
    cnf.inputs = fresh(&mut cnf, k.netlist.primary_inputs().len());
    for _ in 0..copies {
        let key = fresh(&mut cnf, k.key_inputs.len());
        let inputs = cnf.inputs.clone();
        let nets = enc.encode(&mut cnf, &inputs, Some(&key), None);
        cnf.copies.push(CopyVars { key, nets });
    }
    cnf
}

/// Pairwise XOR of two output vectors. Returns whether some pair always
/// differs, and the literals of the pairs that may differ.
pub(crate) fn output_diffs(
    sink: &mut impl ClauseSink,
    a: &[Signal],
    b: &[Signal],
) -> (bool, Vec<i32>) {
    let mut always = false;
    let mut lits = Vec::new();
    for (&x, &y) in a.iter().zip(b) {
        match xor2(sink, x, y) {
            Signal::Const(true) => always = true,
            Signal::Const(false) => {}
            Signal::Lit(l) => lits.push(l),
        }
    }
    (always, lits)
}

/// Two copies with distinct keys whose outputs must differ somewhere.
/// Logic that no key LUT reaches is encoded once and shared.
pub fn build_miter(k: &Kpc) -> Cnf {
    let mut cnf = Cnf::default();
    let n = &k.netlist;
    let enc = Encoder::new(n);
    let dep = enc.key_dependent();
    cnf.inputs = fresh(&mut cnf, n.primary_inputs().len());
    let inputs = cnf.inputs.clone();
    let k1 = fresh(&mut cnf, k.key_inputs.len());
    let nets1 = enc.encode(&mut cnf, &inputs, Some(&k1), None);
    let k2 = fresh(&mut cnf, k.key_inputs.len());
    let nets2 = enc.encode(&mut cnf, &inputs, Some(&k2), Some((&nets1, &dep)));
    let outs = |nets: &[Signal]| -> Vec<Signal> {
        n.primary_outputs().iter().map(|o| nets[o.index()]).collect()
    };
    let (always, lits) = output_diffs(&mut cnf, &outs(&nets1), &outs(&nets2));
    let d = cnf.new_var();
    if always {
        cnf.add_clause(&[d]);
    } else if lits.is_empty() {
        cnf.add_clause(&[d]);
        cnf.add_clause(&[-d]);
    } else {
        let mut clause = vec![-d];
        clause.extend(&lits);
        cnf.add_clause(&clause);
        cnf.add_clause(&[d]);
    }
    cnf.diff = Some(d);
    cnf.copies.push(CopyVars { key: k1, nets: nets1 });
    cnf.copies.push(CopyVars { key: k2, nets: nets2 });
    cnf
}
