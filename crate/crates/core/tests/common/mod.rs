// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::PathBuf;

use lutlock::netlist::read_bench;
use rand::seq::SliceRandom;
use rand::Rng;
use lutlock::Netlist;

pub fn benchmarks_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks"))
}

pub fn iscas(name: &str) -> Netlist {
    read_bench(benchmarks_dir().join("iscas85").join(format!("{name}.bench"))).unwrap()
}

pub fn fixture(name: &str) -> Netlist {
    read_bench(benchmarks_dir().join("fixtures").join(format!("{name}.bench"))).unwrap()
}

pub fn names(n: &Netlist, ids: &[lutlock::NetId]) -> Vec<String> {
    ids.iter().map(|&g| n.net_name(g).to_string()).collect()
}

/// Gate semantics written out independently of the library.
fn eval_plain(kind: lutlock::GateKind, ins: &[bool]) -> bool {
    use lutlock::GateKind::*;
    let ones = ins.iter().filter(|&&b| b).count();
    match kind {
        And => ones == ins.len(),
        Nand => ones != ins.len(),
        Or => ones > 0,
        Nor => ones == 0,
        Xor => ones % 2 == 1,
        Xnor => ones % 2 == 0,
        Not => !ins[0],
        Buff => ins[0],
        Lut => unreachable!(),
    }
}

/// Primary-output values of `n` with key LUT `j` (in `n.key_luts()` order)
/// taking its content from `key[offsets[j]..]`.
pub fn eval_keyed(n: &Netlist, pi: &[bool], key: &[bool]) -> Vec<bool> {
    let mut val = vec![false; n.net_count()];
    for (&id, &b) in n.primary_inputs().iter().zip(pi) {
        val[id.index()] = b;
    }
    let mut offset = std::collections::HashMap::new();
    let mut next = 0;
    for g in n.key_luts() {
        offset.insert(g, next);
        next += 1 << n.gate(g).unwrap().arity();
    }
    for &id in n.topo_order() {
        let Some(g) = n.gate(id) else { continue };
        let ins: Vec<bool> = g.inputs.iter().map(|i| val[i.index()]).collect();
        let pattern = ins.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        val[id.index()] = if g.is_key_lut() {
            key[offset[&id] + pattern]
        } else if let Some(c) = &g.lut_content {
            c[pattern]
        } else {
            eval_plain(g.kind, &ins)
        };
    }
    n.primary_outputs().iter().map(|o| val[o.index()]).collect()
}

/// Every key tried against every input pattern.
pub fn brute_force_valid_keys(locked: &Netlist, original: &Netlist) -> u64 {
    let pis = original.primary_inputs().len();
    let bits: usize = locked.key_luts().iter().map(|&g| 1 << locked.gate(g).unwrap().arity()).sum();
    assert!(pis <= 10 && bits <= 20);
    let patterns: Vec<Vec<bool>> = (0..1u32 << pis)
        .map(|p| (0..pis).map(|i| p >> (pis - 1 - i) & 1 == 1).collect())
        .collect();
    let expected: Vec<Vec<bool>> = patterns.iter().map(|p| eval_keyed(original, p, &[])).collect();
    let mut valid = 0;
    for k in 0..1u32 << bits {
        let key: Vec<bool> = (0..bits).map(|i| k >> i & 1 == 1).collect();
        if patterns.iter().zip(&expected).all(|(p, e)| &eval_keyed(locked, p, &key) == e) {
            valid += 1;
        }
    }
    valid
}

/// `k` two-input gates in series, alternating AND and OR, as text.
pub fn serial_chain(k: usize, locked: bool) -> String {
    let mut s = String::new();
    for i in 0..=k {
        s += &format!("INPUT(x{i})\n");
    }
    s += &format!("OUTPUT(g{k})\n");
    for i in 1..=k {
        let prev = if i == 1 { "x0".to_string() } else { format!("g{}", i - 1) };
        let body = if locked {
            "LUT KEY ".to_string()
        } else if i % 2 == 1 {
            "AND".to_string()
        } else {
            "OR".to_string()
        };
        s += &format!("g{i} = {body}({prev}, x{i})\n");
    }
    s
}

/// A random tree: every net feeds exactly one gate, every gate is an output.
pub fn random_tree(rng: &mut impl Rng) -> String {
    let leaves = rng.gen_range(1..=12);
    let mut text = String::new();
    let mut pool: Vec<String> = (0..leaves).map(|i| format!("x{i}")).collect();
    for p in &pool {
        text += &format!("INPUT({p})\n");
    }
    let mut g = 0;
    while pool.len() > 1 || g == 0 {
        let k = rng.gen_range(1..=3.min(pool.len()));
        let ins: Vec<String> = (0..k).map(|_| pool.swap_remove(rng.gen_range(0..pool.len()))).collect();
        let content = rng.gen::<u64>() & ((1u64 << (1 << k)) - 1);
        let lut = || format!("LUT 0x{content:x} ");
        let body = match (k, rng.gen_range(0..7)) {
            (1, 0..=2) => "NOT".to_string(),
            (1, 3..=4) => "BUFF".to_string(),
            (1, _) | (_, 6) => lut(),
            (_, 0) => "AND".to_string(),
            (_, 1) => "NAND".to_string(),
            (_, 2) => "OR".to_string(),
            (_, 3) => "NOR".to_string(),
            (_, 4) => "XOR".to_string(),
            _ => "XNOR".to_string(),
        };
        let name = format!("g{g}");
        text += &format!("OUTPUT({name})\n{name} = {body}({})\n", ins.join(", "));
        pool.push(name);
        g += 1;
    }
    text
}

/// A random DAG over `pis` inputs: each gate draws its inputs from earlier
/// nets; nets nobody reads become outputs.
pub fn random_dag(rng: &mut impl Rng, pis: usize, gates: usize, max_arity: usize) -> String {
    let mut text = String::new();
    let mut nets: Vec<String> = (0..pis).map(|i| format!("x{i}")).collect();
    let mut read = vec![false; pis];
    for p in &nets {
        text += &format!("INPUT({p})\n");
    }
    let mut body = String::new();
    for g in 0..gates {
        let k = rng.gen_range(1..=max_arity.min(nets.len()));
        let mut ins: Vec<usize> = (0..nets.len()).collect();
        ins.shuffle(rng);
        ins.truncate(k);
        for &i in &ins {
            read[i] = true;
        }
        let kind = if k == 1 {
            ["NOT", "BUFF"][rng.gen_range(0..2)]
        } else {
            ["AND", "NAND", "OR", "NOR", "XOR", "XNOR"][rng.gen_range(0..6)]
        };
        let args: Vec<&str> = ins.iter().map(|&i| nets[i].as_str()).collect();
        body += &format!("g{g} = {kind}({})\n", args.join(", "));
        nets.push(format!("g{g}"));
        read.push(false);
    }
    for (i, name) in nets.iter().enumerate().skip(pis) {
        if !read[i] {
            text += &format!("OUTPUT({name})\n");
        }
    }
    text + &body
}
