// SPDX-License-Identifier: Apache-2.0

//! Counting keys that unlock the circuit completely.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cnf::{ClauseSink, Encoder, Signal};
use super::equiv::check_interface;
use super::sat::constrain_io;
use super::solver::{SolveResult, SolverKind};
use super::{AttackError, Kpc};
use crate::netlist::Netlist;

pub const EXACT_MAX_KEY_BITS: usize = 24;
pub const EXACT_MAX_INPUTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Enumerate every valid key, stopping early after `limit` keys.
    Exact { limit: Option<u64> },
    /// Test `samples` uniformly random keys.
    Sample { samples: u64, seed: u64 },
}

impl CountMode {
    pub fn exact() -> CountMode {
        CountMode::Exact { limit: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyCount {
    /// Valid keys found: the full count in exact mode, the number of valid
    /// samples in sample mode.
    pub valid: u64,
    /// Keys tried in sample mode.
    pub samples: u64,
    /// `valid` in exact mode; the scaled fraction otherwise.
    pub estimate: f64,
    /// True only for a complete exact enumeration.
    pub exact: bool,
    pub key_bits: usize,
    /// Inputs that can reach an output the key affects.
    pub relevant_inputs: usize,
    /// Counterexample patterns added during exact enumeration.
    pub refinements: usize,
}

/// Outputs some key LUT reaches, and the inputs in their fan-in cones.
struct Relevance {
    outputs: Vec<usize>,
    inputs: Vec<usize>,
}

fn relevance(k: &Kpc) -> Relevance {
    let n = &k.netlist;
    let dep = Encoder::new(n).key_dependent();
    let outputs: Vec<usize> = n
        .primary_outputs()
        .iter()
        .enumerate()
        .filter(|(_, o)| dep[o.index()])
        .map(|(i, _)| i)
        .collect();
    let mut seen = vec![false; n.net_count()];
    for &i in &outputs {
        let o = n.primary_outputs()[i];
        seen[o.index()] = true;
        for g in n.fanin_cone(o).gates {
            seen[g.index()] = true;
            for inp in &n.gate(g).unwrap().inputs {
                seen[inp.index()] = true;
            }
        }
    }
    let inputs = n
        .primary_inputs()
        .iter()
        .enumerate()
        .filter(|(_, p)| seen[p.index()])
        .map(|(i, _)| i)
        .collect();
    Relevance { outputs, inputs }
}

/// Compares a concrete netlist against the oracle on every pattern of the
/// relevant inputs (others held at 0). Returns a failing full input vector.
struct Checker<'a> {
    oracle: &'a Netlist,
    rel: Relevance,
    expected: Vec<Vec<u64>>,
}

impl<'a> Checker<'a> {
    fn new(oracle: &'a Netlist, rel: Relevance) -> Checker<'a> {
        let mut c = Checker {
            oracle,
            rel,
            expected: Vec::new(),
        };
        c.expected = (0..c.words()).map(|w| c.outputs(oracle, w)).collect();
        c
    }

    fn words(&self) -> usize {
        (1usize << self.rel.inputs.len()).div_ceil(64)
    }

    fn mask(&self) -> u64 {
        let p = 1usize << self.rel.inputs.len();
        if p >= 64 {
            !0
        } else {
            (1u64 << p) - 1
        }
    }

    fn inputs(&self, word: usize) -> Vec<u64> {
        let mut ins = vec![0u64; self.oracle.primary_inputs().len()];
        for (j, w) in super::equiv::pattern_words(self.rel.inputs.len(), word)
            .into_iter()
            .enumerate()
        {
            ins[self.rel.inputs[j]] = w;
        }
        ins
    }

    fn outputs(&self, n: &Netlist, word: usize) -> Vec<u64> {
        let all = n.output_words(&self.inputs(word));
        self.rel.outputs.iter().map(|&i| all[i]).collect()
    }

    fn counterexample(&self, n: &Netlist) -> Option<Vec<bool>> {
        for word in 0..self.words() {
            let got = self.outputs(n, word);
            let diff = got
                .iter()
                .zip(&self.expected[word])
                .fold(0, |acc, (a, b)| acc | (a ^ b))
                & self.mask();
            if diff != 0 {
                let p = word * 64 + diff.trailing_zeros() as usize;
                let mut full = vec![false; n.primary_inputs().len()];
                for (j, &pi) in self.rel.inputs.iter().enumerate() {
                    full[pi] = (p >> j) & 1 == 1;
                }
                return Some(full);
            }
        }
        None
    }
}

/// Counts keys under which `k` matches `oracle` on every input.
///
/// Exact mode alternates between a solver proposing a key consistent with
/// the counterexamples found so far and exhaustive simulation of that key.
/// Valid keys are counted and blocked until no key remains.
pub fn count_valid_keys(
    k: &Kpc,
    oracle: &Netlist,
    mode: CountMode,
    solver: &SolverKind,
) -> Result<KeyCount, AttackError> {
    check_interface(&k.netlist, oracle)?;
    let bits = k.key_bits();
    let rel = relevance(k);
    let relevant_inputs = rel.inputs.len();
    match mode {
        CountMode::Exact { limit } => {
            if bits > EXACT_MAX_KEY_BITS {
                return Err(AttackError::Precondition(format!(
                    "{bits} key bits exceed the exact-count limit of {EXACT_MAX_KEY_BITS}"
                )));
            }
            if relevant_inputs > EXACT_MAX_INPUTS {
                return Err(AttackError::Precondition(format!(
                    "{relevant_inputs} relevant inputs exceed the exact-count limit of {EXACT_MAX_INPUTS}"
                )));
            }
            let checker = Checker::new(oracle, rel);
            let (valid, complete, refinements) = enumerate(k, &checker, limit, solver)?;
            Ok(KeyCount {
                valid,
                samples: 0,
                estimate: valid as f64,
                exact: complete,
                key_bits: bits,
                relevant_inputs,
                refinements,
            })
        }
        CountMode::Sample { samples, seed } => {
            if relevant_inputs > EXACT_MAX_INPUTS {
                return Err(AttackError::Precondition(format!(
                    "{relevant_inputs} relevant inputs exceed the sampling limit of {EXACT_MAX_INPUTS}"
                )));
            }
            let checker = Checker::new(oracle, rel);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut valid = 0;
            for _ in 0..samples {
                let key: Vec<bool> = (0..bits).map(|_| rng.gen()).collect();
                let unlocked = k.unlock(&k.key_from_bits(&key))?;
                if checker.counterexample(&unlocked).is_none() {
                    valid += 1;
                }
            }
            let space = 2f64.powi(bits as i32);
            Ok(KeyCount {
                valid,
                samples,
                estimate: if samples == 0 { 0.0 } else { valid as f64 / samples as f64 * space },
                exact: false,
                key_bits: bits,
                relevant_inputs,
                refinements: 0,
            })
        }
    }
}

fn enumerate(
    k: &Kpc,
    checker: &Checker,
    limit: Option<u64>,
    solver: &SolverKind,
) -> Result<(u64, bool, usize), AttackError> {
    let n = &k.netlist;
    if k.key_bits() == 0 {
        let ok = checker.counterexample(n).is_none();
        return Ok((ok as u64, true, 0));
    }
    let mut s = solver.build();
    let enc = Encoder::new(n);
    let key: Vec<Signal> = (0..k.key_bits()).map(|_| Signal::Lit(s.new_var())).collect();
    let vars: Vec<i32> = key
        .iter()
        .map(|x| match x {
            Signal::Lit(l) => *l,
            Signal::Const(_) => unreachable!(),
        })
        .collect();
    let mut valid = 0u64;
    let mut refinements = 0;
    loop {
        match s.solve(&[], None::<Instant>)? {
            SolveResult::Unsat => return Ok((valid, true, refinements)),
            SolveResult::Unknown => return Ok((valid, false, refinements)),
            SolveResult::Sat => {}
        }
        let bits: Vec<bool> = vars.iter().map(|&v| s.value(v)).collect();
        let unlocked = k.unlock(&k.key_from_bits(&bits))?;
        match checker.counterexample(&unlocked) {
            Some(pattern) => {
                let response = checker.oracle.eval_outputs(&pattern);
                constrain_io(&mut s, &enc, n, &pattern, &response, &key)?;
                refinements += 1;
            }
            None => {
                valid += 1;
                if limit.is_some_and(|l| valid >= l) {
                    return Ok((valid, false, refinements));
                }
                let block: Vec<i32> = vars
                    .iter()
                    .zip(&bits)
                    .map(|(&v, &b)| if b { -v } else { v })
                    .collect();
                s.add_clause(&block);
            }
        }
    }
}
