// SPDX-License-Identifier: Apache-2.0

//! Combinational equivalence of two concrete netlists.

use std::time::Instant;

use super::cnf::{output_diffs, ClauseSink, Encoder, Signal};
use super::solver::{SolveResult, SolverKind};
use super::AttackError;
use crate::netlist::{Assignment, Netlist};

/// Netlists with at most this many inputs are compared by exhaustive
/// simulation instead of a miter.
pub const EXHAUSTIVE_INPUT_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// Primary-input assignment on which some output differs.
    Different { witness: Assignment },
    /// The solver hit the deadline.
    Unknown,
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

/// Both netlists must declare the same inputs and outputs in the same
/// order. Key LUTs are evaluated with their stored content.
pub fn check_interface(a: &Netlist, b: &Netlist) -> Result<(), AttackError> {
    let names = |n: &Netlist, ids: &[crate::NetId]| -> Vec<String> {
        ids.iter().map(|&i| n.net_name(i).to_string()).collect()
    };
    if names(a, a.primary_inputs()) != names(b, b.primary_inputs()) {
        return Err(AttackError::Interface("primary inputs differ".into()));
    }
    if names(a, a.primary_outputs()) != names(b, b.primary_outputs()) {
        return Err(AttackError::Interface("primary outputs differ".into()));
    }
    Ok(())
}

/// Words of 64 consecutive patterns over `inputs.len()` variables; the
/// variable `j` of pattern `p` is bit `j` of `p`.
pub(crate) fn pattern_words(vars: usize, word: usize) -> Vec<u64> {
    (0..vars)
        .map(|j| {
            let mut w = 0u64;
            for bit in 0..64 {
                let p = word * 64 + bit;
                if (p >> j) & 1 == 1 {
                    w |= 1 << bit;
                }
            }
            w
        })
        .collect()
}

pub(crate) fn witness(n: &Netlist, bits: impl Fn(usize) -> bool) -> Assignment {
    n.primary_inputs()
        .iter()
        .enumerate()
        .map(|(j, &pi)| (n.net_name(pi).to_string(), bits(j)))
        .collect()
}

fn exhaustive(a: &Netlist, b: &Netlist) -> Equivalence {
    let m = a.primary_inputs().len();
    let patterns = 1usize << m;
    let mask = if patterns >= 64 { !0 } else { (1u64 << patterns) - 1 };
    for word in 0..patterns.div_ceil(64) {
        let ins = pattern_words(m, word);
        let diff = a
            .output_words(&ins)
            .iter()
            .zip(b.output_words(&ins))
            .fold(0, |acc, (x, y)| acc | (x ^ y))
            & mask;
        if diff != 0 {
            let p = word * 64 + diff.trailing_zeros() as usize;
            return Equivalence::Different {
                witness: witness(a, |j| (p >> j) & 1 == 1),
            };
        }
    }
    Equivalence::Equivalent
}

pub(crate) fn outputs(n: &Netlist, nets: &[Signal]) -> Vec<Signal> {
    n.primary_outputs().iter().map(|o| nets[o.index()]).collect()
}

pub fn check_equivalence(
    a: &Netlist,
    b: &Netlist,
    solver: &SolverKind,
    deadline: Option<Instant>,
) -> Result<Equivalence, AttackError> {
    check_interface(a, b)?;
    if a.primary_inputs().len() <= EXHAUSTIVE_INPUT_LIMIT {
        return Ok(exhaustive(a, b));
    }
    let mut s = solver.build();
    let inputs: Vec<Signal> = a
        .primary_inputs()
        .iter()
        .map(|_| Signal::Lit(s.new_var()))
        .collect();
    let na = Encoder::new(a).encode(&mut s, &inputs, None, None);
    let nb = Encoder::new(b).encode(&mut s, &inputs, None, None);
    let (always, lits) = output_diffs(&mut s, &outputs(a, &na), &outputs(b, &nb));
    if !always {
        if lits.is_empty() {
            return Ok(Equivalence::Equivalent);
        }
        s.add_clause(&lits);
    }
    match s.solve(&[], deadline)? {
        SolveResult::Unsat => Ok(Equivalence::Equivalent),
        SolveResult::Unknown => Ok(Equivalence::Unknown),
        SolveResult::Sat => Ok(Equivalence::Different {
            witness: witness(a, |j| inputs[j].value(|l| s.value(l))),
        }),
    }
}
