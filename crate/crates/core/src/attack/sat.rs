// SPDX-License-Identifier: Apache-2.0

//! Oracle-guided attack: find discriminating inputs until every key that
//! survives reproduces the oracle on all of them.

use std::time::{Duration, Instant};

use super::cnf::{output_diffs, ClauseSink, Encoder, Signal};
use super::equiv::{check_equivalence, check_interface, outputs, Equivalence};
use super::solver::{SatSolver, SolveResult, SolverKind};
use super::{AttackError, Kpc};
use crate::netlist::{Assignment, Netlist};

/// Black-box access to a working chip.
pub trait Oracle: Sync {
    /// Output values, in primary-output order, for inputs in primary-input
    /// order.
    fn query(&self, inputs: &[bool]) -> Vec<bool>;

    /// The circuit behind the oracle, when available for verification.
    fn netlist(&self) -> Option<&Netlist> {
        None
    }
}

impl Oracle for Netlist {
    fn query(&self, inputs: &[bool]) -> Vec<bool> {
        self.eval_outputs(inputs)
    }

    fn netlist(&self) -> Option<&Netlist> {
        Some(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AttackLimits {
    pub time_limit: Option<Duration>,
    pub max_iterations: Option<usize>,
}

impl AttackLimits {
    pub fn seconds(s: f64) -> AttackLimits {
        AttackLimits {
            time_limit: Some(Duration::from_secs_f64(s)),
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DipRecord {
    /// Primary-input values in declaration order.
    pub inputs: Vec<bool>,
    /// Oracle response in primary-output order.
    pub outputs: Vec<bool>,
    /// The two keys that disagreed on `inputs`, in canonical key order.
    pub key1: Vec<bool>,
    pub key2: Vec<bool>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttackResult {
    pub recovered_key: Assignment,
    pub dips: Vec<DipRecord>,
    pub iterations: usize,
    pub solver_calls: usize,
    /// Time spent inside the solver.
    pub solver_seconds: f64,
    /// Wall time of the whole attack, verification excluded.
    pub seconds: f64,
    pub verified: bool,
    pub timed_out: bool,
    pub key_bits: usize,
}

/// Adds "this copy reproduces `outputs` on `inputs`" under `key`.
pub(crate) fn constrain_io(
    s: &mut Box<dyn SatSolver>,
    enc: &Encoder,
    n: &Netlist,
    inputs: &[bool],
    expected: &[bool],
    key: &[Signal],
) -> Result<(), AttackError> {
    let ins: Vec<Signal> = inputs.iter().map(|&b| Signal::Const(b)).collect();
    let nets = enc.encode(s, &ins, Some(key), None);
    for (sig, &want) in outputs(n, &nets).into_iter().zip(expected) {
        match sig {
            Signal::Const(b) if b != want => return Err(AttackError::Inconsistent),
            Signal::Const(_) => {}
            Signal::Lit(l) => s.add_clause(&[if want { l } else { -l }]),
        }
    }
    Ok(())
}

struct Timed {
    s: Box<dyn SatSolver>,
    calls: usize,
    seconds: f64,
    deadline: Option<Instant>,
}

impl Timed {
    fn solve(&mut self, assumptions: &[i32]) -> Result<SolveResult, AttackError> {
        let t = Instant::now();
        let r = self.s.solve(assumptions, self.deadline);
        self.calls += 1;
        self.seconds += t.elapsed().as_secs_f64();
        r
    }

    fn values(&self, sigs: &[Signal]) -> Vec<bool> {
        sigs.iter().map(|x| x.value(|l| self.s.value(l))).collect()
    }
}

/// Runs the attack against `oracle`. A time or iteration limit yields a
/// partial result with `timed_out` set; an oracle that no key can match
/// is an error.
pub fn sat_attack(
    k: &Kpc,
    oracle: &dyn Oracle,
    limits: AttackLimits,
    solver: &SolverKind,
) -> Result<AttackResult, AttackError> {
    let start = Instant::now();
    let n = &k.netlist;
    if let Some(o) = oracle.netlist() {
        check_interface(n, o)?;
    }
    let mut t = Timed {
        s: solver.build(),
        calls: 0,
        seconds: 0.0,
        deadline: limits.time_limit.map(|d| start + d),
    };
    let enc = Encoder::new(n);
    let dep = enc.key_dependent();
    let bits = k.key_bits();
    let inputs: Vec<Signal> = (0..n.primary_inputs().len())
        .map(|_| Signal::Lit(t.s.new_var()))
        .collect();
    let k1: Vec<Signal> = (0..bits).map(|_| Signal::Lit(t.s.new_var())).collect();
    let k2: Vec<Signal> = (0..bits).map(|_| Signal::Lit(t.s.new_var())).collect();
    let nets1 = enc.encode(&mut t.s, &inputs, Some(&k1), None);
    let nets2 = enc.encode(&mut t.s, &inputs, Some(&k2), Some((&nets1, &dep)));
    let (always, lits) = output_diffs(&mut t.s, &outputs(n, &nets1), &outputs(n, &nets2));
    // The difference requirement is switched on by `act`, so the same
    // solver later extracts a key with it switched off.
    let act = t.s.new_var();
    if !always {
        let mut clause = vec![-act];
        clause.extend(lits);
        t.s.add_clause(&clause);
    }

    let mut result = AttackResult {
        key_bits: bits,
        ..Default::default()
    };
    loop {
        let late = t.deadline.is_some_and(|d| Instant::now() >= d);
        if late || limits.max_iterations.is_some_and(|m| result.dips.len() >= m) {
            result.timed_out = true;
            break;
        }
        match t.solve(&[act])? {
            SolveResult::Unknown => {
                result.timed_out = true;
                break;
            }
            SolveResult::Unsat => break,
            SolveResult::Sat => {
                let dip = t.values(&inputs);
                let key1 = t.values(&k1);
                let key2 = t.values(&k2);
                let response = oracle.query(&dip);
                constrain_io(&mut t.s, &enc, n, &dip, &response, &k1)?;
                constrain_io(&mut t.s, &enc, n, &dip, &response, &k2)?;
                result.dips.push(DipRecord {
                    inputs: dip,
                    outputs: response,
                    key1,
                    key2,
                });
            }
        }
    }
    if !result.timed_out {
        match t.solve(&[-act])? {
            SolveResult::Sat => result.recovered_key = k.key_from_bits(&t.values(&k1)),
            SolveResult::Unsat => return Err(AttackError::Inconsistent),
            SolveResult::Unknown => result.timed_out = true,
        }
    }
    result.iterations = result.dips.len();
    result.solver_calls = t.calls;
    result.solver_seconds = t.seconds;
    result.seconds = start.elapsed().as_secs_f64();
    if !result.timed_out {
        if let Some(o) = oracle.netlist() {
            let unlocked = k.unlock(&result.recovered_key)?;
            result.verified = check_equivalence(&unlocked, o, solver, None)? == Equivalence::Equivalent;
        }
    }
    Ok(result)
}
