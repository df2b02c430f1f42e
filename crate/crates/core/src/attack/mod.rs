// SPDX-License-Identifier: Apache-2.0

//! CNF encoding, the oracle-guided SAT attack, equivalence checking and
//! valid-key counting.

mod cnf;
mod count;
mod equiv;
mod kpc;
mod sat;
mod solver;

pub use cnf::{build_miter, encode_cnf, ClauseSink, Cnf, CopyVars, Signal};
pub use count::{count_valid_keys, CountMode, KeyCount, EXACT_MAX_INPUTS, EXACT_MAX_KEY_BITS};
pub use equiv::{check_equivalence, check_interface, Equivalence, EXHAUSTIVE_INPUT_LIMIT};
pub use kpc::{to_kpc, Kpc};
pub use sat::{sat_attack, AttackLimits, AttackResult, DipRecord, Oracle};
pub use solver::{
    parse_dimacs, parse_solver_output, write_dimacs, CadicalSolver, DimacsError, ExternalSolver,
    SatSolver, SolveResult, SolverKind,
};

use crate::netlist::SimError;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AttackError {
    #[error("netlists do not match: {0}")]
    Interface(String),
    #[error("no key reproduces the oracle")]
    Inconsistent,
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}
