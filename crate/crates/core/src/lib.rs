// SPDX-License-Identifier: Apache-2.0

//! LUT-based logic locking for combinational netlists.
//!
//! The crate replaces selected gates of a netlist with key-programmable
//! lookup tables and measures how hard the result is to unlock with an
//! oracle-guided SAT attack.
//!
//! - [`netlist`]: bench parsing/writing, traversal and simulation.
//! - [`analysis`]: signal probability skew and unit-delay timing.
//! - [`locker`]: gate-selection policies and LUT replacement.
//! - [`attack`]: CNF encoding, the DIP-based SAT attack, equivalence
//!   checking and valid-key counting.
//! - [`harness`]: the command implementations behind the `lutlock` binary
//!   and the policy sweep runner.
//!
//! Runnable walkthroughs of each capability live in the crate's
//! `examples/` directory (`cargo run -p lutlock --example <name>`).

pub mod analysis;
pub mod attack;
pub mod harness;
pub mod locker;
pub mod netlist;

pub use netlist::{Assignment, GateKind, NetId, Netlist, NetlistBuilder, NetlistError};
