// SPDX-License-Identifier: Apache-2.0

//! The attacker's view of a locked netlist.

use crate::locker::ObfuscationResult;
use crate::netlist::{Assignment, Gate, NetId, Netlist, SimError};

/// A locked netlist with the key-LUT contents withheld. Key bits are named
/// and ordered exactly as in the locker's key file.
#[derive(Clone, Debug)]
pub struct Kpc {
    pub netlist: Netlist,
    pub key_inputs: Vec<String>,
    pub key_luts: Vec<NetId>,
}

/// Strips every key LUT's stored content.
pub fn to_kpc(n: &Netlist) -> Kpc {
    let key_luts = n.key_luts();
    let mut netlist = n.clone();
    for &g in &key_luts {
        let old = n.gate(g).unwrap();
        let blank = Gate {
            lut_content: Some(vec![false; 1 << old.arity()]),
            ..old.clone()
        };
        netlist = netlist.with_gate(g, blank);
    }
    Kpc {
        key_inputs: netlist.key_bit_names(),
        netlist,
        key_luts,
    }
}

impl From<&ObfuscationResult> for Kpc {
    fn from(r: &ObfuscationResult) -> Kpc {
        to_kpc(&r.obfuscated)
    }
}

impl Kpc {
    pub fn key_bits(&self) -> usize {
        self.key_inputs.len()
    }

    /// Key assignment from bits in canonical order.
    pub fn key_from_bits(&self, bits: &[bool]) -> Assignment {
        self.key_inputs.iter().cloned().zip(bits.iter().copied()).collect()
    }

    /// Bits in canonical order; missing names are an error.
    pub fn key_to_bits(&self, key: &Assignment) -> Result<Vec<bool>, SimError> {
        self.key_inputs
            .iter()
            .map(|k| key.get(k).copied().ok_or_else(|| SimError::MissingKey(k.clone())))
            .collect()
    }

    /// The concrete netlist under `key`.
    pub fn unlock(&self, key: &Assignment) -> Result<Netlist, SimError> {
        self.netlist.with_key(key)
    }

    pub fn simulate(&self, pi: &Assignment, key: &Assignment) -> Result<Assignment, SimError> {
        self.netlist.simulate(pi, key)
    }
}
