// SPDX-License-Identifier: Apache-2.0

//! Logic simulation, scalar and 64-pattern bit-parallel.

use super::{Assignment, Driver, Gate, GateKind, Netlist, SimError};

impl Netlist {
    /// Evaluates every net. `key` must assign every key-LUT content bit
    /// (it may be empty when the netlist has no key LUTs).
    pub fn simulate(&self, pi: &Assignment, key: &Assignment) -> Result<Assignment, SimError> {
        let words = self
            .primary_inputs()
            .iter()
            .map(|&i| {
                let name = self.net_name(i);
                pi.get(name)
                    .map(|&b| if b { !0u64 } else { 0 })
                    .ok_or_else(|| SimError::MissingInput(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let keyed;
        let source = if self.key_luts().is_empty() {
            self
        } else {
            keyed = self.with_key(key)?;
            &keyed
        };
        let values = source.simulate_words(&words);
        Ok(self
            .nets()
            .map(|id| (self.net_name(id).to_string(), values[id.index()] & 1 == 1))
            .collect())
    }

    /// Bit-parallel evaluation of 64 patterns at once. `inputs` holds one
    /// word per primary input (in declaration order); the result holds one
    /// word per net, indexed by [`super::NetId::index`]. Key LUTs use their
    /// stored content.
    pub fn simulate_words(&self, inputs: &[u64]) -> Vec<u64> {
        assert_eq!(inputs.len(), self.primary_inputs().len());
        let mut values = vec![0u64; self.net_count()];
        for (&pi, &w) in self.primary_inputs().iter().zip(inputs) {
            values[pi.index()] = w;
        }
        for &id in self.topo_order() {
            let Driver::Gate(gate) = self.driver(id) else {
                unreachable!()
            };
            values[id.index()] = eval_gate_words(gate, &values);
        }
        values
    }

    /// Primary-output words for the given input words.
    pub fn output_words(&self, inputs: &[u64]) -> Vec<u64> {
        let values = self.simulate_words(inputs);
        self.primary_outputs()
            .iter()
            .map(|o| values[o.index()])
            .collect()
    }

    /// Primary-output values for one input pattern (declaration order).
    pub fn eval_outputs(&self, inputs: &[bool]) -> Vec<bool> {
        let words: Vec<u64> = inputs.iter().map(|&b| if b { 1 } else { 0 }).collect();
        self.output_words(&words).into_iter().map(|w| w & 1 == 1).collect()
    }
}

pub(crate) fn eval_gate_words(gate: &Gate, values: &[u64]) -> u64 {
    let mut ins = gate.inputs.iter().map(|i| values[i.index()]);
    match gate.kind {
        GateKind::And => ins.fold(!0, |a, b| a & b),
        GateKind::Nand => !ins.fold(!0, |a, b| a & b),
        GateKind::Or => ins.fold(0, |a, b| a | b),
        GateKind::Nor => !ins.fold(0, |a, b| a | b),
        GateKind::Xor => ins.fold(0, |a, b| a ^ b),
        GateKind::Xnor => !ins.fold(0, |a, b| a ^ b),
        GateKind::Not => !ins.next().unwrap(),
        GateKind::Buff => ins.next().unwrap(),
        GateKind::Lut => {
            let content = gate.lut_content.as_ref().expect("LUT without content");
            let words: Vec<u64> = ins.collect();
            let k = words.len();
            let mut out = 0u64;
            for (pattern, &bit) in content.iter().enumerate() {
                if !bit {
                    continue;
                }
                let mut m = !0u64;
                for (j, &w) in words.iter().enumerate() {
                    m &= if (pattern >> (k - 1 - j)) & 1 == 1 { w } else { !w };
                }
                out |= m;
            }
            out
        }
    }
}
