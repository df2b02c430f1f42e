// SPDX-License-Identifier: Apache-2.0

//! Signal-probability and timing analyses that drive gate selection.

mod probability;
mod timing;

pub use probability::{signal_probabilities, sps, sps_of, ProbMap};
pub use timing::{
    delay_estimate_after_replacement, timing, tps_of_output, DelayModel, TimingError, TimingInfo,
};

use crate::netlist::DEFAULT_MAX_LUT_INPUTS;

/// Knobs shared by the analyses and the locker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// Probability of logic 1 at every primary input.
    pub pi_p1: f64,
    pub delay: DelayModel,
    /// Gates wider than this are never replaced.
    pub max_lut_inputs: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            pi_p1: 0.5,
            delay: DelayModel::default(),
            max_lut_inputs: DEFAULT_MAX_LUT_INPUTS,
        }
    }
}
