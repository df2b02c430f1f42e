// SPDX-License-Identifier: Apache-2.0

//! Run configuration, read from plain `key = value` text.
//!
//! Recognised keys: `profile`, `alpha`, `beta`, `gamma`, `pi_p1`,
//! `lut_delay`, `max_lut_inputs`, `seeds`, `n_grid`, `time_limit`,
//! `solver`, `workers`. `seeds` and `n_grid` take comma-separated lists;
//! `profile` (`desk` or `full`) resets every other key to that profile's
//! defaults, so put it first.

use crate::analysis::{AnalysisConfig, DelayModel};
use crate::attack::{AttackLimits, SolverKind};
use crate::locker::{Policy, PolicyKind};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub pi_p1: f64,
    pub lut_delay: f64,
    pub max_lut_inputs: usize,
    pub seeds: Vec<u64>,
    pub n_grid: Vec<usize>,
    /// Per-attack limit in seconds.
    pub time_limit: f64,
    pub solver: SolverKind,
    /// Sweep worker threads.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::desk()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl RunConfig {
    pub fn desk() -> RunConfig {
        RunConfig {
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.1,
            pi_p1: 0.5,
            lut_delay: 2.0,
            max_lut_inputs: crate::netlist::DEFAULT_MAX_LUT_INPUTS,
            seeds: (0..5).collect(),
            n_grid: vec![1, 2, 4, 8, 16, 24, 32],
            time_limit: 600.0,
            solver: SolverKind::Cadical,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    /// Desk defaults with the long per-attack limit.
    pub fn full() -> RunConfig {
        RunConfig {
            time_limit: 1.1e4,
            ..RunConfig::desk()
        }
    }

    pub fn profile(name: &str) -> Option<RunConfig> {
        match name.trim().to_ascii_lowercase().as_str() {
            "desk" => Some(RunConfig::desk()),
            "full" => Some(RunConfig::full()),
            _ => None,
        }
    }

    /// Applies the lines of a config file on top of `self`.
    pub fn parse_overrides(mut self, text: &str) -> Result<RunConfig, ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError {
                line,
                message: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|message| ConfigError { line, message })?;
        }
        self.validate().map_err(|message| ConfigError { line: 0, message })?;
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value `{v}` for `{key}`"))
        }
        fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        match key {
            "profile" => {
                *self = RunConfig::profile(value).ok_or_else(|| format!("unknown profile `{value}`"))?
            }
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "pi_p1" => self.pi_p1 = num(key, value)?,
            "lut_delay" => self.lut_delay = num(key, value)?,
            "max_lut_inputs" => self.max_lut_inputs = num(key, value)?,
            "seeds" => self.seeds = list(key, value)?,
            "n_grid" => self.n_grid = list(key, value)?,
            "time_limit" => self.time_limit = num(key, value)?,
            "solver" => self.solver = value.parse()?,
            "workers" => self.workers = num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err("n_grid must be non-empty and strictly increasing".into());
        }
        if self.n_grid[0] == 0 {
            return Err("n_grid entries must be at least 1".into());
        }
        if !(self.time_limit > 0.0) {
            return Err("time_limit must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.pi_p1) {
            return Err("pi_p1 must lie in [0, 1]".into());
        }
        if self.seeds.is_empty() {
            return Err("seeds must not be empty".into());
        }
        if !(1..=16).contains(&self.max_lut_inputs) {
            return Err("max_lut_inputs must lie in 1..=16".into());
        }
        if self.workers == 0 {
            return Err("workers must be at least 1".into());
        }
        self.policy(PolicyKind::Rnd, 0).validate().map_err(|e| e.to_string())
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            pi_p1: self.pi_p1,
            delay: DelayModel {
                gate_delay: 1.0,
                lut_delay: self.lut_delay,
            },
            max_lut_inputs: self.max_lut_inputs,
        }
    }

    pub fn policy(&self, kind: PolicyKind, seed: u64) -> Policy {
        Policy {
            kind,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            seed,
        }
    }

    pub fn limits(&self) -> AttackLimits {
        AttackLimits::seconds(self.time_limit)
    }
}
