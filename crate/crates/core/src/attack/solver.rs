// SPDX-License-Identifier: Apache-2.0

//! SAT back ends: CaDiCaL in-process, or any DIMACS solver run as a child
//! process.

use std::fmt;
use std::io::Read;
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::cnf::ClauseSink;
use super::AttackError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// Deadline reached or the solver gave up.
    Unknown,
}

/// Incremental interface used by the attack. Back ends without native
/// incrementality re-solve from scratch on every call.
pub trait SatSolver: ClauseSink + Send {
    fn solve(&mut self, assumptions: &[i32], deadline: Option<Instant>) -> Result<SolveResult, AttackError>;
    /// Value of `lit` in the last model.
    fn value(&self, lit: i32) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Cadical,
    /// Program and leading arguments; the DIMACS file path is appended.
    External(Vec<String>),
}

impl SolverKind {
    pub fn build(&self) -> Box<dyn SatSolver> {
        match self {
            SolverKind::Cadical => Box::new(CadicalSolver::new()),
            SolverKind::External(cmd) => Box::new(ExternalSolver::new(cmd.clone())),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Cadical => f.write_str("cadical"),
            SolverKind::External(cmd) => write!(f, "external:{}", cmd.join(" ")),
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    /// `cadical` or `external:<program> [args...]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("cadical") {
            return Ok(SolverKind::Cadical);
        }
        match s.split_once(':') {
            Some((tag, cmd)) if tag.eq_ignore_ascii_case("external") => {
                let words: Vec<String> = cmd.split_whitespace().map(String::from).collect();
                if words.is_empty() {
                    Err("external solver needs a command".into())
                } else {
                    Ok(SolverKind::External(words))
                }
            }
            _ => Err(format!("unknown solver `{s}`")),
        }
    }
}

impl ClauseSink for Box<dyn SatSolver> {
    fn new_var(&mut self) -> i32 {
        (**self).new_var()
    }

    fn add_clause(&mut self, lits: &[i32]) {
        (**self).add_clause(lits)
    }
}

struct Deadline(Option<Instant>);

impl cadical::Callbacks for Deadline {
    fn terminate(&mut self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

pub struct CadicalSolver {
    inner: cadical::Solver<Deadline>,
    vars: i32,
}

impl CadicalSolver {
    pub fn new() -> CadicalSolver {
        let mut inner = cadical::Solver::new();
        inner.set_callbacks(Some(Deadline(None)));
        CadicalSolver { inner, vars: 0 }
    }
}

impl Default for CadicalSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl ClauseSink for CadicalSolver {
    fn new_var(&mut self) -> i32 {
        self.vars += 1;
        self.vars
    }

    fn add_clause(&mut self, lits: &[i32]) {
        self.inner.add_clause(lits.iter().copied());
    }
}

impl SatSolver for CadicalSolver {
    fn solve(&mut self, assumptions: &[i32], deadline: Option<Instant>) -> Result<SolveResult, AttackError> {
        if let Some(cb) = self.inner.get_callbacks() {
            cb.0 = deadline;
        }
        // Variables that never occur in a clause still need a model value.
        self.inner.reserve(self.vars);
        Ok(match self.inner.solve_with(assumptions.iter().copied()) {
            Some(true) => SolveResult::Sat,
            Some(false) => SolveResult::Unsat,
            None => SolveResult::Unknown,
        })
    }

    fn value(&self, lit: i32) -> bool {
        self.inner.value(lit).unwrap_or(false)
    }
}

/// Renders a `p cnf` file; `units` are appended as unit clauses.
pub fn write_dimacs(num_vars: i32, clauses: &[Vec<i32>], units: &[i32]) -> String {
    let mut out = format!("p cnf {} {}\n", num_vars, clauses.len() + units.len());
    for c in clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    for u in units {
        out.push_str(&format!("{u} 0\n"));
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("literal {lit} exceeds declared variable count {vars}")]
    Range { lit: i32, vars: i32 },
}

/// Parses a DIMACS CNF file into (variable count, clauses).
pub fn parse_dimacs(text: &str) -> Result<(i32, Vec<Vec<i32>>), DimacsError> {
    let mut vars = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(DimacsError::Header(line_no));
            }
            vars = Some(parts[2].parse::<i32>().map_err(|_| DimacsError::Header(line_no))?);
            continue;
        }
        let Some(v) = vars else {
            return Err(DimacsError::Header(line_no));
        };
        for tok in t.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| DimacsError::Literal {
                line: line_no,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.abs() > v {
                return Err(DimacsError::Range { lit, vars: v });
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    Ok((vars.ok_or(DimacsError::Header(0))?, clauses))
}

/// Reads a competition-format answer: exit status 10/20 or an `s` line,
/// plus `v` model lines. Returns the verdict and a model indexed by
/// variable (slot 0 unused).
pub fn parse_solver_output(status: Option<i32>, stdout: &str, num_vars: i32) -> (SolveResult, Vec<bool>) {
    let mut result = match status {
        Some(10) => SolveResult::Sat,
        Some(20) => SolveResult::Unsat,
        _ => SolveResult::Unknown,
    };
    let mut model = vec![false; num_vars as usize + 1];
    for line in stdout.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("s ") {
            result = match rest.trim() {
                "SATISFIABLE" => SolveResult::Sat,
                "UNSATISFIABLE" => SolveResult::Unsat,
                _ => SolveResult::Unknown,
            };
        } else if let Some(rest) = t.strip_prefix("v ") {
            for lit in rest.split_whitespace().filter_map(|x| x.parse::<i32>().ok()) {
                if lit > 0 && lit <= num_vars {
                    model[lit as usize] = true;
                }
            }
        }
    }
    (result, model)
}

/// Writes the whole formula to a temporary DIMACS file for every call and
/// runs the configured command on it.
pub struct ExternalSolver {
    command: Vec<String>,
    vars: i32,
    clauses: Vec<Vec<i32>>,
    model: Vec<bool>,
}

impl ExternalSolver {
    pub fn new(command: Vec<String>) -> ExternalSolver {
        ExternalSolver {
            command,
            vars: 0,
            clauses: Vec::new(),
            model: Vec::new(),
        }
    }
}

impl ClauseSink for ExternalSolver {
    fn new_var(&mut self) -> i32 {
        self.vars += 1;
        self.vars
    }

    fn add_clause(&mut self, lits: &[i32]) {
        self.clauses.push(lits.to_vec());
    }
}

impl SatSolver for ExternalSolver {
    fn solve(&mut self, assumptions: &[i32], deadline: Option<Instant>) -> Result<SolveResult, AttackError> {
        let io = |e: std::io::Error| AttackError::Solver(format!("{}: {e}", self.command[0]));
        let file = tempfile::Builder::new()
            .suffix(".cnf")
            .tempfile()
            .map_err(io)?;
        std::fs::write(file.path(), write_dimacs(self.vars, &self.clauses, assumptions)).map_err(io)?;
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .arg(file.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(io)?;
        let mut stdout = child.stdout.take().unwrap();
        let reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let status = loop {
            if let Some(st) = child.try_wait().map_err(io)? {
                break Some(st);
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            std::thread::sleep(Duration::from_millis(2));
        };
        let text = reader.join().unwrap_or_default();
        let Some(status) = status else {
            return Ok(SolveResult::Unknown);
        };
        let (result, model) = parse_solver_output(status.code(), &text, self.vars);
        self.model = model;
        Ok(result)
    }

    fn value(&self, lit: i32) -> bool {
        let v = self.model.get(lit.unsigned_abs() as usize).copied().unwrap_or(false);
        if lit > 0 {
            v
        } else {
            !v
        }
    }
}
