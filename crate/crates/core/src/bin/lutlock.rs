// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Exit codes: 0 success, 1 key not verified or
//! netlists differ, 2 bad input, 3 I/O failure, 4 time limit, 5 oracle
//! inconsistent with the locked netlist.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lutlock::attack::{parse_dimacs, CadicalSolver, ClauseSink, CountMode, SatSolver, SolveResult};
use lutlock::harness::{self, CmdError, RunConfig, EXIT_OK, EXIT_UNVERIFIED};
use lutlock::locker::PolicyKind;

#[derive(Parser)]
#[command(name = "lutlock", version, about = "LUT-based logic locking and SAT attack")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// key = value file applied before the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Per-attack time limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// `cadical` or `external:<command>`
    #[arg(long)]
    solver: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CmdError> {
        self.layered(RunConfig::desk())
    }

    /// `base`, then the config file, then flags.
    fn layered(&self, base: RunConfig) -> Result<RunConfig, CmdError> {
        let mut cfg = base;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| CmdError::Io {
                path: path.clone(),
                source,
            })?;
            cfg = cfg
                .parse_overrides(&text)
                .map_err(|e| CmdError::Invalid(format!("{}: {e}", path.display())))?;
        }
        let set = |cfg: &mut RunConfig, k: &str, v: Option<String>| match v {
            Some(v) => cfg.set(k, &v).map_err(CmdError::Invalid),
            None => Ok(()),
        };
        set(&mut cfg, "alpha", self.alpha.map(|v| v.to_string()))?;
        set(&mut cfg, "beta", self.beta.map(|v| v.to_string()))?;
        set(&mut cfg, "gamma", self.gamma.map(|v| v.to_string()))?;
        set(&mut cfg, "time_limit", self.time_limit.map(|v| v.to_string()))?;
        set(&mut cfg, "solver", self.solver.clone())?;
        cfg.validate().map_err(CmdError::Invalid)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Replace gates of a bench file with key LUTs
    Obfuscate {
        bench: PathBuf,
        #[arg(long, default_value = "NB2_MO_HSC")]
        policy: PolicyKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Recover the key of a locked bench file using the original as oracle
    Attack {
        locked: PathBuf,
        original: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check a locked netlist under a key against the original
    Verify {
        locked: PathBuf,
        original: PathBuf,
        #[arg(long)]
        key: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Count keys under which the locked netlist matches the original
    CountKeys {
        locked: PathBuf,
        original: PathBuf,
        /// Estimate from this many random keys instead of enumerating
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop exact enumeration after this many keys
        #[arg(long)]
        limit: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Lock and attack every benchmark × policy × n × seed cell
    Sweep {
        /// Bench file or directory of bench files
        corpus: PathBuf,
        /// Comma-separated policies (default: all)
        #[arg(long, value_delimiter = ',')]
        policy: Vec<PolicyKind>,
        /// Comma-separated n grid
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Comma-separated seeds
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// `desk` or `full`
        #[arg(long)]
        profile: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a DIMACS file, answering in competition format (exit 10/20)
    SolveDimacs { file: PathBuf },
}

fn run(cli: Cli) -> Result<i32, CmdError> {
    match cli.command {
        Command::Obfuscate {
            bench,
            policy,
            n,
            seed,
            common,
        } => {
            let cfg = common.config()?;
            let out = harness::cmd_obfuscate(&bench, policy, n, seed, &cfg, &common.out_dir)?;
            println!("{}", out.summary);
            println!("wrote {}", out.bench.display());
            Ok(EXIT_OK)
        }
        Command::Attack {
            locked,
            original,
            common,
        } => {
            let cfg = common.config()?;
            let out = harness::cmd_attack(&locked, &original, &cfg, &common.out_dir)?;
            let r = &out.report;
            println!(
                "iterations={} solver_calls={} seconds={:.3} key_bits={} verified={} timed_out={}",
                r.iterations, r.solver_calls, r.seconds, r.key_bits, r.verified, r.timed_out
            );
            println!("wrote {}", out.json.display());
            Ok(r.exit_code())
        }
        Command::Verify {
            locked,
            original,
            key,
            common,
        } => {
            let cfg = common.config()?;
            let e = harness::cmd_verify(&locked, key.as_deref(), &original, &cfg)?;
            println!("{}", harness::render_equivalence(&e));
            Ok(if e.is_equivalent() { EXIT_OK } else { EXIT_UNVERIFIED })
        }
        Command::CountKeys {
            locked,
            original,
            sample,
            seed,
            limit,
            common,
        } => {
            let cfg = common.config()?;
            let mode = match sample {
                Some(samples) => CountMode::Sample { samples, seed },
                None => CountMode::Exact { limit },
            };
            let c = harness::cmd_count_keys(&locked, &original, mode, &cfg)?;
            println!("{}", harness::render_count(&c));
            Ok(EXIT_OK)
        }
        Command::Sweep {
            corpus,
            policy,
            n,
            seed,
            workers,
            profile,
            common,
        } => {
            let base = match profile {
                Some(p) => RunConfig::profile(&p)
                    .ok_or_else(|| CmdError::Invalid(format!("unknown profile `{p}`")))?,
                None => RunConfig::desk(),
            };
            let mut cfg = common.layered(base)?;
            if !n.is_empty() {
                cfg.n_grid = n;
            }
            if !seed.is_empty() {
                cfg.seeds = seed;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            cfg.validate().map_err(CmdError::Invalid)?;
            let policies = if policy.is_empty() {
                PolicyKind::ALL.to_vec()
            } else {
                policy
            };
            let benches = harness::load_corpus(&corpus)?;
            std::fs::create_dir_all(&common.out_dir).map_err(|source| CmdError::Io {
                path: common.out_dir.clone(),
                source,
            })?;
            let csv_path = common.out_dir.join("sweep.csv");
            let records = harness::run_sweep(&benches, &policies, &cfg, &csv_path, |r| {
                eprintln!(
                    "{} {} n={} seed={} iterations={} verified={} timed_out={}",
                    r.benchmark, r.policy, r.n_luts, r.seed, r.iterations, r.verified, r.timed_out
                );
            })
            .map_err(|e| CmdError::Invalid(format!("{}: {e}", csv_path.display())))?;
            let summary = harness::render_summary(&harness::summarize(&records));
            harness::write_atomic(&common.out_dir.join("sweep_summary.txt"), &summary)?;
            print!("{summary}");
            Ok(EXIT_OK)
        }
        Command::SolveDimacs { file } => {
            let text = std::fs::read_to_string(&file).map_err(|source| CmdError::Io {
                path: file.clone(),
                source,
            })?;
            let (vars, clauses) =
                parse_dimacs(&text).map_err(|e| CmdError::Invalid(format!("{}: {e}", file.display())))?;
            let mut s = CadicalSolver::new();
            for _ in 0..vars {
                s.new_var();
            }
            for c in &clauses {
                s.add_clause(c);
            }
            Ok(match s.solve(&[], None)? {
                SolveResult::Sat => {
                    println!("s SATISFIABLE");
                    let lits: Vec<String> = (1..=vars)
                        .map(|v| if s.value(v) { v } else { -v }.to_string())
                        .collect();
                    println!("v {} 0", lits.join(" "));
                    10
                }
                SolveResult::Unsat => {
                    println!("s UNSATISFIABLE");
                    20
                }
                SolveResult::Unknown => {
                    println!("s UNKNOWN");
                    0
                }
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
