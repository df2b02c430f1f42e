// SPDX-License-Identifier: Apache-2.0

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lutlock::locker::parse_key_file;
use lutlock::netlist::read_bench;

use common::{benchmarks_dir, eval_keyed};

fn lutlock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lutlock")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn bench(name: &str) -> String {
    benchmarks_dir().join("iscas85").join(format!("{name}.bench")).display().to_string()
}

fn fixture(name: &str) -> String {
    benchmarks_dir().join("fixtures").join(format!("{name}.bench")).display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lock(bench_name: &str, policy: &str, n: usize, seed: u64, out: &Path) -> PathBuf {
    let o = lutlock(&[
        "obfuscate",
        &bench(bench_name),
        "--policy",
        policy,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out-dir",
        s(out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out.join(format!("{bench_name}_{policy}_n{n}_s{seed}.bench"))
}

#[test]
fn obfuscate_writes_sixteen_luts() {
    let dir = tempfile::tempdir().unwrap();
    let locked = lock("c432", "NB2_MO_HSC", 16, 0, dir.path());
    let text = std::fs::read_to_string(&locked).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("= LUT KEY")).count(), 16);
    let key = parse_key_file(&std::fs::read_to_string(locked.with_extension("key")).unwrap()).unwrap();
    assert_eq!(key.len(), read_bench(&locked).unwrap().key_bit_names().len());
    assert!(locked.with_extension("trace").exists());
    let leftovers = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().to_string_lossy().ends_with(".partial"))
        .count();
    assert_eq!(leftovers, 0);
}

#[test]
fn zero_luts_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = lutlock(&["obfuscate", &bench("c17"), "--n", "0", "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 2);
}

#[test]
fn rnd_outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = lock("c880", "RND", 12, 7, a.path());
    let pb = lock("c880", "RND", 12, 7, b.path());
    for ext in ["bench", "key", "trace"] {
        assert_eq!(
            std::fs::read(pa.with_extension(ext)).unwrap(),
            std::fs::read(pb.with_extension(ext)).unwrap(),
            "{ext}"
        );
    }
}

#[test]
fn attack_recovers_c880_key() {
    let dir = tempfile::tempdir().unwrap();
    let locked = lock("c880", "NB2_MO_HSC", 16, 0, dir.path());
    let o = lutlock(&["attack", s(&locked), &bench("c880"), "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(locked.with_extension("attack.json")).unwrap(),
    )
    .unwrap();
    for field in ["iterations", "solver_calls", "seconds", "verified", "key_bits"] {
        assert!(json.get(field).is_some(), "{field}");
    }
    assert_eq!(json["verified"], true);
    assert!(locked.with_extension("attack.txt").exists());
}

#[test]
fn attack_on_unlocked_pair_needs_no_dips() {
    let dir = tempfile::tempdir().unwrap();
    let o = lutlock(&["attack", &bench("c17"), &bench("c17"), "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("iterations=0"));
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(bench("c432")).unwrap();
    let cut = text.find("NAND(").unwrap() + 7;
    let path = dir.path().join("cut.bench");
    std::fs::write(&path, &text[..cut]).unwrap();
    let o = lutlock(&["attack", s(&path), &bench("c432"), "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn missing_file_is_an_io_error() {
    let o = lutlock(&["attack", "/nonexistent/x.bench", &bench("c17")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn time_limit_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let locked = lock("c2670", "MO_HSC", 24, 0, dir.path());
    let o = lutlock(&[
        "attack",
        s(&locked),
        &bench("c2670"),
        "--time-limit",
        "1",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("timed_out=true"));
}

#[test]
fn inconsistent_oracle_exits_with_five() {
    let dir = tempfile::tempdir().unwrap();
    let locked = dir.path().join("locked.bench");
    let oracle = dir.path().join("oracle.bench");
    std::fs::write(&locked, "INPUT(a)\nINPUT(b)\nOUTPUT(o)\nOUTPUT(p)\no = LUT KEY (a, b)\np = AND(a, b)\n").unwrap();
    std::fs::write(&oracle, "INPUT(a)\nINPUT(b)\nOUTPUT(o)\nOUTPUT(p)\no = AND(a, b)\np = OR(a, b)\n").unwrap();
    let o = lutlock(&["attack", s(&locked), s(&oracle), "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 5);
}

#[test]
fn verify_correct_and_flipped_keys() {
    let dir = tempfile::tempdir().unwrap();
    let locked = lock("c432", "NB2_MO_HSC", 8, 0, dir.path());
    let key_path = locked.with_extension("key");
    let o = lutlock(&["verify", s(&locked), &bench("c432"), "--key", s(&key_path)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "EQUIVALENT");

    // Flip one truth-table bit of the output-driving LUT.
    let trace = std::fs::read_to_string(locked.with_extension("trace")).unwrap();
    let first = trace.lines().find(|l| l.starts_with("select")).unwrap();
    let gate = first.split('\t').nth(2).unwrap();
    let text = std::fs::read_to_string(&key_path).unwrap();
    let target = format!("k_{gate}_0 = ");
    let flipped: String = text
        .lines()
        .map(|l| match l.strip_prefix(&target) {
            Some("0") => format!("{target}1\n"),
            Some(_) => format!("{target}0\n"),
            None => format!("{l}\n"),
        })
        .collect();
    let bad = dir.path().join("bad.key");
    std::fs::write(&bad, &flipped).unwrap();
    let o = lutlock(&["verify", s(&locked), &bench("c432"), "--key", s(&bad)]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.starts_with("DIFFERENT"), "{out}");

    // The witness really separates the two netlists.
    let orig = read_bench(bench("c432")).unwrap();
    let lk = read_bench(&locked).unwrap();
    let witness: std::collections::BTreeMap<&str, bool> = out
        .split_whitespace()
        .skip(1)
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k, v == "1")
        })
        .collect();
    let pi: Vec<bool> = orig.primary_inputs().iter().map(|&i| witness[orig.net_name(i)]).collect();
    let key = parse_key_file(&flipped).unwrap();
    let bits: Vec<bool> = lk.key_bit_names().iter().map(|k| key[k]).collect();
    assert_ne!(eval_keyed(&lk, &pi, &bits), eval_keyed(&orig, &pi, &[]));
}

#[test]
fn count_keys_on_demorgan_fixture() {
    let o = lutlock(&["count-keys", &fixture("demorgan_or_and_locked"), &fixture("demorgan_or_and")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "4");
    let o = lutlock(&[
        "count-keys",
        &fixture("demorgan_or_and_locked"),
        &fixture("demorgan_or_and"),
        "--sample",
        "4096",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("estimate"));
}

#[test]
fn count_keys_precondition_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let locked = lock("c432", "RND", 8, 0, dir.path());
    let o = lutlock(&["count-keys", s(&locked), &bench("c432")]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# overrides\ngamma = 0.5\nalpha = 0.25\n").unwrap();
    let o = lutlock(&[
        "obfuscate",
        &bench("c432"),
        "--policy",
        "FIC",
        "--n",
        "4",
        "--config",
        s(&cfg),
        "--alpha",
        "0.75",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    let trace = std::fs::read_to_string(dir.path().join("c432_FIC_n4_s0.trace")).unwrap();
    assert!(trace.starts_with("# policy=FIC alpha=0.75 beta=0.5 gamma=0.5"), "{trace}");

    std::fs::write(&cfg, "gamma = -1\n").unwrap();
    let o = lutlock(&["obfuscate", &bench("c432"), "--n", "4", "--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_dimacs_answers() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = lutlock(&["solve-dimacs", s(&sat)]);
    assert_eq!(code(&o), 10);
    assert_eq!(stdout(&o), "s SATISFIABLE\nv -1 2 0\n");
    let unsat = dir.path().join("unsat.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    assert_eq!(code(&lutlock(&["solve-dimacs", s(&unsat)])), 20);
}

#[test]
fn sweep_is_factorial_and_resumable() {
    let corpus = tempfile::tempdir().unwrap();
    std::fs::copy(bench("c432"), corpus.path().join("c432.bench")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        s(corpus.path()),
        "--policy",
        "RND,NB2_MO_HSC",
        "--n",
        "4,8",
        "--seed",
        "0",
        "--out-dir",
        s(out.path()),
    ];
    let o = lutlock(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = out.path().join("sweep.csv");
    let first = std::fs::read_to_string(&csv).unwrap();
    let mut lines = first.lines();
    assert_eq!(
        lines.next().unwrap(),
        "benchmark,policy,n_luts,seed,iterations,seconds,key_bits,verified,timed_out"
    );
    assert_eq!(lines.count(), 4);
    assert!(stdout(&o).contains("Machine-local"));

    let o = lutlock(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
    assert!(String::from_utf8_lossy(&o.stderr).is_empty());
}
