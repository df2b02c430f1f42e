// SPDX-License-Identifier: Apache-2.0

mod common;

use lutlock::analysis::AnalysisConfig;
use lutlock::attack::{
    build_miter, check_equivalence, count_valid_keys, encode_cnf, sat_attack, to_kpc,
    AttackLimits, AttackResult, CadicalSolver, ClauseSink, CountMode, Equivalence, Kpc,
    SatSolver, Signal, SolveResult, SolverKind,
};
use lutlock::locker::{obfuscate, Policy, PolicyKind};
use lutlock::netlist::parse_bench;
use lutlock::Netlist;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_valid_keys, eval_keyed, fixture, iscas, random_dag, serial_chain};

fn attack(k: &Kpc, oracle: &Netlist) -> AttackResult {
    sat_attack(k, oracle, AttackLimits::seconds(60.0), &SolverKind::Cadical).unwrap()
}

fn all_keys(bits: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << bits).map(move |k| (0..bits).map(|i| k >> i & 1 == 1).collect())
}

/// Checks every DIP against an independent evaluator and returns the number
/// of keys consistent with the first i DIPs, for every i.
fn audit_dips(locked: &Netlist, oracle: &Netlist, r: &AttackResult) -> Vec<usize> {
    let k = to_kpc(locked);
    let canonical: Vec<String> = locked
        .key_luts()
        .iter()
        .flat_map(|&g| {
            let name = locked.net_name(g).to_string();
            (0..1 << locked.gate(g).unwrap().arity()).map(move |i| format!("k_{name}_{i}"))
        })
        .collect();
    assert_eq!(k.key_inputs, canonical);
    assert_eq!(r.iterations, r.dips.len());
    assert!(r.iterations as u64 <= 1u64 << k.key_bits());
    assert!(r.iterations as u64 <= 1u64 << oracle.primary_inputs().len());
    for (i, d) in r.dips.iter().enumerate() {
        assert_eq!(d.outputs, eval_keyed(oracle, &d.inputs, &[]));
        assert_ne!(
            eval_keyed(locked, &d.inputs, &d.key1),
            eval_keyed(locked, &d.inputs, &d.key2),
            "DIP {i} does not discriminate"
        );
        for e in &r.dips[..i] {
            assert_eq!(eval_keyed(locked, &e.inputs, &d.key1), e.outputs);
            assert_eq!(eval_keyed(locked, &e.inputs, &d.key2), e.outputs);
        }
    }
    let keys: Vec<Vec<bool>> = all_keys(k.key_bits()).collect();
    (0..=r.dips.len())
        .map(|i| {
            keys.iter()
                .filter(|key| r.dips[..i].iter().all(|d| eval_keyed(locked, &d.inputs, key) == d.outputs))
                .count()
        })
        .collect()
}

fn check_small(locked: &Netlist, oracle: &Netlist) {
    let r = attack(&to_kpc(locked), oracle);
    assert!(r.verified && !r.timed_out);
    let counts = audit_dips(locked, oracle, &r);
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    let valid = brute_force_valid_keys(locked, oracle);
    assert_eq!(*counts.last().unwrap() as u64, valid);
    let key = to_kpc(locked).key_to_bits(&r.recovered_key).unwrap();
    let pis = oracle.primary_inputs().len();
    for p in all_keys(pis) {
        assert_eq!(eval_keyed(locked, &p, &key), eval_keyed(oracle, &p, &[]));
    }
}

#[test]
fn demorgan_dips_shrink_to_the_valid_keys() {
    check_small(&fixture("demorgan_or_and_locked"), &fixture("demorgan_or_and"));
}

#[test]
fn chain_dips_shrink_to_the_valid_keys() {
    for k in 2..=3 {
        let orig = parse_bench(&serial_chain(k, false)).unwrap();
        check_small(&parse_bench(&serial_chain(k, true)).unwrap(), &orig);
    }
}

#[test]
fn only_the_and_replaced_gives_one_key() {
    let orig = fixture("demorgan_or_and");
    let locked = parse_bench("INPUT(A)\nINPUT(B)\nINPUT(C)\nINPUT(D)\nOUTPUT(o)\nx = OR(A, B)\ny = OR(C, D)\no = LUT KEY (x, y)").unwrap();
    let c = count_valid_keys(&to_kpc(&locked), &orig, CountMode::exact(), &SolverKind::Cadical).unwrap();
    assert_eq!((c.valid, c.exact), (1, true));
    assert_eq!(brute_force_valid_keys(&locked, &orig), 1);
}

#[test]
fn chain_counts_grow() {
    let mut last = 0;
    for k in 2..=4 {
        let orig = parse_bench(&serial_chain(k, false)).unwrap();
        let locked = parse_bench(&serial_chain(k, true)).unwrap();
        let c = count_valid_keys(&to_kpc(&locked), &orig, CountMode::exact(), &SolverKind::Cadical).unwrap();
        assert!(c.valid > last);
        last = c.valid;
    }
}

#[test]
fn cnf_with_correct_key_matches_simulation() {
    let n = iscas("c432");
    let r = obfuscate(&n, &Policy::new(PolicyKind::Rnd), 12, &AnalysisConfig::default()).unwrap();
    let k = Kpc::from(&r);
    let cnf = encode_cnf(&k, 1);
    let mut s = CadicalSolver::new();
    for _ in 0..cnf.num_vars {
        s.new_var();
    }
    for c in &cnf.clauses {
        s.add_clause(c);
    }
    let key = k.key_to_bits(&r.correct_key).unwrap();
    let lit = |sig: Signal, b: bool| match sig {
        Signal::Lit(l) => Some(if b { l } else { -l }),
        Signal::Const(c) => {
            assert_eq!(c, b);
            None
        }
    };
    let key_units: Vec<i32> = cnf.copies[0]
        .key
        .iter()
        .zip(&key)
        .filter_map(|(&sig, &b)| match sig {
            Signal::Lit(l) => Some(if b { l } else { -l }),
            Signal::Const(_) => None,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let pi: Vec<bool> = (0..n.primary_inputs().len()).map(|_| rng.gen()).collect();
        let mut assume = key_units.clone();
        assume.extend(cnf.inputs.iter().zip(&pi).filter_map(|(&sig, &b)| lit(sig, b)));
        assert_eq!(s.solve(&assume, None).unwrap(), SolveResult::Sat);
        let got: Vec<bool> = n
            .primary_outputs()
            .iter()
            .map(|o| cnf.copies[0].nets[o.index()].value(|l| s.value(l)))
            .collect();
        assert_eq!(got, n.eval_outputs(&pi));
    }
}

fn solve_cnf(cnf: &lutlock::attack::Cnf) -> (SolveResult, CadicalSolver) {
    let mut s = CadicalSolver::new();
    for _ in 0..cnf.num_vars {
        s.new_var();
    }
    for c in &cnf.clauses {
        s.add_clause(c);
    }
    (s.solve(&[], None).unwrap(), s)
}

#[test]
fn miter_without_keys_is_unsat() {
    let (r, _) = solve_cnf(&build_miter(&to_kpc(&iscas("c17"))));
    assert_eq!(r, SolveResult::Unsat);
}

#[test]
fn miter_models_disagree_under_simulation() {
    let cases = [
        parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = LUT KEY (a, b)").unwrap(),
        fixture("demorgan_or_and_locked"),
        parse_bench(&serial_chain(3, true)).unwrap(),
    ];
    for locked in &cases {
        let k = to_kpc(locked);
        let cnf = build_miter(&k);
        let (r, s) = solve_cnf(&cnf);
        assert_eq!(r, SolveResult::Sat);
        let v = |sig: &Signal| sig.value(|l| s.value(l));
        let pi: Vec<bool> = cnf.inputs.iter().map(v).collect();
        let k1: Vec<bool> = cnf.copies[0].key.iter().map(v).collect();
        let k2: Vec<bool> = cnf.copies[1].key.iter().map(v).collect();
        assert_ne!(eval_keyed(locked, &pi, &k1), eval_keyed(locked, &pi, &k2));
    }
}

#[test]
fn external_solver_process() {
    let solver = SolverKind::External(vec![
        env!("CARGO_BIN_EXE_lutlock").to_string(),
        "solve-dimacs".to_string(),
    ]);
    let orig = fixture("demorgan_or_and");
    let locked = fixture("demorgan_or_and_locked");
    let r = sat_attack(&to_kpc(&locked), &orig, AttackLimits::seconds(60.0), &solver).unwrap();
    assert!(r.verified);
    let c = count_valid_keys(&to_kpc(&locked), &orig, CountMode::exact(), &solver).unwrap();
    assert_eq!(c.valid, 4);

    let n = iscas("c432");
    let lr = obfuscate(&n, &Policy::new(PolicyKind::Nb2MoHsc), 4, &AnalysisConfig::default()).unwrap();
    let unlocked = Kpc::from(&lr).unlock(&lr.correct_key).unwrap();
    assert_eq!(check_equivalence(&unlocked, &n, &solver, None).unwrap(), Equivalence::Equivalent);
    let r = sat_attack(&Kpc::from(&lr), &n, AttackLimits::seconds(120.0), &solver).unwrap();
    assert!(r.verified);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_count_equals_brute_force(seed in any::<u64>(), pis in 2usize..6, gates in 3usize..10, luts in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orig = parse_bench(&random_dag(&mut rng, pis, gates, 2)).unwrap();
        let policy = Policy::new(PolicyKind::Rnd).with_seed(seed).with_gamma(100.0);
        let r = obfuscate(&orig, &policy, luts, &AnalysisConfig::default()).unwrap();
        let locked = &r.obfuscated;
        let k = Kpc::from(&r);
        prop_assume!(k.key_bits() <= 12);
        let c = count_valid_keys(&k, &orig, CountMode::exact(), &SolverKind::Cadical).unwrap();
        prop_assert!(c.exact);
        prop_assert_eq!(c.valid, brute_force_valid_keys(locked, &orig));
        let a = attack(&k, &orig);
        prop_assert!(a.verified);
        let counts = audit_dips(locked, &orig, &a);
        prop_assert_eq!(*counts.last().unwrap() as u64, c.valid);
    }
}
