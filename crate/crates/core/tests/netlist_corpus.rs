// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeSet;

use lutlock::analysis::{timing, tps_of_output, AnalysisConfig, DelayModel};
use lutlock::locker::{obfuscate, Policy, PolicyKind};
use lutlock::netlist::{parse_bench, write_bench};
use lutlock::{Assignment, Netlist};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{benchmarks_dir, eval_keyed, iscas, random_dag};

fn corpus() -> Vec<Netlist> {
    let mut paths: Vec<_> = std::fs::read_dir(benchmarks_dir().join("iscas85"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths.iter().map(|p| lutlock::netlist::read_bench(p).unwrap()).collect()
}

fn topo_is_valid(n: &Netlist) -> bool {
    let mut seen = vec![false; n.net_count()];
    for &i in n.primary_inputs() {
        seen[i.index()] = true;
    }
    for &g in n.topo_order() {
        if !n.gate(g).unwrap().inputs.iter().all(|i| seen[i.index()]) {
            return false;
        }
        seen[g.index()] = true;
    }
    n.topo_order().len() == n.gate_count()
}

#[test]
fn corpus_round_trips_and_orders() {
    let all = corpus();
    assert_eq!(all.len(), 11);
    for n in &all {
        let again = parse_bench(&write_bench(n)).unwrap();
        assert!(n.isomorphic(&again), "{}", n.name());
        assert!(topo_is_valid(n), "{}", n.name());
    }
}

#[test]
fn fanout_counts_sum_to_slots() {
    for n in corpus() {
        let total: usize = n.gates().map(|(g, _)| n.fanout_count(g).unwrap()).sum();
        let slots: usize = n
            .gates()
            .map(|(_, g)| g.inputs.iter().filter(|i| !n.is_input(**i)).count())
            .sum();
        let po_gates = n.primary_outputs().iter().filter(|o| !n.is_input(**o)).count();
        assert_eq!(total, slots + po_gates, "{}", n.name());
    }
}

#[test]
fn reachable_outputs_are_the_union_over_consumers() {
    for name in ["c432", "c880", "c1908"] {
        let n = iscas(name);
        for (g, _) in n.gates() {
            let mut expect = BTreeSet::new();
            if n.is_output(g) {
                expect.insert(g);
            }
            for &c in n.consumers(g) {
                expect.extend(n.reachable_outputs(c).unwrap());
            }
            assert_eq!(n.reachable_outputs(g).unwrap(), expect, "{name} {}", n.net_name(g));
        }
    }
}

#[test]
fn c432_cones_share_logic() {
    let n = iscas("c432");
    let pos = n.primary_outputs();
    let shared = pos.iter().enumerate().any(|(i, &a)| {
        let ca = n.fanin_cone(a);
        pos[i + 1..]
            .iter()
            .any(|&b| n.fanin_cone(b).gates.iter().any(|&g| ca.contains(g)))
    });
    assert!(shared);
}

#[test]
fn c432_tps_nonnegative_with_a_zero() {
    let n = iscas("c432");
    let t = timing(&n, DelayModel::default());
    let tps: Vec<f64> = n
        .primary_outputs()
        .iter()
        .map(|&o| tps_of_output(&n, &t, o).unwrap())
        .collect();
    assert!(tps.iter().all(|&v| v >= 0.0));
    assert!(tps.contains(&0.0));
}

#[test]
fn simulation_agrees_with_reference_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in corpus() {
        let pis = n.primary_inputs().len();
        for _ in 0..8 {
            let bits: Vec<bool> = (0..pis).map(|_| rng.gen()).collect();
            let pi: Assignment = n
                .primary_inputs()
                .iter()
                .zip(&bits)
                .map(|(&i, &b)| (n.net_name(i).to_string(), b))
                .collect();
            let full = n.simulate(&pi, &Assignment::new()).unwrap();
            let got: Vec<bool> = n.primary_outputs().iter().map(|&o| full[n.net_name(o)]).collect();
            assert_eq!(got, eval_keyed(&n, &bits, &[]), "{}", n.name());
            assert_eq!(n.eval_outputs(&bits), got);
        }
    }
}

#[test]
fn c880_locked_matches_on_1000_vectors() {
    let n = iscas("c880");
    let r = obfuscate(&n, &Policy::new(PolicyKind::Nb2MoHsc), 16, &AnalysisConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(880);
    for _ in 0..1000 {
        let pi: Assignment = n
            .primary_inputs()
            .iter()
            .map(|&i| (n.net_name(i).to_string(), rng.gen()))
            .collect();
        let want = n.simulate(&pi, &Assignment::new()).unwrap();
        let got = r.obfuscated.simulate(&pi, &r.correct_key).unwrap();
        for &o in n.primary_outputs() {
            let name = n.net_name(o);
            assert_eq!(got[name], want[name]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_dags_round_trip(seed in any::<u64>(), pis in 1usize..8, gates in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = parse_bench(&random_dag(&mut rng, pis, gates, 4)).unwrap();
        let again = parse_bench(&write_bench(&n)).unwrap();
        prop_assert!(n.isomorphic(&again));
        prop_assert!(topo_is_valid(&n));
        let words: Vec<u64> = (0..pis).map(|_| rng.gen()).collect();
        prop_assert_eq!(n.output_words(&words), again.output_words(&words));
    }
}
