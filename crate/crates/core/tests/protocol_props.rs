use std::collections::BTreeSet;

use gasman::graph::{is_hamiltonian_cycle, NodeId};
use gasman::netsim::{run_scenario, ScenarioConfig};
use gasman::protocol::{
    apply_deletion, apply_insertion, begin_insertion, complete_insertion, handle_pol_quorum,
    initialize_network, DeviceId, NetworkParams, NodeState, PolDecision, ProtocolError,
};
use gasman::time::{SimDuration, SimTime};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
enum Op {
    Insert,
    Delete(usize),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![Just(Op::Insert), (0usize..64).prop_map(Op::Delete)],
        1..40,
    )
}

fn quorum_set(members: usize) -> BTreeSet<NodeId> {
    (100..100 + members as u32).map(NodeId).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutations_keep_every_view_identical(n in 8usize..20, degree in 3usize..7, seed in any::<u64>(), ops in ops()) {
        let params = NetworkParams { degree, ..NetworkParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states: Vec<NodeState> = initialize_network(n, &params, &mut rng).unwrap().states;
        let mut members: BTreeSet<NodeId> = states.iter().map(|s| s.id).collect();
        let mut now = SimTime::ZERO;
        for (i, op) in ops.into_iter().enumerate() {
            now = now + SimDuration::from_secs(1);
            match op {
                Op::Insert => {
                    let a = &states[rng.gen_range(0..states.len())];
                    let ann = begin_insertion(a, DeviceId(1000 + i as u64), &BTreeSet::new(), None).unwrap();
                    let bc = match complete_insertion(a, &ann, members.len(), degree, None, &mut rng) {
                        Ok(bc) => bc,
                        Err(ProtocolError::Infeasible { .. }) => continue,
                        Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
                    };
                    prop_assert_eq!(bc.neighbors.len(), degree);
                    for s in &mut states {
                        apply_insertion(s, &bc, now).unwrap();
                    }
                    prop_assert_eq!(states[0].graph.degree(ann.new_id), degree);
                    members.insert(ann.new_id);
                }
                Op::Delete(k) => {
                    if members.len() <= 4 {
                        continue;
                    }
                    let v = *members.iter().nth(k % members.len()).unwrap();
                    states.retain(|s| s.id != v);
                    if states.len() < 2 {
                        break;
                    }
                    for s in &mut states {
                        apply_deletion(s, v, now).unwrap();
                    }
                    members.remove(&v);
                }
            }
            let view = states[0].shared_view();
            for s in &states {
                prop_assert_eq!(&s.shared_view(), &view);
                prop_assert!(is_hamiltonian_cycle(&s.graph, &s.cycle));
                prop_assert_eq!(&s.graph.vertex_set(), &members);
            }
        }
    }

    #[test]
    fn quorum_is_half_of_all_members(n in 6usize..40, answers in 0usize..40, seed in any::<u64>()) {
        let params = NetworkParams { degree: 4, ..NetworkParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = initialize_network(n, &params, &mut rng).unwrap();
        let a = &s.states[0];
        let ann = begin_insertion(a, DeviceId(99), &BTreeSet::new(), None).unwrap();
        let r = complete_insertion(a, &ann, answers, 4, None, &mut rng);
        let quorate = answers * 2 >= n;
        prop_assert_eq!(!matches!(r, Err(ProtocolError::QuorumNotReached { .. })), quorate);
        let decision = handle_pol_quorum(a, &quorum_set(answers));
        prop_assert_eq!(matches!(decision, PolDecision::Echo(_)), quorate);
    }

    #[test]
    fn churned_runs_pass_invariant_checks(seed in any::<u64>(), n in 6usize..14, p_off in 0.0f64..0.3, p_insert in 0.0f64..0.2) {
        let text = format!(
            r#"{{"n": {n}, "params": {{"T": 2, "l": 4, "degree": 4}}, "duration": 25,
                "churn": {{"p_off": {p_off}, "p_on": 0.2, "p_insert": {p_insert}}}}}"#
        );
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        let out = run_scenario(&cfg, seed);
        prop_assert!(out.is_ok(), "{:?}", out.err());
    }
}

#[test]
fn eleven_members_need_six_answers() {
    let params = NetworkParams { degree: 4, ..NetworkParams::default() };
    let s = initialize_network(11, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let a = &s.states[0];
    assert_eq!(handle_pol_quorum(a, &quorum_set(4)), PolDecision::Withdraw);
    assert_eq!(handle_pol_quorum(a, &quorum_set(5)), PolDecision::Withdraw);
    assert!(matches!(handle_pol_quorum(a, &quorum_set(6)), PolDecision::Echo(_)));
}
