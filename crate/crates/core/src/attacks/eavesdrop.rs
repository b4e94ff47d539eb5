use std::collections::BTreeMap;

use rand::Rng;

use super::{AttackError, CapturedSession};
use crate::graph::Graph;
use crate::zkp::{simulate_transcript, Challenge, Commitment, RoundOpening};

/// Size statistics for the openings answering one challenge value.
#[derive(Debug, Clone, PartialEq)]
pub struct ChallengeStats {
    pub challenge: Challenge,
    pub honest: usize,
    pub simulated: usize,
    /// Total variation distance between the opening-size histograms.
    pub tv_distance: f64,
    pub shape_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguisherReport {
    pub rounds: usize,
    pub stats: Vec<ChallengeStats>,
    pub indistinguishable: bool,
}

const TV_LIMIT: f64 = 0.05;

fn shape_ok(g: &Graph, o: &RoundOpening) -> bool {
    match o {
        RoundOpening::Cycle {
            permuted_graph,
            permuted_cycle,
            ..
        } => {
            permuted_graph.vertex_set() == g.vertex_set()
                && permuted_graph.edge_count() == g.edge_count()
                && permuted_cycle.len() == g.vertex_count()
        }
        RoundOpening::Permutation { permutation, .. } => {
            permutation.domain().eq(g.vertices())
        }
    }
}

fn tv(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> f64 {
    let na: usize = a.values().sum();
    let nb: usize = b.values().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0
}

/// Looks for commitments opened both ways, then compares the observable
/// shape of the archive against simulated transcripts for the same graphs
/// and challenges.
pub fn eavesdrop_analysis<R: Rng + ?Sized>(
    archive: &[CapturedSession],
    rng: &mut R,
) -> Result<DistinguisherReport, AttackError> {
    let mut opened: BTreeMap<Commitment, Challenge> = BTreeMap::new();
    let mut index = 0;
    let mut honest: [BTreeMap<usize, usize>; 2] = Default::default();
    let mut simulated: [BTreeMap<usize, usize>; 2] = Default::default();
    let mut counts = [0usize; 2];
    let mut mismatches = [0usize; 2];
    for session in archive {
        for r in &session.transcript.rounds {
            let Some(o) = &r.opening else {
                index += 1;
                continue;
            };
            let answered = o.answers();
            match opened.get(&r.commitments.graph) {
                Some(&prev) if prev != answered => {
                    return Err(AttackError::LeakDetected {
                        round: index,
                        detail: "graph commitment opened for both challenges".into(),
                    });
                }
                _ => {
                    opened.insert(r.commitments.graph, answered);
                }
            }
            let b = r.challenge.bit() as usize;
            counts[b] += 1;
            *honest[b].entry(o.encoded_len()).or_default() += 1;
            let sim = simulate_transcript(&session.graph, r.challenge, rng);
            *simulated[b].entry(sim.opening.encoded_len()).or_default() += 1;
            if shape_ok(&session.graph, o) != shape_ok(&session.graph, &sim.opening) {
                mismatches[b] += 1;
            }
            index += 1;
        }
    }
    let stats: Vec<ChallengeStats> = [Challenge::Cycle, Challenge::Permutation]
        .into_iter()
        .map(|c| {
            let b = c.bit() as usize;
            ChallengeStats {
                challenge: c,
                honest: counts[b],
                simulated: counts[b],
                tv_distance: tv(&honest[b], &simulated[b]),
                shape_mismatches: mismatches[b],
            }
        })
        .collect();
    let indistinguishable = stats
        .iter()
        .all(|s| s.tv_distance <= TV_LIMIT && s.shape_mismatches == 0);
    Ok(DistinguisherReport {
        rounds: index,
        stats,
        indistinguishable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::LeakyProver;
    use crate::graph::HamiltonianCycle;
    use crate::protocol::{initialize_network, NetworkParams};
    use crate::zkp::{run_protocol, HonestProver, RandomChallenger, ScriptedChallenger};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance() -> (Graph, HamiltonianCycle) {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = initialize_network(10, &NetworkParams::default(), &mut rng).unwrap();
        (s.graph, s.cycle)
    }

    #[test]
    fn honest_traffic_is_clean() {
        let (g, hc) = instance();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ch = RandomChallenger::new(ChaCha8Rng::seed_from_u64(2));
        let archive: Vec<CapturedSession> = (0..10)
            .map(|_| {
                let mut p = HonestProver::new(g.clone(), hc.clone()).unwrap();
                CapturedSession {
                    supplicant: crate::graph::NodeId(0),
                    graph: g.clone(),
                    transcript: run_protocol(&mut p, &g, 20, &mut rng, &mut ch).unwrap(),
                }
            })
            .collect();
        let report = eavesdrop_analysis(&archive, &mut rng).unwrap();
        assert_eq!(report.rounds, 200);
        assert!(report.indistinguishable, "{report:?}");
    }

    #[test]
    fn reused_commitment_is_caught() {
        let (g, hc) = instance();
        let mut p = LeakyProver::new(g.clone(), hc).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ch = ScriptedChallenger::new(vec![Challenge::Cycle, Challenge::Cycle, Challenge::Permutation]);
        let t = run_protocol(&mut p, &g, 3, &mut rng, &mut ch).unwrap();
        let archive = [CapturedSession {
            supplicant: crate::graph::NodeId(0),
            graph: g,
            transcript: t,
        }];
        assert_eq!(
            eavesdrop_analysis(&archive, &mut rng).unwrap_err(),
            AttackError::LeakDetected {
                round: 2,
                detail: "graph commitment opened for both challenges".into()
            }
        );
    }
}
