//! Transcript simulator: produces accepting rounds without a witness, given
//! the challenge in advance.

use rand::seq::SliceRandom;
use rand::Rng;

use super::commitment::{random_nonce, Commitment, CommitmentPair};
use super::prover::RoundOpening;
use super::session::Challenge;
use crate::graph::{
    apply_permutation, canonical_bytes, canonical_bytes_cycle, Graph, HamiltonianCycle, NodeId,
    Permutation,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedRound {
    pub commitments: CommitmentPair,
    pub challenge: Challenge,
    pub opening: RoundOpening,
}

/// Random graph over `vertices` with `edge_count` edges (capped at the
/// complete graph) containing a random Hamiltonian cycle.
pub fn planted_cycle_graph<I, R>(vertices: I, edge_count: usize, rng: &mut R) -> (Graph, HamiltonianCycle)
where
    I: IntoIterator<Item = NodeId>,
    R: Rng + ?Sized,
{
    let mut order: Vec<NodeId> = vertices.into_iter().collect();
    order.sort();
    order.dedup();
    order.shuffle(rng);
    let n = order.len();
    let mut g = Graph::with_vertices(order.iter().copied());
    if n >= 3 {
        for i in 0..n {
            g.add_edge(order[i], order[(i + 1) % n]).expect("distinct vertices");
        }
    }
    let target = edge_count.min(n * n.saturating_sub(1) / 2);
    if target > g.edge_count() {
        let mut missing: Vec<(NodeId, NodeId)> = Vec::new();
        let sorted: Vec<NodeId> = g.vertices().collect();
        for (i, &a) in sorted.iter().enumerate() {
            for &b in &sorted[i + 1..] {
                if !g.has_edge(a, b) {
                    missing.push((a, b));
                }
            }
        }
        let need = target - g.edge_count();
        for &(a, b) in missing.choose_multiple(rng, need) {
            g.add_edge(a, b).expect("distinct vertices");
        }
    }
    (g, HamiltonianCycle::new(order))
}

/// One accepting round for `challenge`, built from the public graph alone.
pub fn simulate_transcript<R: Rng + ?Sized>(
    g: &Graph,
    challenge: Challenge,
    rng: &mut R,
) -> SimulatedRound {
    let graph_nonce = random_nonce(rng);
    let cycle_nonce = random_nonce(rng);
    match challenge {
        Challenge::Permutation => {
            let permutation = Permutation::random(g.vertices(), rng);
            let pg = apply_permutation(g, &permutation).expect("permutation over own vertices");
            let mut dummy: Vec<NodeId> = g.vertices().collect();
            dummy.shuffle(rng);
            let commitments = CommitmentPair {
                graph: Commitment::to(&graph_nonce, &canonical_bytes(&pg)),
                cycle: Commitment::to(&cycle_nonce, &canonical_bytes_cycle(&HamiltonianCycle::new(dummy))),
            };
            SimulatedRound {
                commitments,
                challenge,
                opening: RoundOpening::Permutation {
                    permutation,
                    graph_nonce,
                },
            }
        }
        Challenge::Cycle => {
            let (pg, hc) = planted_cycle_graph(g.vertices(), g.edge_count(), rng);
            let commitments = CommitmentPair {
                graph: Commitment::to(&graph_nonce, &canonical_bytes(&pg)),
                cycle: Commitment::to(&cycle_nonce, &canonical_bytes_cycle(&hc)),
            };
            SimulatedRound {
                commitments,
                challenge,
                opening: RoundOpening::Cycle {
                    permuted_graph: pg,
                    permuted_cycle: hc,
                    graph_nonce,
                    cycle_nonce,
                },
            }
        }
    }
}
