use std::fmt;

use rand::{Rng, RngCore};

use super::commitment::CommitmentPair;
use super::prover::{RoundOpening, ZkProver};
use super::ZkpError;
use crate::graph::{
    apply_permutation, canonical_bytes, canonical_bytes_cycle, is_hamiltonian_cycle, Graph,
};

/// The verifier's one-bit question for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Challenge {
    /// Bit 0: show the committed cycle inside the committed graph.
    Cycle,
    /// Bit 1: show the committed graph is a relabeling of the public one.
    Permutation,
}

impl Challenge {
    pub const WIRE_LEN: usize = 1;

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Challenge::Permutation
        } else {
            Challenge::Cycle
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Challenge::Cycle => 0,
            Challenge::Permutation => 1,
        }
    }
}

impl fmt::Display for Challenge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

pub trait ChallengeSource {
    fn next_challenge(&mut self) -> Challenge;
}

/// Uniform challenges from a seeded generator.
pub struct RandomChallenger<R> {
    rng: R,
}

impl<R: RngCore> RandomChallenger<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: RngCore> ChallengeSource for RandomChallenger<R> {
    fn next_challenge(&mut self) -> Challenge {
        Challenge::from_bit(self.rng.gen())
    }
}

/// Replays a fixed challenge sequence, wrapping around when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedChallenger {
    script: Vec<Challenge>,
    pos: usize,
}

impl ScriptedChallenger {
    pub fn new(script: Vec<Challenge>) -> Self {
        assert!(!script.is_empty(), "empty challenge script");
        Self { script, pos: 0 }
    }
}

impl ChallengeSource for ScriptedChallenger {
    fn next_challenge(&mut self) -> Challenge {
        let c = self.script[self.pos % self.script.len()];
        self.pos += 1;
        c
    }
}

/// Checks one round against the public graph `g`.
pub fn verifier_check(
    g: &Graph,
    commitments: &CommitmentPair,
    challenge: Challenge,
    opening: &RoundOpening,
) -> bool {
    match (challenge, opening) {
        (
            Challenge::Cycle,
            RoundOpening::Cycle {
                permuted_graph,
                permuted_cycle,
                graph_nonce,
                cycle_nonce,
            },
        ) => {
            // a relabeling of g keeps its vertex set and edge count
            permuted_graph.vertex_count() == g.vertex_count()
                && permuted_graph.edge_count() == g.edge_count()
                && permuted_graph.vertices().eq(g.vertices())
                && commitments
                    .graph
                    .opens_to(graph_nonce, &canonical_bytes(permuted_graph))
                && commitments
                    .cycle
                    .opens_to(cycle_nonce, &canonical_bytes_cycle(permuted_cycle))
                && is_hamiltonian_cycle(permuted_graph, permuted_cycle)
        }
        (
            Challenge::Permutation,
            RoundOpening::Permutation {
                permutation,
                graph_nonce,
            },
        ) => match apply_permutation(g, permutation) {
            Ok(pg) => commitments.graph.opens_to(graph_nonce, &canonical_bytes(&pg)),
            Err(_) => false,
        },
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptRound {
    pub commitments: CommitmentPair,
    pub challenge: Challenge,
    /// `None` when the prover could not answer.
    pub opening: Option<RoundOpening>,
    pub verified: bool,
}

impl TranscriptRound {
    /// Bytes on the wire for this round: commitments, challenge, opening.
    pub fn wire_len(&self) -> usize {
        CommitmentPair::WIRE_LEN
            + Challenge::WIRE_LEN
            + self.opening.as_ref().map_or(0, RoundOpening::encoded_len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: Vec<TranscriptRound>,
    pub verdict: Verdict,
    pub requested_rounds: usize,
}

impl Transcript {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn challenges(&self) -> Vec<Challenge> {
        self.rounds.iter().map(|r| r.challenge).collect()
    }

    pub fn wire_len(&self) -> usize {
        self.rounds.iter().map(TranscriptRound::wire_len).sum()
    }
}

/// Runs up to `rounds` rounds of the proof, stopping at the first failure.
pub fn run_protocol(
    prover: &mut dyn ZkProver,
    graph: &Graph,
    rounds: usize,
    rng: &mut dyn RngCore,
    challenger: &mut dyn ChallengeSource,
) -> Result<Transcript, ZkpError> {
    if rounds == 0 {
        return Err(ZkpError::ZeroRounds);
    }
    let mut log = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let commitments = prover.commit(rng);
        let challenge = challenger.next_challenge();
        let opening = prover.respond(challenge).ok();
        let verified = opening
            .as_ref()
            .is_some_and(|o| verifier_check(graph, &commitments, challenge, o));
        log.push(TranscriptRound {
            commitments,
            challenge,
            opening,
            verified,
        });
        if !verified {
            return Ok(Transcript {
                rounds: log,
                verdict: Verdict::Reject,
                requested_rounds: rounds,
            });
        }
    }
    Ok(Transcript {
        rounds: log,
        verdict: Verdict::Accept,
        requested_rounds: rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{HamiltonianCycle, NodeId};
    use crate::zkp::{prover_commit, prover_respond, CheatingProver, HonestProver};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wheel() -> (Graph, HamiltonianCycle) {
        // 6-cycle with a hub-like chord set
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4)];
        let g = Graph::from_edges((0..6).map(NodeId), edges.map(|(a, b)| (NodeId(a), NodeId(b))))
            .unwrap();
        (g, HamiltonianCycle::from_ids(0..6))
    }

    #[test]
    fn honest_session_accepts() {
        let (g, hc) = wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ch = RandomChallenger::new(ChaCha8Rng::seed_from_u64(10));
        let mut p = HonestProver::new(g.clone(), hc).unwrap();
        let t = run_protocol(&mut p, &g, 20, &mut rng, &mut ch).unwrap();
        assert!(t.accepted());
        assert_eq!(t.rounds.len(), 20);
    }

    #[test]
    fn zero_rounds() {
        let (g, hc) = wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ch = ScriptedChallenger::new(vec![Challenge::Cycle]);
        let mut p = HonestProver::new(g.clone(), hc).unwrap();
        assert_eq!(
            run_protocol(&mut p, &g, 0, &mut rng, &mut ch),
            Err(ZkpError::ZeroRounds)
        );
    }

    #[test]
    fn flipped_edge_breaks_binding() {
        let (g, hc) = wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut s, pair) = prover_commit(&g, &hc, &mut rng).unwrap();
        let mut opening = prover_respond(&mut s, Challenge::Cycle).unwrap();
        if let RoundOpening::Cycle { permuted_graph, .. } = &mut opening {
            let (a, b) = permuted_graph.edges().next().unwrap();
            permuted_graph.remove_edge(a, b);
            let (x, y) = permuted_graph
                .vertices()
                .flat_map(|x| permuted_graph.vertices().map(move |y| (x, y)))
                .find(|&(x, y)| x < y && !permuted_graph.has_edge(x, y) && (x, y) != (a, b))
                .unwrap();
            permuted_graph.add_edge(x, y).unwrap();
        }
        assert!(!verifier_check(&g, &pair, Challenge::Cycle, &opening));
    }

    #[test]
    fn stale_graph_rejected() {
        let (g, hc) = wheel();
        let mut other = g.clone();
        other.add_edge(NodeId(2), NodeId(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut ch = RandomChallenger::new(ChaCha8Rng::seed_from_u64(13));
        let mut p = HonestProver::new(g, hc).unwrap();
        let t = run_protocol(&mut p, &other, 20, &mut rng, &mut ch).unwrap();
        assert!(!t.accepted());
    }

    #[test]
    fn mismatched_variant_rejected() {
        let (g, hc) = wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (mut s, pair) = prover_commit(&g, &hc, &mut rng).unwrap();
        let opening = prover_respond(&mut s, Challenge::Permutation).unwrap();
        assert!(!verifier_check(&g, &pair, Challenge::Cycle, &opening));
    }

    #[test]
    fn cheater_survives_about_half_the_rounds() {
        let (g, _) = wheel();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut ch = RandomChallenger::new(ChaCha8Rng::seed_from_u64(16));
        let mut p = CheatingProver::new(g.clone());
        let trials = 4000;
        let mut ok = 0;
        for _ in 0..trials {
            let t = run_protocol(&mut p, &g, 1, &mut rng, &mut ch).unwrap();
            ok += t.accepted() as u32;
        }
        let rate = ok as f64 / trials as f64;
        assert!((rate - 0.5).abs() < 0.04, "rate {rate}");
    }

    #[test]
    fn scripted_wraps() {
        let mut s = ScriptedChallenger::new(vec![Challenge::Cycle, Challenge::Permutation]);
        let got: Vec<u8> = (0..5).map(|_| s.next_challenge().bit()).collect();
        assert_eq!(got, vec![0, 1, 0, 1, 0]);
    }
}
