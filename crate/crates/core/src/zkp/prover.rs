use rand::{Rng, RngCore};

use super::commitment::{random_nonce, Commitment, CommitmentPair, Nonce, NONCE_LEN};
use super::session::Challenge;
use super::simulator::planted_cycle_graph;
use super::ZkpError;
use crate::graph::{
    apply_permutation, apply_permutation_to_cycle, canonical_bytes, canonical_bytes_cycle,
    is_hamiltonian_cycle, permutation_bytes, Graph, HamiltonianCycle, Permutation,
};

/// The prover's answer to one challenge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOpening {
    /// Answer to challenge 0: both commitments opened.
    Cycle {
        permuted_graph: Graph,
        permuted_cycle: HamiltonianCycle,
        graph_nonce: Nonce,
        cycle_nonce: Nonce,
    },
    /// Answer to challenge 1: the relabeling and the graph nonce.
    Permutation {
        permutation: Permutation,
        graph_nonce: Nonce,
    },
}

impl RoundOpening {
    pub fn answers(&self) -> Challenge {
        match self {
            RoundOpening::Cycle { .. } => Challenge::Cycle,
            RoundOpening::Permutation { .. } => Challenge::Permutation,
        }
    }

    /// Wire form: a tag byte, then length-prefixed canonical sections, then
    /// the nonces.
    pub fn encode(&self) -> Vec<u8> {
        fn section(out: &mut Vec<u8>, bytes: &[u8]) {
            out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
            out.extend_from_slice(bytes);
        }
        let mut out = Vec::new();
        match self {
            RoundOpening::Cycle {
                permuted_graph,
                permuted_cycle,
                graph_nonce,
                cycle_nonce,
            } => {
                out.push(0);
                section(&mut out, &canonical_bytes(permuted_graph));
                section(&mut out, &canonical_bytes_cycle(permuted_cycle));
                out.extend_from_slice(graph_nonce);
                out.extend_from_slice(cycle_nonce);
            }
            RoundOpening::Permutation {
                permutation,
                graph_nonce,
            } => {
                out.push(1);
                section(&mut out, &permutation_bytes(permutation));
                out.extend_from_slice(graph_nonce);
            }
        }
        out
    }

    pub fn encoded_len(&self) -> usize {
        match self {
            RoundOpening::Cycle {
                permuted_graph,
                permuted_cycle,
                ..
            } => {
                1 + 4
                    + (8 + 4 * permuted_graph.vertex_count() + 8 * permuted_graph.edge_count())
                    + 4
                    + (4 + 4 * permuted_cycle.len())
                    + 2 * NONCE_LEN
            }
            RoundOpening::Permutation { permutation, .. } => {
                1 + 4 + (4 + 8 * permutation.len()) + NONCE_LEN
            }
        }
    }
}

/// Private state of one committed round. Answers exactly one challenge.
#[derive(Debug)]
pub struct RoundSecret {
    permutation: Permutation,
    permuted_graph: Graph,
    permuted_cycle: HamiltonianCycle,
    graph_nonce: Nonce,
    cycle_nonce: Nonce,
    consumed: bool,
}

impl RoundSecret {
    pub fn is_consumed(&self) -> bool {
        self.consumed
    }
}

/// Chooses a fresh permutation and commits to the permuted graph and cycle.
pub fn prover_commit<R: Rng + ?Sized>(
    g: &Graph,
    hc: &HamiltonianCycle,
    rng: &mut R,
) -> Result<(RoundSecret, CommitmentPair), ZkpError> {
    if !is_hamiltonian_cycle(g, hc) {
        return Err(ZkpError::InvalidWitness);
    }
    let permutation = Permutation::random(g.vertices(), rng);
    let permuted_graph =
        apply_permutation(g, &permutation).map_err(|_| ZkpError::InvalidWitness)?;
    let permuted_cycle =
        apply_permutation_to_cycle(hc, &permutation).map_err(|_| ZkpError::InvalidWitness)?;
    let graph_nonce = random_nonce(rng);
    let cycle_nonce = random_nonce(rng);
    let pair = CommitmentPair {
        graph: Commitment::to(&graph_nonce, &canonical_bytes(&permuted_graph)),
        cycle: Commitment::to(&cycle_nonce, &canonical_bytes_cycle(&permuted_cycle)),
    };
    let secret = RoundSecret {
        permutation,
        permuted_graph,
        permuted_cycle,
        graph_nonce,
        cycle_nonce,
        consumed: false,
    };
    Ok((secret, pair))
}

/// Opens the round for `challenge`. A second call on the same secret fails.
pub fn prover_respond(
    secret: &mut RoundSecret,
    challenge: Challenge,
) -> Result<RoundOpening, ZkpError> {
    if secret.consumed {
        return Err(ZkpError::SecretAlreadyUsed);
    }
    secret.consumed = true;
    Ok(match challenge {
        Challenge::Cycle => RoundOpening::Cycle {
            permuted_graph: secret.permuted_graph.clone(),
            permuted_cycle: secret.permuted_cycle.clone(),
            graph_nonce: secret.graph_nonce,
            cycle_nonce: secret.cycle_nonce,
        },
        Challenge::Permutation => RoundOpening::Permutation {
            permutation: secret.permutation.clone(),
            graph_nonce: secret.graph_nonce,
        },
    })
}

/// Prover side of a session, driven round by round by [`run_protocol`].
///
/// [`run_protocol`]: super::run_protocol
pub trait ZkProver {
    fn commit(&mut self, rng: &mut dyn RngCore) -> CommitmentPair;
    fn respond(&mut self, challenge: Challenge) -> Result<RoundOpening, ZkpError>;
}

/// Prover holding a genuine witness.
#[derive(Debug)]
pub struct HonestProver {
    graph: Graph,
    cycle: HamiltonianCycle,
    pending: Option<RoundSecret>,
}

impl HonestProver {
    pub fn new(graph: Graph, cycle: HamiltonianCycle) -> Result<Self, ZkpError> {
        if !is_hamiltonian_cycle(&graph, &cycle) {
            return Err(ZkpError::InvalidWitness);
        }
        Ok(Self {
            graph,
            cycle,
            pending: None,
        })
    }
}

impl ZkProver for HonestProver {
    fn commit(&mut self, rng: &mut dyn RngCore) -> CommitmentPair {
        let (secret, pair) =
            prover_commit(&self.graph, &self.cycle, rng).expect("witness checked at construction");
        self.pending = Some(secret);
        pair
    }

    fn respond(&mut self, challenge: Challenge) -> Result<RoundOpening, ZkpError> {
        let mut secret = self.pending.take().ok_or(ZkpError::SecretAlreadyUsed)?;
        prover_respond(&mut secret, challenge)
    }
}

/// Prover without a witness that guesses the challenge before committing.
///
/// Guessing `Cycle`, it commits to an unrelated graph with a planted cycle;
/// guessing `Permutation`, it commits honestly to a permuted copy of the
/// public graph and to a dummy cycle. Whatever the verifier asks, it can only
/// hand out the opening it prepared.
#[derive(Debug)]
pub struct CheatingProver {
    graph: Graph,
    prepared: Option<RoundOpening>,
}

impl CheatingProver {
    pub fn new(graph: Graph) -> Self {
        Self {
            graph,
            prepared: None,
        }
    }
}

impl ZkProver for CheatingProver {
    fn commit(&mut self, rng: &mut dyn RngCore) -> CommitmentPair {
        let graph_nonce = random_nonce(rng);
        let cycle_nonce = random_nonce(rng);
        let (opening, pair) = if rng.gen::<bool>() {
            let (fake_graph, fake_cycle) =
                planted_cycle_graph(self.graph.vertices(), self.graph.edge_count(), rng);
            let pair = CommitmentPair {
                graph: Commitment::to(&graph_nonce, &canonical_bytes(&fake_graph)),
                cycle: Commitment::to(&cycle_nonce, &canonical_bytes_cycle(&fake_cycle)),
            };
            let opening = RoundOpening::Cycle {
                permuted_graph: fake_graph,
                permuted_cycle: fake_cycle,
                graph_nonce,
                cycle_nonce,
            };
            (opening, pair)
        } else {
            let permutation = Permutation::random(self.graph.vertices(), rng);
            let permuted =
                apply_permutation(&self.graph, &permutation).expect("permutation over own vertices");
            let dummy = HamiltonianCycle::new(
                Permutation::random(self.graph.vertices(), rng)
                    .pairs()
                    .map(|(_, b)| b)
                    .collect(),
            );
            let pair = CommitmentPair {
                graph: Commitment::to(&graph_nonce, &canonical_bytes(&permuted)),
                cycle: Commitment::to(&cycle_nonce, &canonical_bytes_cycle(&dummy)),
            };
            (
                RoundOpening::Permutation {
                    permutation,
                    graph_nonce,
                },
                pair,
            )
        };
        self.prepared = Some(opening);
        pair
    }

    fn respond(&mut self, _challenge: Challenge) -> Result<RoundOpening, ZkpError> {
        self.prepared.take().ok_or(ZkpError::SecretAlreadyUsed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::zkp::verifier_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> (Graph, HamiltonianCycle) {
        let g = Graph::from_edges(
            [0, 1, 2].map(NodeId),
            [(0, 1), (1, 2), (0, 2)].map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap();
        (g, HamiltonianCycle::from_ids([0, 1, 2]))
    }

    #[test]
    fn triangle_opens_under_both_challenges() {
        let (g, hc) = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for ch in [Challenge::Cycle, Challenge::Permutation] {
            let (mut secret, pair) = prover_commit(&g, &hc, &mut rng).unwrap();
            let opening = prover_respond(&mut secret, ch).unwrap();
            assert_eq!(opening.answers(), ch);
            assert!(verifier_check(&g, &pair, ch, &opening));
        }
    }

    #[test]
    fn second_answer_is_refused() {
        let (g, hc) = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (mut secret, _) = prover_commit(&g, &hc, &mut rng).unwrap();
        prover_respond(&mut secret, Challenge::Cycle).unwrap();
        assert!(secret.is_consumed());
        assert_eq!(
            prover_respond(&mut secret, Challenge::Permutation),
            Err(ZkpError::SecretAlreadyUsed)
        );
    }

    #[test]
    fn invalid_witness() {
        let (g, _) = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bad = HamiltonianCycle::from_ids([0, 1]);
        assert!(matches!(prover_commit(&g, &bad, &mut rng), Err(ZkpError::InvalidWitness)));
        assert!(matches!(HonestProver::new(g, bad), Err(ZkpError::InvalidWitness)));
    }

    #[test]
    fn encoded_len_matches_encoding() {
        let (g, hc) = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for ch in [Challenge::Cycle, Challenge::Permutation] {
            let (mut secret, _) = prover_commit(&g, &hc, &mut rng).unwrap();
            let opening = prover_respond(&mut secret, ch).unwrap();
            assert_eq!(opening.encode().len(), opening.encoded_len());
        }
    }

    #[test]
    fn permutation_opening_carries_no_cycle() {
        let (g, hc) = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut secret, _) = prover_commit(&g, &hc, &mut rng).unwrap();
        match prover_respond(&mut secret, Challenge::Permutation).unwrap() {
            RoundOpening::Permutation { .. } => {}
            other => panic!("unexpected opening {other:?}"),
        }
    }
}
