//! Adversaries against the access-control proof and the membership
//! protocol. They only see what travels over the open channel: the public
//! graph, commitments, challenges and openings.

mod eavesdrop;
mod tamper;

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{is_hamiltonian_cycle, Graph, HamiltonianCycle, NodeId};
use crate::protocol::{DeviceId, NodeState};
use crate::zkp::{
    prover_commit, prover_respond, verifier_check, Challenge, ChallengeSource, CommitmentPair,
    RoundOpening, Transcript, TranscriptRound, Verdict, ZkProver, ZkpError,
};

pub use eavesdrop::{eavesdrop_analysis, ChallengeStats, DistinguisherReport};
pub use tamper::{tamper_neighbor_set, tamper_opening, Tamper};

/// Honest session as overheard on the open channel.
#[derive(Debug, Clone)]
pub struct CapturedSession {
    pub supplicant: NodeId,
    pub graph: Graph,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Replay,
    Spoof,
    SybilInsert,
    SybilAccess,
    SybilPol,
    Eavesdrop,
}

#[derive(Debug, Clone)]
pub struct AdversaryProfile {
    pub kind: AdversaryKind,
    pub target: Option<NodeId>,
    pub captured: Vec<CapturedSession>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("leak at round {round}: {detail}")]
    LeakDetected { round: usize, detail: String },
}

/// Plays a recorded transcript back to a verifier that asks `rounds` fresh
/// challenges. Each round passes only when the fresh challenge equals the
/// recorded one.
pub fn replay_attack(
    captured: &Transcript,
    graph: &Graph,
    rounds: usize,
    challenger: &mut dyn ChallengeSource,
) -> Transcript {
    let mut log = Vec::new();
    for i in 0..rounds {
        let Some(old) = captured.rounds.get(i) else {
            break;
        };
        let challenge = challenger.next_challenge();
        let verified = old
            .opening
            .as_ref()
            .is_some_and(|o| verifier_check(graph, &old.commitments, challenge, o));
        log.push(TranscriptRound {
            commitments: old.commitments,
            challenge,
            opening: old.opening.clone(),
            verified,
        });
        if !verified {
            break;
        }
    }
    let verdict = if log.len() == rounds && log.iter().all(|r| r.verified) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Transcript {
        rounds: log,
        verdict,
        requested_rounds: rounds,
    }
}

/// Faulty prover that reuses one commitment for every round, so over a
/// session it ends up opening the same commitment both ways.
pub struct LeakyProver {
    graph: Graph,
    cycle: HamiltonianCycle,
    seed: Option<ChaCha8Rng>,
}

impl LeakyProver {
    pub fn new(graph: Graph, cycle: HamiltonianCycle) -> Result<Self, ZkpError> {
        if !is_hamiltonian_cycle(&graph, &cycle) {
            return Err(ZkpError::InvalidWitness);
        }
        Ok(Self {
            graph,
            cycle,
            seed: None,
        })
    }
}

impl ZkProver for LeakyProver {
    fn commit(&mut self, rng: &mut dyn RngCore) -> CommitmentPair {
        let seed = self
            .seed
            .get_or_insert_with(|| ChaCha8Rng::from_rng(rng).expect("rng never fails"));
        prover_commit(&self.graph, &self.cycle, &mut seed.clone())
            .expect("witness checked")
            .1
    }

    fn respond(&mut self, challenge: Challenge) -> Result<RoundOpening, ZkpError> {
        let mut seed = self.seed.clone().ok_or(ZkpError::SecretAlreadyUsed)?;
        let (mut secret, _) = prover_commit(&self.graph, &self.cycle, &mut seed)?;
        prover_respond(&mut secret, challenge)
    }
}

/// A proof of life claiming `claimed` but sent from `device` conflicts with
/// what `observer` knows. Returns the identifier the device is known under,
/// if any.
pub fn conflicting_device(
    observer: &NodeState,
    claimed: NodeId,
    device: DeviceId,
) -> Option<Option<NodeId>> {
    match observer.observed_devices.get(&claimed) {
        Some(&d) if d != device => Some(
            observer
                .observed_devices
                .iter()
                .find(|&(&v, &d)| d == device && v != claimed)
                .map(|(&v, _)| v),
        ),
        _ => None,
    }
}

/// Device bindings an observer holds, inverted.
pub fn ids_by_device(observer: &NodeState) -> BTreeMap<DeviceId, Vec<NodeId>> {
    let mut out: BTreeMap<DeviceId, Vec<NodeId>> = BTreeMap::new();
    for (&v, &d) in &observer.observed_devices {
        out.entry(d).or_default().push(v);
    }
    out
}
