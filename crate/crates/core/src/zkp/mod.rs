//! Interactive zero-knowledge proof of knowledge of a Hamiltonian cycle.
//!
//! Each round the prover commits to a freshly permuted copy of the public
//! graph and of its secret cycle. The verifier answers with one challenge bit:
//! `0` asks to open both commitments and show the permuted cycle is a
//! Hamiltonian cycle of the permuted graph, `1` asks for the permutation so
//! the graph commitment can be recomputed from the public graph. A prover that
//! only prepared for one of the two questions survives a round with
//! probability one half.
//!
//! Commitments are `SHA-256(nonce || payload)` with a 16-byte random nonce
//! revealed on opening.

mod commitment;
mod prover;
mod session;
mod simulator;

use thiserror::Error;

pub use commitment::{Commitment, CommitmentPair, Nonce, DIGEST_LEN, HASH_ID, NONCE_LEN};
pub use prover::{
    prover_commit, prover_respond, CheatingProver, HonestProver, RoundOpening, RoundSecret,
    ZkProver,
};
pub use session::{
    run_protocol, verifier_check, Challenge, ChallengeSource, RandomChallenger,
    ScriptedChallenger, Transcript, TranscriptRound, Verdict,
};
pub use simulator::{planted_cycle_graph, simulate_transcript, SimulatedRound};

/// Default number of rounds per session: soundness error at most 2^-20.
pub const DEFAULT_ROUNDS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZkpError {
    #[error("the supplied cycle is not a Hamiltonian cycle of the graph")]
    InvalidWitness,
    #[error("round secret has already answered a challenge")]
    SecretAlreadyUsed,
    #[error("a session needs at least one round")]
    ZeroRounds,
}
