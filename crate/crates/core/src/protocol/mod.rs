//! Per-node lifecycle: dealer setup, insertion, access control, proofs of
//! life and deletion.
//!
//! Functions here act on one [`NodeState`] at a time; delivering messages
//! between nodes is the simulator's job.

mod access;
mod insertion;
mod liveness;
mod message;
mod params;
mod setup;
mod state;

use thiserror::Error;

use crate::graph::{GraphError, NodeId};

pub use access::{access_control, grant_access, AccessClaim, AccessError, AccessOutcome};
pub use insertion::{
    apply_insertion, begin_insertion, complete_insertion, lowest_unused_id, InsertionAnnounce,
    NeighborSetBroadcast,
};
pub use liveness::{
    apply_deletion, emit_proof_of_life, handle_pol_quorum, record_echo, run_deletion_sweep,
    stale_members, DeletionNotice, PolDecision, ProofOfLife, ProofOfLifeEcho,
};
pub use message::{Category, Channel, ProtocolMessage, ZkpPart};
pub use params::NetworkParams;
pub use setup::{initialize_network, initialize_with_cycle, Setup};
pub use state::{graph_digest, DeviceId, NodeState, StageRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("authenticator {0} is off-line")]
    AuthenticatorOffline(NodeId),
    #[error("identifier {0} is already assigned")]
    DuplicateId(NodeId),
    #[error("only {answers} answers for {members} members")]
    QuorumNotReached { answers: usize, members: usize },
    #[error("a cycle of {cycle_len} cannot host a node of degree {degree}")]
    Infeasible { cycle_len: usize, degree: usize },
    #[error("network too small to continue ({members} members)")]
    NetworkTermination { members: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
