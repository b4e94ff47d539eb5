use std::collections::BTreeSet;

use rand::RngCore;
use thiserror::Error;

use super::{graph_digest, NetworkParams, NodeState};
use crate::graph::NodeId;
use crate::time::SimTime;
use crate::zkp::{run_protocol, ChallengeSource, Transcript, ZkProver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccessError {
    #[error("authenticator {0} is off-line")]
    AuthenticatorOffline(NodeId),
    #[error("node {0} is already on-line")]
    DuplicateOnline(NodeId),
    #[error("node {0} was off-line for longer than the threshold period")]
    Expired(NodeId),
    #[error("node {0} is not a member at the presented stage")]
    NotAMember(NodeId),
    #[error("stage {0} is unknown to the authenticator")]
    UnknownStage(u64),
    #[error("zero-knowledge proof failed")]
    ZkpFailed(Box<Transcript>),
}

/// What a returning node presents to its authenticator in the clear.
#[derive(Debug, Clone, Copy)]
pub struct AccessClaim<'a> {
    pub id: NodeId,
    pub stage: u64,
    pub graph: &'a crate::graph::Graph,
    pub offline_since: Option<SimTime>,
}

impl<'a> AccessClaim<'a> {
    pub fn of(state: &'a NodeState) -> Self {
        Self {
            id: state.id,
            stage: state.last_online_stage,
            graph: &state.graph,
            offline_since: state.offline_since,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AccessOutcome {
    pub transcript: Transcript,
    /// The supplicant proved knowledge for a stage that is no longer current.
    pub stale_stage: bool,
}

/// Vets a returning node: expiry, stage and membership, duplicate identity,
/// then the zero-knowledge proof against the graph the supplicant presents.
#[allow(clippy::too_many_arguments)]
pub fn access_control(
    authenticator: &NodeState,
    claim: AccessClaim<'_>,
    prover: &mut dyn ZkProver,
    now: SimTime,
    params: &NetworkParams,
    online_members: &BTreeSet<NodeId>,
    rng: &mut dyn RngCore,
    challenger: &mut dyn ChallengeSource,
) -> Result<AccessOutcome, AccessError> {
    if !authenticator.online {
        return Err(AccessError::AuthenticatorOffline(authenticator.id));
    }
    if let Some(since) = claim.offline_since {
        if now.since(since) > params.period {
            return Err(AccessError::Expired(claim.id));
        }
    }
    let record = authenticator
        .stage_record(claim.stage)
        .ok_or(AccessError::UnknownStage(claim.stage))?;
    if record.digest != graph_digest(claim.graph) {
        return Err(AccessError::UnknownStage(claim.stage));
    }
    match authenticator.inserted_at_stage.get(&claim.id) {
        Some(&joined) if joined <= claim.stage && claim.graph.contains_vertex(claim.id) => {}
        _ => return Err(AccessError::NotAMember(claim.id)),
    }
    if online_members.contains(&claim.id) {
        return Err(AccessError::DuplicateOnline(claim.id));
    }
    let transcript = run_protocol(prover, claim.graph, params.rounds, rng, challenger)
        .expect("rounds validated with the parameters");
    if !transcript.accepted() {
        return Err(AccessError::ZkpFailed(Box::new(transcript)));
    }
    Ok(AccessOutcome {
        transcript,
        stale_stage: claim.stage != authenticator.stage,
    })
}

/// Hands the authenticator's current view to an accepted supplicant.
pub fn grant_access(authenticator: &NodeState, supplicant: &mut NodeState, now: SimTime) {
    supplicant.adopt_view(authenticator);
    supplicant.online = true;
    supplicant.offline_since = None;
    supplicant.clock_origin = now;
    supplicant.record_proof(authenticator.id, now);
    supplicant.record_proof(supplicant.id, now);
}
