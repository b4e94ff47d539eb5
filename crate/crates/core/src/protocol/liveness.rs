use std::collections::BTreeSet;

use super::{NodeState, ProtocolError};
use crate::graph::{splice_delete, GraphError, NodeId};
use crate::time::{SimDuration, SimTime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofOfLife {
    pub sender: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofOfLifeEcho {
    pub initiator: NodeId,
    /// Every node whose proof was received, the initiator included.
    pub senders: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionNotice {
    pub initiator: NodeId,
    pub deleted: NodeId,
    /// Cycle neighbors joined by the deletion.
    pub bridge: (NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolDecision {
    Echo(ProofOfLifeEcho),
    Withdraw,
}

/// A node speaks up once its clock strictly exceeds the period.
pub fn emit_proof_of_life(
    state: &NodeState,
    now: SimTime,
    period: SimDuration,
) -> Option<ProofOfLife> {
    (state.online && state.clock(now) > period).then_some(ProofOfLife { sender: state.id })
}

pub fn handle_pol_quorum(initiator: &NodeState, answers: &BTreeSet<NodeId>) -> PolDecision {
    let members = initiator.graph.vertex_count();
    let answered: BTreeSet<NodeId> = answers
        .iter()
        .copied()
        .filter(|&v| v != initiator.id)
        .collect();
    if answered.len() * 2 < members {
        return PolDecision::Withdraw;
    }
    let mut senders = answered;
    senders.insert(initiator.id);
    PolDecision::Echo(ProofOfLifeEcho {
        initiator: initiator.id,
        senders,
    })
}

/// Stores the echoed proofs. The initiator also restarts its clock.
pub fn record_echo(state: &mut NodeState, echo: &ProofOfLifeEcho, now: SimTime, period: SimDuration) {
    for &v in &echo.senders {
        state.record_proof(v, now);
    }
    state.prune_proofs(now, period);
    if state.id == echo.initiator {
        state.clock_origin = now;
    }
}

/// Members without a proof of life in the last `period`, ascending.
pub fn stale_members(state: &NodeState, now: SimTime, period: SimDuration) -> Vec<NodeId> {
    let fresh = state.freshest_proofs();
    state
        .graph
        .vertices()
        .filter(|v| fresh.get(v).is_none_or(|&t| now.since(t) > period))
        .collect()
}

/// Removes `v` and joins its cycle neighbors, in graph and cycle alike.
pub fn apply_deletion(
    state: &mut NodeState,
    v: NodeId,
    now: SimTime,
) -> Result<(NodeId, NodeId), ProtocolError> {
    let (cycle, (a, b)) = splice_delete(&state.cycle, v).map_err(|e| match e {
        GraphError::CycleTooSmall { len } => ProtocolError::NetworkTermination { members: len },
        other => ProtocolError::Graph(other),
    })?;
    state.cycle = cycle;
    state.graph.remove_vertex(v);
    state.graph.add_edge(a, b).map_err(ProtocolError::Graph)?;
    state.inserted_at_stage.remove(&v);
    state.observed_devices.remove(&v);
    state.advance_stage(now);
    Ok((a, b))
}

/// Deletes every stale member from the initiator's view and returns the
/// notices to broadcast with the echo.
pub fn run_deletion_sweep(
    state: &mut NodeState,
    now: SimTime,
    period: SimDuration,
) -> Result<Vec<DeletionNotice>, ProtocolError> {
    state.prune_proofs(now, period);
    let mut notices = Vec::new();
    for v in stale_members(state, now, period) {
        let bridge = apply_deletion(state, v, now)?;
        notices.push(DeletionNotice {
            initiator: state.id,
            deleted: v,
            bridge,
        });
    }
    Ok(notices)
}
