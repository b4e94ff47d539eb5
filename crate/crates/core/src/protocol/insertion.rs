use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use super::{DeviceId, NodeState, ProtocolError};
use crate::graph::{
    find_unique_cycle_adjacent_pair, splice_insert, GraphError, HamiltonianCycle, NodeId,
};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionAnnounce {
    pub authenticator: NodeId,
    pub new_id: NodeId,
    pub device: DeviceId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSetBroadcast {
    pub authenticator: NodeId,
    pub new_id: NodeId,
    pub neighbors: BTreeSet<NodeId>,
    pub device: DeviceId,
}

/// Lowest identifier that is neither a vertex nor `reserved`.
pub fn lowest_unused_id(state: &NodeState, reserved: &BTreeSet<NodeId>) -> NodeId {
    (0u32..)
        .map(NodeId)
        .find(|v| !state.graph.contains_vertex(*v) && !reserved.contains(v))
        .expect("identifier space exhausted")
}

/// Announces a vetted supplicant under a fresh identifier, or under `forced`
/// when the scenario dictates one.
pub fn begin_insertion(
    authenticator: &NodeState,
    device: DeviceId,
    reserved: &BTreeSet<NodeId>,
    forced: Option<NodeId>,
) -> Result<InsertionAnnounce, ProtocolError> {
    if !authenticator.online {
        return Err(ProtocolError::AuthenticatorOffline(authenticator.id));
    }
    let new_id = match forced {
        Some(v) if authenticator.graph.contains_vertex(v) || reserved.contains(&v) => {
            return Err(ProtocolError::DuplicateId(v));
        }
        Some(v) => v,
        None => lowest_unused_id(authenticator, reserved),
    };
    Ok(InsertionAnnounce {
        authenticator: authenticator.id,
        new_id,
        device,
    })
}

/// Orients `(a, b)` so that `b` follows `a` on the cycle.
fn orient(hc: &HamiltonianCycle, a: NodeId, b: NodeId) -> Option<(NodeId, NodeId)> {
    if hc.successor(a) == Some(b) {
        Some((a, b))
    } else if hc.successor(b) == Some(a) {
        Some((b, a))
    } else {
        None
    }
}

/// Picks the splice point and the remaining neighbors once enough members
/// acknowledged the announcement.
///
/// The extra neighbors are drawn from the cycle arc that excludes the splice
/// pair and the vertices right next to it, no two of them consecutive, so
/// the splice pair is the only cycle edge inside the set.
pub fn complete_insertion<R: Rng + ?Sized>(
    authenticator: &NodeState,
    announce: &InsertionAnnounce,
    ack_count: usize,
    degree: usize,
    between: Option<(NodeId, NodeId)>,
    rng: &mut R,
) -> Result<NeighborSetBroadcast, ProtocolError> {
    let members = authenticator.graph.vertex_count();
    if ack_count * 2 < members {
        return Err(ProtocolError::QuorumNotReached {
            answers: ack_count,
            members,
        });
    }
    let hc = &authenticator.cycle;
    let (a, b) = match between {
        Some((x, y)) => orient(hc, x, y).ok_or(ProtocolError::Graph(
            GraphError::NotAdjacentInCycle(x, y),
        ))?,
        None => {
            let order = hc.order();
            let vj = order[rng.gen_range(0..order.len())];
            let (prev, next) = hc.neighbors(vj).expect("vertex on cycle");
            if rng.gen::<bool>() {
                (vj, next)
            } else {
                (prev, vj)
            }
        }
    };
    let extra = degree.saturating_sub(2);
    let len = hc.len();
    // walk from two past b up to two before a
    let start = hc.position(b).expect("vertex on cycle");
    let arc: Vec<NodeId> = (2..len.saturating_sub(2))
        .map(|k| hc.order()[(start + k) % len])
        .collect();
    let p = arc.len();
    if extra > 0 && (p + 1 < 2 * extra) {
        return Err(ProtocolError::Infeasible {
            cycle_len: len,
            degree,
        });
    }
    let mut neighbors: BTreeSet<NodeId> = [a, b].into_iter().collect();
    if extra > 0 {
        // non-consecutive picks from a path: sorted picks over p - extra + 1
        // slots shifted by their rank
        let mut picks = sample(rng, p - extra + 1, extra).into_vec();
        picks.sort_unstable();
        neighbors.extend(picks.into_iter().enumerate().map(|(i, x)| arc[x + i]));
    }
    Ok(NeighborSetBroadcast {
        authenticator: announce.authenticator,
        new_id: announce.new_id,
        neighbors,
        device: announce.device,
    })
}

/// Applies an accepted insertion to one node's view.
pub fn apply_insertion(
    state: &mut NodeState,
    broadcast: &NeighborSetBroadcast,
    now: SimTime,
) -> Result<(NodeId, NodeId), ProtocolError> {
    let v = broadcast.new_id;
    if state.graph.contains_vertex(v) {
        return Err(ProtocolError::DuplicateId(v));
    }
    if let Some(&u) = broadcast.neighbors.iter().find(|&&u| !state.graph.contains_vertex(u)) {
        return Err(ProtocolError::Graph(GraphError::UnknownVertex(u)));
    }
    let (a, b) = find_unique_cycle_adjacent_pair(&broadcast.neighbors, &state.cycle)
        .map_err(ProtocolError::Graph)?;
    state.cycle = splice_insert(&state.cycle, v, a, b).map_err(ProtocolError::Graph)?;
    state.graph.add_vertex(v);
    for &u in &broadcast.neighbors {
        state.graph.add_edge(v, u).map_err(ProtocolError::Graph)?;
    }
    state.advance_stage(now);
    state.inserted_at_stage.insert(v, state.stage);
    state.observed_devices.insert(v, broadcast.device);
    state.record_proof(broadcast.authenticator, now);
    state.record_proof(v, now);
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_hamiltonian_cycle, Graph};
    use crate::protocol::{initialize_with_cycle, NetworkParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_state() -> NodeState {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 2, 6, 5, 1, 10, 0]);
        let params = NetworkParams {
            degree: 4,
            ..Default::default()
        };
        initialize_with_cycle(hc, &params, &mut rng).unwrap().states.remove(4)
    }

    #[test]
    fn min_unused_id() {
        let s = table_state();
        let a = begin_insertion(&s, DeviceId(99), &BTreeSet::new(), None).unwrap();
        assert_eq!(a.new_id, NodeId(11));
        let mut g = Graph::with_vertices([0, 1, 3].map(NodeId));
        for (x, y) in [(0, 1), (1, 3), (3, 0)] {
            g.add_edge(NodeId(x), NodeId(y)).unwrap();
        }
        let small = NodeState::new(NodeId(0), g, HamiltonianCycle::from_ids([0, 1, 3]), DeviceId(0), SimTime(0));
        let a = begin_insertion(&small, DeviceId(9), &BTreeSet::new(), None).unwrap();
        assert_eq!(a.new_id, NodeId(2));
        assert!(matches!(
            begin_insertion(&small, DeviceId(9), &BTreeSet::new(), Some(NodeId(1))),
            Err(ProtocolError::DuplicateId(_))
        ));
    }

    #[test]
    fn quorum_boundary() {
        let s = table_state();
        let ann = begin_insertion(&s, DeviceId(99), &BTreeSet::new(), Some(NodeId(14))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            complete_insertion(&s, &ann, 5, 4, None, &mut rng),
            Err(ProtocolError::QuorumNotReached { answers: 5, members: 11 })
        ));
        assert!(complete_insertion(&s, &ann, 6, 4, None, &mut rng).is_ok());
    }

    #[test]
    fn scripted_splice_point() {
        let mut s = table_state();
        let ann = begin_insertion(&s, DeviceId(99), &BTreeSet::new(), Some(NodeId(14))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bc = complete_insertion(&s, &ann, 7, 4, Some((NodeId(2), NodeId(4))), &mut rng).unwrap();
        assert_eq!(bc.neighbors.len(), 4);
        apply_insertion(&mut s, &bc, SimTime(1200)).unwrap();
        assert_eq!(s.cycle, HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 6, 5, 1, 10, 0]));
        assert_eq!(s.stage, 1);
        assert_eq!(s.graph.degree(NodeId(14)), 4);
        assert!(is_hamiltonian_cycle(&s.graph, &s.cycle));
        assert!(matches!(
            apply_insertion(&mut s, &bc, SimTime(1300)),
            Err(ProtocolError::DuplicateId(_))
        ));
    }

    #[test]
    fn neighbor_sets_are_unambiguous() {
        let s = table_state();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ann = begin_insertion(&s, DeviceId(99), &BTreeSet::new(), None).unwrap();
        for _ in 0..1000 {
            let bc = complete_insertion(&s, &ann, 11, 4, None, &mut rng).unwrap();
            assert_eq!(bc.neighbors.len(), 4);
            find_unique_cycle_adjacent_pair(&bc.neighbors, &s.cycle).unwrap();
        }
    }

    #[test]
    fn infeasible_when_cycle_too_short() {
        let s = table_state();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ann = begin_insertion(&s, DeviceId(99), &BTreeSet::new(), None).unwrap();
        // 7 vertices on the arc fit at most 4 pairwise non-adjacent picks
        assert!(complete_insertion(&s, &ann, 11, 6, None, &mut rng).is_ok());
        assert!(matches!(
            complete_insertion(&s, &ann, 11, 7, None, &mut rng),
            Err(ProtocolError::Infeasible { .. })
        ));
    }
}
