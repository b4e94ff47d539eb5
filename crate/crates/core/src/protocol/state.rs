use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::{canonical_bytes, canonical_bytes_cycle, is_hamiltonian_cycle, Graph, HamiltonianCycle, NodeId};
use crate::time::{SimDuration, SimTime};

/// Physical device behind a node identifier. Never changes when the device
/// re-enters the network under a new identifier.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct DeviceId(pub u64);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dev{}", self.0)
    }
}

pub fn graph_digest(g: &Graph) -> [u8; 32] {
    Sha256::digest(canonical_bytes(g)).into()
}

/// One past stage known to a node, kept while a supplicant could still
/// legitimately present it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: u64,
    pub digest: [u8; 32],
    pub superseded_at: Option<SimTime>,
}

#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: NodeId,
    pub graph: Graph,
    pub cycle: HamiltonianCycle,
    pub stage: u64,
    /// Instant of the last proof of life or duty that reset the clock.
    pub clock_origin: SimTime,
    /// Proofs of life received, oldest first.
    pub pol_queue: VecDeque<(NodeId, SimTime)>,
    pub online: bool,
    pub last_online_stage: u64,
    pub offline_since: Option<SimTime>,
    pub history: Vec<StageRecord>,
    /// Stage at which each current member joined.
    pub inserted_at_stage: BTreeMap<NodeId, u64>,
    pub device: DeviceId,
    pub observed_devices: BTreeMap<NodeId, DeviceId>,
}

impl NodeState {
    pub fn new(
        id: NodeId,
        graph: Graph,
        cycle: HamiltonianCycle,
        device: DeviceId,
        now: SimTime,
    ) -> Self {
        let history = vec![StageRecord {
            stage: 0,
            digest: graph_digest(&graph),
            superseded_at: None,
        }];
        let inserted_at_stage = graph.vertices().map(|v| (v, 0)).collect();
        Self {
            id,
            graph,
            cycle,
            stage: 0,
            clock_origin: now,
            pol_queue: VecDeque::new(),
            online: true,
            last_online_stage: 0,
            offline_since: None,
            history,
            inserted_at_stage,
            device,
            observed_devices: BTreeMap::new(),
        }
    }

    pub fn clock(&self, now: SimTime) -> SimDuration {
        now.since(self.clock_origin)
    }

    pub fn is_consistent(&self) -> bool {
        is_hamiltonian_cycle(&self.graph, &self.cycle)
    }

    /// Bytes that every on-line node must agree on.
    pub fn shared_view(&self) -> Vec<u8> {
        let mut out = self.stage.to_be_bytes().to_vec();
        out.extend(canonical_bytes(&self.graph));
        out.extend(canonical_bytes_cycle(&self.cycle));
        out
    }

    /// Moves to the next stage after the graph and cycle were edited.
    pub fn advance_stage(&mut self, now: SimTime) {
        if let Some(last) = self.history.last_mut() {
            last.superseded_at = Some(now);
        }
        self.stage += 1;
        self.history.push(StageRecord {
            stage: self.stage,
            digest: graph_digest(&self.graph),
            superseded_at: None,
        });
    }

    pub fn stage_record(&self, stage: u64) -> Option<&StageRecord> {
        self.history.iter().find(|r| r.stage == stage)
    }

    /// Drops stages superseded more than `period` ago.
    pub fn prune_history(&mut self, now: SimTime, period: SimDuration) {
        self.history
            .retain(|r| r.superseded_at.is_none_or(|t| t + period >= now));
    }

    pub fn record_proof(&mut self, from: NodeId, at: SimTime) {
        self.pol_queue.push_back((from, at));
    }

    pub fn prune_proofs(&mut self, now: SimTime, period: SimDuration) {
        while let Some(&(_, t)) = self.pol_queue.front() {
            if t + period < now {
                self.pol_queue.pop_front();
            } else {
                break;
            }
        }
    }

    /// Most recent proof of life per node.
    pub fn freshest_proofs(&self) -> BTreeMap<NodeId, SimTime> {
        let mut out = BTreeMap::new();
        for &(v, t) in &self.pol_queue {
            let e = out.entry(v).or_insert(t);
            if t > *e {
                *e = t;
            }
        }
        out
    }

    pub fn has_recent_proof(&self, v: NodeId, now: SimTime, period: SimDuration) -> bool {
        self.pol_queue
            .iter()
            .any(|&(u, t)| u == v && now.since(t) <= period)
    }

    pub fn go_offline(&mut self, now: SimTime) {
        self.online = false;
        self.offline_since = Some(now);
        self.last_online_stage = self.stage;
    }

    /// Replaces this node's view by a copy of `from`'s, as delivered on access
    /// or insertion.
    pub fn adopt_view(&mut self, from: &NodeState) {
        self.graph = from.graph.clone();
        self.cycle = from.cycle.clone();
        self.stage = from.stage;
        self.history = from.history.clone();
        self.inserted_at_stage = from.inserted_at_stage.clone();
        self.observed_devices = from.observed_devices.clone();
        let mut fresh: Vec<(NodeId, SimTime)> = from.freshest_proofs().into_iter().collect();
        fresh.sort_by_key(|&(v, t)| (t, v));
        self.pol_queue = fresh.into_iter().collect();
        self.last_online_stage = from.stage;
    }

    pub fn members(&self) -> BTreeSet<NodeId> {
        self.graph.vertex_set()
    }
}
