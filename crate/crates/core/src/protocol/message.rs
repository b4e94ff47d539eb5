use std::collections::BTreeSet;

use super::DeviceId;
use crate::graph::{canonical_bytes, canonical_bytes_cycle, Graph, HamiltonianCycle, NodeId};
use crate::zkp::{Challenge, CommitmentPair, RoundOpening};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    /// Readable by anyone in radio range.
    Open,
    /// Short-range link between two devices in physical proximity.
    Secure,
}

/// Traffic classes used for byte accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Zkp,
    ProofOfLife,
    Insertion,
    Deletion,
    Other,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Zkp,
        Category::ProofOfLife,
        Category::Insertion,
        Category::Deletion,
        Category::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Zkp => "zkp",
            Category::ProofOfLife => "proof_of_life",
            Category::Insertion => "insertion",
            Category::Deletion => "deletion",
            Category::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZkpPart {
    Commitments(CommitmentPair),
    Challenge(Challenge),
    Opening(RoundOpening),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolMessage {
    InsertionAnnounce {
        authenticator: NodeId,
        new_id: NodeId,
        device: DeviceId,
    },
    InsertionAck {
        from: NodeId,
        new_id: NodeId,
    },
    NeighborSetBroadcast {
        authenticator: NodeId,
        new_id: NodeId,
        neighbors: BTreeSet<NodeId>,
        device: DeviceId,
    },
    GraphDelivery(Graph),
    CycleDelivery(HamiltonianCycle),
    ProofOfLife {
        sender: NodeId,
        device: DeviceId,
    },
    ProofOfLifeEcho {
        initiator: NodeId,
        senders: BTreeSet<NodeId>,
    },
    DeletionNotice {
        initiator: NodeId,
        deleted: NodeId,
    },
    ZkpRound(ZkpPart),
    AccessRequest {
        supplicant: NodeId,
        stage: u64,
        graph: Graph,
    },
    AccessGrant {
        supplicant: NodeId,
        stage: u64,
        graph: Graph,
        cycle: HamiltonianCycle,
    },
    AccessNotice {
        authenticator: NodeId,
        supplicant: NodeId,
    },
    IsolationNotice {
        node: NodeId,
    },
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_be_bytes());
}

fn put_id(out: &mut Vec<u8>, v: NodeId) {
    put_u32(out, v.0);
}

fn put_block(out: &mut Vec<u8>, bytes: &[u8]) {
    put_u32(out, bytes.len() as u32);
    out.extend_from_slice(bytes);
}

fn put_ids(out: &mut Vec<u8>, ids: &BTreeSet<NodeId>) {
    put_u32(out, ids.len() as u32);
    for &v in ids {
        put_id(out, v);
    }
}

impl ProtocolMessage {
    fn tag(&self) -> u8 {
        match self {
            ProtocolMessage::InsertionAnnounce { .. } => 1,
            ProtocolMessage::InsertionAck { .. } => 2,
            ProtocolMessage::NeighborSetBroadcast { .. } => 3,
            ProtocolMessage::GraphDelivery(_) => 4,
            ProtocolMessage::CycleDelivery(_) => 5,
            ProtocolMessage::ProofOfLife { .. } => 6,
            ProtocolMessage::ProofOfLifeEcho { .. } => 7,
            ProtocolMessage::DeletionNotice { .. } => 8,
            ProtocolMessage::ZkpRound(_) => 9,
            ProtocolMessage::AccessRequest { .. } => 10,
            ProtocolMessage::AccessGrant { .. } => 11,
            ProtocolMessage::AccessNotice { .. } => 12,
            ProtocolMessage::IsolationNotice { .. } => 13,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = vec![self.tag()];
        match self {
            ProtocolMessage::InsertionAnnounce {
                authenticator,
                new_id,
                device,
            } => {
                put_id(&mut out, *authenticator);
                put_id(&mut out, *new_id);
                out.extend_from_slice(&device.0.to_be_bytes());
            }
            ProtocolMessage::InsertionAck { from, new_id } => {
                put_id(&mut out, *from);
                put_id(&mut out, *new_id);
            }
            ProtocolMessage::NeighborSetBroadcast {
                authenticator,
                new_id,
                neighbors,
                device,
            } => {
                put_id(&mut out, *authenticator);
                put_id(&mut out, *new_id);
                out.extend_from_slice(&device.0.to_be_bytes());
                put_ids(&mut out, neighbors);
            }
            ProtocolMessage::GraphDelivery(g) => put_block(&mut out, &canonical_bytes(g)),
            ProtocolMessage::CycleDelivery(hc) => put_block(&mut out, &canonical_bytes_cycle(hc)),
            ProtocolMessage::ProofOfLife { sender, device } => {
                put_id(&mut out, *sender);
                out.extend_from_slice(&device.0.to_be_bytes());
            }
            ProtocolMessage::ProofOfLifeEcho { initiator, senders } => {
                put_id(&mut out, *initiator);
                put_ids(&mut out, senders);
            }
            ProtocolMessage::DeletionNotice { initiator, deleted } => {
                put_id(&mut out, *initiator);
                put_id(&mut out, *deleted);
            }
            ProtocolMessage::ZkpRound(part) => match part {
                ZkpPart::Commitments(c) => out.extend_from_slice(&c.encode()),
                ZkpPart::Challenge(c) => out.push(c.bit()),
                ZkpPart::Opening(o) => out.extend_from_slice(&o.encode()),
            },
            ProtocolMessage::AccessRequest {
                supplicant,
                stage,
                graph,
            } => {
                put_id(&mut out, *supplicant);
                out.extend_from_slice(&stage.to_be_bytes());
                put_block(&mut out, &canonical_bytes(graph));
            }
            ProtocolMessage::AccessGrant {
                supplicant,
                stage,
                graph,
                cycle,
            } => {
                put_id(&mut out, *supplicant);
                out.extend_from_slice(&stage.to_be_bytes());
                put_block(&mut out, &canonical_bytes(graph));
                put_block(&mut out, &canonical_bytes_cycle(cycle));
            }
            ProtocolMessage::AccessNotice {
                authenticator,
                supplicant,
            } => {
                put_id(&mut out, *authenticator);
                put_id(&mut out, *supplicant);
            }
            ProtocolMessage::IsolationNotice { node } => put_id(&mut out, *node),
        }
        out
    }

    pub fn encoded_len(&self) -> usize {
        self.encode().len()
    }

    pub fn channel(&self) -> Channel {
        match self {
            ProtocolMessage::CycleDelivery(_) | ProtocolMessage::AccessGrant { .. } => {
                Channel::Secure
            }
            _ => Channel::Open,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            ProtocolMessage::InsertionAnnounce { .. }
            | ProtocolMessage::InsertionAck { .. }
            | ProtocolMessage::NeighborSetBroadcast { .. }
            | ProtocolMessage::GraphDelivery(_)
            | ProtocolMessage::CycleDelivery(_) => Category::Insertion,
            ProtocolMessage::ProofOfLife { .. } | ProtocolMessage::ProofOfLifeEcho { .. } => {
                Category::ProofOfLife
            }
            ProtocolMessage::DeletionNotice { .. } => Category::Deletion,
            ProtocolMessage::ZkpRound(_) => Category::Zkp,
            ProtocolMessage::AccessRequest { .. }
            | ProtocolMessage::AccessGrant { .. }
            | ProtocolMessage::AccessNotice { .. }
            | ProtocolMessage::IsolationNotice { .. } => Category::Other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_travels_only_on_secure_channel() {
        let hc = HamiltonianCycle::from_ids([0, 1, 2]);
        assert_eq!(ProtocolMessage::CycleDelivery(hc.clone()).channel(), Channel::Secure);
        let grant = ProtocolMessage::AccessGrant {
            supplicant: NodeId(0),
            stage: 0,
            graph: Graph::new(),
            cycle: hc,
        };
        assert_eq!(grant.channel(), Channel::Secure);
        let pol = ProtocolMessage::ProofOfLife {
            sender: NodeId(1),
            device: DeviceId(1),
        };
        assert_eq!(pol.channel(), Channel::Open);
    }

    #[test]
    fn sizes() {
        let pol = ProtocolMessage::ProofOfLife {
            sender: NodeId(1),
            device: DeviceId(1),
        };
        assert_eq!(pol.encoded_len(), 13);
        let echo = ProtocolMessage::ProofOfLifeEcho {
            initiator: NodeId(1),
            senders: [1, 2, 3].map(NodeId).into_iter().collect(),
        };
        assert_eq!(echo.encoded_len(), 1 + 4 + 4 + 12);
        let ch = ProtocolMessage::ZkpRound(ZkpPart::Challenge(Challenge::Permutation));
        assert_eq!(ch.encoded_len(), 2);
        assert_eq!(ch.category(), Category::Zkp);
    }
}
