use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;
use crate::time::SimDuration;

pub type Position = (f64, f64);

/// Binary reachability from positions and two radio ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModel {
    #[serde(default = "default_open")]
    pub open_range: f64,
    #[serde(default = "default_secure")]
    pub secure_range: f64,
    #[serde(default = "default_latency")]
    pub latency: SimDuration,
}

fn default_open() -> f64 {
    250.0
}
fn default_secure() -> f64 {
    5.0
}
fn default_latency() -> SimDuration {
    SimDuration::from_millis(100)
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            open_range: default_open(),
            secure_range: default_secure(),
            latency: default_latency(),
        }
    }
}

fn distance(a: Position, b: Position) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl ChannelModel {
    pub fn in_open_range(&self, a: Position, b: Position) -> bool {
        distance(a, b) <= self.open_range
    }

    pub fn in_secure_range(&self, a: Position, b: Position) -> bool {
        distance(a, b) <= self.secure_range
    }

    /// Nodes a flood from `from` reaches over `nodes`, the sender excluded.
    /// Each node relays a given packet at most once.
    pub fn flood(&self, from: NodeId, nodes: &BTreeMap<NodeId, Position>) -> BTreeSet<NodeId> {
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let Some(&origin) = nodes.get(&from) else {
            return seen;
        };
        seen.insert(from);
        let mut frontier = VecDeque::from([(from, origin)]);
        while let Some((_, here)) = frontier.pop_front() {
            for (&v, &pos) in nodes {
                if !seen.contains(&v) && self.in_open_range(here, pos) {
                    seen.insert(v);
                    frontier.push_back((v, pos));
                }
            }
        }
        seen.remove(&from);
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everyone_in_range() {
        let ch = ChannelModel::default();
        let nodes: BTreeMap<NodeId, Position> = (0..5).map(|i| (NodeId(i), (0.0, 0.0))).collect();
        assert_eq!(ch.flood(NodeId(2), &nodes).len(), 4);
    }

    #[test]
    fn multi_hop_and_partition() {
        let ch = ChannelModel::default();
        let nodes: BTreeMap<NodeId, Position> = [
            (NodeId(0), (0.0, 0.0)),
            (NodeId(1), (200.0, 0.0)),
            (NodeId(2), (400.0, 0.0)),
            (NodeId(3), (2000.0, 0.0)),
        ]
        .into_iter()
        .collect();
        let got = ch.flood(NodeId(0), &nodes);
        assert_eq!(got, [1, 2].map(NodeId).into_iter().collect());
        assert!(ch.flood(NodeId(3), &nodes).is_empty());
        assert!(!ch.in_secure_range((0.0, 0.0), (6.0, 0.0)));
    }
}
