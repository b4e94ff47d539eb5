//! Undirected graphs, Hamiltonian cycles and vertex permutations.
//!
//! A [`Graph`] is the public instance every legitimate node shares; a
//! [`HamiltonianCycle`] over it is the network secret. Both are plain values:
//! every operation here is a pure function returning a new value.

mod canonical;
mod cycle;
mod permutation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::{canonical_bytes, canonical_bytes_cycle, permutation_bytes};
pub use cycle::{
    find_unique_cycle_adjacent_pair, is_hamiltonian_cycle, splice_delete, splice_insert,
    HamiltonianCycle,
};
pub use permutation::{apply_permutation, apply_permutation_to_cycle, Permutation};

/// Vertex label, doubling as the identifier of the node it represents.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(NodeId),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(NodeId),
    #[error("permutation domain does not match the vertex set")]
    DomainMismatch,
    #[error("mapping is not a bijection over its domain")]
    NotAPermutation,
    #[error("vertices {0} and {1} are not adjacent in the cycle")]
    NotAdjacentInCycle(NodeId, NodeId),
    #[error("vertex {0} is already in the cycle")]
    DuplicateVertex(NodeId),
    #[error("vertex {0} is not in the cycle")]
    VertexNotInCycle(NodeId),
    #[error("cycle of length {len} cannot lose another vertex")]
    CycleTooSmall { len: usize },
    #[error("no pair of the neighbor set is adjacent in the cycle")]
    NoAdjacentPair,
    #[error("neighbor set contains more than one cycle-adjacent pair: {first:?} and {second:?}")]
    AmbiguousPair {
        first: (NodeId, NodeId),
        second: (NodeId, NodeId),
    },
}

/// Simple undirected graph stored as an adjacency map.
///
/// Each edge is kept in both endpoint sets, so an edge exists exactly once
/// semantically and `edges()` yields it once as `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<I: IntoIterator<Item = NodeId>>(vertices: I) -> Self {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v);
        }
        g
    }

    /// Builds a graph from a vertex set and an edge list. Duplicate edges
    /// (in either orientation) collapse.
    pub fn from_edges<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::with_vertices(vertices);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Returns false if the vertex was already present.
    pub fn add_vertex(&mut self, v: NodeId) -> bool {
        if self.adjacency.contains_key(&v) {
            return false;
        }
        self.adjacency.insert(v, BTreeSet::new());
        true
    }

    /// Adds the undirected edge `{a, b}`; returns false if it already existed.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for v in [a, b] {
            if !self.adjacency.contains_key(&v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        let added = self.adjacency.get_mut(&a).map(|s| s.insert(b)).unwrap_or(false);
        if added {
            if let Some(s) = self.adjacency.get_mut(&b) {
                s.insert(a);
            }
            self.edge_count += 1;
        }
        Ok(added)
    }

    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        let removed = self.adjacency.get_mut(&a).map(|s| s.remove(&b)).unwrap_or(false);
        if removed {
            if let Some(s) = self.adjacency.get_mut(&b) {
                s.remove(&a);
            }
            self.edge_count -= 1;
        }
        removed
    }

    /// Removes `v` and every incident edge.
    pub fn remove_vertex(&mut self, v: NodeId) -> bool {
        let Some(neighbors) = self.adjacency.remove(&v) else {
            return false;
        };
        for u in &neighbors {
            if let Some(s) = self.adjacency.get_mut(u) {
                s.remove(&v);
            }
        }
        self.edge_count -= neighbors.len();
        true
    }

    pub fn contains_vertex(&self, v: NodeId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<NodeId> {
        self.adjacency.keys().copied().collect()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&u, ns)| ns.range(u..).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, v: NodeId) -> Option<&BTreeSet<NodeId>> {
        self.adjacency.get(&v)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    /// Sorted degree sequence.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency.values().map(BTreeSet::len).collect();
        d.sort_unstable();
        d
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}
