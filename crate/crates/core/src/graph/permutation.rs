use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Graph, GraphError, HamiltonianCycle, NodeId};

/// Bijection of a vertex set onto itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: BTreeMap<NodeId, NodeId>,
}

impl Permutation {
    pub fn new(mapping: BTreeMap<NodeId, NodeId>) -> Result<Self, GraphError> {
        let images: BTreeSet<NodeId> = mapping.values().copied().collect();
        if images.len() != mapping.len() || !images.iter().all(|v| mapping.contains_key(v)) {
            return Err(GraphError::NotAPermutation);
        }
        Ok(Self { mapping })
    }

    pub fn identity<I: IntoIterator<Item = NodeId>>(domain: I) -> Self {
        Self {
            mapping: domain.into_iter().map(|v| (v, v)).collect(),
        }
    }

    /// Uniformly random permutation of `domain`.
    pub fn random<I, R>(domain: I, rng: &mut R) -> Self
    where
        I: IntoIterator<Item = NodeId>,
        R: Rng + ?Sized,
    {
        let keys: Vec<NodeId> = domain.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut images = keys.clone();
        images.shuffle(rng);
        Self {
            mapping: keys.into_iter().zip(images).collect(),
        }
    }

    pub fn apply(&self, v: NodeId) -> Option<NodeId> {
        self.mapping.get(&v).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.mapping.keys().copied()
    }

    /// `(preimage, image)` pairs in ascending preimage order.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.mapping.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            mapping: self.mapping.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    fn covers(&self, g: &Graph) -> bool {
        self.mapping.len() == g.vertex_count() && g.vertices().all(|v| self.mapping.contains_key(&v))
    }
}

/// Relabels every vertex of `g` through `p`.
pub fn apply_permutation(g: &Graph, p: &Permutation) -> Result<Graph, GraphError> {
    if !p.covers(g) {
        return Err(GraphError::DomainMismatch);
    }
    let mut out = Graph::with_vertices(g.vertices().filter_map(|v| p.apply(v)));
    for (a, b) in g.edges() {
        let (pa, pb) = (p.apply(a), p.apply(b));
        if let (Some(pa), Some(pb)) = (pa, pb) {
            out.add_edge(pa, pb)?;
        }
    }
    Ok(out)
}

/// Maps a cycle element-wise through `p`.
pub fn apply_permutation_to_cycle(
    hc: &HamiltonianCycle,
    p: &Permutation,
) -> Result<HamiltonianCycle, GraphError> {
    hc.order()
        .iter()
        .map(|&v| p.apply(v).ok_or(GraphError::DomainMismatch))
        .collect::<Result<Vec<_>, _>>()
        .map(HamiltonianCycle::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_hamiltonian_cycle;

    fn perm(pairs: &[(u32, u32)]) -> Permutation {
        Permutation::new(pairs.iter().map(|&(a, b)| (NodeId(a), NodeId(b))).collect()).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_edges(
            [0, 1, 2].map(NodeId),
            [(0, 1), (1, 2), (0, 2)].map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        let bad: BTreeMap<_, _> = [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(1))].into();
        assert_eq!(Permutation::new(bad), Err(GraphError::NotAPermutation));
        let escapes: BTreeMap<_, _> = [(NodeId(0), NodeId(5))].into();
        assert_eq!(Permutation::new(escapes), Err(GraphError::NotAPermutation));
    }

    #[test]
    fn identity_leaves_graph_unchanged() {
        let g = triangle();
        let id = Permutation::identity(g.vertices());
        assert_eq!(apply_permutation(&g, &id).unwrap(), g);
    }

    #[test]
    fn complete_graph_is_invariant() {
        let g = triangle();
        let p = perm(&[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(apply_permutation(&g, &p).unwrap(), g);
    }

    #[test]
    fn cycle_maps_elementwise() {
        let hc = HamiltonianCycle::from_ids([0, 1, 2]);
        let p = perm(&[(0, 2), (1, 0), (2, 1)]);
        assert_eq!(
            apply_permutation_to_cycle(&hc, &p).unwrap(),
            HamiltonianCycle::from_ids([2, 0, 1])
        );
        let id = Permutation::identity([0, 1, 2].map(NodeId));
        assert_eq!(apply_permutation_to_cycle(&hc, &id).unwrap(), hc);
    }

    #[test]
    fn domain_mismatch() {
        let g = triangle();
        let p = perm(&[(0, 1), (1, 0)]);
        assert_eq!(apply_permutation(&g, &p), Err(GraphError::DomainMismatch));
        let hc = HamiltonianCycle::from_ids([0, 1, 2]);
        assert_eq!(apply_permutation_to_cycle(&hc, &p), Err(GraphError::DomainMismatch));
    }

    #[test]
    fn inverse_round_trips() {
        let g = triangle();
        let hc = HamiltonianCycle::from_ids([0, 1, 2]);
        let p = perm(&[(0, 2), (1, 0), (2, 1)]);
        let pg = apply_permutation(&g, &p).unwrap();
        let pc = apply_permutation_to_cycle(&hc, &p).unwrap();
        assert!(is_hamiltonian_cycle(&pg, &pc));
        assert_eq!(apply_permutation_to_cycle(&pc, &p.inverse()).unwrap(), hc);
    }
}
