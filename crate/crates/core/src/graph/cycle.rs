use std::collections::BTreeSet;

use super::{Graph, GraphError, NodeId};

/// Ordered traversal of a vertex set, implicitly closed from the last vertex
/// back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HamiltonianCycle {
    order: Vec<NodeId>,
}

impl HamiltonianCycle {
    pub fn new(order: Vec<NodeId>) -> Self {
        Self { order }
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        Self::new(ids.into_iter().map(NodeId).collect())
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.order.contains(&v)
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.order.iter().position(|&u| u == v)
    }

    /// The vertex following `v` in traversal order.
    pub fn successor(&self, v: NodeId) -> Option<NodeId> {
        let i = self.position(v)?;
        Some(self.order[(i + 1) % self.order.len()])
    }

    /// `(predecessor, successor)` of `v`.
    pub fn neighbors(&self, v: NodeId) -> Option<(NodeId, NodeId)> {
        let i = self.position(v)?;
        let n = self.order.len();
        Some((self.order[(i + n - 1) % n], self.order[(i + 1) % n]))
    }

    pub fn are_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        a != b
            && self
                .neighbors(a)
                .is_some_and(|(prev, next)| prev == b || next == b)
    }

    /// Consecutive pairs in traversal order, including the closing pair.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let n = self.order.len();
        (0..n).map(move |i| (self.order[i], self.order[(i + 1) % n]))
    }

    /// Representative of the rotation/reflection class: minimum vertex
    /// first, then the direction with the smaller second element.
    pub fn canonical_order(&self) -> Vec<NodeId> {
        let n = self.order.len();
        if n < 2 {
            return self.order.clone();
        }
        let start = self
            .order
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let forward = self.order[(start + 1) % n];
        let backward = self.order[(start + n - 1) % n];
        if forward <= backward {
            (0..n).map(|k| self.order[(start + k) % n]).collect()
        } else {
            (0..n).map(|k| self.order[(start + n - k) % n]).collect()
        }
    }

    pub fn render(&self) -> String {
        self.order
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// True iff `hc` visits every vertex of `g` exactly once along edges of `g`.
pub fn is_hamiltonian_cycle(g: &Graph, hc: &HamiltonianCycle) -> bool {
    let order = hc.order();
    if order.len() < 3 || order.len() != g.vertex_count() {
        return false;
    }
    let mut seen = BTreeSet::new();
    for &v in order {
        if !g.contains_vertex(v) || !seen.insert(v) {
            return false;
        }
    }
    hc.edges().all(|(a, b)| g.has_edge(a, b))
}

/// Places `v_new` between the cycle-adjacent vertices `v_j` and `v_k`.
pub fn splice_insert(
    hc: &HamiltonianCycle,
    v_new: NodeId,
    v_j: NodeId,
    v_k: NodeId,
) -> Result<HamiltonianCycle, GraphError> {
    if hc.contains(v_new) {
        return Err(GraphError::DuplicateVertex(v_new));
    }
    let after = if hc.successor(v_j) == Some(v_k) {
        v_j
    } else if hc.successor(v_k) == Some(v_j) {
        v_k
    } else {
        return Err(GraphError::NotAdjacentInCycle(v_j, v_k));
    };
    let i = hc.position(after).ok_or(GraphError::VertexNotInCycle(after))?;
    let mut order = hc.order().to_vec();
    order.insert(i + 1, v_new);
    Ok(HamiltonianCycle::new(order))
}

/// Removes `v`, joining its two cycle neighbors. Returns the new cycle and
/// the `(predecessor, successor)` pair that became adjacent.
pub fn splice_delete(
    hc: &HamiltonianCycle,
    v: NodeId,
) -> Result<(HamiltonianCycle, (NodeId, NodeId)), GraphError> {
    let i = hc.position(v).ok_or(GraphError::VertexNotInCycle(v))?;
    if hc.len() <= 3 {
        return Err(GraphError::CycleTooSmall { len: hc.len() });
    }
    let bridge = hc.neighbors(v).ok_or(GraphError::VertexNotInCycle(v))?;
    let mut order = hc.order().to_vec();
    order.remove(i);
    Ok((HamiltonianCycle::new(order), bridge))
}

/// Finds the single pair of `neighbor_set` that is adjacent in `hc`,
/// oriented in traversal order.
pub fn find_unique_cycle_adjacent_pair(
    neighbor_set: &BTreeSet<NodeId>,
    hc: &HamiltonianCycle,
) -> Result<(NodeId, NodeId), GraphError> {
    let mut found: Option<(NodeId, NodeId)> = None;
    for &u in neighbor_set {
        let next = hc.successor(u).ok_or(GraphError::VertexNotInCycle(u))?;
        if next != u && neighbor_set.contains(&next) {
            if let Some(first) = found {
                return Err(GraphError::AmbiguousPair {
                    first,
                    second: (u, next),
                });
            }
            found = Some((u, next));
        }
    }
    found.ok_or(GraphError::NoAdjacentPair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    fn triangle() -> Graph {
        Graph::from_edges(
            [0, 1, 2].map(NodeId),
            [(0, 1), (1, 2), (0, 2)].map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap()
    }

    #[test]
    fn triangle_cycle() {
        let g = triangle();
        assert!(is_hamiltonian_cycle(&g, &HamiltonianCycle::from_ids([0, 1, 2])));
        assert!(!is_hamiltonian_cycle(&g, &HamiltonianCycle::from_ids([0, 1])));
        assert!(!is_hamiltonian_cycle(&g, &HamiltonianCycle::from_ids([0, 1, 1])));
        assert!(!is_hamiltonian_cycle(&g, &HamiltonianCycle::from_ids([0, 1, 7])));
    }

    #[test]
    fn insert_between_four_and_two() {
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 2, 6, 5, 1, 10, 0]);
        let out = splice_insert(&hc, NodeId(14), NodeId(4), NodeId(2)).unwrap();
        assert_eq!(out, HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 6, 5, 1, 10, 0]));
        // orientation of the pair does not matter
        let rev = splice_insert(&hc, NodeId(14), NodeId(2), NodeId(4)).unwrap();
        assert_eq!(out, rev);
    }

    #[test]
    fn insert_between_two_and_six() {
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 6, 1, 10, 0]);
        let out = splice_insert(&hc, NodeId(13), NodeId(2), NodeId(6)).unwrap();
        assert_eq!(out, HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 13, 6, 1, 10, 0]));
    }

    #[test]
    fn insert_across_the_wrap() {
        let hc = HamiltonianCycle::from_ids([1, 2, 3, 4]);
        let out = splice_insert(&hc, NodeId(9), NodeId(1), NodeId(4)).unwrap();
        assert_eq!(out, HamiltonianCycle::from_ids([1, 2, 3, 4, 9]));
    }

    #[test]
    fn insert_errors() {
        let hc = HamiltonianCycle::from_ids([1, 2, 3, 4]);
        assert_eq!(
            splice_insert(&hc, NodeId(9), NodeId(1), NodeId(3)),
            Err(GraphError::NotAdjacentInCycle(NodeId(1), NodeId(3)))
        );
        assert_eq!(
            splice_insert(&hc, NodeId(2), NodeId(3), NodeId(4)),
            Err(GraphError::DuplicateVertex(NodeId(2)))
        );
    }

    #[test]
    fn delete_node_five() {
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 6, 5, 1, 10, 0]);
        let (out, bridge) = splice_delete(&hc, NodeId(5)).unwrap();
        assert_eq!(out, HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 14, 2, 6, 1, 10, 0]));
        assert_eq!(bridge, (NodeId(6), NodeId(1)));
        let back = splice_insert(&out, NodeId(5), bridge.0, bridge.1).unwrap();
        assert_eq!(back, hc);
    }

    #[test]
    fn delete_errors() {
        let hc = HamiltonianCycle::from_ids([1, 2, 3, 4]);
        assert_eq!(splice_delete(&hc, NodeId(7)), Err(GraphError::VertexNotInCycle(NodeId(7))));
        let tri = HamiltonianCycle::from_ids([1, 2, 3]);
        assert_eq!(splice_delete(&tri, NodeId(1)), Err(GraphError::CycleTooSmall { len: 3 }));
        // four vertices may shrink to the minimum of three
        assert!(splice_delete(&hc, NodeId(1)).is_ok());
    }

    #[test]
    fn unique_pair_lookup() {
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 2, 6, 5, 1, 10, 0]);
        assert_eq!(
            find_unique_cycle_adjacent_pair(&set(&[4, 2, 9, 5]), &hc),
            Ok((NodeId(4), NodeId(2)))
        );
        assert_eq!(
            find_unique_cycle_adjacent_pair(&set(&[3, 9]), &hc),
            Ok((NodeId(3), NodeId(9)))
        );
        assert!(matches!(
            find_unique_cycle_adjacent_pair(&set(&[8, 3, 9]), &hc),
            Err(GraphError::AmbiguousPair { .. })
        ));
        assert_eq!(
            find_unique_cycle_adjacent_pair(&set(&[8, 9, 2]), &hc),
            Err(GraphError::NoAdjacentPair)
        );
        assert_eq!(
            find_unique_cycle_adjacent_pair(&set(&[8, 99]), &hc),
            Err(GraphError::VertexNotInCycle(NodeId(99)))
        );
    }

    #[test]
    fn wrap_pair_is_found() {
        let hc = HamiltonianCycle::from_ids([8, 3, 9, 7, 4, 2, 6, 5, 1, 10, 0]);
        assert_eq!(
            find_unique_cycle_adjacent_pair(&set(&[0, 8, 4]), &hc),
            Ok((NodeId(0), NodeId(8)))
        );
    }

    #[test]
    fn canonical_order_collapses_rotations_and_reflections() {
        let a = HamiltonianCycle::from_ids([0, 1, 2]).canonical_order();
        let b = HamiltonianCycle::from_ids([1, 2, 0]).canonical_order();
        let c = HamiltonianCycle::from_ids([2, 1, 0]).canonical_order();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = HamiltonianCycle::from_ids([5, 3, 9, 1]).canonical_order();
        assert_eq!(d, [1, 5, 3, 9].map(NodeId).to_vec());
    }
}
