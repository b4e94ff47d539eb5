use std::collections::BTreeMap;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use crate::graph::{apply_permutation, Graph, HamiltonianCycle, NodeId, Permutation};
use crate::protocol::NeighborSetBroadcast;
use crate::zkp::RoundOpening;

/// In-flight alterations a man in the middle could make to an opening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tamper {
    ToggleEdge,
    SwapCycle,
    FlipNonce,
    SwapPermutation,
}

impl Tamper {
    pub const ALL: [Tamper; 4] = [
        Tamper::ToggleEdge,
        Tamper::SwapCycle,
        Tamper::FlipNonce,
        Tamper::SwapPermutation,
    ];
}

fn two<R: Rng + ?Sized>(ids: impl Iterator<Item = NodeId>, rng: &mut R) -> (NodeId, NodeId) {
    let v = ids.choose_multiple(rng, 2);
    (v[0], v[1])
}

/// Swaps the images of two vertices whose transposition is not an
/// automorphism of `g`, so the relabeled graph really changes.
fn swap_images<R: Rng + ?Sized>(g: &Graph, p: &Permutation, rng: &mut R) -> Option<Permutation> {
    let before = apply_permutation(g, p).ok()?;
    let mut pairs: Vec<(NodeId, NodeId)> = p
        .domain()
        .flat_map(|a| p.domain().filter(move |&b| a < b).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    pairs.into_iter().find_map(|(a, b)| {
        let mut map: BTreeMap<NodeId, NodeId> = p.pairs().collect();
        let (ia, ib) = (map[&a], map[&b]);
        map.insert(a, ib);
        map.insert(b, ia);
        let q = Permutation::new(map).expect("still a bijection");
        (apply_permutation(g, &q).ok()? != before).then_some(q)
    })
}

/// Returns a modified copy. `g` is the public graph the opening refers to.
/// Alterations that do not apply to the opening's variant fall back to
/// flipping a nonce bit.
pub fn tamper_opening<R: Rng + ?Sized>(
    o: &RoundOpening,
    how: Tamper,
    g: &Graph,
    rng: &mut R,
) -> RoundOpening {
    let mut out = o.clone();
    let swapped = match (o, how) {
        (RoundOpening::Permutation { permutation, .. }, Tamper::SwapPermutation) => {
            swap_images(g, permutation, rng)
        }
        _ => None,
    };
    match (&mut out, how) {
        (RoundOpening::Cycle { permuted_graph, .. }, Tamper::ToggleEdge) => {
            let (a, b) = two(permuted_graph.vertices(), rng);
            if !permuted_graph.remove_edge(a, b) {
                permuted_graph.add_edge(a, b).expect("distinct known vertices");
            }
        }
        (RoundOpening::Cycle { permuted_cycle, .. }, Tamper::SwapCycle) => {
            let mut order = permuted_cycle.order().to_vec();
            let i = rng.gen_range(0..order.len());
            let j = (i + 1) % order.len();
            order.swap(i, j);
            *permuted_cycle = HamiltonianCycle::new(order);
        }
        (RoundOpening::Permutation { permutation, .. }, Tamper::SwapPermutation)
            if swapped.is_some() =>
        {
            *permutation = swapped.expect("checked");
        }
        (RoundOpening::Cycle { graph_nonce, .. }, _)
        | (RoundOpening::Permutation { graph_nonce, .. }, _) => {
            let i = rng.gen_range(0..graph_nonce.len() * 8);
            graph_nonce[i / 8] ^= 1 << (i % 8);
        }
    }
    out
}

/// Adds a node to an insertion's neighbor set, or drops one when the set is
/// already as large as the candidate list allows.
pub fn tamper_neighbor_set<R: Rng + ?Sized>(
    bc: &NeighborSetBroadcast,
    candidates: &[NodeId],
    rng: &mut R,
) -> NeighborSetBroadcast {
    let mut out = bc.clone();
    let fresh: Vec<NodeId> = candidates
        .iter()
        .copied()
        .filter(|v| !bc.neighbors.contains(v))
        .collect();
    if fresh.is_empty() || rng.gen::<bool>() {
        let drop = *bc.neighbors.iter().choose(rng).expect("non-empty set");
        out.neighbors.remove(&drop);
    } else {
        out.neighbors.insert(fresh[rng.gen_range(0..fresh.len())]);
    }
    out
}
