use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DeviceId, NetworkParams, NodeState, ProtocolError};
use crate::graph::{is_hamiltonian_cycle, Graph, HamiltonianCycle, NodeId};
use crate::time::SimTime;

/// Output of the trusted dealer.
#[derive(Debug, Clone)]
pub struct Setup {
    pub graph: Graph,
    pub cycle: HamiltonianCycle,
    /// Neighbor declarations each node contributed, cycle neighbors included.
    /// A repeated entry is a duplicate that merged into an existing edge.
    pub declarations: BTreeMap<NodeId, Vec<NodeId>>,
    pub states: Vec<NodeState>,
}

/// Builds `G_0` around a uniformly random cycle over `0..n`.
pub fn initialize_network<R: Rng + ?Sized>(
    n: usize,
    params: &NetworkParams,
    rng: &mut R,
) -> Result<Setup, ProtocolError> {
    check_sizes(n, params)?;
    let mut order: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
    order.shuffle(rng);
    initialize_with_cycle(HamiltonianCycle::new(order), params, rng)
}

/// Same as [`initialize_network`] with the dealer's cycle fixed in advance.
pub fn initialize_with_cycle<R: Rng + ?Sized>(
    cycle: HamiltonianCycle,
    params: &NetworkParams,
    rng: &mut R,
) -> Result<Setup, ProtocolError> {
    let n = cycle.len();
    check_sizes(n, params)?;
    let vertices: BTreeSet<NodeId> = cycle.order().iter().copied().collect();
    if vertices.len() != n {
        return Err(ProtocolError::BadParams("initial cycle repeats a vertex".into()));
    }
    let per_node = params.degree.min(n - 1);
    let mut g = Graph::with_vertices(vertices.iter().copied());
    let mut declarations: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &v in cycle.order() {
        let (prev, next) = cycle.neighbors(v).expect("vertex of its own cycle");
        g.add_edge(v, next).map_err(ProtocolError::Graph)?;
        declarations.insert(v, vec![prev, next]);
    }
    // every edge sits in both endpoints' groups, so the remaining slots are
    // paired off between nodes
    let mut stubs: Vec<NodeId> = vertices
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, per_node - 2))
        .collect();
    stubs.shuffle(rng);
    while let Some(u) = stubs.pop() {
        let partners: Vec<usize> = (0..stubs.len())
            .filter(|&i| stubs[i] != u && !g.has_edge(u, stubs[i]))
            .collect();
        match partners.choose(rng) {
            Some(&i) => {
                let v = stubs.swap_remove(i);
                g.add_edge(u, v).map_err(ProtocolError::Graph)?;
                declarations.get_mut(&u).expect("known vertex").push(v);
                declarations.get_mut(&v).expect("known vertex").push(u);
            }
            None => {
                // no fresh partner left: the slot repeats an existing neighbor
                let known: Vec<NodeId> = g.neighbors(u).expect("known vertex").iter().copied().collect();
                let dup = *known.choose(rng).expect("cycle neighbors exist");
                declarations.get_mut(&u).expect("known vertex").push(dup);
            }
        }
    }
    debug_assert!(is_hamiltonian_cycle(&g, &cycle));
    let observed: BTreeMap<NodeId, DeviceId> =
        vertices.iter().map(|&v| (v, DeviceId(v.0 as u64))).collect();
    let states = vertices
        .iter()
        .map(|&v| {
            let mut s = NodeState::new(v, g.clone(), cycle.clone(), DeviceId(v.0 as u64), SimTime::ZERO);
            s.observed_devices = observed.clone();
            s
        })
        .collect();
    Ok(Setup {
        graph: g,
        cycle,
        declarations,
        states,
    })
}

fn check_sizes(n: usize, params: &NetworkParams) -> Result<(), ProtocolError> {
    params.validate()?;
    if n < 3 {
        return Err(ProtocolError::BadParams(format!("{n} nodes cannot carry a cycle")));
    }
    if params.degree > n {
        return Err(ProtocolError::BadParams(format!(
            "degree {} exceeds the {n} available nodes",
            params.degree
        )));
    }
    Ok(())
}
