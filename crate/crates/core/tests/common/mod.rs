//! Independent reference computations shared by the integration tests.

use std::collections::BTreeSet;

use gasman::graph::{Graph, NodeId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every Hamiltonian cycle of `g` as a set of undirected edges, found by
/// trying all orderings that start at the smallest vertex.
pub fn all_cycles(g: &Graph) -> Vec<BTreeSet<(NodeId, NodeId)>> {
    let vs: Vec<NodeId> = g.vertices().collect();
    let mut found = Vec::new();
    if vs.len() < 3 {
        return found;
    }
    let mut rest = vs[1..].to_vec();
    permute(&mut rest, 0, &mut |tail| {
        let mut order = vec![vs[0]];
        order.extend_from_slice(tail);
        let n = order.len();
        let edges: BTreeSet<_> = (0..n)
            .map(|i| {
                let (a, b) = (order[i], order[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect();
        if edges.iter().all(|&(a, b)| g.has_edge(a, b)) {
            found.push(edges);
        }
    });
    found
}

fn permute(xs: &mut Vec<NodeId>, k: usize, f: &mut dyn FnMut(&[NodeId])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

pub fn edge_set(order: &[NodeId]) -> Option<BTreeSet<(NodeId, NodeId)>> {
    let n = order.len();
    let set: BTreeSet<_> = (0..n)
        .map(|i| {
            let (a, b) = (order[i], order[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect();
    (set.len() == n).then_some(set)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: u32, p: f64) -> Graph {
    let mut g = Graph::with_vertices((0..n).map(NodeId));
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(NodeId(a), NodeId(b)).unwrap();
            }
        }
    }
    g
}

/// Compares the checker with exhaustive search on `pairs` random graphs of
/// at most 8 vertices. Returns (agreements, true cases, false cases).
pub fn checker_agreement(rng: &mut ChaCha8Rng, pairs: usize) -> (usize, usize, usize) {
    use gasman::graph::{is_hamiltonian_cycle, HamiltonianCycle};
    use rand::seq::SliceRandom;
    let mut agree = 0;
    let (mut yes, mut no) = (0, 0);
    for _ in 0..pairs {
        let n = rng.gen_range(3..=8u32);
        let density = rng.gen_range(0.3..0.9);
        let g = random_graph(rng, n, density);
        let cycles = all_cycles(&g);
        let candidate: Vec<NodeId> = match rng.gen_range(0..3) {
            // a real cycle, rotated and possibly reversed
            0 if !cycles.is_empty() => {
                let mut order: Vec<NodeId> = Vec::new();
                let edges = &cycles[rng.gen_range(0..cycles.len())];
                let mut cur = NodeId(0);
                while order.len() < n as usize {
                    order.push(cur);
                    cur = edges
                        .iter()
                        .flat_map(|&(a, b)| [(a, b), (b, a)])
                        .find(|&(a, b)| a == cur && !order.contains(&b))
                        .map_or(cur, |(_, b)| b);
                }
                order.rotate_left(rng.gen_range(0..n as usize));
                if rng.gen() {
                    order.reverse();
                }
                order
            }
            1 => {
                let len = rng.gen_range(2..=n as usize + 1);
                (0..len).map(|_| NodeId(rng.gen_range(0..n + 1))).collect()
            }
            _ => {
                let mut order: Vec<NodeId> = (0..n).map(NodeId).collect();
                order.shuffle(rng);
                order
            }
        };
        let expected = candidate.len() == n as usize
            && edge_set(&candidate).is_some_and(|e| cycles.contains(&e))
            && candidate.iter().all(|v| v.0 < n);
        let got = is_hamiltonian_cycle(&g, &HamiltonianCycle::new(candidate.clone()));
        if got == expected {
            agree += 1;
        }
        if expected {
            yes += 1;
        } else {
            no += 1;
        }
    }
    (agree, yes, no)
}

/// Splices random cycles both ways and compares each result with the edge
/// set recomputed by hand. Returns the number of matching results.
pub fn splice_agreement(rng: &mut ChaCha8Rng, trials: usize) -> usize {
    use gasman::graph::{splice_delete, splice_insert, HamiltonianCycle};
    use rand::seq::SliceRandom;
    let mut agree = 0;
    for _ in 0..trials {
        let n = rng.gen_range(4..30u32);
        let mut order: Vec<NodeId> = (0..n).map(NodeId).collect();
        order.shuffle(rng);
        let hc = HamiltonianCycle::new(order.clone());
        let before = edge_set(&order).unwrap();

        let i = rng.gen_range(0..n as usize);
        let (a, b) = (order[i], order[(i + 1) % n as usize]);
        let v = NodeId(n + 5);
        let grown = splice_insert(&hc, v, b, a).unwrap();
        let mut expected = before.clone();
        expected.remove(&(a.min(b), a.max(b)));
        expected.insert((a.min(v), a.max(v)));
        expected.insert((b.min(v), b.max(v)));
        agree += usize::from(edge_set(grown.order()) == Some(expected));

        let d = order[rng.gen_range(0..n as usize)];
        let (shrunk, _) = splice_delete(&hc, d).unwrap();
        let ends: Vec<NodeId> = before
            .iter()
            .filter_map(|&(x, y)| (x == d).then_some(y).or((y == d).then_some(x)))
            .collect();
        let mut expected: BTreeSet<_> = before.iter().filter(|&&(x, y)| x != d && y != d).copied().collect();
        expected.insert((ends[0].min(ends[1]), ends[0].max(ends[1])));
        agree += usize::from(edge_set(shrunk.order()) == Some(expected));
    }
    agree
}
