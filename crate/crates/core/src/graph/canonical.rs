//! Fixed-width big-endian encodings hashed by the commitment scheme.
//!
//! Graph: `|V|`, vertices ascending, `|E|`, edges as `(min, max)` in
//! lexicographic order. Cycle: length, then the canonical rotation/direction.
//! Permutation: length, then `(preimage, image)` pairs ascending. All
//! integers are `u32` big-endian.

use super::{Graph, HamiltonianCycle, NodeId, Permutation};

fn push(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_be_bytes());
}

fn push_len(out: &mut Vec<u8>, len: usize) {
    push(out, u32::try_from(len).expect("length fits in u32"));
}

pub fn canonical_bytes(g: &Graph) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * g.vertex_count() + 8 * g.edge_count());
    push_len(&mut out, g.vertex_count());
    for NodeId(v) in g.vertices() {
        push(&mut out, v);
    }
    push_len(&mut out, g.edge_count());
    for (NodeId(a), NodeId(b)) in g.edges() {
        push(&mut out, a);
        push(&mut out, b);
    }
    out
}

pub fn canonical_bytes_cycle(hc: &HamiltonianCycle) -> Vec<u8> {
    let order = hc.canonical_order();
    let mut out = Vec::with_capacity(4 + 4 * order.len());
    push_len(&mut out, order.len());
    for NodeId(v) in order {
        push(&mut out, v);
    }
    out
}

pub fn permutation_bytes(p: &Permutation) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 8 * p.len());
    push_len(&mut out, p.len());
    for (NodeId(a), NodeId(b)) in p.pairs() {
        push(&mut out, a);
        push(&mut out, b);
    }
    out
}
