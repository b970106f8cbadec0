//! Synthetic source graphs with heavy-tailed degree distributions.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, Graph, NodeId};

/// Preferential attachment: each new node links to `m` distinct earlier
/// nodes chosen proportionally to degree. Directed graphs orient each edge
/// from the newer to the older node, except that roughly one edge in five
/// is reversed so the result is not acyclic.
pub fn preferential_attachment(n: usize, m: usize, directed: bool, seed: u64) -> Graph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Every endpoint occurrence, so uniform picks are degree-proportional.
    let mut ends: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    let mut edges = Vec::with_capacity(n * m);
    for v in 1..=m as NodeId {
        for u in 0..v {
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    for v in (m as NodeId + 1)..n as NodeId {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(ends[rng.gen_range(0..ends.len())]);
        }
        for u in targets {
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    let edges: Vec<Edge> = edges
        .into_iter()
        .map(|(a, b)| {
            if directed && rng.gen_bool(0.2) {
                Edge::new(b, a)
            } else {
                Edge::new(a, b)
            }
        })
        .collect();
    Graph::build(edges, directed).expect("generator emits simple edges")
}
