#![allow(dead_code)]

use graphwm_core::{Edge, Graph, GraphStore, NodeId};
use graphwm_oracles::Triple;

pub fn to_graph(n: usize, directed: bool, weighted: bool, edges: &[Triple]) -> Graph {
    let list: Vec<Edge> = edges
        .iter()
        .map(|&(u, v, w)| Edge {
            u: u as NodeId,
            v: v as NodeId,
            w: weighted.then_some(w),
        })
        .collect();
    Graph::with_nodes(0..n as NodeId, list, directed).unwrap()
}

pub fn to_store(n: usize, directed: bool, weighted: bool, edges: &[Triple]) -> GraphStore {
    GraphStore::build(to_graph(n, directed, weighted, edges), None).unwrap()
}

/// Deterministic (n, p, directed) for case `i`.
pub fn shape(i: u64, max_n: usize) -> (usize, f64, bool) {
    let n = 1 + (i as usize * 7 + 3) % max_n;
    let p = [0.1, 0.2, 0.35, 0.5, 0.8][(i % 5) as usize];
    (n, p, i % 2 == 0)
}
