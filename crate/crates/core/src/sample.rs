//! Biased random-walk subgraph sampling.
//!
//! The walk moves along undirected adjacency, picking the next node with
//! probability proportional to its degree. With probability
//! `restart_prob` it instead jumps back to a uniformly chosen node it has
//! already visited, which keeps the sample connected while letting it grow
//! outward from hubs. The walk stops once `target_nodes` distinct nodes
//! were seen and returns the induced subgraph, relabeled to `0..k`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasParams {
    pub restart_prob: f64,
    /// Step budget per requested node before the walk gives up.
    pub steps_per_node: usize,
}

impl Default for BiasParams {
    fn default() -> Self {
        BiasParams {
            restart_prob: 0.15,
            steps_per_node: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub graph: Graph,
    /// Sampled id -> source id.
    pub relabel: BTreeMap<NodeId, NodeId>,
    /// False when the walk could not reach `target_nodes` distinct nodes.
    pub complete: bool,
}

pub fn sample_subgraph(
    source: &Graph,
    target_nodes: usize,
    bias: &BiasParams,
    seed: u64,
) -> Result<Sample, GraphError> {
    let n = source.node_count();
    if target_nodes == 0 || target_nodes > n {
        return Err(GraphError::InvalidTarget {
            target: target_nodes,
            available: n,
        });
    }

    let ids: Vec<NodeId> = source.nodes().collect();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let nbrs: Vec<Vec<usize>> = source
        .undirected_neighbors()
        .into_values()
        .map(|list| list.into_iter().map(|x| index[&x]).collect())
        .collect();
    let degree: Vec<u64> = nbrs.iter().map(|l| l.len() as u64).collect();

    let comp = components(&nbrs);
    let mut comp_size = vec![0usize; n];
    for &c in &comp {
        comp_size[c] += 1;
    }
    let mut starts: Vec<usize> = (0..n).filter(|&i| comp_size[comp[i]] >= target_nodes).collect();
    if starts.is_empty() {
        let largest = (0..n).max_by_key(|&c| (comp_size[c], std::cmp::Reverse(c))).unwrap();
        starts = (0..n).filter(|&i| comp[i] == largest).collect();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = starts[rng.gen_range(0..starts.len())];
    let goal = target_nodes.min(comp_size[comp[start]]);

    let mut seen = vec![false; n];
    let mut visited = vec![start];
    seen[start] = true;
    let mut current = start;
    let budget = bias.steps_per_node.saturating_mul(target_nodes).max(1_000);
    let mut steps = 0;
    while visited.len() < goal && steps < budget {
        steps += 1;
        if nbrs[current].is_empty() || rng.gen::<f64>() < bias.restart_prob {
            current = visited[rng.gen_range(0..visited.len())];
            continue;
        }
        let total: u64 = nbrs[current].iter().map(|&x| degree[x]).sum();
        let mut pick = rng.gen_range(0..total);
        for &x in &nbrs[current] {
            if pick < degree[x] {
                current = x;
                break;
            }
            pick -= degree[x];
        }
        if !seen[current] {
            seen[current] = true;
            visited.push(current);
        }
    }

    let keep: BTreeSet<NodeId> = visited.iter().map(|&i| ids[i]).collect();
    let to_new: BTreeMap<NodeId, NodeId> = keep
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i as NodeId))
        .collect();
    let graph = source.induced(&keep).relabel(&to_new);
    Ok(Sample {
        graph,
        relabel: to_new.into_iter().map(|(old, new)| (new, old)).collect(),
        complete: keep.len() == target_nodes,
    })
}

fn components(nbrs: &[Vec<usize>]) -> Vec<usize> {
    let n = nbrs.len();
    let mut comp = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &nbrs[u] {
                if comp[v] == usize::MAX {
                    comp[v] = s;
                    queue.push_back(v);
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn full_coverage_is_the_source() {
        let src = Graph::build([(10, 11), (11, 12), (12, 10), (12, 13)], false).unwrap();
        let s = sample_subgraph(&src, 4, &BiasParams::default(), 3).unwrap();
        assert!(s.complete);
        assert_eq!(s.graph.node_count(), 4);
        assert_eq!(s.graph.edge_count(), 4);
        let back = s.graph.relabel(&s.relabel);
        assert_eq!(back, src);
    }

    #[test]
    fn deterministic_for_seed() {
        let src = synthetic::preferential_attachment(500, 3, false, 1);
        let a = sample_subgraph(&src, 40, &BiasParams::default(), 9).unwrap();
        let b = sample_subgraph(&src, 40, &BiasParams::default(), 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn edges_map_back_to_source() {
        let src = synthetic::preferential_attachment(300, 2, true, 5);
        let s = sample_subgraph(&src, 60, &BiasParams::default(), 2).unwrap();
        for e in s.graph.edges() {
            assert!(src.contains_edge(s.relabel[&e.u], s.relabel[&e.v]));
        }
    }

    #[test]
    fn small_component_is_partial() {
        let src = Graph::build([(0, 1), (2, 3)], false).unwrap();
        let s = sample_subgraph(&src, 3, &BiasParams::default(), 0).unwrap();
        assert!(!s.complete);
        assert_eq!(s.graph.node_count(), 2);
    }

    #[test]
    fn rejects_bad_targets() {
        let src = Graph::build([(0, 1)], false).unwrap();
        assert!(sample_subgraph(&src, 0, &BiasParams::default(), 0).is_err());
        assert!(sample_subgraph(&src, 3, &BiasParams::default(), 0).is_err());
    }
}
