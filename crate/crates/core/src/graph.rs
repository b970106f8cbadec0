//! Canonical graph model.
//!
//! A [`Graph`] is a node registry plus an edge set keyed by endpoint pair.
//! Undirected edges are stored with `u <= v`. Every other view in the crate
//! (text renderings, matrices, adjacency maps) is derived from this one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = u32;

/// One edge statement as it appears in text or in an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        Edge { u, v, w: None }
    }

    pub fn weighted(u: NodeId, v: NodeId, w: f64) -> Self {
        Edge { u, v, w: Some(w) }
    }
}

impl From<(NodeId, NodeId)> for Edge {
    fn from((u, v): (NodeId, NodeId)) -> Self {
        Edge::new(u, v)
    }
}

impl From<(NodeId, NodeId, f64)> for Edge {
    fn from((u, v, w): (NodeId, NodeId, f64)) -> Self {
        Edge::weighted(u, v, w)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge ({u},{v}) has non-positive or non-finite weight {w}")]
    NegativeWeight { u: NodeId, v: NodeId, w: f64 },
    #[error("edge list mixes weighted and unweighted edges")]
    MixedWeighting,
    #[error("graphs have different node sets")]
    NodeSetMismatch,
    #[error("graphs differ in directedness")]
    DirectednessMismatch,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("target of {target} nodes outside 1..={available}")]
    InvalidTarget { target: usize, available: usize },
}

/// Directed or undirected, optionally weighted, simple graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    directed: bool,
    weighted: bool,
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), Option<f64>>,
}

/// Serialized shape of a [`Graph`]: explicit node list plus edge list.
#[derive(Serialize, Deserialize)]
struct GraphRecord {
    directed: bool,
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            directed: g.directed,
            nodes: g.nodes.iter().copied().collect(),
            edges: g.edges().collect(),
        }
    }
}

impl TryFrom<GraphRecord> for Graph {
    type Error = GraphError;

    fn try_from(r: GraphRecord) -> Result<Self, GraphError> {
        Graph::with_nodes(r.nodes, r.edges, r.directed)
    }
}

impl Graph {
    pub fn empty(directed: bool) -> Self {
        Graph {
            directed,
            weighted: false,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse onto the
    /// first occurrence; for undirected graphs `(u,v)` and `(v,u)` are the same edge.
    pub fn build<I, E>(edges: I, directed: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        Self::with_nodes(std::iter::empty(), edges, directed)
    }

    /// Like [`Graph::build`], additionally registering `nodes` (which may be isolated).
    pub fn with_nodes<N, I, E>(nodes: N, edges: I, directed: bool) -> Result<Self, GraphError>
    where
        N: IntoIterator<Item = NodeId>,
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        let mut g = Graph::empty(directed);
        g.nodes.extend(nodes);
        let mut weighting: Option<bool> = None;
        for e in edges {
            let e = e.into();
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if let Some(w) = e.w {
                if !(w.is_finite() && w > 0.0) {
                    return Err(GraphError::NegativeWeight { u: e.u, v: e.v, w });
                }
            }
            match weighting {
                None => weighting = Some(e.w.is_some()),
                Some(has) if has != e.w.is_some() => return Err(GraphError::MixedWeighting),
                _ => {}
            }
            g.nodes.insert(e.u);
            g.nodes.insert(e.v);
            g.edges.entry(g.key(e.u, e.v)).or_insert(e.w);
        }
        g.weighted = weighting.unwrap_or(false);
        Ok(g)
    }

    fn key(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.directed || u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_set(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn contains_node(&self, x: NodeId) -> bool {
        self.nodes.contains(&x)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains_key(&self.key(u, v))
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<Option<f64>> {
        self.edges.get(&self.key(u, v)).copied()
    }

    /// Edges in canonical (sorted key) order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| Edge { u, v, w })
    }

    pub fn edge_list(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> Graph {
        Graph {
            directed: self.directed,
            weighted: self.weighted,
            nodes: keep.intersection(&self.nodes).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(&(u, v), _)| keep.contains(&u) && keep.contains(&v))
                .map(|(&k, &w)| (k, w))
                .collect(),
        }
    }

    /// Renames every node through `map`. Nodes missing from the map are dropped
    /// together with their edges.
    pub fn relabel(&self, map: &BTreeMap<NodeId, NodeId>) -> Graph {
        let mut g = Graph::empty(self.directed);
        g.weighted = self.weighted;
        g.nodes = self.nodes.iter().filter_map(|x| map.get(x).copied()).collect();
        for e in self.edges() {
            if let (Some(&u), Some(&v)) = (map.get(&e.u), map.get(&e.v)) {
                let k = g.key(u, v);
                g.edges.insert(k, e.w);
            }
        }
        g
    }

    /// Returns a copy with every edge weight replaced by `f(edge)`.
    pub fn with_weights(&self, mut f: impl FnMut(Edge) -> f64) -> Result<Graph, GraphError> {
        let edges: Vec<Edge> = self
            .edges()
            .map(|e| {
                let w = f(e);
                Edge::weighted(e.u, e.v, w)
            })
            .collect();
        Graph::with_nodes(self.nodes.iter().copied(), edges, self.directed)
    }

    /// Same edges with directions forgotten.
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut g = Graph::empty(false);
        g.weighted = self.weighted;
        g.nodes = self.nodes.clone();
        for e in self.edges() {
            let k = g.key(e.u, e.v);
            g.edges.entry(k).or_insert(e.w);
        }
        g
    }

    /// Neighbors ignoring direction, for every node.
    pub fn undirected_neighbors(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> =
            self.nodes.iter().map(|&x| (x, Vec::new())).collect();
        for &(u, v) in self.edges.keys() {
            adj.get_mut(&u).unwrap().push(v);
            adj.get_mut(&v).unwrap().push(u);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} graph, {} nodes, {} edges",
            if self.directed { "directed" } else { "undirected" },
            self.node_count(),
            self.edge_count()
        )
    }
}

/// Edge edit distance between two graphs on the same node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EditDistance {
    pub added: usize,
    pub removed: usize,
    pub total: usize,
}

/// Number of edge insertions and deletions turning `g` into `h`.
///
/// Edge identity is the endpoint pair; weights are not compared here (see
/// [`weight_discrepancies`]).
pub fn edit_distance(g: &Graph, h: &Graph) -> Result<EditDistance, GraphError> {
    if g.directed != h.directed {
        return Err(GraphError::DirectednessMismatch);
    }
    if g.nodes != h.nodes {
        return Err(GraphError::NodeSetMismatch);
    }
    Ok(edit_distance_unchecked(g, h))
}

/// Edge set difference without the node-set precondition. Used where the
/// transformed graph may have lost or invented nodes.
pub fn edit_distance_unchecked(g: &Graph, h: &Graph) -> EditDistance {
    let added = h.edges.keys().filter(|k| !g.edges.contains_key(k)).count();
    let removed = g.edges.keys().filter(|k| !h.edges.contains_key(k)).count();
    EditDistance {
        added,
        removed,
        total: added + removed,
    }
}

/// Count of edges present in both graphs whose weights differ.
pub fn weight_discrepancies(g: &Graph, h: &Graph) -> usize {
    g.edges
        .iter()
        .filter(|(k, w)| matches!(h.edges.get(k), Some(other) if other != *w))
        .count()
}
