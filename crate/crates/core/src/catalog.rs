//! Solvers for questions outside the common toolset, keyed by catalog
//! entry, plus classical baselines standing in for the predictive tasks.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::Answer;
use crate::buffer::{FormatId, GraphStore, Topology};
use crate::graph::NodeId;
use crate::toolset::{self, opt_arg, parse_arg, pos, Args, ToolError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog key `{0}`")]
    UnknownCatalogKey(String),
    #[error("parameter schema violation: {0}")]
    ParamSchemaViolation(String),
    #[error(transparent)]
    Tool(#[from] ToolError),
    #[error("source and sink must differ")]
    SameEndpoints,
    #[error("damping must lie strictly between 0 and 1, got {0}")]
    InvalidDamping(f64),
    #[error("store has no {0} data for this solver")]
    MissingFeatures(&'static str),
    #[error("store does not index the {0} view")]
    MissingView(FormatId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CatalogKey {
    MaxFlow,
    Diameter,
    MaxCore,
    ConnectedComponents,
    CommonNeighbors,
    PageRank,
    ReferenceMatch,
    ClusteringCoefficient,
    LinkPredictionBaseline,
    NodeClassificationBaseline,
    TrafficPredictionBaseline,
}

impl CatalogKey {
    pub const ALL: [CatalogKey; 11] = [
        CatalogKey::MaxFlow,
        CatalogKey::Diameter,
        CatalogKey::MaxCore,
        CatalogKey::ConnectedComponents,
        CatalogKey::CommonNeighbors,
        CatalogKey::PageRank,
        CatalogKey::ReferenceMatch,
        CatalogKey::ClusteringCoefficient,
        CatalogKey::LinkPredictionBaseline,
        CatalogKey::NodeClassificationBaseline,
        CatalogKey::TrafficPredictionBaseline,
    ];
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for CatalogKey {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, CatalogError> {
        let wanted: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        CatalogKey::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(&wanted))
            .ok_or_else(|| CatalogError::UnknownCatalogKey(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: String,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: CatalogKey,
    pub description: String,
    pub params: Vec<ParamSpec>,
    pub required_view: FormatId,
}

fn p(name: &str, kind: &str, required: bool) -> ParamSpec {
    ParamSpec {
        name: name.into(),
        kind: kind.into(),
        required,
    }
}

pub fn entry(key: CatalogKey) -> CatalogEntry {
    use CatalogKey::*;
    let (description, params, required_view) = match key {
        MaxFlow => (
            "Maximum s-t flow with edge weights as capacities (Edmonds-Karp).",
            vec![p("s", "node", true), p("t", "node", true)],
            FormatId::Topology,
        ),
        Diameter => ("Longest shortest-path distance (Floyd-Warshall).", vec![], FormatId::Matrix),
        MaxCore => ("Largest k with a non-empty k-core (core decomposition).", vec![], FormatId::Topology),
        ConnectedComponents => ("Number of connected components (breadth-first search).", vec![], FormatId::Topology),
        CommonNeighbors => (
            "Number of shared neighbors of u and v (set intersection).",
            vec![p("u", "node", true), p("v", "node", true), p("direction", "out|undirected", false)],
            FormatId::Topology,
        ),
        PageRank => (
            "PageRank scores by power iteration; one node's score when `node` is given.",
            vec![
                p("node", "node", false),
                p("damping", "real", false),
                p("tol", "real", false),
                p("max_iter", "count", false),
            ],
            FormatId::EdgeIndex,
        ),
        ReferenceMatch => (
            "Number of references cited by both u and v (out-neighbor intersection).",
            vec![p("u", "node", true), p("v", "node", true)],
            FormatId::Topology,
        ),
        ClusteringCoefficient => (
            "Local clustering coefficient of a node (triangle counting).",
            vec![p("node", "node", true)],
            FormatId::Topology,
        ),
        LinkPredictionBaseline => (
            "Predicts a link when u and v share at least `threshold` neighbors.",
            vec![p("u", "node", true), p("v", "node", true), p("threshold", "count", false)],
            FormatId::Topology,
        ),
        NodeClassificationBaseline => (
            "Majority label among neighbors, falling back to the global majority.",
            vec![p("node", "node", true)],
            FormatId::Topology,
        ),
        TrafficPredictionBaseline => (
            "Mean of the last `window` observations of a node's series.",
            vec![p("node", "node", true), p("window", "count", false)],
            FormatId::FeatureTable,
        ),
    };
    CatalogEntry {
        key,
        description: description.into(),
        params,
        required_view,
    }
}

pub fn manifest() -> Vec<CatalogEntry> {
    CatalogKey::ALL.into_iter().map(entry).collect()
}

pub fn manifest_json() -> String {
    serde_json::to_string_pretty(&manifest()).expect("manifest serializes")
}

/// A catalog key with parameters, validated against the entry's schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPlan {
    pub catalog_key: CatalogKey,
    pub params: Args,
    pub required_view: FormatId,
}

impl ModelPlan {
    pub fn new(key: CatalogKey, params: Args) -> Result<Self, CatalogError> {
        let e = entry(key);
        for name in params.keys() {
            if !e.params.iter().any(|s| &s.name == name) {
                return Err(CatalogError::ParamSchemaViolation(format!("{key} takes no parameter `{name}`")));
            }
        }
        for spec in &e.params {
            match params.get(&spec.name) {
                None if spec.required => {
                    return Err(CatalogError::ParamSchemaViolation(format!(
                        "{key} requires `{}`",
                        spec.name
                    )))
                }
                Some(raw) => {
                    let ok = match spec.kind.as_str() {
                        "node" | "count" => raw.trim().parse::<u32>().is_ok(),
                        "real" => raw.trim().parse::<f64>().is_ok(),
                        _ => ["out", "undirected"].contains(&raw.trim().to_ascii_lowercase().as_str()),
                    };
                    if !ok {
                        return Err(CatalogError::ParamSchemaViolation(format!(
                            "`{}` = `{raw}` is not a valid {}",
                            spec.name, spec.kind
                        )));
                    }
                }
                None => {}
            }
        }
        Ok(ModelPlan {
            catalog_key: key,
            params,
            required_view: e.required_view,
        })
    }

    /// Parses the key by name first; unknown names are rejected.
    pub fn from_parts(key: &str, params: Args) -> Result<Self, CatalogError> {
        ModelPlan::new(key.parse()?, params)
    }
}

struct Arc {
    to: usize,
    cap: f64,
    rev: usize,
}

/// Edmonds-Karp maximum flow. Edge weights are capacities (1 when
/// unweighted); undirected edges carry capacity both ways.
pub fn max_flow(store: &GraphStore, s: NodeId, t: NodeId) -> Result<f64, CatalogError> {
    let topo = store.topology();
    let (s, t) = (pos(topo, s)?, pos(topo, t)?);
    if s == t {
        return Err(CatalogError::SameEndpoints);
    }
    let n = topo.node_count();
    let mut arcs: Vec<Vec<Arc>> = (0..n).map(|_| Vec::new()).collect();
    for u in 0..n {
        for &(v, w) in topo.out(u) {
            if !topo.is_directed() && v < u {
                continue;
            }
            let back = if topo.is_directed() { 0.0 } else { w };
            let (iu, iv) = (arcs[u].len(), arcs[v].len());
            arcs[u].push(Arc { to: v, cap: w, rev: iv });
            arcs[v].push(Arc { to: u, cap: back, rev: iu });
        }
    }
    const EPS: f64 = 1e-12;
    let mut flow = 0.0;
    loop {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::from([s]);
        let mut reached = false;
        while let Some(u) = queue.pop_front() {
            for (i, a) in arcs[u].iter().enumerate() {
                if a.cap > EPS && prev[a.to].is_none() && a.to != s {
                    prev[a.to] = Some((u, i));
                    if a.to == t {
                        reached = true;
                        break;
                    }
                    queue.push_back(a.to);
                }
            }
            if reached {
                break;
            }
        }
        if !reached {
            return Ok(flow);
        }
        let mut push = f64::INFINITY;
        let mut v = t;
        while let Some((u, i)) = prev[v] {
            push = push.min(arcs[u][i].cap);
            v = u;
        }
        let mut v = t;
        while let Some((u, i)) = prev[v] {
            arcs[u][i].cap -= push;
            let r = arcs[u][i].rev;
            arcs[v][r].cap += push;
            v = u;
        }
        flow += push;
    }
}

/// Above this size the diameter falls back to one Dijkstra per source.
const FLOYD_WARSHALL_LIMIT: usize = 512;

/// Maximum shortest-path distance over ordered pairs; `None` when some
/// pair is unreachable.
pub fn diameter(store: &GraphStore) -> Option<f64> {
    let t = store.topology();
    let n = t.node_count();
    let mut best = 0.0f64;
    if n <= FLOYD_WARSHALL_LIMIT {
        let mut d = vec![f64::INFINITY; n * n];
        for u in 0..n {
            d[u * n + u] = 0.0;
            for &(v, w) in t.out(u) {
                d[u * n + v] = d[u * n + v].min(w);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                    }
                }
            }
        }
        for x in d {
            if !x.is_finite() {
                return None;
            }
            best = best.max(x);
        }
    } else {
        for s in 0..n {
            for x in toolset::dijkstra(t, s, false) {
                if !x.is_finite() {
                    return None;
                }
                best = best.max(x);
            }
        }
    }
    Some(best)
}

fn undirected_lists(t: &Topology) -> Vec<Vec<usize>> {
    (0..t.node_count()).map(|p| t.undirected(p)).collect()
}

/// Largest k whose k-core is non-empty, by bucket-based peeling on the
/// underlying undirected graph.
pub fn max_core(store: &GraphStore) -> usize {
    let nbrs = undirected_lists(store.topology());
    let n = nbrs.len();
    let mut degree: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].push(v);
    }
    let mut removed = vec![false; n];
    let mut k = 0;
    let mut best = 0;
    let mut left = n;
    while left > 0 {
        let Some(v) = buckets[k].pop() else {
            k += 1;
            continue;
        };
        if removed[v] || degree[v] != k {
            continue;
        }
        removed[v] = true;
        left -= 1;
        best = best.max(k);
        for &u in &nbrs[v] {
            if !removed[u] && degree[u] > k {
                degree[u] -= 1;
                buckets[degree[u]].push(u);
            }
        }
    }
    best
}

/// Components of the underlying undirected graph, isolated nodes included.
pub fn connected_components(store: &GraphStore) -> usize {
    let t = store.topology();
    let n = t.node_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in t.out(u).iter().chain(t.inc(u)) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborDirection {
    Out,
    Undirected,
}

pub fn common_neighbors(
    store: &GraphStore,
    u: NodeId,
    v: NodeId,
    direction: NeighborDirection,
) -> Result<usize, CatalogError> {
    let t = store.topology();
    let (a, b) = (pos(t, u)?, pos(t, v)?);
    let list = |x: usize| match direction {
        NeighborDirection::Out => t.out(x).iter().map(|&(y, _)| y).collect::<Vec<_>>(),
        NeighborDirection::Undirected => t.undirected(x),
    };
    let (la, lb) = (list(a), list(b));
    let (small, large) = if la.len() <= lb.len() { (la, lb) } else { (lb, la) };
    Ok(small.iter().filter(|x| large.binary_search(x).is_ok()).count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRank {
    pub scores: Vec<(NodeId, f64)>,
    pub iterations: usize,
    /// False when `max_iter` was reached before the L1 change fell below `tol`.
    pub converged: bool,
}

impl PageRank {
    pub fn score(&self, x: NodeId) -> Option<f64> {
        self.scores
            .binary_search_by_key(&x, |&(n, _)| n)
            .ok()
            .map(|i| self.scores[i].1)
    }
}

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Power iteration `p <- (1-d)/n + d * (Mᵀp + dangling/n)`, stopping when
/// the L1 change drops below `tol`. Undirected edges link both ways.
pub fn pagerank(store: &GraphStore, damping: f64, tol: f64, max_iter: usize) -> Result<PageRank, CatalogError> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(CatalogError::InvalidDamping(damping));
    }
    let t = store.topology();
    let n = t.node_count();
    if n == 0 {
        return Ok(PageRank {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
        });
    }
    let nf = n as f64;
    let mut p = vec![1.0 / nf; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&u| t.out_degree(u) == 0).map(|u| p[u]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        let mut next = vec![base; n];
        for u in 0..n {
            let deg = t.out_degree(u);
            if deg > 0 {
                let share = damping * p[u] / deg as f64;
                for &(v, _) in t.out(u) {
                    next[v] += share;
                }
            }
        }
        // renormalize away floating-point drift
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let change: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(PageRank {
        scores: (0..n).map(|i| (t.id(i), p[i])).collect(),
        iterations,
        converged,
    })
}

/// `2 * links among neighbors / (k * (k - 1))`, 0 when degree < 2.
pub fn clustering_coefficient(store: &GraphStore, v: NodeId) -> Result<f64, CatalogError> {
    let t = store.topology();
    let pv = pos(t, v)?;
    let nbrs = t.undirected(pv);
    let k = nbrs.len();
    if k < 2 {
        return Ok(0.0);
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        let na = t.undirected(a);
        links += nbrs[i + 1..].iter().filter(|b| na.binary_search(b).is_ok()).count();
    }
    Ok(2.0 * links as f64 / (k * (k - 1)) as f64)
}

pub const DEFAULT_LINK_THRESHOLD: usize = 1;
pub const DEFAULT_TRAFFIC_WINDOW: usize = 3;

/// Common-neighbor rule: predicts a link when `|N(u) ∩ N(v)| >= threshold`.
pub fn link_prediction(store: &GraphStore, u: NodeId, v: NodeId, threshold: usize) -> Result<bool, CatalogError> {
    Ok(common_neighbors(store, u, v, NeighborDirection::Undirected)? >= threshold)
}

fn majority(labels: impl Iterator<Item = u32>) -> Option<u32> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // max_by_key keeps the last maximum; iterate in reverse so the smallest label wins ties
    counts.into_iter().rev().max_by_key(|&(_, c)| c).map(|(l, _)| l)
}

/// Majority label among labeled neighbors (ties to the smallest label);
/// falls back to the global majority over other labeled nodes.
pub fn node_classification(store: &GraphStore, node: NodeId) -> Result<u32, CatalogError> {
    let t = store.topology();
    let p = pos(t, node)?;
    let labels = store.labels();
    if labels.is_empty() {
        return Err(CatalogError::MissingFeatures("node label"));
    }
    let local = majority(t.undirected(p).into_iter().filter_map(|q| labels.get(&t.id(q)).copied()));
    local
        .or_else(|| majority(labels.iter().filter(|(&k, _)| k != node).map(|(_, &l)| l)))
        .ok_or(CatalogError::MissingFeatures("node label"))
}

/// Mean of the last `window` raw observations in the node's feature row.
pub fn traffic_prediction(store: &GraphStore, node: NodeId, window: usize) -> Result<f64, CatalogError> {
    let t = store.topology();
    let p = pos(t, node)?;
    let f = store.features().ok_or(CatalogError::MissingFeatures("time-series"))?;
    let row = &f.raw[p];
    let k = window.max(1).min(row.len());
    if k == 0 {
        return Err(CatalogError::MissingFeatures("time-series"));
    }
    Ok(row[row.len() - k..].iter().sum::<f64>() / k as f64)
}

/// Dispatches a validated plan to its solver and normalizes the answer.
pub fn execute_plan(plan: &ModelPlan, store: &GraphStore) -> Result<Answer, CatalogError> {
    use CatalogKey::*;
    let plan = ModelPlan::new(plan.catalog_key, plan.params.clone())?;
    if store.record(plan.required_view).is_none() {
        return Err(match plan.catalog_key {
            TrafficPredictionBaseline => CatalogError::MissingFeatures("time-series"),
            _ => CatalogError::MissingView(plan.required_view),
        });
    }
    let a = &plan.params;
    let node = |k: &str| parse_arg::<NodeId>(a, k);
    Ok(match plan.catalog_key {
        MaxFlow => Answer::Distance(max_flow(store, node("s")?, node("t")?)?),
        Diameter => diameter(store).map_or(Answer::Disconnected, Answer::Distance),
        MaxCore => Answer::Count(max_core(store) as u64),
        ConnectedComponents => Answer::Count(connected_components(store) as u64),
        CommonNeighbors => {
            let direction = match a.get("direction").map(|d| d.trim().to_ascii_lowercase()) {
                Some(d) if d == "out" => NeighborDirection::Out,
                _ => NeighborDirection::Undirected,
            };
            Answer::Count(common_neighbors(store, node("u")?, node("v")?, direction)? as u64)
        }
        ReferenceMatch => Answer::Count(common_neighbors(store, node("u")?, node("v")?, NeighborDirection::Out)? as u64),
        PageRank => {
            let pr = pagerank(
                store,
                opt_arg(a, "damping")?.unwrap_or(DEFAULT_DAMPING),
                opt_arg(a, "tol")?.unwrap_or(DEFAULT_TOL),
                opt_arg(a, "max_iter")?.unwrap_or(DEFAULT_MAX_ITER),
            )?;
            match opt_arg::<NodeId>(a, "node")? {
                Some(x) => Answer::Real(pr.score(x).ok_or(ToolError::UnknownNode(x))?),
                None => Answer::Scores(pr.scores),
            }
        }
        ClusteringCoefficient => Answer::Real(clustering_coefficient(store, node("node")?)?),
        LinkPredictionBaseline => Answer::Bool(link_prediction(
            store,
            node("u")?,
            node("v")?,
            opt_arg(a, "threshold")?.unwrap_or(DEFAULT_LINK_THRESHOLD),
        )?),
        NodeClassificationBaseline => Answer::Label(node_classification(store, node("node")?)?),
        TrafficPredictionBaseline => Answer::Real(traffic_prediction(
            store,
            node("node")?,
            opt_arg(a, "window")?.unwrap_or(DEFAULT_TRAFFIC_WINDOW),
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn store(edges: &[(NodeId, NodeId)], directed: bool) -> GraphStore {
        GraphStore::build(Graph::build(edges.iter().copied(), directed).unwrap(), None).unwrap()
    }

    fn args(pairs: &[(&str, &str)]) -> Args {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flow_examples() {
        let s = GraphStore::build(Graph::build([(0, 1, 7.0)], true).unwrap(), None).unwrap();
        assert_eq!(max_flow(&s, 0, 1).unwrap(), 7.0);
        let s = store(&[(0, 1), (2, 3)], false);
        assert_eq!(max_flow(&s, 0, 3).unwrap(), 0.0);
        assert_eq!(max_flow(&s, 0, 0), Err(CatalogError::SameEndpoints));
        assert!(matches!(max_flow(&s, 0, 9), Err(CatalogError::Tool(ToolError::UnknownNode(9)))));
    }

    #[test]
    fn undirected_flow_is_symmetric() {
        let s = store(&[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)], false);
        assert_eq!(max_flow(&s, 0, 3).unwrap(), 2.0);
        assert_eq!(max_flow(&s, 3, 0).unwrap(), 2.0);
    }

    #[test]
    fn diameter_examples() {
        let path = store(&[(0, 1), (1, 2), (2, 3), (3, 4)], false);
        assert_eq!(diameter(&path), Some(4.0));
        let k4 = store(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], false);
        assert_eq!(diameter(&k4), Some(1.0));
        assert_eq!(diameter(&store(&[(0, 1), (2, 3)], false)), None);
    }

    #[test]
    fn core_examples() {
        let k4 = store(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], false);
        assert_eq!(max_core(&k4), 3);
        let tree = store(&[(0, 1), (1, 2), (1, 3), (3, 4)], false);
        assert_eq!(max_core(&tree), 1);
        let empty = GraphStore::build(Graph::empty(false), None).unwrap();
        assert_eq!(max_core(&empty), 0);
    }

    #[test]
    fn component_examples() {
        assert_eq!(connected_components(&store(&[(0, 1), (1, 2)], false)), 1);
        let isolated = GraphStore::build(Graph::with_nodes(0..5, Vec::<(u32, u32)>::new(), false).unwrap(), None).unwrap();
        assert_eq!(connected_components(&isolated), 5);
        assert_eq!(connected_components(&store(&[(0, 1), (2, 1)], true)), 1);
    }

    #[test]
    fn neighbor_examples() {
        let star = store(&[(0, 1), (0, 2), (0, 3)], false);
        assert_eq!(common_neighbors(&star, 1, 2, NeighborDirection::Undirected).unwrap(), 1);
        let split = store(&[(0, 1), (2, 3)], false);
        assert_eq!(common_neighbors(&split, 0, 2, NeighborDirection::Undirected).unwrap(), 0);
        let cites = store(&[(0, 2), (0, 3), (1, 3), (2, 0)], true);
        assert_eq!(common_neighbors(&cites, 0, 1, NeighborDirection::Out).unwrap(), 1);
    }

    #[test]
    fn pagerank_symmetry() {
        let pair = store(&[(0, 1), (1, 0)], true);
        let pr = pagerank(&pair, 0.85, 1e-12, 200).unwrap();
        assert!(pr.converged);
        for (_, x) in &pr.scores {
            assert!((x - 0.5).abs() < 1e-12);
        }
        let cycle = store(&[(0, 1), (1, 2), (2, 0)], true);
        let pr = pagerank(&cycle, 0.85, 1e-12, 200).unwrap();
        for (_, x) in &pr.scores {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(matches!(pagerank(&cycle, 1.0, 1e-9, 10), Err(CatalogError::InvalidDamping(_))));
    }

    #[test]
    fn pagerank_non_convergence_is_flagged() {
        let chain = store(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], true);
        let pr = pagerank(&chain, 0.85, 0.0, 3).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 3);
        let sum: f64 = pr.scores.iter().map(|s| s.1).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn clustering_examples() {
        let tri = store(&[(0, 1), (1, 2), (0, 2)], false);
        assert_eq!(clustering_coefficient(&tri, 0).unwrap(), 1.0);
        let star = store(&[(0, 1), (0, 2), (0, 3)], false);
        assert_eq!(clustering_coefficient(&star, 0).unwrap(), 0.0);
        assert_eq!(clustering_coefficient(&star, 1).unwrap(), 0.0);
    }

    #[test]
    fn baselines() {
        let s = store(&[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)], false);
        assert!(link_prediction(&s, 0, 1, 1).unwrap());
        assert!(!link_prediction(&s, 0, 1, 4).unwrap());

        let s = store(&[(0, 1), (0, 2), (0, 3)], false).with_labels([(1, 0), (2, 0), (3, 1)].into());
        assert_eq!(node_classification(&s, 0).unwrap(), 0);
        let tie = store(&[(0, 1), (0, 2), (4, 5)], false).with_labels([(1, 3), (2, 1), (5, 2), (4, 2)].into());
        assert_eq!(node_classification(&tie, 0).unwrap(), 1);
        // no labeled neighbors: global majority
        let lonely = store(&[(0, 9), (1, 2), (2, 3)], false).with_labels([(1, 4), (2, 4), (3, 6)].into());
        assert_eq!(node_classification(&lonely, 0).unwrap(), 4);
        assert!(matches!(
            node_classification(&store(&[(0, 1)], false), 0),
            Err(CatalogError::MissingFeatures(_))
        ));

        let g = Graph::build([(0, 1)], false).unwrap();
        let s = GraphStore::build(g, Some(vec![vec![10.0, 12.0, 14.0], vec![5.0, 5.0, 5.0]])).unwrap();
        assert_eq!(traffic_prediction(&s, 0, 3).unwrap(), 12.0);
        assert_eq!(traffic_prediction(&s, 1, 3).unwrap(), 5.0);
    }

    #[test]
    fn plans() {
        let cycle = store(&[(0, 1), (1, 2), (2, 0)], true);
        let plan = ModelPlan::new(CatalogKey::PageRank, args(&[("damping", "0.85")])).unwrap();
        assert_eq!(
            execute_plan(&plan, &cycle).unwrap().normalized(),
            "0:0.333333, 1:0.333333, 2:0.333333"
        );
        let s = GraphStore::build(Graph::build([(0, 1, 4.0)], true).unwrap(), None).unwrap();
        let plan = ModelPlan::from_parts("MaxFlow", args(&[("s", "0"), ("t", "1")])).unwrap();
        assert_eq!(execute_plan(&plan, &s).unwrap(), Answer::Distance(4.0));
        assert_eq!(
            ModelPlan::from_parts("FooBar", Args::new()),
            Err(CatalogError::UnknownCatalogKey("FooBar".into()))
        );
        assert!(matches!(
            ModelPlan::new(CatalogKey::MaxFlow, args(&[("s", "0")])),
            Err(CatalogError::ParamSchemaViolation(_))
        ));
        assert!(matches!(
            ModelPlan::new(CatalogKey::Diameter, args(&[("x", "0")])),
            Err(CatalogError::ParamSchemaViolation(_))
        ));
        let traffic = ModelPlan::new(CatalogKey::TrafficPredictionBaseline, args(&[("node", "0")])).unwrap();
        assert!(matches!(execute_plan(&traffic, &s), Err(CatalogError::MissingFeatures(_))));
    }

    #[test]
    fn key_parsing_is_loose_on_case_and_separators() {
        assert_eq!("page_rank".parse::<CatalogKey>().unwrap(), CatalogKey::PageRank);
        assert_eq!("max-core".parse::<CatalogKey>().unwrap(), CatalogKey::MaxCore);
        assert_eq!(manifest().len(), 11);
    }
}
