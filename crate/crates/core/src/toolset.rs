//! The pre-built common toolset: direct lookups and four classical
//! algorithms, each answering one question kind over a [`GraphStore`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::Answer;
use crate::buffer::{GraphStore, Topology};
use crate::graph::NodeId;

pub type Args = BTreeMap<String, String>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToolError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("missing argument `{0}`")]
    MissingArg(String),
    #[error("argument `{name}` has invalid value `{value}`")]
    BadArg { name: String, value: String },
}

pub(crate) fn arg<'a>(args: &'a Args, name: &str) -> Result<&'a str, ToolError> {
    args.get(name)
        .map(String::as_str)
        .ok_or_else(|| ToolError::MissingArg(name.to_string()))
}

pub(crate) fn parse_arg<T: std::str::FromStr>(args: &Args, name: &str) -> Result<T, ToolError> {
    let raw = arg(args, name)?;
    raw.trim().parse().map_err(|_| ToolError::BadArg {
        name: name.to_string(),
        value: raw.to_string(),
    })
}

pub(crate) fn opt_arg<T: std::str::FromStr>(args: &Args, name: &str) -> Result<Option<T>, ToolError> {
    match args.get(name) {
        None => Ok(None),
        Some(_) => parse_arg(args, name).map(Some),
    }
}

pub(crate) fn pos(t: &Topology, x: NodeId) -> Result<usize, ToolError> {
    t.position(x).ok_or(ToolError::UnknownNode(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnswerType {
    Boolean,
    Count,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub param_schema: Vec<(String, String)>,
    pub answer_type: AnswerType,
}

fn descriptor(name: &str, description: &str, params: &[&str], answer_type: AnswerType) -> ToolDescriptor {
    ToolDescriptor {
        name: name.into(),
        description: description.into(),
        param_schema: params.iter().map(|p| (p.to_string(), "node".to_string())).collect(),
        answer_type,
    }
}

/// Descriptors for all nine tools, in a fixed order.
pub fn manifest() -> Vec<ToolDescriptor> {
    use AnswerType::*;
    vec![
        descriptor("edge_existence", "Whether an edge u-v exists (direct lookup).", &["u", "v"], Boolean),
        descriptor("node_existence", "Whether a node exists (direct lookup).", &["node"], Boolean),
        descriptor("edge_count", "Total number of edges (direct lookup).", &[], Count),
        descriptor("node_count", "Total number of nodes (direct lookup).", &[], Count),
        descriptor("degree_count", "Number of edges incident to a node (direct lookup).", &["node"], Count),
        descriptor("cycle_detection", "Whether the graph contains any cycle (depth-first search).", &[], Boolean),
        descriptor("triangle_count", "Number of triangles (node iterator).", &[], Count),
        descriptor("path_existence", "Whether t is reachable from s (depth-first search).", &["s", "t"], Boolean),
        descriptor("shortest_path", "Minimum total weight from s to t (Dijkstra).", &["s", "t"], Distance),
    ]
}

pub fn manifest_json() -> String {
    serde_json::to_string_pretty(&manifest()).expect("manifest serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructuralKind {
    EdgeExistence,
    NodeExistence,
    EdgeCount,
    NodeCount,
    DegreeCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DegreeDirection {
    #[default]
    Total,
    Out,
    In,
}

/// O(1)-style lookups answered from the topology view.
pub fn structural_query(
    store: &GraphStore,
    kind: StructuralKind,
    nodes: &[NodeId],
    direction: DegreeDirection,
) -> Result<Answer, ToolError> {
    let t = store.topology();
    let need = |i: usize| {
        nodes
            .get(i)
            .copied()
            .ok_or_else(|| ToolError::MissingArg(format!("node #{}", i + 1)))
    };
    Ok(match kind {
        StructuralKind::EdgeExistence => {
            let (u, v) = (need(0)?, need(1)?);
            let present = match (t.position(u), t.position(v)) {
                (Some(a), Some(b)) => t.edge_weight(a, b).is_some(),
                _ => false,
            };
            Answer::Bool(present)
        }
        StructuralKind::NodeExistence => Answer::Bool(t.position(need(0)?).is_some()),
        StructuralKind::EdgeCount => Answer::Count(t.edge_count() as u64),
        StructuralKind::NodeCount => Answer::Count(t.node_count() as u64),
        StructuralKind::DegreeCount => {
            let p = pos(t, need(0)?)?;
            let d = match direction {
                DegreeDirection::Total => t.degree(p),
                DegreeDirection::Out => t.out_degree(p),
                DegreeDirection::In => t.in_degree(p),
            };
            Answer::Count(d as u64)
        }
    })
}

/// Undirected: some edge closes a loop within its component. Directed: a
/// depth-first search meets a back edge.
pub fn cycle_detection(store: &GraphStore) -> bool {
    let t = store.topology();
    let n = t.node_count();
    if !t.is_directed() {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for u in 0..n {
            for &(v, _) in t.out(u) {
                if v > u {
                    let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                    if a == b {
                        return true;
                    }
                    parent[a] = b;
                }
            }
        }
        return false;
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, 0));
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if let Some(&(v, _)) = t.out(u).get(*next) {
                *next += 1;
                match color[v] {
                    0 => {
                        color[v] = 1;
                        stack.push((v, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleCount {
    pub triangles: u64,
    /// Set when a directed input was symmetrized before counting.
    pub symmetrized: bool,
}

/// Node-iterator triangle counting on the symmetrized graph.
pub fn triangle_count(store: &GraphStore) -> TriangleCount {
    let t = store.topology();
    let nbrs: Vec<Vec<usize>> = (0..t.node_count()).map(|p| t.undirected(p)).collect();
    let mut triangles = 0u64;
    for (u, nu) in nbrs.iter().enumerate() {
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = &nbrs[v];
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    Ordering::Less => i += 1,
                    Ordering::Greater => j += 1,
                    Ordering::Equal => {
                        if nu[i] > v {
                            triangles += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    TriangleCount {
        triangles,
        symmetrized: t.is_directed(),
    }
}

/// Whether `t` is reachable from `s`, following edge direction.
pub fn path_existence(store: &GraphStore, s: NodeId, t: NodeId) -> Result<bool, ToolError> {
    let topo = store.topology();
    let (s, t) = (pos(topo, s)?, pos(topo, t)?);
    let mut seen = vec![false; topo.node_count()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(u) = stack.pop() {
        if u == t {
            return Ok(true);
        }
        for &(v, _) in topo.out(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub distance: f64,
    pub path: Vec<NodeId>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra over positions; `reverse` walks incoming edges.
pub(crate) fn dijkstra(t: &Topology, source: usize, reverse: bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; t.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        let next = if reverse { t.inc(u) } else { t.out(u) };
        for &(v, w) in next {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    dist
}

/// Minimum-weight path from `s` to `t`, unit weights when unweighted.
/// Among equally short paths the lexicographically smallest node sequence
/// is returned. `Ok(None)` means no path exists.
pub fn shortest_path(store: &GraphStore, s: NodeId, t: NodeId) -> Result<Option<ShortestPath>, ToolError> {
    let topo = store.topology();
    let (sp, tp) = (pos(topo, s)?, pos(topo, t)?);
    let from_s = dijkstra(topo, sp, false);
    let total = from_s[tp];
    if !total.is_finite() {
        return Ok(None);
    }
    let to_t = dijkstra(topo, tp, true);
    let eps = 1e-9 * total.max(1.0);
    let mut path = vec![s];
    let mut u = sp;
    while u != tp {
        // positions are in id order, so the first hit is the smallest id
        u = topo
            .out(u)
            .iter()
            .find(|&&(v, w)| (from_s[u] + w + to_t[v] - total).abs() <= eps && from_s[u] + w <= from_s[v] + eps)
            .map(|&(v, _)| v)
            .expect("a shortest-path successor exists");
        path.push(topo.id(u));
    }
    Ok(Some(ShortestPath { distance: total, path }))
}

/// Runs the named tool with `key=value` arguments.
pub fn invoke(store: &GraphStore, name: &str, args: &Args) -> Result<Answer, ToolError> {
    let node = |k: &str| parse_arg::<NodeId>(args, k);
    match name {
        "edge_existence" => structural_query(
            store,
            StructuralKind::EdgeExistence,
            &[node("u")?, node("v")?],
            DegreeDirection::Total,
        ),
        "node_existence" => structural_query(store, StructuralKind::NodeExistence, &[node("node")?], DegreeDirection::Total),
        "edge_count" => structural_query(store, StructuralKind::EdgeCount, &[], DegreeDirection::Total),
        "node_count" => structural_query(store, StructuralKind::NodeCount, &[], DegreeDirection::Total),
        "degree_count" => {
            let direction = match args.get("direction").map(|d| d.to_ascii_lowercase()) {
                None => DegreeDirection::Total,
                Some(d) if d == "total" => DegreeDirection::Total,
                Some(d) if d == "out" => DegreeDirection::Out,
                Some(d) if d == "in" => DegreeDirection::In,
                Some(d) => {
                    return Err(ToolError::BadArg {
                        name: "direction".into(),
                        value: d,
                    })
                }
            };
            structural_query(store, StructuralKind::DegreeCount, &[node("node")?], direction)
        }
        "cycle_detection" => Ok(Answer::Bool(cycle_detection(store))),
        "triangle_count" => Ok(Answer::Count(triangle_count(store).triangles)),
        "path_existence" => Ok(Answer::Bool(path_existence(store, node("s")?, node("t")?)?)),
        "shortest_path" => Ok(match shortest_path(store, node("s")?, node("t")?)? {
            Some(p) => Answer::Distance(p.distance),
            None => Answer::NoPath,
        }),
        other => Err(ToolError::UnknownTool(other.to_string())),
    }
}

/// Breadth-first reachability set, used by generators to find feasible pairs.
pub fn reachable_from(store: &GraphStore, s: NodeId) -> Result<Vec<NodeId>, ToolError> {
    let t = store.topology();
    let sp = pos(t, s)?;
    let mut seen = vec![false; t.node_count()];
    let mut queue = VecDeque::from([sp]);
    seen[sp] = true;
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        out.push(t.id(u));
        for &(v, _) in t.out(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn store(edges: &[(NodeId, NodeId)], directed: bool) -> GraphStore {
        GraphStore::build(Graph::build(edges.iter().copied(), directed).unwrap(), None).unwrap()
    }

    #[test]
    fn path_lookups() {
        let s = store(&[(0, 1), (1, 2)], false);
        let q = |k, n: &[NodeId]| structural_query(&s, k, n, DegreeDirection::Total).unwrap();
        assert_eq!(q(StructuralKind::EdgeExistence, &[0, 1]), Answer::Bool(true));
        assert_eq!(q(StructuralKind::EdgeExistence, &[1, 0]), Answer::Bool(true));
        assert_eq!(q(StructuralKind::EdgeExistence, &[0, 2]), Answer::Bool(false));
        assert_eq!(q(StructuralKind::DegreeCount, &[1]), Answer::Count(2));
        assert_eq!(q(StructuralKind::NodeExistence, &[9]), Answer::Bool(false));
        assert_eq!(
            structural_query(&s, StructuralKind::DegreeCount, &[9], DegreeDirection::Total),
            Err(ToolError::UnknownNode(9))
        );
    }

    #[test]
    fn directed_degree() {
        let s = store(&[(0, 1), (2, 1), (1, 3)], true);
        let d = |dir| structural_query(&s, StructuralKind::DegreeCount, &[1], dir).unwrap();
        assert_eq!(d(DegreeDirection::Total), Answer::Count(3));
        assert_eq!(d(DegreeDirection::In), Answer::Count(2));
        assert_eq!(d(DegreeDirection::Out), Answer::Count(1));
    }

    #[test]
    fn cycles() {
        assert!(!cycle_detection(&store(&[(0, 1), (1, 2), (1, 3)], false)));
        assert!(cycle_detection(&store(&[(0, 1), (1, 2), (2, 0)], false)));
        assert!(!cycle_detection(&store(&[(0, 1), (1, 2), (0, 2)], true)));
        assert!(cycle_detection(&store(&[(0, 1), (1, 2), (2, 0)], true)));
        // an antiparallel pair is a directed 2-cycle
        assert!(cycle_detection(&store(&[(0, 1), (1, 0)], true)));
    }

    #[test]
    fn triangles() {
        let k3 = store(&[(0, 1), (1, 2), (0, 2)], false);
        assert_eq!(triangle_count(&k3).triangles, 1);
        let k4 = store(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], false);
        assert_eq!(triangle_count(&k4).triangles, 4);
        let star = store(&[(0, 1), (0, 2), (0, 3)], false);
        assert_eq!(triangle_count(&star).triangles, 0);
        let d = triangle_count(&store(&[(0, 1), (1, 2), (2, 0)], true));
        assert_eq!((d.triangles, d.symmetrized), (1, true));
    }

    #[test]
    fn reachability() {
        let s = store(&[(0, 1), (1, 2), (5, 6)], false);
        assert!(path_existence(&s, 0, 2).unwrap());
        assert!(!path_existence(&s, 0, 6).unwrap());
        let d = store(&[(0, 1)], true);
        assert!(!path_existence(&d, 1, 0).unwrap());
        assert_eq!(path_existence(&s, 0, 42), Err(ToolError::UnknownNode(42)));
    }

    #[test]
    fn shortest_paths() {
        let s = store(&[(0, 1), (1, 2)], false);
        let p = shortest_path(&s, 0, 2).unwrap().unwrap();
        assert_eq!((p.distance, p.path), (2.0, vec![0, 1, 2]));
        let s = store(&[(0, 1), (2, 3)], false);
        assert_eq!(shortest_path(&s, 0, 3).unwrap(), None);
    }

    #[test]
    fn shortest_path_tie_break() {
        // 0-3-1 and 0-2-1 both cost 2; the smaller sequence goes through 2
        let s = store(&[(0, 3), (3, 1), (0, 2), (2, 1)], false);
        assert_eq!(shortest_path(&s, 0, 1).unwrap().unwrap().path, vec![0, 2, 1]);
        let w = GraphStore::build(
            Graph::build([(0, 1, 5.0), (0, 2, 1.0), (2, 1, 1.0)], false).unwrap(),
            None,
        )
        .unwrap();
        let p = shortest_path(&w, 0, 1).unwrap().unwrap();
        assert_eq!((p.distance, p.path), (2.0, vec![0, 2, 1]));
    }

    #[test]
    fn invoke_by_name() {
        let s = store(&[(0, 1), (1, 2)], false);
        let args: Args = [("s".to_string(), "0".to_string()), ("t".to_string(), "2".to_string())].into();
        assert_eq!(invoke(&s, "shortest_path", &args).unwrap().normalized(), "2");
        assert_eq!(invoke(&s, "edge_count", &Args::new()).unwrap().normalized(), "2");
        assert!(matches!(invoke(&s, "teleport", &args), Err(ToolError::UnknownTool(_))));
        assert!(matches!(invoke(&s, "path_existence", &Args::new()), Err(ToolError::MissingArg(_))));
    }

    #[test]
    fn manifest_has_nine_unique_tools() {
        let m = manifest();
        assert_eq!(m.len(), 9);
        let mut names: Vec<_> = m.iter().map(|d| d.name.clone()).collect();
        names.dedup();
        assert_eq!(names.len(), 9);
    }
}
