//! Assembly of transformed chunks and the multi-format graph store.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edgelist::{self, EdgeListError};
use crate::graph::{Edge, Graph, GraphError, NodeId};

/// Above this node count the matrix view is stored as coordinate triplets.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Debug, Error)]
pub enum BufferError {
    #[error("feature table has {rows} rows but the graph has {nodes} nodes")]
    FeatureRowMismatch { rows: usize, nodes: usize },
    #[error("feature rows have inconsistent widths")]
    RaggedFeatures,
    #[error("format `{0}` is not indexed in this store")]
    UnknownFormat(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    EdgeList(#[from] EdgeListError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Concatenates chunk outputs in order and builds one graph from them.
pub fn assemble(chunk_outputs: &[Vec<Edge>], directed: bool) -> Result<Graph, GraphError> {
    Graph::build(chunk_outputs.iter().flatten().copied(), directed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormatId {
    Topology,
    Matrix,
    EdgeIndex,
    FeatureTable,
}

impl FormatId {
    pub const ALL: [FormatId; 4] = [
        FormatId::Topology,
        FormatId::Matrix,
        FormatId::EdgeIndex,
        FormatId::FeatureTable,
    ];
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for FormatId {
    type Err = BufferError;

    fn from_str(s: &str) -> Result<Self, BufferError> {
        FormatId::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| BufferError::UnknownFormat(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub format_id: FormatId,
    pub dimensionality: Vec<usize>,
    pub schema: String,
    pub metadata: String,
}

/// Adjacency map over dense positions `0..n` (sorted node ids).
/// Unweighted edges carry weight 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topology {
    directed: bool,
    nodes: Vec<NodeId>,
    #[serde(skip)]
    position: HashMap<NodeId, usize>,
    out: Vec<Vec<(usize, f64)>>,
    inc: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl Topology {
    fn new(g: &Graph) -> Self {
        let nodes: Vec<NodeId> = g.nodes().collect();
        let position: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for e in g.edges() {
            let (u, v) = (position[&e.u], position[&e.v]);
            let w = e.w.unwrap_or(1.0);
            out[u].push((v, w));
            if g.is_directed() {
                inc[v].push((u, w));
            } else {
                out[v].push((u, w));
            }
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_by_key(|&(x, _)| x);
        }
        Topology {
            directed: g.is_directed(),
            nodes,
            position,
            out,
            inc: if g.is_directed() { inc } else { Vec::new() },
            edge_count: g.edge_count(),
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.position.get(&id).copied()
    }

    pub fn id(&self, pos: usize) -> NodeId {
        self.nodes[pos]
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Out-neighbors (all neighbors when undirected), sorted by position.
    pub fn out(&self, pos: usize) -> &[(usize, f64)] {
        &self.out[pos]
    }

    /// In-neighbors (all neighbors when undirected), sorted by position.
    pub fn inc(&self, pos: usize) -> &[(usize, f64)] {
        if self.directed {
            &self.inc[pos]
        } else {
            &self.out[pos]
        }
    }

    /// Neighbors ignoring direction, sorted and deduplicated.
    pub fn undirected(&self, pos: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out(pos).iter().map(|&(x, _)| x).collect();
        if self.directed {
            all.extend(self.inc[pos].iter().map(|&(x, _)| x));
            all.sort_unstable();
            all.dedup();
        }
        all
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.out[u];
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| list[i].1)
    }

    pub fn out_degree(&self, pos: usize) -> usize {
        self.out[pos].len()
    }

    pub fn in_degree(&self, pos: usize) -> usize {
        self.inc(pos).len()
    }

    /// In + out for directed graphs, plain degree otherwise.
    pub fn degree(&self, pos: usize) -> usize {
        if self.directed {
            self.out[pos].len() + self.inc[pos].len()
        } else {
            self.out[pos].len()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MatrixView {
    /// Row-major `n * n` weights, 0 where no edge.
    Dense { n: usize, data: Vec<f64> },
    /// `(row, col, weight)` sorted by row then column.
    Sparse { n: usize, entries: Vec<(usize, usize, f64)> },
}

impl MatrixView {
    fn new(t: &Topology) -> Self {
        let n = t.node_count();
        if n <= DENSE_LIMIT {
            let mut data = vec![0.0; n * n];
            for u in 0..n {
                for &(v, w) in t.out(u) {
                    data[u * n + v] = w;
                }
            }
            MatrixView::Dense { n, data }
        } else {
            let entries = (0..n)
                .flat_map(|u| t.out(u).iter().map(move |&(v, w)| (u, v, w)))
                .collect();
            MatrixView::Sparse { n, entries }
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        match self {
            MatrixView::Dense { n, .. } | MatrixView::Sparse { n, .. } => [*n, *n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            MatrixView::Dense { n, data } => data[i * n + j],
            MatrixView::Sparse { entries, .. } => entries
                .binary_search_by(|&(r, c, _)| (r, c).cmp(&(i, j)))
                .map(|k| entries[k].2)
                .unwrap_or(0.0),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        match self {
            MatrixView::Dense { data, .. } => data.iter().filter(|&&x| x != 0.0).count(),
            MatrixView::Sparse { entries, .. } => entries.len(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, MatrixView::Dense { .. })
    }
}

/// COO-style parallel arrays. Undirected edges appear in both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeIndex {
    pub sources: Vec<NodeId>,
    pub targets: Vec<NodeId>,
    pub weights: Vec<f64>,
}

impl EdgeIndex {
    fn new(t: &Topology) -> Self {
        let mut idx = EdgeIndex {
            sources: Vec::new(),
            targets: Vec::new(),
            weights: Vec::new(),
        };
        for u in 0..t.node_count() {
            for &(v, w) in t.out(u) {
                idx.sources.push(t.id(u));
                idx.targets.push(t.id(v));
                idx.weights.push(w);
            }
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

/// Per-node numeric rows in node-id order, kept raw and normalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureTable {
    pub raw: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
}

impl FeatureTable {
    fn new(raw: Vec<Vec<f64>>) -> Result<Self, BufferError> {
        let width = raw.first().map_or(0, Vec::len);
        if raw.iter().any(|r| r.len() != width) {
            return Err(BufferError::RaggedFeatures);
        }
        let mut normalized = raw.clone();
        for c in 0..width {
            let column: Vec<f64> = raw.iter().map(|r| r[c]).collect();
            for (row, z) in normalized.iter_mut().zip(normalize_column(&column)) {
                row[c] = z;
            }
        }
        Ok(FeatureTable { raw, normalized })
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.raw.len(), self.raw.first().map_or(0, Vec::len)]
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Clips to mean ± 3σ, then z-scores with the clipped column's statistics.
/// A constant column maps to zeros.
pub fn normalize_column(xs: &[f64]) -> Vec<f64> {
    if xs.is_empty() {
        return Vec::new();
    }
    let (mean, std) = mean_std(xs);
    let clipped: Vec<f64> = xs
        .iter()
        .map(|&x| x.clamp(mean - 3.0 * std, mean + 3.0 * std))
        .collect();
    let (mean, std) = mean_std(&clipped);
    if std == 0.0 {
        return vec![0.0; xs.len()];
    }
    clipped.iter().map(|x| (x - mean) / std).collect()
}

/// Borrowed handle to one of the store's views.
#[derive(Debug, Clone, Copy)]
pub enum View<'a> {
    Topology(&'a Topology),
    Matrix(&'a MatrixView),
    EdgeIndex(&'a EdgeIndex),
    FeatureTable(&'a FeatureTable),
}

/// Immutable graph store: the canonical graph plus derived views.
#[derive(Debug, Clone)]
pub struct GraphStore {
    canonical: Graph,
    topology: Topology,
    matrix: MatrixView,
    edge_index: EdgeIndex,
    features: Option<FeatureTable>,
    labels: BTreeMap<NodeId, u32>,
    index: Vec<IndexRecord>,
}

impl GraphStore {
    pub fn build(g: Graph, features: Option<Vec<Vec<f64>>>) -> Result<Self, BufferError> {
        let features = match features {
            Some(rows) if rows.len() != g.node_count() => {
                return Err(BufferError::FeatureRowMismatch {
                    rows: rows.len(),
                    nodes: g.node_count(),
                })
            }
            Some(rows) => Some(FeatureTable::new(rows)?),
            None => None,
        };
        let topology = Topology::new(&g);
        let matrix = MatrixView::new(&topology);
        let edge_index = EdgeIndex::new(&topology);
        let direction = if g.is_directed() { "directed" } else { "undirected" };
        let mut index = vec![
            IndexRecord {
                format_id: FormatId::Topology,
                dimensionality: vec![topology.node_count(), topology.edge_count()],
                schema: "node -> sorted [(neighbor, weight)]".into(),
                metadata: format!("{direction}, weighted={}", g.is_weighted()),
            },
            IndexRecord {
                format_id: FormatId::Matrix,
                dimensionality: matrix.dims().to_vec(),
                schema: "weights[row][col], 0 = absent".into(),
                metadata: format!(
                    "{}, nonzeros={}",
                    if matrix.is_dense() { "dense" } else { "sparse-coo" },
                    matrix.nonzero_count()
                ),
            },
            IndexRecord {
                format_id: FormatId::EdgeIndex,
                dimensionality: vec![2, edge_index.len()],
                schema: "sources[i] -> targets[i] with weights[i]".into(),
                metadata: format!("{direction}, both directions materialized={}", !g.is_directed()),
            },
        ];
        if let Some(f) = &features {
            index.push(IndexRecord {
                format_id: FormatId::FeatureTable,
                dimensionality: f.dims().to_vec(),
                schema: "row per node in id order; raw and z-scored columns".into(),
                metadata: "clipped at ±3σ before z-scoring".into(),
            });
        }
        Ok(GraphStore {
            canonical: g,
            topology,
            matrix,
            edge_index,
            features,
            labels: BTreeMap::new(),
            index,
        })
    }

    /// Attaches categorical node labels (used by node classification).
    pub fn with_labels(mut self, labels: BTreeMap<NodeId, u32>) -> Self {
        self.labels = labels;
        self
    }

    pub fn canonical(&self) -> &Graph {
        &self.canonical
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn matrix(&self) -> &MatrixView {
        &self.matrix
    }

    pub fn edge_index(&self) -> &EdgeIndex {
        &self.edge_index
    }

    pub fn features(&self) -> Option<&FeatureTable> {
        self.features.as_ref()
    }

    pub fn labels(&self) -> &BTreeMap<NodeId, u32> {
        &self.labels
    }

    pub fn index(&self) -> &[IndexRecord] {
        &self.index
    }

    pub fn record(&self, id: FormatId) -> Option<&IndexRecord> {
        self.index.iter().find(|r| r.format_id == id)
    }

    pub fn fetch(&self, id: FormatId) -> Result<View<'_>, BufferError> {
        match id {
            FormatId::Topology => Ok(View::Topology(&self.topology)),
            FormatId::Matrix => Ok(View::Matrix(&self.matrix)),
            FormatId::EdgeIndex => Ok(View::EdgeIndex(&self.edge_index)),
            FormatId::FeatureTable => self
                .features
                .as_ref()
                .map(View::FeatureTable)
                .ok_or_else(|| BufferError::UnknownFormat(id.to_string())),
        }
    }

    pub fn fetch_by_name(&self, name: &str) -> Result<View<'_>, BufferError> {
        self.fetch(name.parse()?)
    }

    /// JSON of every view; identical graphs give identical bytes.
    pub fn views_json(&self) -> String {
        #[derive(Serialize)]
        struct Views<'a> {
            topology: &'a Topology,
            matrix: &'a MatrixView,
            edge_index: &'a EdgeIndex,
            features: Option<&'a FeatureTable>,
            index: &'a [IndexRecord],
        }
        serde_json::to_string(&Views {
            topology: &self.topology,
            matrix: &self.matrix,
            edge_index: &self.edge_index,
            features: self.features.as_ref(),
            index: &self.index,
        })
        .expect("views serialize")
    }

    /// Writes `edges.txt`, `nodes.txt`, optional `features.csv`, and `index.json`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), BufferError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("edges.txt"), edgelist::format_edge_list(&self.canonical))?;
        let nodes: Vec<String> = self.canonical.nodes().map(|x| x.to_string()).collect();
        fs::write(dir.join("nodes.txt"), nodes.join("\n"))?;
        if let Some(f) = &self.features {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_path(dir.join("features.csv"))?;
            for row in &f.raw {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        let manifest = serde_json::json!({
            "directed": self.canonical.is_directed(),
            "index": self.index,
        });
        fs::write(dir.join("index.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, BufferError> {
        let dir = dir.as_ref();
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
        let directed = manifest["directed"].as_bool().unwrap_or(false);
        let edges = edgelist::parse_edge_list(fs::read_to_string(dir.join("edges.txt"))?.as_bytes())?;
        let nodes: Vec<NodeId> = fs::read_to_string(dir.join("nodes.txt"))?
            .lines()
            .filter_map(|l| l.trim().parse().ok())
            .collect();
        let g = Graph::with_nodes(nodes, edges, directed)?;
        let path = dir.join("features.csv");
        let features = if path.exists() {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
            let rows: Result<Vec<Vec<f64>>, csv::Error> = r.deserialize().collect();
            Some(rows?)
        } else {
            None
        };
        GraphStore::build(g, features)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::build([(0, 1), (1, 2)], false).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let g = assemble(&[vec![Edge::new(0, 1)], vec![Edge::new(1, 2)]], false).unwrap();
        assert_eq!(g, path3());
        let g = assemble(&[vec![Edge::new(0, 1)], vec![Edge::new(0, 1)]], false).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = assemble(&[], true).unwrap();
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn path_views() {
        let s = GraphStore::build(path3(), None).unwrap();
        assert_eq!(s.matrix().nonzero_count(), 4);
        assert_eq!(s.edge_index().len(), 4);
        let t = s.topology();
        let degrees: Vec<usize> = (0..3).map(|p| t.degree(p)).collect();
        assert_eq!(degrees, vec![1, 2, 1]);
    }

    #[test]
    fn directed_matrix() {
        let s = GraphStore::build(Graph::build([(0, 1)], true).unwrap(), None).unwrap();
        assert_ne!(s.matrix().get(0, 1), 0.0);
        assert_eq!(s.matrix().get(1, 0), 0.0);
    }

    #[test]
    fn feature_normalization() {
        let z = normalize_column(&[1.0, 3.0, 5.0]);
        for (got, want) in z.iter().zip([-1.2247, 0.0, 1.2247]) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
        assert!((z[0] + (1.5f64).sqrt()).abs() < 1e-6);
        assert_eq!(normalize_column(&[4.0, 4.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn outliers_are_clipped() {
        let mut xs = vec![0.0; 20];
        xs.push(1000.0);
        let z = normalize_column(&xs);
        let (mean, std) = mean_std(&xs);
        assert!(std > 0.0 && mean > 0.0);
        assert!(z[20] < 4.5, "clipped value stays bounded, got {}", z[20]);
    }

    #[test]
    fn feature_row_mismatch() {
        let err = GraphStore::build(path3(), Some(vec![vec![1.0]; 2])).unwrap_err();
        assert!(matches!(err, BufferError::FeatureRowMismatch { rows: 2, nodes: 3 }));
    }

    #[test]
    fn fetch_and_index() {
        let s = GraphStore::build(path3(), None).unwrap();
        assert!(matches!(s.fetch(FormatId::Topology), Ok(View::Topology(_))));
        let Ok(View::Matrix(m)) = s.fetch(FormatId::Matrix) else { panic!() };
        assert_eq!(s.record(FormatId::Matrix).unwrap().dimensionality, m.dims().to_vec());
        assert!(matches!(s.fetch(FormatId::FeatureTable), Err(BufferError::UnknownFormat(_))));
        assert!(matches!(s.fetch_by_name("Hypergraph"), Err(BufferError::UnknownFormat(_))));
        assert_eq!(s.index().len(), 3);
    }

    #[test]
    fn sparse_above_limit() {
        let n = DENSE_LIMIT as NodeId + 10;
        let g = Graph::build((0..n - 1).map(|i| (i, i + 1)), false).unwrap();
        let s = GraphStore::build(g, None).unwrap();
        assert!(!s.matrix().is_dense());
        assert_eq!(s.matrix().nonzero_count(), 2 * (n as usize - 1));
        assert_eq!(s.matrix().get(5, 6), 1.0);
        assert_eq!(s.matrix().get(5, 7), 0.0);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::with_nodes([3], [(0, 1, 2.0), (1, 2, 1.5)], true).unwrap();
        let s = GraphStore::build(g, Some(vec![vec![1.0, 2.0]; 4])).unwrap();
        s.save(dir.path()).unwrap();
        let back = GraphStore::load(dir.path()).unwrap();
        assert_eq!(back.canonical(), s.canonical());
        assert_eq!(back.views_json(), s.views_json());
    }
}
