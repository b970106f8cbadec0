//! Benchmark generation: sample graphs per domain and scale, pose one
//! question per instance, compute ground truth with the production solvers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use graphwm_core::buffer::BufferError;
use graphwm_core::catalog::{self, CatalogError};
use graphwm_core::toolset::{self, Args, ToolError};
use graphwm_core::{
    execute_plan, render, sample_subgraph, Answer, BiasParams, Graph, GraphError, GraphStore, ModelPlan, NodeId,
    Representation,
};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::ordered_map;
use crate::tasks::{linguistic_for, Domain, Metric, Route, TaskKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub domain: Domain,
    pub scale: usize,
    pub task_kind: TaskKind,
    pub representation: Representation,
    pub scenario: String,
    pub question: String,
    pub graph_text: String,
    pub graph_ref: Graph,
    /// Query arguments as bound in the question, keyed like the solver params.
    pub args: Args,
    pub ground_truth: String,
    pub metric: Metric,
    /// Per-node observation history, rows in node-id order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<Vec<f64>>>,
    /// Known node labels; the queried node is absent.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<NodeId, u32>,
}

impl TaskInstance {
    /// Builds the buffer for `g` (normally the ingested graph) with this
    /// instance's auxiliary features and labels attached.
    pub fn store(&self, g: Graph) -> Result<GraphStore, BufferError> {
        Ok(GraphStore::build(g, self.features.clone())?.with_labels(self.labels.clone()))
    }

    #[cfg(test)]
    pub(crate) fn for_test(kind: TaskKind, question: &str, g: &Graph, truth: &str) -> Self {
        TaskInstance {
            id: "test".into(),
            domain: kind.exclusive_domain().unwrap_or(Domain::Social),
            scale: g.node_count(),
            task_kind: kind,
            representation: Representation::ADJACENCY,
            scenario: String::new(),
            question: question.into(),
            graph_text: render(&g.edge_list(), Representation::ADJACENCY).unwrap().text,
            graph_ref: g.clone(),
            args: Args::new(),
            ground_truth: truth.into(),
            metric: kind.metric(),
            features: None,
            labels: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TrafficSeries {
    /// Per-node sinusoid with a random base, amplitude and phase.
    #[default]
    Periodic,
    /// Every node holds one value for the whole history and horizon.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub per_task_count: usize,
    pub scales: Vec<usize>,
    pub domains: Vec<Domain>,
    /// `None` generates every kind valid for some requested domain.
    pub tasks: Option<Vec<TaskKind>>,
    /// Relative weights of adjacency, symbolic and linguistic renderings.
    pub representation_mix: [f64; 3],
    pub concurrency: usize,
    pub traffic_series: TrafficSeries,
    pub traffic_history: usize,
    pub traffic_horizon: usize,
    pub max_resample: usize,
    pub bias: BiasParams,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            per_task_count: 5,
            scales: vec![40],
            domains: Domain::ALL.to_vec(),
            tasks: None,
            representation_mix: [1.0, 1.0, 1.0],
            concurrency: 1,
            traffic_series: TrafficSeries::Periodic,
            traffic_history: 12,
            traffic_horizon: 1,
            max_resample: 64,
            bias: BiasParams::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("config: {0}")]
    Config(String),
    #[error("no source graph for domain {0}")]
    MissingSource(Domain),
    #[error("source graph for {domain} has {nodes} nodes, scale {needed} requested")]
    SourceTooSmall { domain: Domain, nodes: usize, needed: usize },
    #[error("{kind} is exclusive to {}, not available for {domain}", kind.exclusive_domain().unwrap())]
    Exclusivity { kind: TaskKind, domain: Domain },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Buffer(#[from] BufferError),
    #[error(transparent)]
    Tool(#[from] ToolError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
}

/// Which kinds to generate, after the exclusivity check.
pub fn planned_kinds(cfg: &GenConfig) -> Result<Vec<TaskKind>, GenError> {
    if cfg.domains.is_empty() {
        return Err(GenError::Config("no domains requested".into()));
    }
    match &cfg.tasks {
        Some(kinds) => {
            for &kind in kinds {
                if let Some(d) = kind.exclusive_domain() {
                    if !cfg.domains.contains(&d) {
                        return Err(GenError::Exclusivity {
                            kind,
                            domain: cfg.domains[0],
                        });
                    }
                }
            }
            Ok(kinds.clone())
        }
        None => Ok(TaskKind::ALL
            .into_iter()
            .filter(|k| cfg.domains.iter().any(|&d| k.valid_for(d)))
            .collect()),
    }
}

/// Heavy-tailed synthetic stand-ins, one per domain, directed where the
/// domain is.
pub fn default_sources(seed: u64, nodes: usize) -> BTreeMap<Domain, Graph> {
    Domain::ALL
        .into_iter()
        .map(|d| {
            let m = if d == Domain::Transportation { 2 } else { 3 };
            let g = graphwm_core::synthetic::preferential_attachment(nodes, m, d.directed(), seed ^ (d.index() as u64 + 1) * 0x9E37);
            (d, g)
        })
        .collect()
}

fn check_sources(sources: &BTreeMap<Domain, Graph>, cfg: &GenConfig) -> Result<(), GenError> {
    let needed = cfg.scales.iter().copied().max().unwrap_or(0);
    for &d in &cfg.domains {
        let g = sources.get(&d).ok_or(GenError::MissingSource(d))?;
        if g.node_count() < needed {
            return Err(GenError::SourceTooSmall {
                domain: d,
                nodes: g.node_count(),
                needed,
            });
        }
    }
    Ok(())
}

/// Generates `per_task_count` instances for every (scale, kind) cell.
/// Output order and content depend only on the config and sources.
pub fn generate(sources: &BTreeMap<Domain, Graph>, cfg: &GenConfig) -> Result<Vec<TaskInstance>, GenError> {
    if cfg.per_task_count == 0 {
        return Err(GenError::Config("per_task_count must be at least 1".into()));
    }
    if cfg.scales.iter().any(|&s| s < 4) {
        return Err(GenError::Config("scales must be at least 4".into()));
    }
    let kinds = planned_kinds(cfg)?;
    check_sources(sources, cfg)?;
    let cells: Vec<(usize, TaskKind)> = cfg
        .scales
        .iter()
        .flat_map(|&s| kinds.iter().map(move |&k| (s, k)))
        .collect();
    let results = ordered_map(&cells, cfg.concurrency, |_, &(scale, kind)| generate_cell(sources, cfg, scale, kind));
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn cell_rng(cfg: &GenConfig, scale: usize, kind: TaskKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((scale as u64) << 8) | kind.index() as u64);
    rng
}

fn generate_cell(
    sources: &BTreeMap<Domain, Graph>,
    cfg: &GenConfig,
    scale: usize,
    kind: TaskKind,
) -> Result<Vec<TaskInstance>, GenError> {
    let mut rng = cell_rng(cfg, scale, kind);
    let allowed: Vec<Domain> = cfg.domains.iter().copied().filter(|&d| kind.valid_for(d)).collect();
    let reps = WeightedIndex::new(cfg.representation_mix)
        .map_err(|e| GenError::Config(format!("representation_mix: {e}")))?;
    let mut out = Vec::with_capacity(cfg.per_task_count);
    for i in 0..cfg.per_task_count {
        let domain = allowed[(i + kind.index()) % allowed.len()];
        let source = &sources[&domain];
        let mut posed = None;
        for _ in 0..cfg.max_resample.max(1) {
            let sample = sample_subgraph(source, scale, &cfg.bias, rng.gen())?;
            let mut g = sample.graph;
            if kind.weighted() {
                g = g.with_weights(|_| rng.gen_range(1..=10) as f64)?;
            }
            if let Some(p) = pose(kind, &g, i, cfg, &mut rng)? {
                posed = Some((g, p));
                break;
            }
        }
        let Some((g, p)) = posed else {
            log::warn!("{kind} at scale {scale}: no feasible query after {} samples, skipping", cfg.max_resample);
            continue;
        };
        let representation = match reps.sample(&mut rng) {
            0 => Representation::ADJACENCY,
            1 => Representation::SYMBOLIC,
            _ => linguistic_for(domain),
        };
        let scenario = *domain.scenarios().choose(&mut rng).unwrap();
        let mut inst = TaskInstance {
            id: format!("{}-{scale}-{kind}-{i}", domain.to_string().to_lowercase()),
            domain,
            scale,
            task_kind: kind,
            representation,
            scenario: scenario.to_string(),
            question: question(kind, domain, scenario, g.is_directed(), &p.args, cfg),
            graph_text: render(&g.edge_list(), representation).map_err(|e| GenError::Config(e.to_string()))?.text,
            graph_ref: g,
            args: p.args,
            ground_truth: String::new(),
            metric: kind.metric(),
            features: p.features,
            labels: p.labels,
        };
        inst.ground_truth = match p.held_out {
            Some(v) => Answer::Real(v).normalized(),
            None => reference_answer(&inst)?.normalized(),
        };
        out.push(inst);
    }
    Ok(out)
}

/// Answers an instance from `graph_ref` with the production solver for its
/// kind. For traffic instances this is the baseline's forecast, not the
/// held-out truth.
pub fn reference_answer(inst: &TaskInstance) -> Result<Answer, GenError> {
    let store = inst.store(inst.graph_ref.clone())?;
    Ok(match inst.task_kind.route() {
        Route::Tool(name) => toolset::invoke(&store, name, &inst.args)?,
        Route::Model(key) => execute_plan(&ModelPlan::new(key, inst.args.clone())?, &store)?,
    })
}

struct Posed {
    args: Args,
    features: Option<Vec<Vec<f64>>>,
    labels: BTreeMap<NodeId, u32>,
    held_out: Option<f64>,
}

fn args(pairs: &[(&str, NodeId)]) -> Args {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn simple(a: Args) -> Option<Posed> {
    Some(Posed {
        args: a,
        features: None,
        labels: BTreeMap::new(),
        held_out: None,
    })
}

fn distinct_pair(n: usize, rng: &mut ChaCha8Rng) -> (NodeId, NodeId) {
    let u = rng.gen_range(0..n);
    let v = (u + rng.gen_range(1..n)) % n;
    (u as NodeId, v as NodeId)
}

/// Two distinct nodes with a shared neighbor: `out` looks for a common
/// out-neighbor (both cite the same paper), otherwise any adjacency counts.
fn pair_sharing_neighbor(store: &GraphStore, out: bool, rng: &mut ChaCha8Rng) -> Option<(NodeId, NodeId)> {
    let t = store.topology();
    for _ in 0..32 {
        let x = rng.gen_range(0..t.node_count());
        let holders: Vec<usize> = if out {
            t.inc(x).iter().map(|&(p, _)| p).collect()
        } else {
            t.undirected(x)
        };
        if holders.len() >= 2 {
            let picked: Vec<_> = holders.choose_multiple(rng, 2).copied().collect();
            return Some((t.id(picked[0]), t.id(picked[1])));
        }
    }
    None
}

fn adjacent_either_way(g: &Graph, u: NodeId, v: NodeId) -> bool {
    g.contains_edge(u, v) || g.contains_edge(v, u)
}

/// Homophilous labels: nearest of `k` random seeds by undirected hops.
fn community_labels(store: &GraphStore, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let t = store.topology();
    let n = t.node_count();
    let seeds = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
    let mut label = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for (l, &s) in seeds.iter().enumerate() {
        label[s] = l as u32;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for v in t.undirected(u) {
            if label[v] == u32::MAX {
                label[v] = label[u];
                queue.push_back(v);
            }
        }
    }
    label.iter().map(|&l| if l == u32::MAX { 0 } else { l }).collect()
}

fn traffic(n: usize, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let len = cfg.traffic_history + cfg.traffic_horizon;
    (0..n)
        .map(|_| {
            let base = rng.gen_range(20..80) as f64;
            match cfg.traffic_series {
                TrafficSeries::Constant => vec![base; len],
                TrafficSeries::Periodic => {
                    let amp = rng.gen_range(5..20) as f64;
                    let phase = rng.gen_range(0..6) as f64;
                    (0..len)
                        .map(|t| {
                            let x = base + amp * (std::f64::consts::TAU * (t as f64 + phase) / 6.0).sin();
                            (x * 100.0).round() / 100.0
                        })
                        .collect()
                }
            }
        })
        .collect()
}

/// Binds the query for instance `i`; `None` asks for another sample.
fn pose(kind: TaskKind, g: &Graph, i: usize, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Option<Posed>, GenError> {
    use TaskKind::*;
    let n = g.node_count();
    let store = GraphStore::build(g.clone(), None)?;
    let ids: Vec<NodeId> = g.nodes().collect();
    let any_node = |rng: &mut ChaCha8Rng| ids[rng.gen_range(0..n)];
    let yes = i % 2 == 0;
    Ok(match kind {
        EdgeCount | NodeCount | CycleDetection | TriangleCount | Diameter | MaxCore | ConnectedComponents => {
            simple(Args::new())
        }
        DegreeCount | PageRank | ClusteringCoefficient => simple(args(&[("node", any_node(rng))])),
        NodeExistence => {
            let x = if yes { any_node(rng) } else { (n + rng.gen_range(0..n)) as NodeId };
            simple(args(&[("node", x)]))
        }
        EdgeExistence => {
            let (u, v) = if yes {
                let edges = g.edge_list();
                let e = edges[rng.gen_range(0..edges.len())];
                if !g.is_directed() && rng.gen_bool(0.5) {
                    (e.v, e.u)
                } else {
                    (e.u, e.v)
                }
            } else {
                let mut pair = None;
                for _ in 0..64 {
                    let (u, v) = distinct_pair(n, rng);
                    if !g.contains_edge(u, v) {
                        pair = Some((u, v));
                        break;
                    }
                }
                match pair {
                    Some(p) => p,
                    None => return Ok(None),
                }
            };
            simple(args(&[("u", u), ("v", v)]))
        }
        PathExistence | MaxFlow => {
            let (s, t) = distinct_pair(n, rng);
            simple(args(&[("s", s), ("t", t)]))
        }
        ShortestPath => {
            for _ in 0..32 {
                let s = any_node(rng);
                let reach: Vec<NodeId> = toolset::reachable_from(&store, s)?.into_iter().filter(|&x| x != s).collect();
                if let Some(&t) = reach.choose(rng) {
                    return Ok(simple(args(&[("s", s), ("t", t)])));
                }
            }
            None
        }
        CommonNeighbors | ReferenceMatch => {
            let (u, v) = if yes {
                match pair_sharing_neighbor(&store, kind == ReferenceMatch, rng) {
                    Some(p) => p,
                    None => distinct_pair(n, rng),
                }
            } else {
                distinct_pair(n, rng)
            };
            simple(args(&[("u", u), ("v", v)]))
        }
        SocialLinkPrediction | WebLinkPrediction => {
            let mut fallback = None;
            for _ in 0..256 {
                let (u, v) = distinct_pair(n, rng);
                if adjacent_either_way(g, u, v) {
                    continue;
                }
                let predicted = catalog::link_prediction(&store, u, v, catalog::DEFAULT_LINK_THRESHOLD)?;
                if predicted == yes {
                    return Ok(simple(args(&[("u", u), ("v", v)])));
                }
                fallback.get_or_insert((u, v));
            }
            fallback.map(|(u, v)| simple(args(&[("u", u), ("v", v)]))).unwrap_or(None)
        }
        NodeClassification => {
            let labels = community_labels(&store, 5, rng);
            let q = any_node(rng);
            let known = ids.iter().zip(&labels).filter(|(&x, _)| x != q).map(|(&x, &l)| (x, l)).collect();
            Some(Posed {
                args: args(&[("node", q)]),
                features: None,
                labels: known,
                held_out: None,
            })
        }
        TrafficPrediction => {
            let series = traffic(n, cfg, rng);
            let q = rng.gen_range(0..n);
            let held_out = series[q][cfg.traffic_history + cfg.traffic_horizon - 1];
            Some(Posed {
                args: args(&[("node", ids[q])]),
                features: Some(series.into_iter().map(|mut s| {
                    s.truncate(cfg.traffic_history);
                    s
                }).collect()),
                labels: BTreeMap::new(),
                held_out: Some(held_out),
            })
        }
    })
}

fn question(kind: TaskKind, domain: Domain, scenario: &str, directed: bool, a: &Args, cfg: &GenConfig) -> String {
    use TaskKind::*;
    let (one, many, rel) = domain.nouns();
    let x = |k: &str| a.get(k).map(String::as_str).unwrap_or("?");
    let ask = match kind {
        EdgeCount => format!("What is the total number of edges ({rel}) in the network?"),
        NodeCount => format!("What is the total number of nodes ({many}) in the network?"),
        DegreeCount => format!(
            "What is the degree of node {}, counting all {rel} that touch this {one}{}?",
            x("node"),
            if directed { " in either direction" } else { "" }
        ),
        EdgeExistence if directed => format!("Is there a direct edge from node {} to node {}?", x("u"), x("v")),
        EdgeExistence => format!("Is there a direct edge between node {} and node {}?", x("u"), x("v")),
        NodeExistence => format!("Does node {} appear in the network?", x("node")),
        CycleDetection if directed => format!("Does the network contain a directed cycle of {rel}?"),
        CycleDetection => "Does the network contain a cycle?".to_string(),
        TriangleCount => format!(
            "How many triangles, sets of three {many} that are pairwise adjacent{}, does the network contain?",
            if directed { " ignoring direction" } else { "" }
        ),
        PathExistence => format!(
            "Is there a path from node {} to node {} that follows the {rel}{}?",
            x("s"),
            x("t"),
            if directed { " in their direction" } else { "" }
        ),
        ShortestPath => format!(
            "What is the length of the shortest path from node {} to node {}, where each edge weight is its cost?",
            x("s"),
            x("t")
        ),
        MaxFlow => format!(
            "What is the maximum flow from node {} to node {} when each {}'s weight is its capacity?",
            x("s"),
            x("t"),
            rel.trim_end_matches('s')
        ),
        Diameter => "What is the diameter of the network, taking edge weights as distances?".to_string(),
        MaxCore => "What is the largest k for which the network has a non-empty k-core?".to_string(),
        ConnectedComponents => "How many connected components does the network have, ignoring edge direction?".to_string(),
        CommonNeighbors => format!(
            "How many common neighbors do node {} and node {} share, ignoring link direction?",
            x("u"),
            x("v")
        ),
        PageRank => format!("What is the PageRank score of node {} with damping factor 0.85?", x("node")),
        ReferenceMatch => format!("How many {many} are cited by both node {} and node {}?", x("u"), x("v")),
        ClusteringCoefficient => format!(
            "What is the local clustering coefficient of node {}, ignoring {rel} direction?",
            x("node")
        ),
        TrafficPrediction => {
            let when = match cfg.traffic_horizon {
                1 => "the next time step".to_string(),
                h => format!("{h} time steps ahead"),
            };
            format!(
                "Each {one} has a recorded traffic volume series. Predict the traffic flow at node {} for {when}.",
                x("node")
            )
        }
        SocialLinkPrediction | WebLinkPrediction => format!(
            "Based on the existing {rel}, are node {} and node {} likely to form a link in the future?",
            x("u"),
            x("v")
        ),
        NodeClassification => format!(
            "{many} carry research topic labels. Which topic label should node {} receive?",
            x("node")
        ),
    };
    let mut context = format!("Scenario: {scenario}. The {many} are nodes and the {rel} are edges.");
    if kind.weighted() {
        context.push_str(" Every edge carries an integer weight.");
    }
    format!("{context}\n{}", capitalize(&ask))
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn to_jsonl(instances: &[TaskInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&serde_json::to_string(inst).expect("instances serialize"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(path: impl AsRef<Path>, instances: &[TaskInstance]) -> Result<(), GenError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(to_jsonl(instances).as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn parse_jsonl(reader: impl BufRead) -> Result<Vec<TaskInstance>, GenError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: TaskInstance = serde_json::from_str(&line).map_err(|e| GenError::SchemaViolation {
            line: i + 1,
            message: e.to_string(),
        })?;
        if !inst.task_kind.valid_for(inst.domain) || inst.metric != inst.task_kind.metric() {
            return Err(GenError::SchemaViolation {
                line: i + 1,
                message: format!("{} is not valid for {}", inst.task_kind, inst.domain),
            });
        }
        out.push(inst);
    }
    Ok(out)
}

pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<TaskInstance>, GenError> {
    parse_jsonl(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Node ids mentioned by `args`, for sanity checks.
pub fn arg_nodes(a: &Args) -> BTreeSet<NodeId> {
    a.values().filter_map(|v| v.parse().ok()).collect()
}
