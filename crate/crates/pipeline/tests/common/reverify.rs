//! Second, independent solve of a generated instance using the brute-force
//! oracles. Shared with the acceptance suite through `#[path]`.

use graphwm_core::answers_match;
use graphwm_oracles::{self as oracle, Triple};
use graphwm_pipeline::{TaskInstance, TaskKind};

enum Expect {
    Exact(String),
    Close(f64, f64),
    /// Truth is data (held-out observation), not something to solve.
    Observed,
}

fn yes_no(b: bool) -> String {
    if b { "Yes" } else { "No" }.to_string()
}

pub fn reverify(inst: &TaskInstance) -> Result<(), String> {
    let g = &inst.graph_ref;
    let ids: Vec<u32> = g.nodes().collect();
    let pos = |x: u32| ids.binary_search(&x).ok();
    let n = ids.len();
    let directed = g.is_directed();
    let edges: Vec<Triple> = g
        .edges()
        .map(|e| (pos(e.u).unwrap(), pos(e.v).unwrap(), e.w.unwrap_or(1.0)))
        .collect();
    let arg = |k: &str| -> Result<u32, String> {
        inst.args.get(k).and_then(|v| v.parse().ok()).ok_or(format!("{}: missing arg {k}", inst.id))
    };
    let node = |k: &str| -> Result<usize, String> { pos(arg(k)?).ok_or(format!("{}: {k} not in graph", inst.id)) };

    use TaskKind::*;
    let expect = match inst.task_kind {
        EdgeCount => Expect::Exact(edges.len().to_string()),
        NodeCount => Expect::Exact(n.to_string()),
        DegreeCount => Expect::Exact(oracle::degree(&edges, node("node")?).to_string()),
        EdgeExistence => Expect::Exact(yes_no(oracle::edge_exists(directed, &edges, node("u")?, node("v")?))),
        NodeExistence => Expect::Exact(yes_no(pos(arg("node")?).is_some())),
        CycleDetection => Expect::Exact(yes_no(if directed {
            oracle::has_cycle_directed_sparse(n, &edges)
        } else {
            oracle::has_cycle_undirected(n, &edges)
        })),
        TriangleCount => Expect::Exact(oracle::triangle_count(n, &edges).to_string()),
        PathExistence => Expect::Exact(yes_no(oracle::reachable(n, directed, &edges, node("s")?)[node("t")?])),
        ShortestPath => {
            let d = oracle::single_source(n, directed, &edges, node("s")?)[node("t")?];
            Expect::Exact(if d.is_finite() { format!("{d}") } else { "No path".into() })
        }
        MaxFlow => Expect::Exact(format!("{}", oracle::max_flow_dfs(n, directed, &edges, node("s")?, node("t")?))),
        Diameter => Expect::Exact(oracle::diameter_dense(n, directed, &edges).map_or("Disconnected".into(), |d| format!("{d}"))),
        MaxCore => Expect::Exact(oracle::max_core_peeling(n, &edges).to_string()),
        ConnectedComponents => Expect::Exact(oracle::component_count(n, &edges).to_string()),
        CommonNeighbors => Expect::Exact(oracle::common_neighbors(n, false, &edges, node("u")?, node("v")?).to_string()),
        ReferenceMatch => Expect::Exact(oracle::common_neighbors(n, true, &edges, node("u")?, node("v")?).to_string()),
        PageRank => Expect::Close(oracle::pagerank_linear(n, directed, &edges, 0.85)[node("node")?], 1e-6),
        ClusteringCoefficient => Expect::Close(oracle::clustering(n, &edges, node("node")?), 1e-6),
        SocialLinkPrediction | WebLinkPrediction => {
            Expect::Exact(yes_no(oracle::common_neighbors(n, false, &edges, node("u")?, node("v")?) >= 1))
        }
        NodeClassification => {
            let labels: Vec<Option<u32>> = ids.iter().map(|x| inst.labels.get(x).copied()).collect();
            let l = oracle::neighbor_majority(n, &edges, &labels, node("node")?).ok_or("no labels")?;
            Expect::Exact(l.to_string())
        }
        TrafficPrediction => Expect::Observed,
    };
    let truth = &inst.ground_truth;
    let ok = match &expect {
        Expect::Exact(s) => answers_match(truth, s),
        Expect::Close(x, tol) => truth.parse::<f64>().is_ok_and(|t| (t - x).abs() <= *tol),
        Expect::Observed => truth.parse::<f64>().is_ok_and(f64::is_finite),
    };
    if ok {
        Ok(())
    } else {
        let shown = match expect {
            Expect::Exact(s) => s,
            Expect::Close(x, _) => x.to_string(),
            Expect::Observed => "a finite number".into(),
        };
        Err(format!("{}: ground truth {truth}, oracle {shown}", inst.id))
    }
}
