//! Batch evaluation: the accuracy/MAE suite, the graph N-back experiment and
//! the granularity sweep, plus their report formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::LazyLock;

use graphwm_core::graph::edit_distance_unchecked;
use graphwm_core::repr::scan_adjacency_list;
use graphwm_core::{gec, render, Edge, GecConfig, Graph, NodeId, Representation, TokenUsage};
use graphwm_llm::{ChatBackend, ChatRequest, LlmError, Message, MockBackend, Role, Session};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::TaskInstance;
use crate::execution::{solve, ErrorKind, SolveRecord};
use crate::par::ordered_map;
use crate::prompts::Templates;
use crate::sensory::{ingest, IngestConfig, SensoryError};
use crate::tasks::{Metric, TaskKind};

// ---------------------------------------------------------------- suite

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub ingest: IngestConfig,
    /// Instances solved at once.
    pub concurrency: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            ingest: IngestConfig::default(),
            concurrency: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindScore {
    pub instances: usize,
    pub correct: usize,
    /// `correct / instances` for accuracy kinds.
    pub accuracy: Option<f64>,
    /// Mean absolute error over scored instances, for MAE kinds.
    pub mae: Option<f64>,
    pub scored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub instances: usize,
    pub per_kind: BTreeMap<TaskKind, KindScore>,
    pub mae: Option<f64>,
    pub mae_count: usize,
    pub usage: TokenUsage,
    pub calls: usize,
    pub errors: BTreeMap<ErrorKind, usize>,
    pub records: Vec<SolveRecord>,
}

impl SuiteReport {
    pub fn from_records(records: Vec<SolveRecord>, metrics: &BTreeMap<TaskKind, Metric>) -> Self {
        let mut per_kind: BTreeMap<TaskKind, KindScore> = BTreeMap::new();
        let mut abs: BTreeMap<TaskKind, Vec<f64>> = BTreeMap::new();
        let mut errors: BTreeMap<ErrorKind, usize> = ErrorKind::ALL.into_iter().map(|k| (k, 0)).collect();
        for r in &records {
            let s = per_kind.entry(r.task_kind).or_insert(KindScore {
                instances: 0,
                correct: 0,
                accuracy: None,
                mae: None,
                scored: 0,
            });
            s.instances += 1;
            if r.correct == Some(true) {
                s.correct += 1;
            }
            if let Some(e) = r.abs_error {
                abs.entry(r.task_kind).or_default().push(e);
            }
            if let Some(note) = &r.error {
                *errors.entry(note.kind).or_default() += 1;
            }
        }
        let mut all_abs = Vec::new();
        for (kind, s) in per_kind.iter_mut() {
            match metrics.get(kind).copied().unwrap_or(kind.metric()) {
                Metric::Accuracy => {
                    s.scored = s.instances;
                    s.accuracy = Some(s.correct as f64 / s.instances as f64);
                }
                Metric::Mae => {
                    let xs = abs.remove(kind).unwrap_or_default();
                    s.scored = xs.len();
                    s.mae = mean(&xs);
                    all_abs.extend(xs);
                }
            }
        }
        SuiteReport {
            instances: records.len(),
            per_kind,
            mae: mean(&all_abs),
            mae_count: all_abs.len(),
            usage: records.iter().map(|r| r.token_usage).sum(),
            calls: records.iter().map(|r| r.calls).sum(),
            errors,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<24} {:>5} {:>7} {:>9} {:>9}\n", "task", "n", "correct", "accuracy", "mae");
        for (kind, s) in &self.per_kind {
            let acc = s.accuracy.map_or("-".into(), |a| format!("{a:.3}"));
            let mae = s.mae.map_or("-".into(), |m| format!("{m:.4}"));
            let _ = writeln!(out, "{:<24} {:>5} {:>7} {:>9} {:>9}", kind.to_string(), s.instances, s.correct, acc, mae);
        }
        let errs: Vec<String> = self.errors.iter().map(|(k, n)| format!("{k:?}={n}")).collect();
        let _ = writeln!(out, "errors: {}", errs.join(" "));
        let _ = writeln!(
            out,
            "tokens: {} in, {} out over {} calls",
            self.usage.input_tokens, self.usage.output_tokens, self.calls
        );
        out
    }

    /// One CSV row per solve record.
    pub fn records_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "instance_id",
            "task_kind",
            "answer",
            "ground_truth",
            "correct",
            "abs_error",
            "input_tokens",
            "output_tokens",
            "calls",
            "retries",
            "error_kind",
            "error_message",
            "edit_distance",
        ])
        .expect("in-memory write");
        let opt = |x: Option<String>| x.unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.instance_id.clone(),
                r.task_kind.to_string(),
                opt(r.answer.clone()),
                r.ground_truth.clone(),
                opt(r.correct.map(|c| c.to_string())),
                opt(r.abs_error.map(|e| e.to_string())),
                r.token_usage.input_tokens.to_string(),
                r.token_usage.output_tokens.to_string(),
                r.calls.to_string(),
                r.retries.to_string(),
                opt(r.error.as_ref().map(|e| format!("{:?}", e.kind))),
                opt(r.error.as_ref().map(|e| e.message.clone())),
                opt(r.edit_distance.map(|d| d.to_string())),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Ingests, builds the store and solves every instance. Per-instance
/// failures are recorded; the batch never aborts. Each record's token usage
/// covers both its ingest and solve calls.
pub fn run_suite(
    instances: &[TaskInstance],
    llm: Option<&dyn ChatBackend>,
    cfg: &SuiteConfig,
    templates: &Templates,
) -> SuiteReport {
    let records = ordered_map(instances, cfg.concurrency, |_, inst| run_one(inst, llm, cfg, templates));
    let metrics = instances.iter().map(|i| (i.task_kind, i.metric)).collect();
    SuiteReport::from_records(records, &metrics)
}

fn run_one(inst: &TaskInstance, llm: Option<&dyn ChatBackend>, cfg: &SuiteConfig, templates: &Templates) -> SolveRecord {
    let session = llm.map(Session::new);
    let handle = session.as_ref().map(|s| s as &dyn ChatBackend);
    let ingest_cfg = IngestConfig {
        directed: inst.graph_ref.is_directed(),
        ..cfg.ingest.clone()
    };
    let mut rec = match ingest(&inst.graph_text, Some(inst.representation), &ingest_cfg, handle, templates) {
        Ok((g, report)) => {
            let edit = edit_distance_unchecked(&inst.graph_ref, &g).total;
            match inst.store(g) {
                Ok(store) => {
                    let mut rec = solve(inst, &store, handle, templates);
                    rec.retries += report.retries();
                    rec.edit_distance = Some(edit);
                    rec
                }
                Err(e) => edge_error(inst, format!("store build failed: {e}")),
            }
        }
        Err(e @ SensoryError::ChunkExhausted { .. }) => edge_error(inst, e.to_string()),
        Err(e) => edge_error(inst, format!("ingest failed: {e}")),
    };
    if let Some(s) = &session {
        rec.token_usage = s.usage();
        rec.calls = s.calls();
    }
    rec
}

fn edge_error(inst: &TaskInstance, message: String) -> SolveRecord {
    let mut rec = SolveRecord::new(inst);
    rec.error = Some(crate::execution::ErrorNote {
        kind: ErrorKind::EdgeError,
        message,
    });
    if inst.metric == Metric::Accuracy {
        rec.correct = Some(false);
    }
    rec
}

// ---------------------------------------------------------------- n-back

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbackConfig {
    pub n: usize,
    /// Half ask about shown edges, half about absent pairs; must be even.
    pub queries_per_turn: usize,
    pub subset_size: usize,
    pub seed: u64,
}

impl Default for NbackConfig {
    fn default() -> Self {
        NbackConfig {
            n: 1,
            queries_per_turn: 10,
            subset_size: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum NbackError {
    #[error("graph has {edges} edges, at least {needed} needed")]
    GraphTooSmall { edges: usize, needed: usize },
    #[error("config: {0}")]
    Config(String),
    #[error("not enough absent node pairs for false queries")]
    TooDense,
    #[error(transparent)]
    Backend(#[from] LlmError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbackReport {
    pub n: usize,
    pub turns: usize,
    pub queries: usize,
    pub true_total: usize,
    pub true_correct: usize,
    pub false_total: usize,
    pub false_correct: usize,
    /// Queries with no readable answer; scored as wrong.
    pub unanswered: usize,
    pub accuracy: f64,
    pub usage: TokenUsage,
}

static ANSWER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)\bA(\d+)\s*[:.)]\s*(yes|no)\b").unwrap());
static QUERY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"Q(\d+): Is there an edge (?:between|from) node (\d+) (?:and|to) node (\d+)\?").unwrap()
});

fn edge_key(u: NodeId, v: NodeId, directed: bool) -> (NodeId, NodeId) {
    if directed || u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

fn query_text(i: usize, u: NodeId, v: NodeId, directed: bool) -> String {
    if directed {
        format!("Q{i}: Is there an edge from node {u} to node {v}?")
    } else {
        format!("Q{i}: Is there an edge between node {u} and node {v}?")
    }
}

/// Shows the graph 50 edges per turn in one growing dialogue. From turn N
/// on, each turn also asks about the subset shown N turns earlier. Extra
/// question-only turns at the end make sure every subset gets asked about.
pub fn nback(graph: &Graph, cfg: &NbackConfig, llm: &dyn ChatBackend) -> Result<NbackReport, NbackError> {
    if cfg.n == 0 || cfg.subset_size == 0 {
        return Err(NbackError::Config("n and subset_size must be at least 1".into()));
    }
    if cfg.queries_per_turn == 0 || cfg.queries_per_turn % 2 != 0 {
        return Err(NbackError::Config("queries_per_turn must be a positive even number".into()));
    }
    if cfg.queries_per_turn / 2 > cfg.subset_size {
        return Err(NbackError::Config("more true queries than edges per subset".into()));
    }
    let needed = (cfg.n + 1) * cfg.subset_size;
    if graph.edge_count() < needed {
        return Err(NbackError::GraphTooSmall {
            edges: graph.edge_count(),
            needed,
        });
    }
    let directed = graph.is_directed();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = graph.edge_list();
    edges.shuffle(&mut rng);
    let subsets: Vec<&[Edge]> = edges.chunks_exact(cfg.subset_size).collect();
    let nodes: Vec<NodeId> = graph.nodes().collect();

    let mut report = NbackReport {
        n: cfg.n,
        turns: subsets.len() + cfg.n,
        queries: 0,
        true_total: 0,
        true_correct: 0,
        false_total: 0,
        false_correct: 0,
        unanswered: 0,
        accuracy: 0.0,
        usage: TokenUsage::default(),
    };
    let mut dialogue: Vec<Message> = Vec::new();
    for t in 0..subsets.len() + cfg.n {
        let mut msg = String::new();
        if let Some(subset) = subsets.get(t) {
            let text = render(subset, Representation::ADJACENCY).expect("non-empty subset").text;
            let _ = write!(msg, "Turn {}. Remember these edges:\n<<<\n{text}\n>>>\n", t + 1);
        } else {
            let _ = writeln!(msg, "Turn {}. No new edges this turn.", t + 1);
        }
        let mut expected = Vec::new();
        if t >= cfg.n {
            let shown = subsets[t - cfg.n];
            let half = cfg.queries_per_turn / 2;
            let mut asks: Vec<(NodeId, NodeId, bool)> =
                shown.choose_multiple(&mut rng, half).map(|e| (e.u, e.v, true)).collect();
            for _ in 0..half {
                asks.push(absent_pair(graph, &nodes, &mut rng)?);
            }
            asks.shuffle(&mut rng);
            let _ = writeln!(
                msg,
                "Questions about the edges shown {} turn(s) ago. Answer each line as `A<i>: Yes` or `A<i>: No`.",
                cfg.n
            );
            for (i, &(u, v, truth)) in asks.iter().enumerate() {
                let _ = writeln!(msg, "{}", query_text(i + 1, u, v, directed));
                expected.push(truth);
            }
        } else {
            msg.push_str("Reply `Noted.` for now.\n");
        }
        dialogue.push(Message::user(msg));
        let resp = llm.chat(&ChatRequest::new(dialogue.clone())?)?;
        report.usage += resp.usage;
        let answers: BTreeMap<usize, bool> = ANSWER
            .captures_iter(&resp.content)
            .filter_map(|c| Some((c[1].parse().ok()?, c[2].eq_ignore_ascii_case("yes"))))
            .collect();
        for (i, &truth) in expected.iter().enumerate() {
            let got = answers.get(&(i + 1)).copied();
            if truth {
                report.true_total += 1;
            } else {
                report.false_total += 1;
            }
            match got {
                None => report.unanswered += 1,
                Some(g) if g == truth && truth => report.true_correct += 1,
                Some(g) if g == truth => report.false_correct += 1,
                Some(_) => {}
            }
        }
        dialogue.push(Message::assistant(resp.content));
    }
    report.queries = report.true_total + report.false_total;
    report.accuracy = (report.true_correct + report.false_correct) as f64 / report.queries as f64;
    Ok(report)
}

/// A pair with no edge in either direction anywhere in the graph.
fn absent_pair(g: &Graph, nodes: &[NodeId], rng: &mut ChaCha8Rng) -> Result<(NodeId, NodeId, bool), NbackError> {
    for _ in 0..10_000 {
        let u = nodes[rng.gen_range(0..nodes.len())];
        let v = nodes[rng.gen_range(0..nodes.len())];
        if u != v && !g.contains_edge(u, v) && !g.contains_edge(v, u) {
            return Ok((u, v, false));
        }
    }
    Err(NbackError::TooDense)
}

/// Answers N-back questions from every edge block seen in the dialogue.
pub fn memory_reply(req: &ChatRequest, directed: bool) -> String {
    let mut seen = BTreeSet::new();
    for m in req.messages.iter().filter(|m| m.role == Role::User) {
        for block in m.content.split("<<<").skip(1) {
            let body = block.split(">>>").next().unwrap_or("");
            for e in scan_adjacency_list(body).edges {
                seen.insert(edge_key(e.u, e.v, directed));
            }
        }
    }
    let lines: Vec<String> = QUERY
        .captures_iter(req.last_user())
        .map(|c| {
            let (u, v) = (c[2].parse().unwrap_or(0), c[3].parse().unwrap_or(0));
            let yes = seen.contains(&edge_key(u, v, directed));
            format!("A{}: {}", &c[1], if yes { "Yes" } else { "No" })
        })
        .collect();
    if lines.is_empty() {
        "Noted.".into()
    } else {
        lines.join("\n")
    }
}

pub fn memory_responder(directed: bool) -> MockBackend {
    MockBackend::from_fn(move |req| Some(memory_reply(req, directed)))
}

/// Says no to every question.
pub fn reject_responder() -> MockBackend {
    MockBackend::from_fn(|req| {
        let lines: Vec<String> = QUERY.captures_iter(req.last_user()).map(|c| format!("A{}: No", &c[1])).collect();
        Some(if lines.is_empty() { "Noted.".into() } else { lines.join("\n") })
    })
}

pub fn nback_table(reports: &[NbackReport]) -> String {
    let mut out = format!(
        "{:>3} {:>8} {:>11} {:>12} {:>9}\n",
        "N", "queries", "true_ok", "false_ok", "accuracy"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:>3} {:>8} {:>5}/{:<5} {:>6}/{:<5} {:>9.3}",
            r.n, r.queries, r.true_correct, r.true_total, r.false_correct, r.false_total, r.accuracy
        );
    }
    out
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub granularity: usize,
    pub graph: usize,
    pub edit: Option<usize>,
    pub usage: TokenUsage,
    pub calls: usize,
    pub gec: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub granularity: usize,
    pub graphs: usize,
    pub failed: usize,
    pub mean_edit: f64,
    /// Mean total tokens divided by `t_max`.
    pub mean_cost: f64,
    pub mean_gec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub t_max: u64,
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>11} {:>6} {:>6} {:>10} {:>10} {:>10}\n", "granularity", "graphs", "failed", "edit", "cost", "gec");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>11} {:>6} {:>6} {:>10.3} {:>10.4} {:>10.4}",
                r.granularity, r.graphs, r.failed, r.mean_edit, r.mean_cost, r.mean_gec
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Ingests every graph at every granularity through `llm` and reports edit
/// distance, token cost and GEC. Failed cells are kept with their error and
/// left out of the means.
pub fn gec_sweep(
    graphs: &[Graph],
    granularities: &[usize],
    rep: Representation,
    llm: &dyn ChatBackend,
    ingest_cfg: &IngestConfig,
    gec_cfg: &GecConfig,
    templates: &Templates,
) -> Result<SweepReport, String> {
    if granularities.is_empty() || granularities.contains(&0) {
        return Err("granularities must be non-empty and positive".into());
    }
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    for &granularity in granularities {
        let mut ok = Vec::new();
        for (gi, g) in graphs.iter().enumerate() {
            let cell = sweep_cell(g, gi, granularity, rep, llm, ingest_cfg, gec_cfg, templates);
            if cell.error.is_none() {
                ok.push(cell.clone());
            }
            cells.push(cell);
        }
        let avg = |f: &dyn Fn(&SweepCell) -> f64| mean(&ok.iter().map(f).collect::<Vec<_>>()).unwrap_or(f64::NAN);
        rows.push(SweepRow {
            granularity,
            graphs: graphs.len(),
            failed: graphs.len() - ok.len(),
            mean_edit: avg(&|c| c.edit.unwrap_or(0) as f64),
            mean_cost: avg(&|c| c.usage.total() as f64 / gec_cfg.t_max as f64),
            mean_gec: avg(&|c| c.gec.unwrap_or(0.0)),
        });
    }
    Ok(SweepReport {
        t_max: gec_cfg.t_max,
        rows,
        cells,
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_cell(
    g: &Graph,
    index: usize,
    granularity: usize,
    rep: Representation,
    llm: &dyn ChatBackend,
    ingest_cfg: &IngestConfig,
    gec_cfg: &GecConfig,
    templates: &Templates,
) -> SweepCell {
    let session = Session::new(llm);
    let mut cell = SweepCell {
        granularity,
        graph: index,
        edit: None,
        usage: TokenUsage::default(),
        calls: 0,
        gec: None,
        error: None,
    };
    let cfg = IngestConfig {
        granularity,
        directed: g.is_directed(),
        fast_path: false,
        ..ingest_cfg.clone()
    };
    let result = render(&g.edge_list(), rep)
        .map_err(|e| e.to_string())
        .and_then(|doc| ingest(&doc.text, Some(rep), &cfg, Some(&session), templates).map_err(|e| e.to_string()));
    cell.usage = session.usage();
    cell.calls = session.calls();
    match result {
        Ok((h, _)) => {
            let edit = edit_distance_unchecked(g, &h);
            cell.edit = Some(edit.total);
            cell.gec = Some(gec(&edit, &session.usages(), gec_cfg));
        }
        Err(e) => cell.error = Some(e),
    }
    cell
}
