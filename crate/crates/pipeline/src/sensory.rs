//! Chunking, LLM transformation to adjacency lists, count-and-grammar
//! verification, and the retrying ingest loop.

use graphwm_core::buffer::assemble;
use graphwm_core::repr::{detect, scan_adjacency_list};
use graphwm_core::repr::ReprError;
use graphwm_core::{parse_any, render, Edge, Graph, GraphError, RenderedChunk, Representation, TokenUsage};
use graphwm_llm::{ChatBackend, ChatRequest, LlmError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::ordered_map;
use crate::prompts::Templates;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeChunk {
    pub turn_index: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkPlan {
    pub granularity: usize,
    pub chunks: Vec<EdgeChunk>,
}

/// Splits `edges` into consecutive runs of `granularity` (the last run may be
/// shorter). Panics if `granularity` is zero.
pub fn plan_chunks(edges: &[Edge], granularity: usize) -> ChunkPlan {
    assert!(granularity >= 1, "granularity must be at least 1");
    ChunkPlan {
        granularity,
        chunks: edges
            .chunks(granularity)
            .enumerate()
            .map(|(turn_index, c)| EdgeChunk {
                turn_index,
                edges: c.to_vec(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub passed: bool,
    pub expected_count: usize,
    pub parsed_count: usize,
    pub format_violations: usize,
}

/// Checks edge count and adjacency-list grammar only. The original edge
/// identities are never compared, so count-consistent substitutions pass.
pub fn verify_chunk(original: &EdgeChunk, parsed: &[Edge], raw_reply: &str) -> VerifyResult {
    let expected_count = original.edges.len();
    let parsed_count = parsed.len();
    let format_violations = scan_adjacency_list(raw_reply).malformed.len();
    VerifyResult {
        passed: expected_count == parsed_count && format_violations == 0,
        expected_count,
        parsed_count,
        format_violations,
    }
}

#[derive(Debug, Error)]
pub enum SensoryError {
    #[error(transparent)]
    Backend(#[from] LlmError),
    #[error("no edges found in reply")]
    NoEdgesFound { reply: String, usage: TokenUsage },
    #[error("document does not parse: {0}")]
    Document(#[from] ReprError),
    #[error("cannot tell which representation the document uses")]
    UnknownRepresentation,
    #[error("chunk {turn_index} still fails verification after all retries")]
    ChunkExhausted {
        turn_index: usize,
        report: Box<IngestReport>,
    },
    #[error("assembled graph is invalid: {0}")]
    Assembly(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub edges: Vec<Edge>,
    pub reply: String,
    pub usage: TokenUsage,
}

fn transform_with_feedback(
    rendered: &RenderedChunk,
    llm: &dyn ChatBackend,
    templates: &Templates,
    feedback: Option<&str>,
) -> Result<Transformed, SensoryError> {
    let mut prompt = templates.sensory(rendered.representation, &rendered.text);
    if let Some(note) = feedback {
        prompt.push_str("\n\n");
        prompt.push_str(note);
    }
    let resp = llm.chat(&ChatRequest::prompt(None, prompt))?;
    let edges = scan_adjacency_list(&resp.content).edges;
    if edges.is_empty() {
        return Err(SensoryError::NoEdgesFound {
            reply: resp.content,
            usage: resp.usage,
        });
    }
    Ok(Transformed {
        edges,
        reply: resp.content,
        usage: resp.usage,
    })
}

/// One transformation call: prompt with the chunk text, pull adjacency items
/// out of the reply. No validation happens here.
pub fn transform_chunk(
    rendered: &RenderedChunk,
    llm: &dyn ChatBackend,
    templates: &Templates,
) -> Result<Transformed, SensoryError> {
    transform_with_feedback(rendered, llm, templates, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub granularity: usize,
    pub max_retries: usize,
    /// Skip the LLM when the document already parses under its grammar.
    pub fast_path: bool,
    pub concurrency: usize,
    pub directed: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            granularity: 50,
            max_retries: 3,
            fast_path: false,
            concurrency: 1,
            directed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkReport {
    pub turn_index: usize,
    pub attempts: Vec<VerifyResult>,
    pub accepted: bool,
    pub usage: TokenUsage,
}

impl ChunkReport {
    pub fn retries(&self) -> usize {
        self.attempts.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub representation: Representation,
    pub granularity: usize,
    pub fast_path: bool,
    pub source_edges: usize,
    pub chunks: Vec<ChunkReport>,
    pub usage: TokenUsage,
}

impl IngestReport {
    pub fn retries(&self) -> usize {
        self.chunks.iter().map(ChunkReport::retries).sum()
    }

    pub fn calls(&self) -> usize {
        self.chunks.iter().map(|c| c.attempts.len()).sum()
    }
}

fn retry_note(v: &VerifyResult) -> String {
    format!(
        "Your previous answer failed verification: the input has {} edges, you returned {} with {} malformed items. \
         Output every edge exactly once.",
        v.expected_count, v.parsed_count, v.format_violations
    )
}

fn process_chunk(
    chunk: &EdgeChunk,
    rep: Representation,
    llm: &dyn ChatBackend,
    templates: &Templates,
    max_retries: usize,
) -> Result<(ChunkReport, Vec<Edge>), SensoryError> {
    let rendered = render(&chunk.edges, rep)?;
    let mut report = ChunkReport {
        turn_index: chunk.turn_index,
        attempts: Vec::new(),
        accepted: false,
        usage: TokenUsage::default(),
    };
    let mut feedback: Option<String> = None;
    for _ in 0..=max_retries {
        let (edges, reply) = match transform_with_feedback(&rendered, llm, templates, feedback.as_deref()) {
            Ok(t) => {
                report.usage += t.usage;
                (t.edges, t.reply)
            }
            Err(SensoryError::NoEdgesFound { reply, usage }) => {
                report.usage += usage;
                (Vec::new(), reply)
            }
            Err(e) => return Err(e),
        };
        let verdict = verify_chunk(chunk, &edges, &reply);
        report.attempts.push(verdict);
        if verdict.passed {
            report.accepted = true;
            return Ok((report, edges));
        }
        log::debug!("chunk {} failed verification: {verdict:?}", chunk.turn_index);
        feedback = Some(retry_note(&verdict));
    }
    Ok((report, Vec::new()))
}

/// Parses `document`, then either assembles it directly (fast path) or
/// sends each chunk through transform and verify, retrying failed chunks up
/// to `max_retries` times. `rep = None` detects the representation.
pub fn ingest(
    document: &str,
    rep: Option<Representation>,
    cfg: &IngestConfig,
    llm: Option<&dyn ChatBackend>,
    templates: &Templates,
) -> Result<(Graph, IngestReport), SensoryError> {
    let rep = match rep {
        Some(r) => r,
        None => detect(document).ok_or(SensoryError::UnknownRepresentation)?,
    };
    let source = parse_any(document, rep)?;
    let mut report = IngestReport {
        representation: rep,
        granularity: cfg.granularity,
        fast_path: false,
        source_edges: source.len(),
        chunks: Vec::new(),
        usage: TokenUsage::default(),
    };
    let llm = match llm {
        Some(l) if !cfg.fast_path => l,
        _ => {
            report.fast_path = true;
            return Ok((assemble(&[source], cfg.directed)?, report));
        }
    };

    let plan = plan_chunks(&source, cfg.granularity);
    let results = ordered_map(&plan.chunks, cfg.concurrency, |_, chunk| {
        process_chunk(chunk, rep, llm, templates, cfg.max_retries)
    });
    let mut outputs = Vec::with_capacity(results.len());
    let mut exhausted = None;
    let mut first_error = None;
    for r in results {
        match r {
            Ok((chunk_report, edges)) => {
                report.usage += chunk_report.usage;
                if !chunk_report.accepted && exhausted.is_none() {
                    exhausted = Some(chunk_report.turn_index);
                }
                report.chunks.push(chunk_report);
                outputs.push(edges);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if let Some(turn_index) = exhausted {
        return Err(SensoryError::ChunkExhausted {
            turn_index,
            report: Box::new(report),
        });
    }
    Ok((assemble(&outputs, cfg.directed)?, report))
}

/// Echoes the chunk inside a sensory prompt back as an adjacency list, the
/// behavior of a perfect transformer. Works with every built-in template.
pub fn echo_reply(prompt: &str) -> Option<String> {
    let payload = crate::prompts::chunk_payload(prompt)?;
    let rep = detect(payload)?;
    let edges = parse_any(payload, rep).ok()?;
    render(&edges, Representation::ADJACENCY).ok().map(|c| c.text)
}

/// Mock backend that answers every sensory prompt with [`echo_reply`].
pub fn echo_backend() -> graphwm_llm::MockBackend {
    graphwm_llm::MockBackend::from_fn(|req| echo_reply(req.last_user()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphwm_core::{edit_distance, Predicate};
    use graphwm_llm::{MockBackend, ScriptEntry, Session};

    fn path_edges(n: u32) -> Vec<Edge> {
        (0..n).map(|i| Edge::new(i, i + 1)).collect()
    }

    fn chunk(edges: Vec<Edge>) -> EdgeChunk {
        EdgeChunk { turn_index: 0, edges }
    }

    #[test]
    fn plan_sizes() {
        let sizes = |n, g| plan_chunks(&path_edges(n), g).chunks.iter().map(|c| c.edges.len()).collect::<Vec<_>>();
        assert_eq!(sizes(300, 50), vec![50; 6]);
        assert_eq!(sizes(101, 50), vec![50, 50, 1]);
        assert!(sizes(0, 50).is_empty());
        let plan = plan_chunks(&path_edges(101), 50);
        let rejoined: Vec<Edge> = plan.chunks.iter().flat_map(|c| c.edges.clone()).collect();
        assert_eq!(rejoined, path_edges(101));
        assert_eq!(plan.chunks[2].turn_index, 2);
    }

    #[test]
    fn verify_cases() {
        let c = chunk(path_edges(50));
        let ok = verify_chunk(&c, &path_edges(50), &render(&path_edges(50), Representation::ADJACENCY).unwrap().text);
        assert!(ok.passed);
        let short = verify_chunk(&c, &path_edges(49), "");
        assert!(!short.passed);
        assert_eq!((short.expected_count, short.parsed_count), (50, 49));
        let reply = format!("{},[7,x]", render(&path_edges(50), Representation::ADJACENCY).unwrap().text);
        let bad = verify_chunk(&c, &path_edges(50), &reply);
        assert!(!bad.passed);
        assert!(bad.format_violations >= 1);
    }

    #[test]
    fn transform_examples() {
        let rendered = render(&[Edge::new(0, 1), Edge::new(0, 2)], Representation::ADJACENCY).unwrap();
        let t = Templates::default();
        let m = MockBackend::from_entries(vec![
            ScriptEntry::reply("[0,1],[0,2]", 1, 1),
            ScriptEntry::reply("Sure! Here it is: [3,4]", 1, 1),
            ScriptEntry::reply("no edges", 1, 1),
        ]);
        assert_eq!(transform_chunk(&rendered, &m, &t).unwrap().edges, vec![Edge::new(0, 1), Edge::new(0, 2)]);
        assert_eq!(transform_chunk(&rendered, &m, &t).unwrap().edges, vec![Edge::new(3, 4)]);
        assert!(matches!(transform_chunk(&rendered, &m, &t), Err(SensoryError::NoEdgesFound { .. })));
    }

    fn llm_cfg(directed: bool) -> IngestConfig {
        IngestConfig {
            directed,
            ..IngestConfig::default()
        }
    }

    #[test]
    fn echo_ingest_is_exact_for_every_representation() {
        let g = graphwm_core::synthetic::preferential_attachment(80, 2, true, 3);
        let g = g.with_weights(|e| (e.u + e.v) as f64 % 7.0 + 1.0).unwrap();
        for rep in [
            Representation::ADJACENCY,
            Representation::SYMBOLIC,
            Representation::linguistic(Predicate::Linked),
        ] {
            let text = render(&g.edge_list(), rep).unwrap().text;
            let session = Session::new(echo_backend());
            let (h, report) = ingest(&text, Some(rep), &llm_cfg(true), Some(&session), &Templates::default()).unwrap();
            assert_eq!(edit_distance(&g, &h).unwrap().total, 0);
            assert_eq!(h, g);
            assert_eq!(report.retries(), 0);
            assert_eq!(session.calls(), g.edge_count().div_ceil(50));
            assert_eq!(report.usage, session.usage());
        }
    }

    #[test]
    fn detects_representation_when_unspecified() {
        let text = "Node 0 is Followed to node 1. Node 1 is Followed to node 2";
        let (g, report) = ingest(text, None, &llm_cfg(false), Some(&echo_backend()), &Templates::default()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.representation, Representation::linguistic(Predicate::Followed));
        assert!(matches!(
            ingest("nothing here", None, &llm_cfg(false), None, &Templates::default()),
            Err(SensoryError::UnknownRepresentation)
        ));
    }

    #[test]
    fn fast_path_skips_the_backend() {
        let text = render(&path_edges(120), Representation::SYMBOLIC).unwrap().text;
        let session = Session::new(MockBackend::from_entries(vec![]));
        let cfg = IngestConfig {
            fast_path: true,
            ..llm_cfg(true)
        };
        let (g, report) = ingest(&text, None, &cfg, Some(&session), &Templates::default()).unwrap();
        assert_eq!(g.edge_count(), 120);
        assert!(report.fast_path);
        assert_eq!(session.calls(), 0);
        let (_, report) = ingest(&text, None, &llm_cfg(true), None, &Templates::default()).unwrap();
        assert!(report.fast_path);
    }

    /// Echo, except the first `failures` replies for chunks containing
    /// `marker` drop their last edge.
    fn flaky(marker: &'static str, failures: usize) -> MockBackend {
        let left = std::sync::atomic::AtomicUsize::new(failures);
        MockBackend::from_fn(move |req| {
            let mut reply = echo_reply(req.last_user())?;
            let payload = crate::prompts::chunk_payload(req.last_user())?;
            if payload.contains(marker)
                && left
                    .fetch_update(std::sync::atomic::Ordering::SeqCst, std::sync::atomic::Ordering::SeqCst, |k| {
                        k.checked_sub(1)
                    })
                    .is_ok()
            {
                let cut = reply.rfind(",[").unwrap();
                reply.truncate(cut);
            }
            Some(reply)
        })
    }

    #[test]
    fn one_retry_then_success() {
        let edges = path_edges(150);
        let text = render(&edges, Representation::ADJACENCY).unwrap().text;
        // chunk 2 holds edges 100..150, the only one mentioning node 120
        let session = Session::new(flaky("[120,121]", 1));
        let (g, report) = ingest(&text, None, &llm_cfg(true), Some(&session), &Templates::default()).unwrap();
        assert_eq!(report.retries(), 1);
        assert_eq!(report.chunks[2].retries(), 1);
        assert_eq!(session.calls(), 4);
        assert_eq!(g, Graph::build(edges, true).unwrap());
        let retry_prompt = &session.transcript()[3].request;
        assert!(retry_prompt.last_user().contains("failed verification"));
    }

    #[test]
    fn exhaustion_after_max_retries() {
        let text = render(&path_edges(120), Representation::ADJACENCY).unwrap().text;
        let cfg = IngestConfig {
            max_retries: 2,
            ..llm_cfg(true)
        };
        let session = Session::new(flaky("[0,1]", usize::MAX));
        let err = ingest(&text, None, &cfg, Some(&session), &Templates::default()).unwrap_err();
        match err {
            SensoryError::ChunkExhausted { turn_index, report } => {
                assert_eq!(turn_index, 0);
                assert_eq!(report.chunks[0].attempts.len(), 3);
                assert_eq!(report.chunks.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(session.calls(), 3 + 2);
    }

    #[test]
    fn concurrent_ingest_matches_serial() {
        let g = graphwm_core::synthetic::preferential_attachment(200, 3, false, 11);
        let text = render(&g.edge_list(), Representation::SYMBOLIC).unwrap().text;
        let cfg = IngestConfig {
            concurrency: 6,
            granularity: 25,
            ..llm_cfg(false)
        };
        let (h, report) = ingest(&text, None, &cfg, Some(&echo_backend()), &Templates::default()).unwrap();
        assert_eq!(h, g);
        let turns: Vec<usize> = report.chunks.iter().map(|c| c.turn_index).collect();
        assert_eq!(turns, (0..g.edge_count().div_ceil(25)).collect::<Vec<_>>());
    }
}
