//! Reasoning Agent (tool discrimination), Model Agent (plan generation) and
//! the solve loop that ties them to the graph buffer.

use std::sync::LazyLock;

use graphwm_core::buffer::IndexRecord;
use graphwm_core::catalog::{self, CatalogEntry, CatalogError, CatalogKey};
use graphwm_core::toolset::{self, Args, ToolDescriptor};
use graphwm_core::{answers_match, execute_plan, GraphStore, ModelPlan, TokenUsage};
use graphwm_llm::{ChatBackend, ChatRequest, LlmError, Message, Session};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::TaskInstance;
use crate::prompts::Templates;
use crate::tasks::{Metric, Route};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Decision {
    InToolset { tool: String, args: Args },
    OutToolset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionSource {
    Backend,
    Rules,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub decision: Decision,
    /// The backend's reply verbatim, or a note naming the matching rule.
    pub rationale: String,
    pub source: DecisionSource,
}

impl Discrimination {
    pub fn is_in_toolset(&self) -> bool {
        matches!(self.decision, Decision::InToolset { .. })
    }
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Backend(#[from] LlmError),
    #[error("tool manifest is empty")]
    EmptyManifest,
    #[error("could not extract arguments for `{tool}`: {reason}")]
    ArgExtraction { tool: String, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

// ---------------------------------------------------------------- rules

static NODE_REF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bnode\s+(\d+)").unwrap());

/// Keyword table used when no backend is configured or its reply cannot be
/// read. Order matters: more specific phrases come first.
const RULES: &[(&str, Route, &[&str])] = &[
    ("maximum flow", Route::Model(CatalogKey::MaxFlow), &["s", "t"]),
    ("diameter", Route::Model(CatalogKey::Diameter), &[]),
    ("k-core", Route::Model(CatalogKey::MaxCore), &[]),
    ("connected components", Route::Model(CatalogKey::ConnectedComponents), &[]),
    ("common neighbors", Route::Model(CatalogKey::CommonNeighbors), &["u", "v"]),
    ("pagerank", Route::Model(CatalogKey::PageRank), &["node"]),
    ("cited by both", Route::Model(CatalogKey::ReferenceMatch), &["u", "v"]),
    ("clustering coefficient", Route::Model(CatalogKey::ClusteringCoefficient), &["node"]),
    ("traffic flow", Route::Model(CatalogKey::TrafficPredictionBaseline), &["node"]),
    ("likely to form a link", Route::Model(CatalogKey::LinkPredictionBaseline), &["u", "v"]),
    ("topic label", Route::Model(CatalogKey::NodeClassificationBaseline), &["node"]),
    ("total number of edges", Route::Tool("edge_count"), &[]),
    ("total number of nodes", Route::Tool("node_count"), &[]),
    ("degree of node", Route::Tool("degree_count"), &["node"]),
    ("direct edge", Route::Tool("edge_existence"), &["u", "v"]),
    ("appear in the network", Route::Tool("node_existence"), &["node"]),
    ("cycle", Route::Tool("cycle_detection"), &[]),
    ("triangles", Route::Tool("triangle_count"), &[]),
    ("shortest path", Route::Tool("shortest_path"), &["s", "t"]),
    ("is there a path", Route::Tool("path_existence"), &["s", "t"]),
];

/// Matches the question against the keyword table and binds node ids, in
/// order of appearance, to the route's parameters.
pub fn rule_route(question: &str) -> Option<(Route, Args)> {
    let lower = question.to_lowercase();
    let (phrase, route, params) = RULES.iter().find(|(phrase, _, _)| lower.contains(phrase))?;
    let ids: Vec<&str> = NODE_REF.captures_iter(question).map(|c| c.get(1).unwrap().as_str()).collect();
    if ids.len() < params.len() {
        log::debug!("rule `{phrase}` matched but found {} of {} node ids", ids.len(), params.len());
        return None;
    }
    let args = params.iter().zip(ids).map(|(k, v)| (k.to_string(), v.to_string())).collect();
    Some((*route, args))
}

/// Plays both agents with the keyword rules: reasoning prompts get a
/// `Tool:` line, model prompts a `Model:` line. The question is read after
/// the last `Question:` marker, as in the built-in templates.
pub fn rule_agent_reply(prompt: &str) -> Option<String> {
    let question = &prompt[prompt.rfind("Question:")? + "Question:".len()..];
    let (route, args) = rule_route(question)?;
    let params: String = args.iter().map(|(k, v)| format!(", {k}={v}")).collect();
    if prompt.contains("Tool: none") {
        Some(match route {
            Route::Tool(name) => format!("The question maps onto a toolset entry.\nTool: {name}{params}"),
            Route::Model(_) => "No available tool covers this question.\nTool: none".to_string(),
        })
    } else if prompt.contains("Model: <CatalogKey>") {
        match route {
            Route::Model(key) => Some(format!("Model: {key}{params}")),
            Route::Tool(_) => None,
        }
    } else {
        None
    }
}

/// Mock backend that transforms chunks by echo and answers agent prompts by
/// the keyword rules: a perfect pipeline at surrogate token cost.
pub fn rule_agent() -> graphwm_llm::MockBackend {
    graphwm_llm::MockBackend::from_fn(|req| {
        let p = req.last_user();
        crate::sensory::echo_reply(p).or_else(|| rule_agent_reply(p))
    })
}

// ---------------------------------------------------------------- parsing

static TOOL_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^\W*tool\s*:\s*(.+?)\s*$").unwrap());
static MODEL_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^\W*model\s*:\s*(.+?)\s*$").unwrap());
static OUT_OF_COVERAGE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bno (available |single |suitable |existing )?tools?\b|out[- ]of[- ]toolset|none of the (available )?tools|beyond the toolset").unwrap()
});

/// Splits `Name, k=v, k=v` into the name and its arguments. Pairs may also
/// be separated by whitespace or semicolons.
fn split_call(body: &str) -> (String, Args) {
    let body = body.trim().trim_end_matches('.');
    let (name, rest) = match body.find([',', ' ', '(']) {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    let args = rest
        .split([',', ';', ' ', ')'])
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().trim_matches(['"', '\'']).to_string()))
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .collect();
    (name.trim().trim_matches(['`', '*', '"']).to_string(), args)
}

fn last_capture(re: &Regex, text: &str) -> Option<String> {
    re.captures_iter(text).last().map(|c| c[1].to_string())
}

fn missing_args(tool: &ToolDescriptor, args: &Args) -> Vec<String> {
    tool.param_schema
        .iter()
        .filter(|(name, _)| args.get(name).is_none_or(|v| v.parse::<u32>().is_err()))
        .map(|(name, _)| name.clone())
        .collect()
}

fn tools_text(manifest: &[ToolDescriptor]) -> String {
    manifest
        .iter()
        .map(|t| {
            let params: Vec<&str> = t.param_schema.iter().map(|(n, _)| n.as_str()).collect();
            format!("- {}({}): {}", t.name, params.join(", "), t.description)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn catalog_text(catalog: &[CatalogEntry]) -> String {
    catalog
        .iter()
        .map(|e| {
            let params: Vec<String> = e
                .params
                .iter()
                .map(|p| format!("{}{}: {}", p.name, if p.required { "" } else { "?" }, p.kind))
                .collect();
            format!("- {}({}) [{}]: {}", e.key, params.join(", "), e.required_view, e.description)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn index_text(index: &[IndexRecord]) -> String {
    index
        .iter()
        .map(|r| format!("- {} {:?}: {} ({})", r.format_id, r.dimensionality, r.schema, r.metadata))
        .collect::<Vec<_>>()
        .join("\n")
}

fn rules_discrimination(question: &str, note: &str) -> Discrimination {
    let (decision, rule) = match rule_route(question) {
        Some((Route::Tool(tool), args)) => (
            Decision::InToolset {
                tool: tool.to_string(),
                args,
            },
            format!("keyword rule selected `{tool}`"),
        ),
        Some((Route::Model(key), _)) => (Decision::OutToolset, format!("keyword rule routes to catalog model {key}")),
        None => (Decision::OutToolset, "no keyword rule matched".to_string()),
    };
    Discrimination {
        decision,
        rationale: if note.is_empty() { rule } else { format!("{note}; {rule}") },
        source: DecisionSource::Rules,
    }
}

/// Reply classification for the Reasoning Agent.
enum ToolReply {
    Call(String, Args),
    Unknown(String),
    None,
    Unreadable,
}

fn read_tool_reply(reply: &str, manifest: &[ToolDescriptor]) -> ToolReply {
    match last_capture(&TOOL_LINE, reply) {
        Some(body) => {
            let (name, args) = split_call(&body);
            let lower = name.to_ascii_lowercase();
            if lower == "none" || lower.is_empty() {
                ToolReply::None
            } else if manifest.iter().any(|t| t.name == lower) {
                ToolReply::Call(lower, args)
            } else {
                ToolReply::Unknown(name)
            }
        }
        None if OUT_OF_COVERAGE.is_match(reply) => ToolReply::None,
        None => ToolReply::Unreadable,
    }
}

/// Asks the backend whether one tool answers `question`. Without a backend,
/// or when the reply is unreadable, the keyword rules decide.
pub fn discriminate(
    question: &str,
    manifest: &[ToolDescriptor],
    llm: Option<&dyn ChatBackend>,
    templates: &Templates,
) -> Result<(Discrimination, usize), ExecError> {
    if manifest.is_empty() {
        return Err(ExecError::EmptyManifest);
    }
    let Some(llm) = llm else {
        return Ok((rules_discrimination(question, ""), 0));
    };
    let prompt = templates.reasoning(question, &tools_text(manifest));
    let reply = llm.chat(&ChatRequest::prompt(None, prompt.clone()))?.content;
    let backend = |decision| Discrimination {
        decision,
        rationale: reply.clone(),
        source: DecisionSource::Backend,
    };
    match read_tool_reply(&reply, manifest) {
        ToolReply::None => Ok((backend(Decision::OutToolset), 0)),
        ToolReply::Unknown(name) => {
            log::debug!("reasoning reply names unknown tool `{name}`");
            Ok((backend(Decision::OutToolset), 0))
        }
        ToolReply::Unreadable => Ok((rules_discrimination(question, "reasoning reply unreadable"), 0)),
        ToolReply::Call(tool, args) => {
            let descriptor = manifest.iter().find(|t| t.name == tool).unwrap();
            let missing = missing_args(descriptor, &args);
            if missing.is_empty() {
                return Ok((backend(Decision::InToolset { tool, args }), 0));
            }
            let followup = format!(
                "The call to `{tool}` is missing or has non-integer values for: {}. \
                 Reply again with the final line `Tool: {tool}, {}`.",
                missing.join(", "),
                descriptor
                    .param_schema
                    .iter()
                    .map(|(n, _)| format!("{n}=<node>"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let req = ChatRequest::new(vec![
                Message::user(prompt),
                Message::assistant(reply.clone()),
                Message::user(followup),
            ])?;
            let second = llm.chat(&req)?.content;
            if let ToolReply::Call(t2, args2) = read_tool_reply(&second, manifest) {
                if t2 == tool && missing_args(descriptor, &args2).is_empty() {
                    return Ok((
                        Discrimination {
                            decision: Decision::InToolset { tool, args: args2 },
                            rationale: format!("{reply}\n---\n{second}"),
                            source: DecisionSource::Backend,
                        },
                        1,
                    ));
                }
            }
            Err(ExecError::ArgExtraction {
                tool,
                reason: format!("missing {}", missing.join(", ")),
            })
        }
    }
}

fn rules_plan(question: &str) -> Result<ModelPlan, ExecError> {
    match rule_route(question) {
        Some((Route::Model(key), args)) => Ok(ModelPlan::new(key, args)?),
        Some((Route::Tool(t), _)) => Err(CatalogError::UnknownCatalogKey(format!("(rules chose tool {t})")).into()),
        None => Err(CatalogError::UnknownCatalogKey("(no rule matched)".into()).into()),
    }
}

fn read_plan(reply: &str) -> Option<Result<ModelPlan, CatalogError>> {
    let body = last_capture(&MODEL_LINE, reply)?;
    // keys are single identifiers, so "Max Flow" still names MaxFlow
    let head = body.find([',', '(']).map_or(body.as_str(), |i| &body[..i]);
    let key: String = head.chars().filter(|c| !c.is_whitespace()).collect();
    let (_, args) = split_call(&format!("{key},{}", &body[head.len()..]));
    Some(ModelPlan::from_parts(&key, args))
}

/// Asks the Model Agent for a catalog plan. One reprompt follows an unknown
/// key or bad parameters; an unreadable reply falls back to the rules.
pub fn generate_plan(
    question: &str,
    catalog: &[CatalogEntry],
    index: &[IndexRecord],
    llm: Option<&dyn ChatBackend>,
    templates: &Templates,
) -> Result<(ModelPlan, usize), ExecError> {
    let Some(llm) = llm else {
        return Ok((rules_plan(question)?, 0));
    };
    let prompt = templates.model(question, &catalog_text(catalog), &index_text(index));
    let reply = llm.chat(&ChatRequest::prompt(None, prompt.clone()))?.content;
    let err = match read_plan(&reply) {
        None => return Ok((rules_plan(question)?, 0)),
        Some(Ok(plan)) => return Ok((plan, 0)),
        Some(Err(e)) => e,
    };
    let followup = format!(
        "That plan is invalid ({err}). Valid keys: {}. Reply again with the final line `Model: <CatalogKey>, <param>=<value>`.",
        CatalogKey::ALL.map(|k| k.to_string()).join(", ")
    );
    let req = ChatRequest::new(vec![Message::user(prompt), Message::assistant(reply), Message::user(followup)])?;
    let second = llm.chat(&req)?.content;
    match read_plan(&second) {
        Some(Ok(plan)) => Ok((plan, 1)),
        Some(Err(e)) => Err(e.into()),
        None => Err(err.into()),
    }
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorKind {
    ToolError,
    DiscriminationError,
    ExecutionError,
    FormatError,
    EdgeError,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 5] = [
        ErrorKind::ToolError,
        ErrorKind::DiscriminationError,
        ErrorKind::ExecutionError,
        ErrorKind::FormatError,
        ErrorKind::EdgeError,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorNote {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub instance_id: String,
    pub task_kind: crate::tasks::TaskKind,
    pub decision: Option<Discrimination>,
    pub plan: Option<ModelPlan>,
    pub answer: Option<String>,
    pub ground_truth: String,
    pub correct: Option<bool>,
    pub abs_error: Option<f64>,
    pub token_usage: TokenUsage,
    pub calls: usize,
    pub retries: usize,
    pub error: Option<ErrorNote>,
    /// Edge edit distance of the ingested graph, filled in by the suite.
    pub edit_distance: Option<usize>,
}

impl SolveRecord {
    pub fn new(instance: &TaskInstance) -> Self {
        SolveRecord {
            instance_id: instance.id.clone(),
            task_kind: instance.task_kind,
            decision: None,
            plan: None,
            answer: None,
            ground_truth: instance.ground_truth.clone(),
            correct: None,
            abs_error: None,
            token_usage: TokenUsage::default(),
            calls: 0,
            retries: 0,
            error: None,
            edit_distance: None,
        }
    }

    pub(crate) fn fail(&mut self, kind: ErrorKind, message: impl Into<String>) {
        if self.error.is_none() {
            self.error = Some(ErrorNote {
                kind,
                message: message.into(),
            });
        }
        if self.correct.is_none() && self.abs_error.is_none() {
            self.correct = Some(false);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Boolean,
    Numeric,
    Scores,
    Sentinel,
    Other,
}

fn shape(s: &str) -> Shape {
    let t = s.trim().to_ascii_lowercase();
    if t == "yes" || t == "no" {
        Shape::Boolean
    } else if t.parse::<f64>().is_ok() {
        Shape::Numeric
    } else if t == "no path" || t == "disconnected" {
        Shape::Sentinel
    } else if t.contains(':') {
        Shape::Scores
    } else {
        Shape::Other
    }
}

fn shapes_compatible(got: Shape, expected: Shape) -> bool {
    got == expected || matches!((got, expected), (Shape::Sentinel, Shape::Numeric) | (Shape::Numeric, Shape::Sentinel))
}

/// Discriminate, then call the tool or build and run a catalog plan, then
/// score against the instance's ground truth. Failures land in the record.
pub fn solve(
    instance: &TaskInstance,
    store: &GraphStore,
    llm: Option<&dyn ChatBackend>,
    templates: &Templates,
) -> SolveRecord {
    let session = llm.map(Session::new);
    let handle = session.as_ref().map(|s| s as &dyn ChatBackend);
    let mut rec = SolveRecord::new(instance);
    run(instance, store, handle, templates, &mut rec);
    if let Some(s) = &session {
        rec.token_usage = s.usage();
        rec.calls = s.calls();
    }
    rec
}

fn run(instance: &TaskInstance, store: &GraphStore, llm: Option<&dyn ChatBackend>, templates: &Templates, rec: &mut SolveRecord) {
    let kind = instance.task_kind;
    let disc = match discriminate(&instance.question, &toolset::manifest(), llm, templates) {
        Ok((d, reprompts)) => {
            rec.retries += reprompts;
            d
        }
        Err(e) => return rec.fail(ErrorKind::DiscriminationError, e.to_string()),
    };
    let in_toolset = disc.is_in_toolset();
    rec.decision = Some(disc.clone());
    if in_toolset != kind.in_toolset() {
        let side = if in_toolset { "in-toolset" } else { "out-toolset" };
        return rec.fail(ErrorKind::DiscriminationError, format!("treated a {kind} question as {side}"));
    }

    let answer = match disc.decision {
        Decision::InToolset { tool, args } => {
            if let Route::Tool(expected) = kind.route() {
                if tool != expected {
                    return rec.fail(ErrorKind::ToolError, format!("selected `{tool}`, expected `{expected}`"));
                }
            }
            match toolset::invoke(store, &tool, &args) {
                Ok(a) => a,
                Err(e) => return rec.fail(ErrorKind::ToolError, e.to_string()),
            }
        }
        Decision::OutToolset => {
            let plan = match generate_plan(&instance.question, &catalog::manifest(), store.index(), llm, templates) {
                Ok((p, reprompts)) => {
                    rec.retries += reprompts;
                    p
                }
                Err(e) => return rec.fail(ErrorKind::ExecutionError, e.to_string()),
            };
            rec.plan = Some(plan.clone());
            match execute_plan(&plan, store) {
                Ok(a) => a,
                Err(e) => return rec.fail(ErrorKind::ExecutionError, e.to_string()),
            }
        }
    };
    let got = answer.normalized();
    rec.answer = Some(got.clone());
    let expected = &instance.ground_truth;
    if !shapes_compatible(shape(&got), shape(expected)) {
        return rec.fail(ErrorKind::FormatError, format!("answer `{got}` does not have the shape of `{expected}`"));
    }
    match instance.metric {
        Metric::Accuracy => rec.correct = Some(answers_match(&got, expected)),
        Metric::Mae => match (got.trim().parse::<f64>(), expected.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) => rec.abs_error = Some((a - b).abs()),
            _ => rec.fail(ErrorKind::FormatError, format!("`{got}` is not numeric")),
        },
    }
}
