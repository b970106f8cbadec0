use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use graphwm_core::graph::edit_distance_unchecked;
use graphwm_core::repr::{detect, render};
use graphwm_core::{catalog, parse_any, toolset, GecConfig, Graph, Representation};
use graphwm_pipeline::benchgen::{self, default_sources, GenConfig, GenError};
use graphwm_pipeline::eval::{gec_sweep as sweep, memory_reply, nback as run_nback, nback_table, NbackConfig, NbackError};
use graphwm_pipeline::sensory::{ingest as run_ingest, IngestConfig, SensoryError};
use graphwm_pipeline::{run_suite, Domain, SuiteConfig, TaskKind};

use crate::config::{BackendKind, CliConfig};
use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_rep(s: &str) -> Result<Representation, Failure> {
    s.parse().map_err(|e| Failure::Usage(format!("representation `{s}`: {e}")))
}

/// Reads a graph document in any of the three representations.
fn load_graph(path: &Path, directed: bool) -> Result<Graph, Failure> {
    let text = read(path)?;
    let rep = detect(&text).ok_or_else(|| Failure::Usage(format!("{}: no recognizable edges", path.display())))?;
    let edges = parse_any(&text, rep).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Graph::build(edges, directed).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn ingest_config(cfg: &CliConfig, directed: bool, fast_path: bool) -> IngestConfig {
    let d = IngestConfig::default();
    IngestConfig {
        granularity: cfg.granularity.unwrap_or(d.granularity),
        max_retries: cfg.max_retries.unwrap_or(d.max_retries),
        fast_path,
        concurrency: cfg.concurrency.unwrap_or(d.concurrency),
        directed,
    }
}

fn sensory_failure(e: SensoryError) -> Failure {
    match e {
        SensoryError::Backend(_) | SensoryError::NoEdgesFound { .. } | SensoryError::ChunkExhausted { .. } => {
            Failure::Backend(e.to_string())
        }
        _ => Failure::Usage(e.to_string()),
    }
}

// ---------------------------------------------------------------- generate

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated node counts, e.g. 40,100,1000.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<usize>>,
    #[arg(long)]
    per_task: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    domains: Option<Vec<Domain>>,
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<TaskKind>>,
    /// Directory with `<domain>.txt` source graphs; synthetic sources otherwise.
    #[arg(long)]
    sources: Option<PathBuf>,
    /// Node count of each synthetic source graph.
    #[arg(long)]
    source_nodes: Option<usize>,
}

pub fn generate(cfg: &CliConfig, a: GenerateArgs) -> Result<(), Failure> {
    let mut g = cfg.generation.clone().unwrap_or_default();
    if let Some(s) = cfg.seed {
        g.seed = s;
    }
    if let Some(c) = cfg.concurrency {
        g.concurrency = c;
    }
    if let Some(s) = a.scales {
        g.scales = s;
    }
    if let Some(n) = a.per_task {
        g.per_task_count = n;
    }
    if let Some(d) = a.domains {
        g.domains = d;
    }
    if a.tasks.is_some() {
        g.tasks = a.tasks;
    }
    let sources = match &a.sources {
        Some(dir) => load_sources(dir, &g)?,
        None => {
            let largest = g.scales.iter().copied().max().unwrap_or(40);
            default_sources(g.seed, a.source_nodes.unwrap_or((largest * 4).max(400)))
        }
    };
    let instances = benchgen::generate(&sources, &g).map_err(gen_failure)?;
    benchgen::write_jsonl(&a.out, &instances).map_err(gen_failure)?;
    eprintln!("wrote {} instances to {}", instances.len(), a.out.display());
    Ok(())
}

fn load_sources(dir: &Path, g: &GenConfig) -> Result<BTreeMap<Domain, Graph>, Failure> {
    let mut out = BTreeMap::new();
    for &d in &g.domains {
        let path = dir.join(format!("{}.txt", d.to_string().to_lowercase()));
        out.insert(d, load_graph(&path, d.directed())?);
    }
    Ok(out)
}

fn gen_failure(e: GenError) -> Failure {
    match e {
        GenError::Config(_) | GenError::Exclusivity { .. } => Failure::Config(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// JSON report path.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-instance CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Parse graph text directly instead of transforming it with the LLM.
    #[arg(long)]
    fast_path: bool,
}

pub fn solve(cfg: &CliConfig, a: SolveArgs) -> Result<(), Failure> {
    let instances = benchgen::read_jsonl(&a.dataset).map_err(|e| Failure::Usage(format!("{}: {e}", a.dataset.display())))?;
    let llm = cfg.backend()?;
    let templates = cfg.templates()?;
    let suite = SuiteConfig {
        ingest: ingest_config(cfg, false, a.fast_path),
        concurrency: cfg.concurrency.unwrap_or(1),
    };
    let report = run_suite(&instances, llm.as_deref(), &suite, &templates);
    write(&a.out, &report.to_json())?;
    if let Some(p) = &a.csv {
        write(p, &report.records_csv())?;
    }
    print!("{}", report.to_table());
    Ok(())
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    graph: PathBuf,
    /// adjacency, symbolic or linguistic:<predicate>; detected when omitted.
    #[arg(long)]
    rep: Option<String>,
    /// Reference graph document for the edit distance.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    fast_path: bool,
    /// Write the assembled graph here as an adjacency list.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn ingest(cfg: &CliConfig, a: IngestArgs) -> Result<(), Failure> {
    let text = read(&a.graph)?;
    let rep = a.rep.as_deref().map(parse_rep).transpose()?;
    let llm = cfg.backend()?;
    let templates = cfg.templates()?;
    let icfg = ingest_config(cfg, a.directed, a.fast_path);
    let (g, report) = run_ingest(&text, rep, &icfg, llm.as_deref(), &templates).map_err(sensory_failure)?;
    println!("representation: {}", report.representation);
    println!("nodes: {}  edges: {}", g.node_count(), g.edge_count());
    println!(
        "chunks: {}  calls: {}  retries: {}  tokens: {} in / {} out{}",
        report.chunks.len(),
        report.calls(),
        report.retries(),
        report.usage.input_tokens,
        report.usage.output_tokens,
        if report.fast_path { "  (fast path)" } else { "" }
    );
    if let Some(src) = &a.source {
        let reference = load_graph(src, a.directed)?;
        let d = edit_distance_unchecked(&reference, &g);
        println!("edit distance: {} (added {}, removed {})", d.total, d.added, d.removed);
    }
    if let Some(out) = &a.out {
        let text = if g.edge_count() == 0 {
            String::new()
        } else {
            render(&g.edge_list(), Representation::ADJACENCY)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .text
        };
        write(out, &text)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- nback

#[derive(Debug, Args)]
pub struct NbackArgs {
    #[arg(long)]
    graph: PathBuf,
    /// One or more delays, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    queries_per_turn: usize,
    #[arg(long, default_value_t = 50)]
    subset_size: usize,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn nback(cfg: &CliConfig, a: NbackArgs) -> Result<(), Failure> {
    let g = load_graph(&a.graph, a.directed)?;
    let directed = a.directed;
    // the mock stands in for a model with perfect recall
    let llm = cfg
        .backend_with(move |req| Some(memory_reply(req, directed)))?
        .ok_or_else(|| Failure::Usage("nback needs an LLM; pick --backend mock or wire".into()))?;
    let mut reports = Vec::new();
    for n in a.n.iter().copied() {
        let ncfg = NbackConfig {
            n,
            queries_per_turn: a.queries_per_turn,
            subset_size: a.subset_size,
            seed: cfg.seed.unwrap_or(0),
        };
        let r = run_nback(&g, &ncfg, llm.as_ref()).map_err(|e| match e {
            NbackError::Backend(b) => Failure::Backend(b.to_string()),
            other => Failure::Usage(other.to_string()),
        })?;
        reports.push(r);
    }
    print!("{}", nback_table(&reports));
    if let Some(out) = &a.out {
        write(out, &serde_json::to_string_pretty(&reports).expect("reports serialize"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- gec-sweep

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Directory of graph documents, one graph per file.
    #[arg(long)]
    graphs: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "25,50,75,100")]
    granularities: Vec<usize>,
    /// Representation the graphs are rendered in before ingest.
    #[arg(long, default_value = "adjacency")]
    rep: String,
    #[arg(long)]
    directed: bool,
    #[arg(long, default_value_t = 4096)]
    t_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

pub fn gec_sweep(cfg: &CliConfig, a: SweepArgs) -> Result<(), Failure> {
    let rep = parse_rep(&a.rep)?;
    let gec_cfg = GecConfig::new(a.t_max).ok_or_else(|| Failure::Usage("--t-max must be positive".into()))?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.graphs)
        .map_err(|e| Failure::Usage(format!("{}: {e}", a.graphs.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Usage(format!("{}: no graph files", a.graphs.display())));
    }
    let graphs = files.iter().map(|p| load_graph(p, a.directed)).collect::<Result<Vec<_>, _>>()?;
    if cfg.backend_kind() == BackendKind::None {
        return Err(Failure::Usage("gec-sweep needs an LLM; pick --backend mock or wire".into()));
    }
    let llm = cfg.backend()?.expect("backend other than none");
    let granularities = a.granularities;
    let report = sweep(
        &graphs,
        &granularities,
        rep,
        llm.as_ref(),
        &ingest_config(cfg, a.directed, false),
        &gec_cfg,
        &cfg.templates()?,
    )
    .map_err(Failure::Usage)?;
    print!("{}", report.to_table());
    if let Some(out) = &a.out {
        write(out, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    if let Some(p) = &a.csv {
        write(p, &report.to_csv())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- tools

#[derive(Debug, Args)]
pub struct ToolsArgs {
    /// List every tool and catalog model.
    #[arg(long)]
    list: bool,
    /// Print the manifests as JSON.
    #[arg(long)]
    json: bool,
}

pub fn tools(a: ToolsArgs) -> Result<(), Failure> {
    if !a.list && !a.json {
        return Err(Failure::Usage("nothing to do; pass --list or --json".into()));
    }
    if a.json {
        println!("{{\"toolset\": {}, \"catalog\": {}}}", toolset::manifest_json(), catalog::manifest_json());
        return Ok(());
    }
    let tools = toolset::manifest();
    println!("toolset ({} tools)", tools.len());
    for t in &tools {
        let params: Vec<String> = t.param_schema.iter().map(|(n, k)| format!("{n}: {k}")).collect();
        println!("  {}({})  {}", t.name, params.join(", "), t.description);
    }
    let models = catalog::manifest();
    println!("catalog ({} models)", models.len());
    for m in &models {
        let params: Vec<String> = m
            .params
            .iter()
            .map(|p| format!("{}{}", p.name, if p.required { "" } else { "?" }))
            .collect();
        println!("  {}({})  {}", m.key, params.join(", "), m.description);
    }
    Ok(())
}
