mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{BackendKind, CliConfig};

#[derive(Debug, Parser)]
#[command(name = "graphwm", version, about = "Graph question answering over text-encoded graphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendKind>,
    /// Base URL of an OpenAI-compatible server (wire backend).
    #[arg(long, global = true)]
    endpoint: Option<String>,
    #[arg(long, global = true)]
    model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long, global = true)]
    api_key_env: Option<String>,
    /// JSONL reply script for the mock backend.
    #[arg(long, global = true)]
    script: Option<PathBuf>,
    /// Directory with prompt template overrides.
    #[arg(long, global = true)]
    prompts: Option<PathBuf>,
    #[arg(long, global = true)]
    granularity: Option<usize>,
    #[arg(long, global = true)]
    max_retries: Option<usize>,
    #[arg(long, global = true)]
    concurrency: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl GlobalArgs {
    fn as_config(&self) -> CliConfig {
        CliConfig {
            backend: self.backend,
            endpoint: self.endpoint.clone(),
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
            script: self.script.clone(),
            prompts: self.prompts.clone(),
            granularity: self.granularity,
            max_retries: self.max_retries,
            concurrency: self.concurrency,
            seed: self.seed,
            generation: None,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark dataset as JSONL.
    Generate(commands::GenerateArgs),
    /// Run the evaluation suite over a dataset.
    Solve(commands::SolveArgs),
    /// Ingest one graph document through the sensory stage.
    Ingest(commands::IngestArgs),
    /// Run the graph N-back memory experiment.
    Nback(commands::NbackArgs),
    /// Sweep chunk granularity and report edit distance, cost and GEC.
    GecSweep(commands::SweepArgs),
    /// Print the toolset and model catalog manifests.
    Tools(commands::ToolsArgs),
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Config(String),
    Backend(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) | Failure::Backend(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Backend(m) => write!(f, "backend error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.global.config {
        Some(p) => CliConfig::load(p)?,
        None => CliConfig::default(),
    };
    let cfg = file.overlay(cli.global.as_config());
    match cli.command {
        Command::Generate(a) => commands::generate(&cfg, a),
        Command::Solve(a) => commands::solve(&cfg, a),
        Command::Ingest(a) => commands::ingest(&cfg, a),
        Command::Nback(a) => commands::nback(&cfg, a),
        Command::GecSweep(a) => commands::gec_sweep(&cfg, a),
        Command::Tools(a) => commands::tools(a),
    }
}
