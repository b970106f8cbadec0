//! The pipeline stages that sit between a text-encoded graph and an answer:
//! sensory ingest, tool/model discrimination and execution, benchmark
//! generation and evaluation.

pub mod benchgen;
pub mod eval;
pub mod execution;
pub mod par;
pub mod prompts;
pub mod sensory;
pub mod tasks;

pub use benchgen::{generate, GenConfig, GenError, TaskInstance};
pub use eval::{gec_sweep, nback, run_suite, NbackConfig, NbackReport, SuiteConfig, SuiteReport, SweepReport};
pub use execution::{discriminate, rule_agent, solve, Decision, ErrorKind, SolveRecord};
pub use prompts::Templates;
pub use sensory::{echo_backend, ingest, IngestConfig, IngestReport, SensoryError};
pub use tasks::{Domain, Metric, TaskKind};
