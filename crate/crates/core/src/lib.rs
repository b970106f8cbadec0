//! Graph model, text encodings, multi-format store, and the solvers that
//! answer benchmark questions.

pub mod answer;
pub mod buffer;
pub mod catalog;
pub mod edgelist;
pub mod gec;
pub mod graph;
pub mod repr;
pub mod sample;
pub mod synthetic;
pub mod toolset;

pub use answer::{answers_match, Answer};
pub use buffer::{assemble, FormatId, GraphStore, IndexRecord, View};
pub use catalog::{execute_plan, CatalogKey, ModelPlan};
pub use gec::{gec, GecConfig, TokenUsage};
pub use graph::{edit_distance, EditDistance, Edge, Graph, GraphError, NodeId};
pub use repr::{parse_adjacency_list, parse_any, render, Predicate, RenderedChunk, RepKind, Representation};
pub use sample::{sample_subgraph, BiasParams, Sample};
