//! Plain edge-list files: one `u v [w]` edge per line, separated by
//! whitespace or commas. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::io::{self, BufRead};
use std::path::Path;

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError};
use crate::repr::format_weight;

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_edge_list(reader: impl BufRead) -> Result<Vec<Edge>, EdgeListError> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| EdgeListError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(bad(format!("expected `u v [w]`, got {} fields", fields.len())));
        }
        let node = |s: &str| s.parse().map_err(|_| bad(format!("invalid node id `{s}`")));
        let u = node(fields[0])?;
        let v = node(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => Some(s.parse::<f64>().map_err(|_| bad(format!("invalid weight `{s}`")))?),
            None => None,
        };
        edges.push(Edge { u, v, w });
    }
    Ok(edges)
}

pub fn read_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph, EdgeListError> {
    let file = std::fs::File::open(path)?;
    let edges = parse_edge_list(io::BufReader::new(file))?;
    Ok(Graph::build(edges, directed)?)
}

/// Writes the graph's edges in canonical order, isolated nodes omitted.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        match e.w {
            Some(w) => writeln!(out, "{} {} {}", e.u, e.v, format_weight(w)),
            None => writeln!(out, "{} {}", e.u, e.v),
        }
        .unwrap();
    }
    out
}
