//! The three textual graph encodings and their deterministic parsers.
//!
//! | kind       | unweighted               | weighted                               |
//! |------------|--------------------------|----------------------------------------|
//! | adjacency  | `[0,1],[0,2]`            | `[0,1,2.5],[0,2,1]`                    |
//! | symbolic   | `0→1, 2→3`               | `0→1:2.5, 2→3:1`                       |
//! | linguistic | `Node 0 is Linked to node 1` | `... to node 1 with weight 2.5`    |
//!
//! Linguistic sentences are joined with `". "`. Edge order is preserved in
//! both directions.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RepKind {
    AdjacencyList,
    SymbolicNotation,
    LinguisticDescription,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predicate {
    Linked,
    Followed,
    Connected,
    Cited,
}

impl Predicate {
    pub const ALL: [Predicate; 4] = [
        Predicate::Linked,
        Predicate::Followed,
        Predicate::Connected,
        Predicate::Cited,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Predicate::Linked => "Linked",
            Predicate::Followed => "Followed",
            Predicate::Connected => "Connected",
            Predicate::Cited => "Cited",
        }
    }

    fn parse_loose(s: &str) -> Option<Predicate> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
    }
}

/// A representation kind, plus the verb used by linguistic descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Representation {
    pub kind: RepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Predicate>,
}

impl Representation {
    pub const ADJACENCY: Representation = Representation {
        kind: RepKind::AdjacencyList,
        predicate: None,
    };
    pub const SYMBOLIC: Representation = Representation {
        kind: RepKind::SymbolicNotation,
        predicate: None,
    };

    pub fn linguistic(predicate: Predicate) -> Self {
        Representation {
            kind: RepKind::LinguisticDescription,
            predicate: Some(predicate),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.predicate.is_some() == (self.kind == RepKind::LinguisticDescription)
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.predicate) {
            (RepKind::AdjacencyList, _) => f.write_str("adjacency"),
            (RepKind::SymbolicNotation, _) => f.write_str("symbolic"),
            (RepKind::LinguisticDescription, Some(p)) => {
                write!(f, "linguistic:{}", p.as_str().to_lowercase())
            }
            (RepKind::LinguisticDescription, None) => f.write_str("linguistic"),
        }
    }
}

impl FromStr for Representation {
    type Err = ReprError;

    /// Accepts `adjacency`, `symbolic`, or `linguistic:<predicate>`.
    fn from_str(s: &str) -> Result<Self, ReprError> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.split_once(':') {
            None if lower == "adjacency" || lower == "adjacency-list" => Ok(Self::ADJACENCY),
            None if lower == "symbolic" => Ok(Self::SYMBOLIC),
            None if lower == "linguistic" => Err(ReprError::MissingPredicate),
            Some(("linguistic", p)) => Predicate::parse_loose(p)
                .map(Representation::linguistic)
                .ok_or_else(|| ReprError::UnknownRepresentation(s.to_string())),
            _ => Err(ReprError::UnknownRepresentation(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReprError {
    #[error("cannot render an empty edge set")]
    EmptyEdgeSet,
    #[error("linguistic representation requires a predicate (and only it may carry one)")]
    MissingPredicate,
    #[error("edge sequence mixes weighted and unweighted edges")]
    MixedWeighting,
    #[error("no edges found in text")]
    NoEdgesFound,
    #[error("malformed item at byte offset {offset}")]
    MalformedItem { offset: usize },
    #[error("unknown representation `{0}`")]
    UnknownRepresentation(String),
}

/// Text encoding of an edge subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedChunk {
    pub text: String,
    pub representation: Representation,
    pub edge_count: usize,
    pub weighted: bool,
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_weight(w: f64) -> String {
    format!("{w}")
}

pub fn render(edges: &[Edge], rep: Representation) -> Result<RenderedChunk, ReprError> {
    if !rep.is_valid() {
        return Err(ReprError::MissingPredicate);
    }
    let Some(first) = edges.first() else {
        return Err(ReprError::EmptyEdgeSet);
    };
    let weighted = first.w.is_some();
    if edges.iter().any(|e| e.w.is_some() != weighted) {
        return Err(ReprError::MixedWeighting);
    }
    let items: Vec<String> = match rep.kind {
        RepKind::AdjacencyList => edges
            .iter()
            .map(|e| match e.w {
                Some(w) => format!("[{},{},{}]", e.u, e.v, format_weight(w)),
                None => format!("[{},{}]", e.u, e.v),
            })
            .collect(),
        RepKind::SymbolicNotation => edges
            .iter()
            .map(|e| match e.w {
                Some(w) => format!("{}→{}:{}", e.u, e.v, format_weight(w)),
                None => format!("{}→{}", e.u, e.v),
            })
            .collect(),
        RepKind::LinguisticDescription => {
            let p = rep.predicate.unwrap().as_str();
            edges
                .iter()
                .map(|e| match e.w {
                    Some(w) => format!(
                        "Node {} is {p} to node {} with weight {}",
                        e.u,
                        e.v,
                        format_weight(w)
                    ),
                    None => format!("Node {} is {p} to node {}", e.u, e.v),
                })
                .collect()
        }
    };
    let sep = match rep.kind {
        RepKind::AdjacencyList => ",",
        RepKind::SymbolicNotation => ", ",
        RepKind::LinguisticDescription => ". ",
    };
    Ok(RenderedChunk {
        text: items.join(sep),
        representation: rep,
        edge_count: edges.len(),
        weighted,
    })
}

const NUM: &str = r"\d+(?:\.\d+)?";

static ADJ_WEIGHTED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"^\[\s*(\d+)\s*,\s*(\d+)\s*,\s*({NUM})\s*\]")).unwrap());
static ADJ_UNWEIGHTED: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\[\s*(\d+)\s*,\s*(\d+)\s*\]").unwrap());
static SYMBOLIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"(\d+)\s*(?:→|->)\s*(\d+)(?:\s*:\s*({NUM}))?")).unwrap()
});
static LINGUISTIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i:node)\s+(\d+)\s+is\s+([A-Za-z]+)\s+to\s+(?i:node)\s+(\d+)(?:\s+with\s+weight\s+({NUM}))?"
    ))
    .unwrap()
});

/// Result of a lenient scan: every well-formed item plus the byte offsets of
/// items that looked like edges but matched neither pattern.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scan {
    pub edges: Vec<Edge>,
    pub malformed: Vec<usize>,
}

fn edge_from(u: &str, v: &str, w: Option<&str>) -> Option<Edge> {
    let u: NodeId = u.parse().ok()?;
    let v: NodeId = v.parse().ok()?;
    let w = match w {
        Some(s) => Some(s.parse::<f64>().ok()?),
        None => None,
    };
    Some(Edge { u, v, w })
}

/// Extracts `[u,v]` and `[u,v,w]` items with two anchored patterns. Prose
/// and bracketed text that does not start with a digit is ignored; a
/// bracket followed by a digit that fits neither pattern is malformed.
pub fn scan_adjacency_list(text: &str) -> Scan {
    let mut scan = Scan::default();
    let mut pos = 0;
    while let Some(rel) = text[pos..].find('[') {
        let at = pos + rel;
        let rest = &text[at..];
        let hit = ADJ_WEIGHTED
            .captures(rest)
            .map(|c| (c.get(0).unwrap().end(), edge_from(&c[1], &c[2], Some(&c[3]))))
            .or_else(|| {
                ADJ_UNWEIGHTED
                    .captures(rest)
                    .map(|c| (c.get(0).unwrap().end(), edge_from(&c[1], &c[2], None)))
            });
        match hit {
            Some((len, Some(edge))) => {
                scan.edges.push(edge);
                pos = at + len;
            }
            Some((len, None)) => {
                scan.malformed.push(at);
                pos = at + len;
            }
            None => {
                if rest[1..].trim_start().starts_with(|c: char| c.is_ascii_digit()) {
                    scan.malformed.push(at);
                }
                pos = at + 1;
            }
        }
    }
    scan
}

/// Strict adjacency-list extraction: any malformed item is an error.
pub fn parse_adjacency_list(text: &str) -> Result<Vec<Edge>, ReprError> {
    finish(scan_adjacency_list(text))
}

fn finish(scan: Scan) -> Result<Vec<Edge>, ReprError> {
    if let Some(&offset) = scan.malformed.first() {
        return Err(ReprError::MalformedItem { offset });
    }
    if scan.edges.is_empty() {
        return Err(ReprError::NoEdgesFound);
    }
    Ok(scan.edges)
}

/// Scans `text` with `re`; anything between matches other than separators
/// is reported as malformed.
fn scan_statements(
    text: &str,
    re: &Regex,
    mut to_edge: impl FnMut(&regex::Captures) -> Option<Edge>,
) -> Scan {
    let mut scan = Scan::default();
    let mut last = 0;
    let check_gap = |scan: &mut Scan, from: usize, to: usize| {
        let gap = &text[from..to];
        if let Some(i) = gap.find(|c: char| !(c.is_whitespace() || ",;.".contains(c))) {
            scan.malformed.push(from + i);
        }
    };
    for caps in re.captures_iter(text) {
        let m = caps.get(0).unwrap();
        check_gap(&mut scan, last, m.start());
        match to_edge(&caps) {
            Some(e) => scan.edges.push(e),
            None => scan.malformed.push(m.start()),
        }
        last = m.end();
    }
    check_gap(&mut scan, last, text.len());
    scan
}

pub fn scan_symbolic(text: &str) -> Scan {
    scan_statements(text, &SYMBOLIC, |c| {
        edge_from(&c[1], &c[2], c.get(3).map(|m| m.as_str()))
    })
}

pub fn scan_linguistic(text: &str, predicate: Predicate) -> Scan {
    scan_statements(text, &LINGUISTIC, |c| {
        if !c[2].eq_ignore_ascii_case(predicate.as_str()) {
            return None;
        }
        edge_from(&c[1], &c[3], c.get(4).map(|m| m.as_str()))
    })
}

pub fn scan(text: &str, rep: Representation) -> Result<Scan, ReprError> {
    if !rep.is_valid() {
        return Err(ReprError::MissingPredicate);
    }
    Ok(match rep.kind {
        RepKind::AdjacencyList => scan_adjacency_list(text),
        RepKind::SymbolicNotation => scan_symbolic(text),
        RepKind::LinguisticDescription => scan_linguistic(text, rep.predicate.unwrap()),
    })
}

/// Parses text in the given representation. Inverse of [`render`].
pub fn parse_any(text: &str, rep: Representation) -> Result<Vec<Edge>, ReprError> {
    finish(scan(text, rep)?)
}

/// Guesses the representation of a document from its first edge statement.
pub fn detect(text: &str) -> Option<Representation> {
    let candidates = [
        scan_adjacency_list(text).edges.first().map(|_| (first_bracket(text), Representation::ADJACENCY)),
        SYMBOLIC.find(text).map(|m| (Some(m.start()), Representation::SYMBOLIC)),
        LINGUISTIC.captures(text).and_then(|c| {
            Predicate::parse_loose(&c[2])
                .map(|p| (Some(c.get(0).unwrap().start()), Representation::linguistic(p)))
        }),
    ];
    candidates
        .into_iter()
        .flatten()
        .filter_map(|(at, rep)| at.map(|a| (a, rep)))
        .min_by_key(|&(at, _)| at)
        .map(|(_, rep)| rep)
}

fn first_bracket(text: &str) -> Option<usize> {
    text.find('[')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: NodeId, v: NodeId) -> Edge {
        Edge::new(u, v)
    }

    #[test]
    fn render_examples() {
        let a = render(&[e(0, 1), e(0, 2)], Representation::ADJACENCY).unwrap();
        assert_eq!(a.text, "[0,1],[0,2]");
        assert_eq!(a.edge_count, 2);
        let s = render(&[e(0, 1), e(2, 3)], Representation::SYMBOLIC).unwrap();
        assert_eq!(s.text, "0→1, 2→3");
        let l = render(&[e(0, 1)], Representation::linguistic(Predicate::Connected)).unwrap();
        assert_eq!(l.text, "Node 0 is Connected to node 1");
    }

    #[test]
    fn render_weighted() {
        let edges = [Edge::weighted(0, 1, 2.5), Edge::weighted(1, 2, 3.0)];
        assert_eq!(render(&edges, Representation::ADJACENCY).unwrap().text, "[0,1,2.5],[1,2,3]");
        assert_eq!(render(&edges, Representation::SYMBOLIC).unwrap().text, "0→1:2.5, 1→2:3");
        assert_eq!(
            render(&edges[..1], Representation::linguistic(Predicate::Cited)).unwrap().text,
            "Node 0 is Cited to node 1 with weight 2.5"
        );
    }

    #[test]
    fn render_errors() {
        assert_eq!(render(&[], Representation::SYMBOLIC), Err(ReprError::EmptyEdgeSet));
        let bad = Representation {
            kind: RepKind::LinguisticDescription,
            predicate: None,
        };
        assert_eq!(render(&[e(0, 1)], bad), Err(ReprError::MissingPredicate));
    }

    #[test]
    fn adjacency_extraction() {
        assert_eq!(parse_adjacency_list("[0,1],[0,2]").unwrap(), vec![e(0, 1), e(0, 2)]);
        assert_eq!(
            parse_adjacency_list("The result is [3,4,2.5] here").unwrap(),
            vec![Edge::weighted(3, 4, 2.5)]
        );
        assert_eq!(parse_adjacency_list("[0,]"), Err(ReprError::MalformedItem { offset: 0 }));
        assert_eq!(parse_adjacency_list("no edges"), Err(ReprError::NoEdgesFound));
    }

    #[test]
    fn adjacency_ignores_prose_brackets_and_whitespace() {
        let text = "Sure [see below]:\n [ 1 , 2 ] ,\n\n[2,3]  done";
        assert_eq!(parse_adjacency_list(text).unwrap(), vec![e(1, 2), e(2, 3)]);
    }

    #[test]
    fn scan_reports_every_malformed_item() {
        let s = scan_adjacency_list("[0,1],[2,],[3,4],[5 6]");
        assert_eq!(s.edges, vec![e(0, 1), e(3, 4)]);
        assert_eq!(s.malformed, vec![6, 17]);
    }

    #[test]
    fn other_grammars() {
        assert_eq!(parse_any("0→1, 2→3", Representation::SYMBOLIC).unwrap(), vec![e(0, 1), e(2, 3)]);
        assert_eq!(parse_any("0->1", Representation::SYMBOLIC).unwrap(), vec![e(0, 1)]);
        assert_eq!(
            parse_any("Node 5 is Cited to node 7", Representation::linguistic(Predicate::Cited)).unwrap(),
            vec![e(5, 7)]
        );
        assert!(matches!(
            parse_any("Node 5 is Linked to node 7", Representation::linguistic(Predicate::Cited)),
            Err(ReprError::MalformedItem { offset: 0 })
        ));
        assert!(matches!(
            parse_any("0→1, 2→", Representation::SYMBOLIC),
            Err(ReprError::MalformedItem { .. })
        ));
    }

    #[test]
    fn linguistic_weight_followed_by_sentence_break() {
        let edges = [Edge::weighted(0, 1, 2.0), Edge::weighted(1, 2, 0.5)];
        let rep = Representation::linguistic(Predicate::Linked);
        let text = render(&edges, rep).unwrap().text;
        assert_eq!(text, "Node 0 is Linked to node 1 with weight 2. Node 1 is Linked to node 2 with weight 0.5");
        assert_eq!(parse_any(&text, rep).unwrap(), edges);
    }

    #[test]
    fn detection() {
        assert_eq!(detect("[0,1],[1,2]"), Some(Representation::ADJACENCY));
        assert_eq!(detect("0→1, 1→2"), Some(Representation::SYMBOLIC));
        assert_eq!(
            detect("Node 1 is Followed to node 2"),
            Some(Representation::linguistic(Predicate::Followed))
        );
        assert_eq!(detect("nothing here"), None);
    }

    #[test]
    fn representation_names() {
        for rep in [
            Representation::ADJACENCY,
            Representation::SYMBOLIC,
            Representation::linguistic(Predicate::Linked),
        ] {
            assert_eq!(rep.to_string().parse::<Representation>().unwrap(), rep);
        }
        assert!("linguistic".parse::<Representation>().is_err());
    }
}
