//! Answer values and their normalized string form used for exact-match scoring.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Answer {
    Bool(bool),
    Count(u64),
    /// Path length or flow value; printed in shortest decimal form.
    Distance(f64),
    /// Score-like value; printed rounded to six decimals.
    Real(f64),
    Label(u32),
    Scores(Vec<(NodeId, f64)>),
    NoPath,
    Disconnected,
}

fn real(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

impl Answer {
    pub fn normalized(&self) -> String {
        match self {
            Answer::Bool(true) => "Yes".into(),
            Answer::Bool(false) => "No".into(),
            Answer::Count(c) => c.to_string(),
            Answer::Distance(d) => format!("{d}"),
            Answer::Real(x) => real(*x),
            Answer::Label(l) => l.to_string(),
            Answer::Scores(s) => s
                .iter()
                .map(|(n, x)| format!("{n}:{}", real(*x)))
                .collect::<Vec<_>>()
                .join(", "),
            Answer::NoPath => "No path".into(),
            Answer::Disconnected => "Disconnected".into(),
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.normalized())
    }
}

/// Exact match after trimming and case folding; numbers compare by value,
/// so `"2"` matches `"2.0"`.
pub fn answers_match(got: &str, expected: &str) -> bool {
    let (a, b) = (got.trim(), expected.trim());
    if a.eq_ignore_ascii_case(b) {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-9 * y.abs().max(1.0),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(Answer::Bool(true).normalized(), "Yes");
        assert_eq!(Answer::Count(12).normalized(), "12");
        assert_eq!(Answer::Distance(2.0).normalized(), "2");
        assert_eq!(Answer::Distance(2.5).normalized(), "2.5");
        assert_eq!(Answer::Real(1.0 / 3.0).normalized(), "0.333333");
        assert_eq!(Answer::Real(1.0).normalized(), "1");
        assert_eq!(Answer::Real(0.0).normalized(), "0");
        assert_eq!(Answer::Scores(vec![(0, 0.5), (1, 0.5)]).normalized(), "0:0.5, 1:0.5");
    }

    #[test]
    fn matching() {
        assert!(answers_match("2", "2.0"));
        assert!(answers_match(" yes ", "Yes"));
        assert!(!answers_match("3", "2"));
        assert!(!answers_match("No path", "2"));
    }
}
