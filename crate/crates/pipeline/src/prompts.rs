//! Prompt templates. Built-in copies are compiled in; a directory holding
//! files with the same names overrides them one by one.

use std::path::Path;

use graphwm_core::{RepKind, Representation};

pub const CHUNK: &str = "{CHUNK}";
pub const QUESTION: &str = "{QUESTION}";

#[derive(Debug, Clone, PartialEq)]
pub struct Templates {
    pub sensory_adjacency: String,
    pub sensory_symbolic: String,
    pub sensory_linguistic: String,
    pub reasoning: String,
    pub model: String,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            sensory_adjacency: include_str!("../prompts/sensory_adjacency.txt").into(),
            sensory_symbolic: include_str!("../prompts/sensory_symbolic.txt").into(),
            sensory_linguistic: include_str!("../prompts/sensory_linguistic.txt").into(),
            reasoning: include_str!("../prompts/reasoning.txt").into(),
            model: include_str!("../prompts/model.txt").into(),
        }
    }
}

impl Templates {
    pub fn load_dir(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let dir = dir.as_ref();
        let mut t = Templates::default();
        for (name, slot) in [
            ("sensory_adjacency.txt", &mut t.sensory_adjacency),
            ("sensory_symbolic.txt", &mut t.sensory_symbolic),
            ("sensory_linguistic.txt", &mut t.sensory_linguistic),
            ("reasoning.txt", &mut t.reasoning),
            ("model.txt", &mut t.model),
        ] {
            let path = dir.join(name);
            if path.exists() {
                *slot = std::fs::read_to_string(path)?;
            }
        }
        Ok(t)
    }

    pub fn sensory(&self, rep: Representation, chunk: &str) -> String {
        let template = match rep.kind {
            RepKind::AdjacencyList => &self.sensory_adjacency,
            RepKind::SymbolicNotation => &self.sensory_symbolic,
            RepKind::LinguisticDescription => &self.sensory_linguistic,
        };
        let predicate = rep.predicate.map(|p| p.as_str()).unwrap_or("");
        template.replace("{PREDICATE}", predicate).replace(CHUNK, chunk)
    }

    pub fn reasoning(&self, question: &str, tools: &str) -> String {
        self.reasoning.replace("{TOOLS}", tools).replace(QUESTION, question)
    }

    pub fn model(&self, question: &str, catalog: &str, index: &str) -> String {
        self.model
            .replace("{CATALOG}", catalog)
            .replace("{INDEX}", index)
            .replace(QUESTION, question)
    }
}

/// Text between the last `<<<` and the following `>>>`, the slot every
/// sensory template wraps around `{CHUNK}`.
pub fn chunk_payload(prompt: &str) -> Option<&str> {
    let start = prompt.rfind("<<<")? + 3;
    let end = start + prompt[start..].find(">>>")?;
    Some(prompt[start..end].trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphwm_core::Predicate;

    #[test]
    fn builtins_carry_placeholders() {
        let t = Templates::default();
        for s in [&t.sensory_adjacency, &t.sensory_symbolic, &t.sensory_linguistic] {
            assert!(s.contains("<<<\n{CHUNK}\n>>>"));
        }
        assert!(t.reasoning.contains(QUESTION) && t.reasoning.contains("{TOOLS}"));
        assert!(t.model.contains(QUESTION) && t.model.contains("{CATALOG}") && t.model.contains("{INDEX}"));
    }

    #[test]
    fn payload_round_trip() {
        let t = Templates::default();
        let p = t.sensory(Representation::linguistic(Predicate::Cited), "Node 1 is Cited to node 2");
        assert!(p.contains("is Cited to node v"));
        assert_eq!(chunk_payload(&p), Some("Node 1 is Cited to node 2"));
        assert_eq!(chunk_payload("no markers"), None);
    }

    #[test]
    fn directory_overrides_single_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("model.txt"), "M {QUESTION}").unwrap();
        let t = Templates::load_dir(dir.path()).unwrap();
        assert_eq!(t.model("q", "", ""), "M q");
        assert_eq!(t.reasoning, Templates::default().reasoning);
    }
}
