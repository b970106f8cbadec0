use std::io::BufRead;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use graphwm_core::TokenUsage;
use serde::{Deserialize, Serialize};

use crate::{surrogate_tokens, ChatBackend, ChatRequest, ChatResponse, LlmError};

/// One scripted reply. `match` restricts the entry to requests whose final
/// user message contains the substring; missing token counts fall back to
/// the character surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(rename = "match", default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub reply: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_tokens: Option<u64>,
}

impl ScriptEntry {
    pub fn reply(reply: impl Into<String>, in_tokens: u64, out_tokens: u64) -> Self {
        ScriptEntry {
            pattern: None,
            reply: reply.into(),
            in_tokens: Some(in_tokens),
            out_tokens: Some(out_tokens),
        }
    }

    pub fn matching(pattern: impl Into<String>, reply: impl Into<String>) -> Self {
        ScriptEntry {
            pattern: Some(pattern.into()),
            reply: reply.into(),
            in_tokens: None,
            out_tokens: None,
        }
    }

    fn accepts(&self, req: &ChatRequest) -> bool {
        self.pattern.as_deref().is_none_or(|p| req.last_user().contains(p))
    }
}

type Responder = Box<dyn Fn(&ChatRequest) -> Option<String> + Send + Sync>;

/// Scripted backend. Entries are consumed first-match-first under a lock so
/// concurrent callers see the script in a single global order. Once no entry
/// applies, the optional responder closure answers; otherwise the call fails
/// with [`LlmError::ScriptExhausted`].
pub struct MockBackend {
    script: Mutex<Vec<Option<ScriptEntry>>>,
    responder: Option<Responder>,
    fixed: Option<TokenUsage>,
}

impl MockBackend {
    pub fn from_entries(entries: Vec<ScriptEntry>) -> Self {
        MockBackend {
            script: Mutex::new(entries.into_iter().map(Some).collect()),
            responder: None,
            fixed: None,
        }
    }

    /// Backend answered entirely by `f`; returning `None` counts as exhaustion.
    pub fn from_fn(f: impl Fn(&ChatRequest) -> Option<String> + Send + Sync + 'static) -> Self {
        MockBackend {
            script: Mutex::new(Vec::new()),
            responder: Some(Box::new(f)),
            fixed: None,
        }
    }

    pub fn with_responder(mut self, f: impl Fn(&ChatRequest) -> Option<String> + Send + Sync + 'static) -> Self {
        self.responder = Some(Box::new(f));
        self
    }

    /// Every call reports exactly `usage`, scripted counts included.
    pub fn with_fixed_usage(mut self, usage: TokenUsage) -> Self {
        self.fixed = Some(usage);
        self
    }

    pub fn parse_script(reader: impl BufRead) -> Result<Vec<ScriptEntry>, LlmError> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| LlmError::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry = serde_json::from_str(&line)
                .map_err(|e| LlmError::Config(format!("script line {}: {e}", i + 1)))?;
            entries.push(entry);
        }
        Ok(entries)
    }

    pub fn from_script_file(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::from_entries(Self::parse_script(std::io::BufReader::new(file))?))
    }

    pub fn remaining(&self) -> usize {
        self.script.lock().unwrap().iter().flatten().count()
    }
}

impl ChatBackend for MockBackend {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        req.validate()?;
        let popped = {
            let mut script = self.script.lock().unwrap();
            script
                .iter_mut()
                .find(|slot| slot.as_ref().is_some_and(|e| e.accepts(req)))
                .and_then(Option::take)
        };
        let (reply, scripted_in, scripted_out) = match popped {
            Some(e) => (e.reply, e.in_tokens, e.out_tokens),
            None => match self.responder.as_ref().and_then(|f| f(req)) {
                Some(reply) => (reply, None, None),
                None => return Err(LlmError::ScriptExhausted),
            },
        };
        let usage = self.fixed.unwrap_or_else(|| TokenUsage::new(
            scripted_in.unwrap_or_else(|| surrogate_tokens(req.char_count())),
            scripted_out.unwrap_or_else(|| surrogate_tokens(reply.chars().count())),
        ));
        Ok(ChatResponse {
            content: reply,
            usage,
            latency: Duration::ZERO,
        })
    }
}
