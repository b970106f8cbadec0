//! Chat-completion backends with token accounting.
//!
//! [`ChatBackend`] is the seam every pipeline stage talks through. The wire
//! backend speaks the OpenAI-compatible chat-completions protocol; the mock
//! replays a JSONL script (or a closure) so pipelines run deterministically
//! in tests. A [`Session`] wraps any backend and keeps the ordered call log.

use std::sync::Mutex;
use std::time::Duration;

use graphwm_core::TokenUsage;
use serde::{Deserialize, Serialize};

mod mock;
mod wire;

pub use mock::{MockBackend, ScriptEntry};
pub use wire::{WireBackend, WireConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message { role: Role::System, content: content.into() }
    }
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }
    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub const DEFAULT_MAX_TOKENS: u32 = 1024;

    /// Request with the default sampling settings (temperature 0.7, top_p 1).
    pub fn new(messages: Vec<Message>) -> Result<Self, LlmError> {
        let req = ChatRequest {
            messages,
            temperature: 0.7,
            top_p: 1.0,
            max_tokens: Self::DEFAULT_MAX_TOKENS,
        };
        req.validate()?;
        Ok(req)
    }

    /// Single user turn, optionally preceded by a system prompt.
    pub fn prompt(system: Option<&str>, user: impl Into<String>) -> Self {
        let mut messages = Vec::with_capacity(2);
        if let Some(s) = system {
            messages.push(Message::system(s));
        }
        messages.push(Message::user(user));
        ChatRequest::new(messages).expect("ends with a user turn")
    }

    pub fn with_max_tokens(mut self, max_tokens: u32) -> Self {
        self.max_tokens = max_tokens;
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        match self.messages.last() {
            None => Err(LlmError::InvalidRequest("no messages".into())),
            Some(m) if m.role != Role::User => Err(LlmError::InvalidRequest("last message must be from the user".into())),
            Some(_) => Ok(()),
        }
    }

    /// Content of the final user message.
    pub fn last_user(&self) -> &str {
        self.messages.last().map(|m| m.content.as_str()).unwrap_or("")
    }

    pub fn char_count(&self) -> usize {
        self.messages.iter().map(|m| m.content.chars().count()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub usage: TokenUsage,
    #[serde(with = "millis")]
    pub latency: Duration,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

/// Deterministic stand-in for a tokenizer: one token per four characters.
pub fn surrogate_tokens(chars: usize) -> u64 {
    chars.div_ceil(4) as u64
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("backend error: {0}")]
    Backend(String),
    #[error("mock script exhausted")]
    ScriptExhausted,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub trait ChatBackend: Send + Sync {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError>;
}

impl<B: ChatBackend + ?Sized> ChatBackend for &B {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).chat(req)
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for std::sync::Arc<B> {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).chat(req)
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for Box<B> {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).chat(req)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: ChatRequest,
    pub response: ChatResponse,
}

/// Recording handle over a backend. Safe to share across threads; every
/// successful call is appended to the log under one lock.
pub struct Session<B> {
    backend: B,
    log: Mutex<Vec<Exchange>>,
}

impl<B: ChatBackend> Session<B> {
    pub fn new(backend: B) -> Self {
        Session { backend, log: Mutex::new(Vec::new()) }
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn transcript(&self) -> Vec<Exchange> {
        self.log.lock().unwrap().clone()
    }

    pub fn calls(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    pub fn usage(&self) -> TokenUsage {
        self.log.lock().unwrap().iter().map(|e| e.response.usage).sum()
    }

    pub fn usages(&self) -> Vec<TokenUsage> {
        self.log.lock().unwrap().iter().map(|e| e.response.usage).collect()
    }
}

impl<B: ChatBackend> ChatBackend for Session<B> {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        req.validate()?;
        let response = self.backend.chat(req)?;
        self.log.lock().unwrap().push(Exchange {
            request: req.clone(),
            response: response.clone(),
        });
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_must_end_with_user() {
        assert!(ChatRequest::new(vec![]).is_err());
        assert!(ChatRequest::new(vec![Message::user("q"), Message::assistant("a")]).is_err());
        let r = ChatRequest::new(vec![Message::system("s"), Message::user("q")]).unwrap();
        assert_eq!(r.temperature, 0.7);
        assert_eq!(r.top_p, 1.0);
        assert_eq!(r.last_user(), "q");
    }

    #[test]
    fn surrogate_rounds_up() {
        assert_eq!(surrogate_tokens(0), 0);
        assert_eq!(surrogate_tokens(1), 1);
        assert_eq!(surrogate_tokens(8), 2);
        assert_eq!(surrogate_tokens(9), 3);
    }

    #[test]
    fn empty_session_has_empty_transcript() {
        let s = Session::new(MockBackend::from_entries(vec![]));
        assert!(s.transcript().is_empty());
        assert_eq!(s.usage(), TokenUsage::default());
    }

    #[test]
    fn session_records_in_order() {
        let s = Session::new(MockBackend::from_entries(vec![
            ScriptEntry::reply("a", 5, 2),
            ScriptEntry::reply("b", 3, 1),
            ScriptEntry::reply("c", 1, 1),
        ]));
        for q in ["x", "y", "z"] {
            s.chat(&ChatRequest::prompt(None, q)).unwrap();
        }
        let t = s.transcript();
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].request.last_user(), "y");
        assert_eq!(t[1].response.content, "b");
        assert_eq!(s.usage(), TokenUsage::new(9, 4));
    }

    #[test]
    fn response_round_trips_through_json() {
        let r = ChatResponse {
            content: "hi".into(),
            usage: TokenUsage::new(3, 4),
            latency: Duration::from_millis(12),
        };
        let back: ChatResponse = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
