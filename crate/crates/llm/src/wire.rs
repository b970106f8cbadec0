use std::time::{Duration, Instant};

use graphwm_core::TokenUsage;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{surrogate_tokens, ChatBackend, ChatRequest, ChatResponse, LlmError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WireConfig {
    /// Base URL; requests go to `{endpoint}/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key. An unset
    /// variable sends no Authorization header.
    pub api_key_env: String,
    pub timeout_secs: u64,
    /// Retries after the first attempt for transport errors, 429 and 5xx.
    pub retry_cap: u32,
    pub backoff_ms: u64,
}

impl Default for WireConfig {
    fn default() -> Self {
        WireConfig {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 120,
            retry_cap: 4,
            backoff_ms: 500,
        }
    }
}

pub struct WireBackend {
    config: WireConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

enum Failure {
    Transient(String),
    Fatal(String),
}

impl WireBackend {
    pub fn new(config: WireConfig) -> Result<Self, LlmError> {
        if config.endpoint.trim().is_empty() {
            return Err(LlmError::Config("endpoint is empty".into()));
        }
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs.max(1))))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(WireBackend { config, api_key, agent })
    }

    pub fn config(&self) -> &WireConfig {
        &self.config
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }

    fn body(&self, req: &ChatRequest) -> Value {
        json!({
            "model": self.config.model,
            "messages": req.messages,
            "temperature": req.temperature,
            "top_p": req.top_p,
            "max_tokens": req.max_tokens,
        })
    }

    fn attempt(&self, body: &Value) -> Result<Value, Failure> {
        let mut call = self.agent.post(self.url()).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = match call.send_json(body) {
            Ok(r) => r,
            Err(e) if is_transient(&e) => return Err(Failure::Transient(e.to_string())),
            Err(e) => return Err(Failure::Fatal(e.to_string())),
        };
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().unwrap_or_default();
        match status {
            200..=299 => serde_json::from_str(&text).map_err(|e| Failure::Fatal(format!("malformed response body: {e}"))),
            429 | 500..=599 => Err(Failure::Transient(format!("HTTP {status}: {}", snippet(&text)))),
            _ => Err(Failure::Fatal(format!("HTTP {status}: {}", snippet(&text)))),
        }
    }
}

fn is_transient(e: &ureq::Error) -> bool {
    matches!(
        e,
        ureq::Error::Io(_)
            | ureq::Error::Timeout(_)
            | ureq::Error::ConnectionFailed
            | ureq::Error::HostNotFound
            | ureq::Error::Protocol(_)
            | ureq::Error::BodyStalled
    )
}

fn snippet(s: &str) -> &str {
    match s.char_indices().nth(200) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn parse_reply(v: &Value, req: &ChatRequest) -> Result<(String, TokenUsage), LlmError> {
    let content = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| LlmError::Backend("response has no choices[0].message.content".into()))?
        .to_string();
    let usage = match (
        v.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
        v.pointer("/usage/completion_tokens").and_then(Value::as_u64),
    ) {
        (Some(i), Some(o)) => TokenUsage::new(i, o),
        _ => {
            log::warn!("response carries no usage block; using character surrogate");
            TokenUsage::new(surrogate_tokens(req.char_count()), surrogate_tokens(content.chars().count()))
        }
    };
    Ok((content, usage))
}

impl ChatBackend for WireBackend {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        req.validate()?;
        let body = self.body(req);
        let started = Instant::now();
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Ok(v) => {
                    let (content, usage) = parse_reply(&v, req)?;
                    return Ok(ChatResponse {
                        content,
                        usage,
                        latency: started.elapsed(),
                    });
                }
                Err(Failure::Fatal(msg)) => return Err(LlmError::Backend(msg)),
                Err(Failure::Transient(msg)) if attempt >= self.config.retry_cap => {
                    return Err(LlmError::Backend(format!("gave up after {} attempts: {msg}", attempt + 1)))
                }
                Err(Failure::Transient(msg)) => {
                    log::debug!("transient failure ({msg}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                    attempt += 1;
                }
            }
        }
    }
}
