//! Provider-agnostic chat-completion client with record/replay fixtures.
//!
//! `Live` posts to a chat-completions endpoint, `Record` does the same and
//! stores each response under [`fixture_key`], and `Replay` answers from the
//! fixture directory without touching the transport at all.

mod store;
pub mod stub;
mod transport;

pub use store::FixtureStore;
pub use transport::{HttpReply, HttpTransport, Transport, TransportError};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const DEFAULT_TEMPERATURE: f64 = 0.2;
pub const DEFAULT_MAX_TOKENS: u32 = 4096;
pub const STUB_SCHEME: &str = "stub://";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn new(model_id: impl Into<String>, messages: Vec<ChatMessage>) -> Self {
        Self { model_id: model_id.into(), messages, temperature: DEFAULT_TEMPERATURE, max_tokens: DEFAULT_MAX_TOKENS }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let bad = |m: &str| Err(GatewayError::InvalidRequest(m.to_string()));
        if self.model_id.trim().is_empty() {
            return bad("model_id is empty");
        }
        match self.messages.first() {
            None => return bad("messages are empty"),
            Some(m) if m.role == Role::Assistant => return bad("first message must be system or user"),
            _ => {}
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad("temperature must be in [0, 2]");
        }
        if self.max_tokens == 0 {
            return bad("max_tokens must be positive");
        }
        Ok(())
    }

    pub fn system_content(&self) -> &str {
        self.messages.iter().find(|m| m.role == Role::System).map(|m| m.content.as_str()).unwrap_or("")
    }

    pub fn user_content(&self) -> &str {
        self.messages.iter().rev().find(|m| m.role == Role::User).map(|m| m.content.as_str()).unwrap_or("")
    }

    /// Wire body: `{model, messages[{role, content}], temperature, max_tokens}`.
    pub fn wire_body(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model_id,
            "messages": self.messages.iter().map(|m| serde_json::json!({
                "role": m.role.as_str(),
                "content": m.content,
            })).collect::<Vec<_>>(),
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub model_id: String,
    pub usage: Usage,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GatewayMode {
    Live {
        endpoint: String,
        /// Name of the environment variable holding the API key.
        credential_env: Option<String>,
    },
    Record {
        endpoint: String,
        credential_env: Option<String>,
        fixture_dir: PathBuf,
    },
    Replay {
        fixture_dir: PathBuf,
    },
}

impl GatewayMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Live { .. } => "live",
            Self::Record { .. } => "record",
            Self::Replay { .. } => "replay",
        }
    }

    fn endpoint(&self) -> Option<&str> {
        match self {
            Self::Live { endpoint, .. } | Self::Record { endpoint, .. } => Some(endpoint),
            Self::Replay { .. } => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("provider returned HTTP {status}: {body}")]
    Provider { status: u16, body: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("replay fixture missing for key {key}")]
    FixtureMissing { key: String },
    #[error("fixture directory {0} does not exist")]
    FixtureDir(PathBuf),
    #[error("credential variable {0} is not set")]
    Credential(String),
    #[error("fixture store I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Bounded exponential backoff for retryable transport failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub factor: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_retries: 3, base_delay: Duration::from_millis(500), factor: 2 }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn delay(&self, retry: u32) -> Duration {
        self.base_delay * self.factor.saturating_pow(retry.saturating_sub(1))
    }
}

/// Canonical fixture key: SHA-256 over the model id and the ordered
/// (role, content) pairs with trailing whitespace trimmed from each content.
pub fn fixture_key(request: &ChatRequest) -> String {
    let canonical = serde_json::json!({
        "model": request.model_id,
        "messages": request
            .messages
            .iter()
            .map(|m| serde_json::json!([m.role.as_str(), m.content.trim_end()]))
            .collect::<Vec<_>>(),
    });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    hex::encode(digest)
}

type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

/// Chat-completion client. Safe to share across threads.
pub struct Gateway {
    mode: GatewayMode,
    transport: Arc<dyn Transport>,
    store: Option<FixtureStore>,
    retry: RetryPolicy,
    sleeper: Sleeper,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway").field("mode", &self.mode).field("retry", &self.retry).finish()
    }
}

impl Gateway {
    /// Builds a gateway; `stub://` endpoints use the in-process stub
    /// provider, anything else goes over HTTP.
    pub fn new(mode: GatewayMode) -> Result<Self, GatewayError> {
        let transport: Arc<dyn Transport> = match mode.endpoint() {
            Some(ep) if ep.starts_with(STUB_SCHEME) => Arc::new(stub::StubProvider),
            _ => Arc::new(HttpTransport::new()),
        };
        Self::with_transport(mode, transport)
    }

    pub fn with_transport(mode: GatewayMode, transport: Arc<dyn Transport>) -> Result<Self, GatewayError> {
        let store = match &mode {
            GatewayMode::Replay { fixture_dir } => {
                if !fixture_dir.is_dir() {
                    return Err(GatewayError::FixtureDir(fixture_dir.clone()));
                }
                Some(FixtureStore::new(fixture_dir))
            }
            GatewayMode::Record { fixture_dir, .. } => Some(FixtureStore::create(fixture_dir)?),
            GatewayMode::Live { .. } => None,
        };
        Ok(Self { mode, transport, store, retry: RetryPolicy::default(), sleeper: Arc::new(std::thread::sleep) })
    }

    /// Replay gateway over a fixture directory.
    pub fn replay(fixture_dir: impl AsRef<Path>) -> Result<Self, GatewayError> {
        Self::new(GatewayMode::Replay { fixture_dir: fixture_dir.as_ref().to_path_buf() })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_sleeper(mut self, sleeper: impl Fn(Duration) + Send + Sync + 'static) -> Self {
        self.sleeper = Arc::new(sleeper);
        self
    }

    pub fn mode(&self) -> &GatewayMode {
        &self.mode
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        request.validate()?;
        match &self.mode {
            GatewayMode::Replay { .. } => {
                let key = fixture_key(request);
                self.store.as_ref().expect("replay store").load(&key)?.ok_or(GatewayError::FixtureMissing { key })
            }
            GatewayMode::Live { endpoint, credential_env } => self.send(endpoint, credential_env.as_deref(), request),
            GatewayMode::Record { endpoint, credential_env, .. } => {
                let response = self.send(endpoint, credential_env.as_deref(), request)?;
                self.store.as_ref().expect("record store").save(&fixture_key(request), &response)?;
                Ok(response)
            }
        }
    }

    fn send(
        &self,
        endpoint: &str,
        credential_env: Option<&str>,
        request: &ChatRequest,
    ) -> Result<ChatResponse, GatewayError> {
        let mut headers = vec![("Content-Type".to_string(), "application/json".to_string())];
        if let Some(var) = credential_env {
            let key = std::env::var(var).map_err(|_| GatewayError::Credential(var.to_string()))?;
            headers.push(("Authorization".to_string(), format!("Bearer {key}")));
        }
        let body = request.wire_body().to_string();
        let started = Instant::now();
        let mut attempt = 0;
        let reply = loop {
            attempt += 1;
            match self.transport.post(endpoint, &headers, &body) {
                Ok(reply) => break reply,
                Err(e) if attempt <= self.retry.max_retries => {
                    let delay = self.retry.delay(attempt);
                    log::warn!("transport error ({e}); retry {attempt} in {delay:?}");
                    (self.sleeper)(delay);
                }
                Err(e) => {
                    return Err(GatewayError::Transport { attempts: attempt, message: e.to_string() });
                }
            }
        };
        if reply.status >= 400 {
            return Err(GatewayError::Provider { status: reply.status, body: reply.body });
        }
        let mut response = parse_completion(&reply.body, &request.model_id)?;
        response.latency_ms = started.elapsed().as_millis() as u64;
        Ok(response)
    }
}

/// Extracts the first choice's message content from a chat-completions body.
pub fn parse_completion(body: &str, requested_model: &str) -> Result<ChatResponse, GatewayError> {
    let v: serde_json::Value =
        serde_json::from_str(body).map_err(|e| GatewayError::MalformedResponse(e.to_string()))?;
    let content = v
        .pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .ok_or_else(|| GatewayError::MalformedResponse("no choices[0].message.content".into()))?;
    let usage = Usage {
        prompt_tokens: v.pointer("/usage/prompt_tokens").and_then(|x| x.as_u64()).unwrap_or(0),
        completion_tokens: v.pointer("/usage/completion_tokens").and_then(|x| x.as_u64()).unwrap_or(0),
    };
    Ok(ChatResponse {
        content: content.to_string(),
        model_id: v.get("model").and_then(|m| m.as_str()).unwrap_or(requested_model).to_string(),
        usage,
        latency_ms: 0,
    })
}
