//! Blocking client for an OpenAI-compatible `/chat/completions` endpoint
//! with function calling.

use std::time::Duration;

use serde_json::{json, Map, Value};

use super::backend::{BackendError, ChatRequest, LlmBackend};
use super::message::ChatMessage;
use crate::executor::ToolCall;

pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `https://api.openai.com/v1`; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: &str, model: &str) -> Self {
        RemoteConfig {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key_env: DEFAULT_API_KEY_ENV.to_string(),
            timeout: Duration::from_secs(120),
        }
    }
}

pub struct RemoteBackend {
    config: RemoteConfig,
    api_key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for RemoteBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteBackend")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl RemoteBackend {
    /// Reads the API key from the configured environment variable.
    pub fn from_env(config: RemoteConfig) -> Result<Self, BackendError> {
        let key = std::env::var(&config.api_key_env).ok().filter(|k| !k.trim().is_empty());
        match key {
            Some(k) => Self::with_key(config, k),
            None => Err(BackendError::Config(format!(
                "environment variable {} is not set; it must hold the API key",
                config.api_key_env
            ))),
        }
    }

    pub fn with_key(config: RemoteConfig, api_key: String) -> Result<Self, BackendError> {
        if config.endpoint.trim().is_empty() || config.model.trim().is_empty() {
            return Err(BackendError::Config(
                "remote backend needs an endpoint and a model".into(),
            ));
        }
        let agent_config = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build();
        Ok(RemoteBackend {
            agent: ureq::Agent::new_with_config(agent_config),
            config,
            api_key,
        })
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }
}

/// Request body in the chat-completion function-calling shape.
pub fn request_body(model: &str, request: &ChatRequest<'_>) -> Value {
    let messages: Vec<Value> = request.messages.iter().map(message_to_wire).collect();
    let mut body = Map::new();
    body.insert("model".into(), model.into());
    body.insert("messages".into(), Value::Array(messages));
    if !request.tools.is_empty() {
        body.insert("tools".into(), Value::Array(request.tools.to_vec()));
    }
    body.insert("temperature".into(), json!(request.decoding.temperature));
    body.insert("max_tokens".into(), json!(request.decoding.max_tokens));
    Value::Object(body)
}

fn message_to_wire(m: &ChatMessage) -> Value {
    let mut out = Map::new();
    out.insert("role".into(), m.role.as_str().into());
    out.insert("content".into(), m.content.clone().into());
    if !m.tool_calls.is_empty() {
        let calls: Vec<Value> = m
            .tool_calls
            .iter()
            .map(|c| {
                let arguments = match &c.arguments {
                    Value::String(raw) => raw.clone(),
                    other => other.to_string(),
                };
                json!({"id": c.call_id, "type": "function", "function": {"name": c.name, "arguments": arguments}})
            })
            .collect();
        out.insert("tool_calls".into(), Value::Array(calls));
    }
    if let Some(id) = &m.tool_call_id {
        out.insert("tool_call_id".into(), id.clone().into());
    }
    Value::Object(out)
}

/// First choice's message. Tool-call arguments that are not valid JSON are
/// kept as a raw string so the executor can answer `invalid_arguments`.
pub fn parse_response(body: &Value) -> Result<ChatMessage, BackendError> {
    let msg = body
        .pointer("/choices/0/message")
        .ok_or_else(|| BackendError::Protocol("response has no choices[0].message".into()))?;
    let content = msg
        .get("content")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let mut calls = Vec::new();
    if let Some(list) = msg.get("tool_calls").and_then(Value::as_array) {
        for (i, c) in list.iter().enumerate() {
            let name = c
                .pointer("/function/name")
                .and_then(Value::as_str)
                .ok_or_else(|| BackendError::Protocol(format!("tool_calls[{i}] has no function name")))?;
            let id = c
                .get("id")
                .and_then(Value::as_str)
                .map(str::to_string)
                .unwrap_or_else(|| format!("call_{i}"));
            let arguments = match c.pointer("/function/arguments") {
                Some(Value::String(raw)) => serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.clone())),
                Some(v) => v.clone(),
                None => Value::Object(Map::new()),
            };
            calls.push(ToolCall::new(id, name, arguments));
        }
    }
    Ok(ChatMessage::assistant_with_calls(content, calls))
}

impl LlmBackend for RemoteBackend {
    fn complete(&self, request: &ChatRequest<'_>) -> Result<ChatMessage, BackendError> {
        let body = request_body(&self.config.model, request);
        let mut response = self
            .agent
            .post(&self.url())
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(BackendError::Status {
                status,
                body: text.chars().take(500).collect(),
            });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| BackendError::Protocol(e.to_string()))?;
        parse_response(&value)
    }
}
