//! Chat-completion backend contract and the deterministic scripted backend.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::message::{ChatMessage, Role};
use crate::executor::ToolCall;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decoding {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding {
            temperature: 0.0,
            max_tokens: 4096,
        }
    }
}

/// One completion request: the conversation so far, the tool schemas on
/// offer (empty when no tools are offered) and decoding parameters.
#[derive(Debug, Clone, Copy)]
pub struct ChatRequest<'a> {
    pub messages: &'a [ChatMessage],
    pub tools: &'a [Value],
    pub decoding: Decoding,
    /// Benchmark case this request belongs to, if any. Never sent over the
    /// wire; the scripted backend uses it to pick per-case replies.
    pub case_id: Option<&'a str>,
}

impl ChatRequest<'_> {
    /// Assistant messages already in the conversation, i.e. the index of the
    /// turn being requested.
    pub fn turn(&self) -> usize {
        self.messages.iter().filter(|m| m.role == Role::Assistant).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("scripted backend: {0}")]
    Script(String),
}

/// Given a request, produce one assistant message. Implementations must be
/// shareable across benchmark worker threads.
pub trait LlmBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest<'_>) -> Result<ChatMessage, BackendError>;
}

/// One canned reply. Entries without `case_id` apply to every case; an
/// entry with `error` makes that turn fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    pub turn: usize,
    #[serde(default)]
    pub content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ScriptCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptCall {
    /// Defaults to `call_<turn>_<position>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub name: String,
    #[serde(default = "empty_object")]
    pub arguments: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

/// Replays assistant turns from a script keyed by (case, turn index). The
/// reply depends only on the key, so runs are reproducible.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    entries: HashMap<(Option<String>, usize), ScriptEntry>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Result<Self, BackendError> {
        let mut map = HashMap::new();
        for e in entries {
            let key = (e.case_id.clone(), e.turn);
            if map.contains_key(&key) {
                return Err(BackendError::Script(format!(
                    "duplicate entry for case {:?}, turn {}",
                    e.case_id, e.turn
                )));
            }
            map.insert(key, e);
        }
        Ok(ScriptedBackend { entries: map })
    }

    /// JSON-lines script; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, BackendError> {
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| BackendError::Script(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<ScriptEntry>, _>>()?;
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| BackendError::Script(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn lookup(&self, case_id: Option<&str>, turn: usize) -> Option<&ScriptEntry> {
        case_id
            .and_then(|c| self.entries.get(&(Some(c.to_string()), turn)))
            .or_else(|| self.entries.get(&(None, turn)))
    }
}

impl LlmBackend for ScriptedBackend {
    fn complete(&self, request: &ChatRequest<'_>) -> Result<ChatMessage, BackendError> {
        let turn = request.turn();
        let entry = self.lookup(request.case_id, turn).ok_or_else(|| {
            BackendError::Script(format!("no reply scripted for case {:?}, turn {turn}", request.case_id))
        })?;
        if let Some(err) = &entry.error {
            return Err(BackendError::Script(err.clone()));
        }
        let calls = entry
            .tool_calls
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let id = c.id.clone().unwrap_or_else(|| format!("call_{turn}_{i}"));
                ToolCall::new(id, c.name.clone(), c.arguments.clone())
            })
            .collect();
        Ok(ChatMessage::assistant_with_calls(entry.content.clone(), calls))
    }
}
