//! Trace persistence, the human-readable chat-template rendering, and replay
//! of recorded tool calls.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::json;

use super::message::{ChatMessage, Role};
use super::session::SessionResult;
use crate::executor::{invoke, Registry, SessionContext, ToolCall};
use crate::wire::to_wire_string;

/// Pretty-printed JSON with a trailing newline. Identical results give
/// identical bytes.
pub fn trace_json(result: &SessionResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("session results serialize");
    s.push('\n');
    s
}

pub fn save_result(path: &Path, result: &SessionResult) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, trace_json(result))
}

pub fn load_result(path: &Path) -> io::Result<SessionResult> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))
}

fn render_message(m: &ChatMessage, out: &mut String) {
    // Tool results are shown as user turns, as chat templates present them.
    let role = match m.role {
        Role::Tool => Role::User,
        r => r,
    };
    out.push_str(&format!("<|im_start|>{}\n", role.as_str()));
    if m.role == Role::Tool {
        out.push_str(&format!("<tool_response>\n{}\n</tool_response>", m.content));
    } else {
        out.push_str(&m.content);
        for call in &m.tool_calls {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let body = json!({"name": call.name, "arguments": call.arguments});
            out.push_str(&format!("<tool_call>\n{}\n</tool_call>", to_wire_string(&body)));
        }
    }
    out.push_str("<|im_end|>\n");
}

/// Render a session in the `<|im_start|>role ... <|im_end|>` layout, with
/// `<tool_call>` and `<tool_response>` blocks.
pub fn render_trace(result: &SessionResult) -> String {
    let t = &result.trace;
    let mut out = format!(
        "# session {} | paradigm {} | created {}\n",
        t.session_id,
        result.paradigm,
        t.created_at.to_rfc3339()
    );
    for m in &t.messages {
        render_message(m, &mut out);
    }
    out.push_str(&format!(
        "# stop_reason {} | tool_calls_made {}",
        result.stop_reason, result.tool_calls_made
    ));
    if let Some(e) = &result.error {
        out.push_str(&format!(" | error {e}"));
    }
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMismatch {
    pub call_id: String,
    pub recorded: String,
    pub replayed: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReplayReport {
    pub checked: usize,
    pub mismatches: Vec<ReplayMismatch>,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-execute every audited call of `result` in a fresh session with the
/// recorded limits and compare the payload text with what was recorded.
pub fn replay_trace(registry: &Registry, result: &SessionResult) -> ReplayReport {
    let t = &result.trace;
    let mut ctx = SessionContext::new(&t.query, t.limits);
    let mut report = ReplayReport::default();
    for entry in &t.audit {
        let call = ToolCall::new(entry.call_id.clone(), entry.tool.clone(), entry.arguments.clone());
        let replayed = invoke(registry, &call, &mut ctx).wire();
        let recorded = to_wire_string(&entry.payload);
        report.checked += 1;
        if replayed != recorded {
            report.mismatches.push(ReplayMismatch {
                call_id: entry.call_id.clone(),
                recorded,
                replayed,
            });
        }
    }
    report
}
