//! The three inference paradigms: direct prompting, up-front multi-source
//! retrieval, and the interleaved tool-calling loop.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::answer::extract_answer;
use super::backend::{ChatRequest, Decoding, LlmBackend};
use super::message::ChatMessage;
use super::prompts;
use crate::executor::{
    invoke, AuditEntry, ErrorKind, Registry, SessionContext, SessionLimits, ToolCall, ToolError, QUERY_REF,
};
use crate::seq::Sequence;
use crate::tools::EVIDENCE_TOOLS;
use crate::wire::to_wire_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paradigm {
    Direct,
    Rag,
    ToolAgent,
}

impl Paradigm {
    pub fn as_str(self) -> &'static str {
        match self {
            Paradigm::Direct => "direct",
            Paradigm::Rag => "rag",
            Paradigm::ToolAgent => "tool_agent",
        }
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Paradigm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Paradigm::Direct),
            "rag" => Ok(Paradigm::Rag),
            "tool_agent" | "tool-agent" => Ok(Paradigm::ToolAgent),
            other => Err(format!(
                "unknown paradigm '{other}' (expected direct, rag or tool_agent)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    AnswerFound,
    MaxTurns,
    BackendError,
    BudgetExhausted,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::AnswerFound => "answer_found",
            StopReason::MaxTurns => "max_turns",
            StopReason::BackendError => "backend_error",
            StopReason::BudgetExhausted => "budget_exhausted",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The persisted record of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationTrace {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    /// The query as bound in the session (id `query`).
    pub query: Sequence,
    pub limits: SessionLimits,
    pub messages: Vec<ChatMessage>,
    pub audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    pub paradigm: Paradigm,
    pub final_answer: Option<String>,
    pub stop_reason: StopReason,
    /// Model-initiated tool calls that were executed.
    pub tool_calls_made: usize,
    /// Backend failure detail when `stop_reason` is `backend_error`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub trace: ConversationTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOptions {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub case_id: Option<String>,
    pub decoding: Decoding,
    pub limits: SessionLimits,
    /// Assistant rounds allowed in the tool-calling loop.
    pub max_turns: usize,
    pub record_timings: bool,
}

impl SessionOptions {
    pub fn new(session_id: impl Into<String>) -> Self {
        SessionOptions {
            session_id: session_id.into(),
            created_at: Utc::now(),
            case_id: None,
            decoding: Decoding::default(),
            limits: SessionLimits::default(),
            max_turns: 12,
            record_timings: false,
        }
    }

    pub fn for_case(case_id: &str) -> Self {
        SessionOptions {
            case_id: Some(case_id.to_string()),
            ..Self::new(case_id)
        }
    }
}

struct Session<'a> {
    opts: &'a SessionOptions,
    paradigm: Paradigm,
    ctx: SessionContext,
    messages: Vec<ChatMessage>,
}

impl<'a> Session<'a> {
    fn new(paradigm: Paradigm, seq: &Sequence, opts: &'a SessionOptions) -> Self {
        let mut ctx = SessionContext::new(seq, opts.limits);
        ctx.record_timings = opts.record_timings;
        Session {
            opts,
            paradigm,
            ctx,
            messages: Vec::new(),
        }
    }

    fn finish(
        self,
        stop_reason: StopReason,
        final_answer: Option<String>,
        tool_calls_made: usize,
        error: Option<String>,
    ) -> SessionResult {
        let query = self.ctx.query().clone();
        SessionResult {
            case_id: self.opts.case_id.clone(),
            paradigm: self.paradigm,
            final_answer,
            stop_reason,
            tool_calls_made,
            error,
            trace: ConversationTrace {
                session_id: self.opts.session_id.clone(),
                created_at: self.opts.created_at,
                query,
                limits: self.opts.limits,
                messages: self.messages,
                audit: self.ctx.into_audit(),
            },
        }
    }

    fn request<'m>(&'m self, tools: &'m [serde_json::Value]) -> ChatRequest<'m> {
        ChatRequest {
            messages: &self.messages,
            tools,
            decoding: self.opts.decoding,
            case_id: self.opts.case_id.as_deref(),
        }
    }

    /// Answer every call of a reply with a refusal, without executing it.
    fn refuse_calls(&mut self, reply: &ChatMessage, reason: &str) {
        let refusal = ToolError::new(ErrorKind::BudgetExhausted, reason).envelope();
        for call in &reply.tool_calls {
            self.messages
                .push(ChatMessage::tool(call.call_id.clone(), to_wire_string(&refusal)));
        }
    }
}

fn round(backend: &dyn LlmBackend, session: &Session<'_>, tools: &[serde_json::Value]) -> Result<ChatMessage, String> {
    backend.complete(&session.request(tools)).map_err(|e| e.to_string())
}

/// One round with no tools executed, as in the direct and RAG paradigms.
fn single_round(backend: &dyn LlmBackend, mut session: Session<'_>, refusal: &str) -> SessionResult {
    let mut reply = match round(backend, &session, &[]) {
        Ok(r) => r,
        Err(e) => return session.finish(StopReason::BackendError, None, 0, Some(e)),
    };
    normalize_call_ids(&mut reply, &mut HashSet::new());
    let answer = extract_answer(&reply.content);
    session.messages.push(reply.clone());
    session.refuse_calls(&reply, refusal);
    let stop = if answer.is_some() {
        StopReason::AnswerFound
    } else {
        StopReason::MaxTurns
    };
    session.finish(stop, answer, 0, None)
}

/// Baseline: one round, no tools offered.
pub fn run_direct(backend: &dyn LlmBackend, question: &str, seq: &Sequence, opts: &SessionOptions) -> SessionResult {
    let mut s = Session::new(Paradigm::Direct, seq, opts);
    let query = s.ctx.query().clone();
    s.messages.push(ChatMessage::system(prompts::DIRECT_TEMPLATE));
    s.messages
        .push(ChatMessage::user(prompts::direct_user_message(question, &query)));
    single_round(backend, s, "no tools are offered in this paradigm")
}

/// Multi-source retrieval: the four evidence tools run up front through the
/// executor and their payloads (or error envelopes) are laid into the user
/// message; then one round with no tools offered.
pub fn run_rag(
    backend: &dyn LlmBackend,
    registry: &Registry,
    question: &str,
    seq: &Sequence,
    opts: &SessionOptions,
) -> SessionResult {
    let mut s = Session::new(Paradigm::Rag, seq, opts);
    let query = s.ctx.query().clone();
    let evidence: Vec<(&str, String)> = EVIDENCE_TOOLS
        .iter()
        .map(|&name| {
            let call = ToolCall::new(format!("rag_{name}"), name, json!({"sequence_ref": QUERY_REF}));
            (name, invoke(registry, &call, &mut s.ctx).wire())
        })
        .collect();
    s.messages.push(ChatMessage::system(prompts::RAG_TEMPLATE));
    s.messages.push(ChatMessage::user(prompts::rag_user_message(
        question, &query, &evidence,
    )));
    single_round(
        backend,
        s,
        "tool calls are disabled here; all tool outputs are already in the prompt",
    )
}

/// Give every call in `reply` an id unique within the conversation.
fn normalize_call_ids(reply: &mut ChatMessage, seen: &mut HashSet<String>) {
    for call in &mut reply.tool_calls {
        if call.call_id.is_empty() || seen.contains(&call.call_id) {
            let mut n = seen.len();
            while seen.contains(&format!("call_{n}")) {
                n += 1;
            }
            call.call_id = format!("call_{n}");
        }
        seen.insert(call.call_id.clone());
    }
}

/// Interleaved loop: each assistant round may call tools (executed in order,
/// one tool message each) or finish with an answer span. Tool calls take
/// precedence over an answer in the same message.
pub fn run_tool_agent(
    backend: &dyn LlmBackend,
    registry: &Registry,
    question: &str,
    seq: &Sequence,
    opts: &SessionOptions,
) -> SessionResult {
    let mut s = Session::new(Paradigm::ToolAgent, seq, opts);
    let query = s.ctx.query().clone();
    s.messages
        .push(ChatMessage::user(prompts::tool_agent_user_message(question, &query)));
    let schemas = registry.schemas();
    let mut seen = HashSet::new();
    let mut executed = 0;

    for _ in 0..opts.max_turns {
        let mut reply = match round(backend, &s, &schemas) {
            Ok(r) => r,
            Err(e) => return s.finish(StopReason::BackendError, None, executed, Some(e)),
        };
        normalize_call_ids(&mut reply, &mut seen);
        s.messages.push(reply.clone());

        if reply.has_tool_calls() {
            let mut refused = false;
            for call in &reply.tool_calls {
                let resp = invoke(registry, call, &mut s.ctx);
                if resp.error_kind() == Some(ErrorKind::BudgetExhausted) {
                    refused = true;
                } else {
                    executed += 1;
                }
                s.messages.push(ChatMessage::tool(call.call_id.clone(), resp.wire()));
            }
            if refused {
                return s.finish(StopReason::BudgetExhausted, None, executed, None);
            }
            continue;
        }
        if let Some(answer) = extract_answer(&reply.content) {
            return s.finish(StopReason::AnswerFound, Some(answer), executed, None);
        }
    }
    s.finish(StopReason::MaxTurns, None, executed, None)
}

/// Dispatch on `paradigm`. The direct paradigm ignores `registry`.
pub fn run_paradigm(
    paradigm: Paradigm,
    backend: &dyn LlmBackend,
    registry: &Registry,
    question: &str,
    seq: &Sequence,
    opts: &SessionOptions,
) -> SessionResult {
    match paradigm {
        Paradigm::Direct => run_direct(backend, question, seq, opts),
        Paradigm::Rag => run_rag(backend, registry, question, seq, opts),
        Paradigm::ToolAgent => run_tool_agent(backend, registry, question, seq, opts),
    }
}
