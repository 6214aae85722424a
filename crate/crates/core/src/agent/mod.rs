//! Agent runtime: chat messages, completion backends (remote endpoint or a
//! deterministic script), the three inference paradigms, answer extraction
//! and trace persistence.

pub mod answer;
pub mod backend;
pub mod message;
pub mod prompts;
pub mod remote;
pub mod session;
pub mod trace;

pub use answer::extract_answer;
pub use backend::{BackendError, ChatRequest, Decoding, LlmBackend, ScriptCall, ScriptEntry, ScriptedBackend};
pub use message::{ChatMessage, Role};
pub use remote::{RemoteBackend, RemoteConfig};
pub use session::{
    run_direct, run_paradigm, run_rag, run_tool_agent, ConversationTrace, Paradigm, SessionOptions, SessionResult,
    StopReason,
};
pub use trace::{load_result, render_trace, replay_trace, save_result, trace_json, ReplayReport};
