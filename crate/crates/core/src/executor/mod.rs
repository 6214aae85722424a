//! Unified tool executor: a registry of schema'd tools, argument resolution
//! (including `sequence_ref` dereferencing), budgeted and timed dispatch, and
//! a per-session audit log. Every outcome of [`invoke`] is a
//! [`ToolResponse`]; failures travel back to the model as error envelopes.

pub mod builtin;
pub mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::seq::{validate_sequence, Sequence};
pub use builtin::{python_eval_descriptor, standard_registry, CodeEvaluator, ToolPool};
pub use schema::{ParamKind, ParamSpec, ParameterSchema, SEQUENCE, SEQUENCE_REF};

/// Id given to a sequence passed literally rather than by reference.
pub const LITERAL_SEQUENCE_ID: &str = "input";
/// Name under which the session's query sequence is always bound.
pub const QUERY_REF: &str = "query";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    UnknownTool,
    InvalidArguments,
    UnknownReference,
    AmbiguousArgument,
    Timeout,
    BudgetExhausted,
    ToolError,
    NotSupported,
    InternalError,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::UnknownTool => "unknown_tool",
            ErrorKind::InvalidArguments => "invalid_arguments",
            ErrorKind::UnknownReference => "unknown_reference",
            ErrorKind::AmbiguousArgument => "ambiguous_argument",
            ErrorKind::Timeout => "timeout",
            ErrorKind::BudgetExhausted => "budget_exhausted",
            ErrorKind::ToolError => "tool_error",
            ErrorKind::NotSupported => "not_supported",
            ErrorKind::InternalError => "internal_error",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failed tool outcome; rendered to the model as `{"error_kind", "message"}`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct ToolError {
    pub kind: ErrorKind,
    pub message: String,
}

impl ToolError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        ToolError {
            kind,
            message: message.into(),
        }
    }

    pub fn envelope(&self) -> Value {
        json!({"error_kind": self.kind.as_str(), "message": self.message})
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub call_id: String,
    pub name: String,
    /// Normally a JSON object; anything else is answered with
    /// `invalid_arguments`.
    pub arguments: Value,
}

impl ToolCall {
    pub fn new(call_id: impl Into<String>, name: impl Into<String>, arguments: Value) -> Self {
        ToolCall {
            call_id: call_id.into(),
            name: name.into(),
            arguments,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolResponse {
    pub call_id: String,
    pub ok: bool,
    /// Tool output on success, error envelope on failure.
    pub payload: Value,
    pub elapsed: Duration,
}

impl ToolResponse {
    pub fn failure(call_id: &str, err: &ToolError, elapsed: Duration) -> Self {
        ToolResponse {
            call_id: call_id.to_string(),
            ok: false,
            payload: err.envelope(),
            elapsed,
        }
    }

    pub fn error_kind(&self) -> Option<ErrorKind> {
        if self.ok {
            return None;
        }
        serde_json::from_value(self.payload.get("error_kind")?.clone()).ok()
    }

    /// Payload text as handed to the model.
    pub fn wire(&self) -> String {
        crate::wire::to_wire_string(&self.payload)
    }
}

/// Arguments after resolution: the bound sequence (for sequence tools) and
/// the remaining schema-checked values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedArguments {
    pub sequence: Option<Sequence>,
    pub values: Map<String, Value>,
}

impl ResolvedArguments {
    pub fn f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).and_then(Value::as_str)
    }

    pub fn require_sequence(&self) -> Result<&Sequence, ToolError> {
        self.sequence
            .as_ref()
            .ok_or_else(|| ToolError::new(ErrorKind::InvalidArguments, "a sequence is required"))
    }

    /// Plain argument map with the sequence inlined as residues; resolving
    /// this map again yields the same map.
    pub fn to_map(&self) -> Map<String, Value> {
        let mut out = Map::new();
        if let Some(s) = &self.sequence {
            out.insert(SEQUENCE.into(), Value::String(s.residues().to_string()));
        }
        for (k, v) in &self.values {
            out.insert(k.clone(), v.clone());
        }
        out
    }
}

/// Executable binding of one tool.
pub trait ToolHandler: Send + Sync {
    fn call(&self, args: &ResolvedArguments) -> Result<Value, ToolError>;
}

impl<F> ToolHandler for F
where
    F: Fn(&ResolvedArguments) -> Result<Value, ToolError> + Send + Sync,
{
    fn call(&self, args: &ResolvedArguments) -> Result<Value, ToolError> {
        self(args)
    }
}

#[derive(Clone)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub schema: ParameterSchema,
    pub handler: Arc<dyn ToolHandler>,
}

impl ToolDescriptor {
    pub fn new(name: &str, description: &str, schema: ParameterSchema, handler: Arc<dyn ToolHandler>) -> Self {
        ToolDescriptor {
            name: name.to_string(),
            description: description.to_string(),
            schema,
            handler,
        }
    }

    /// `{"type": "function", "function": {name, description, parameters}}`.
    pub fn function_schema(&self) -> Value {
        json!({
            "type": "function",
            "function": {
                "name": self.name,
                "description": self.description,
                "parameters": self.schema.to_json(),
            }
        })
    }
}

impl fmt::Debug for ToolDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToolDescriptor")
            .field("name", &self.name)
            .field("schema", &self.schema)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("tool '{0}' is already registered")]
    DuplicateName(String),
}

/// Tools in registration order. Built once, then shared read-only.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    tools: Vec<ToolDescriptor>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, descriptor: ToolDescriptor) -> Result<(), RegistryError> {
        if self.get(&descriptor.name).is_some() {
            return Err(RegistryError::DuplicateName(descriptor.name));
        }
        self.tools.push(descriptor);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ToolDescriptor> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.tools.iter().map(|t| t.name.as_str()).collect()
    }

    pub fn descriptors(&self) -> &[ToolDescriptor] {
        &self.tools
    }

    pub fn schemas(&self) -> Vec<Value> {
        self.tools.iter().map(ToolDescriptor::function_schema).collect()
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionLimits {
    pub max_calls: usize,
    #[serde(with = "duration_ms")]
    pub call_timeout: Duration,
}

impl Default for SessionLimits {
    fn default() -> Self {
        SessionLimits {
            max_calls: 10,
            call_timeout: Duration::from_secs(30),
        }
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

/// One executor invocation as recorded in the session audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub call_id: String,
    pub tool: String,
    pub arguments: Value,
    pub ok: bool,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Per-session state: named sequences, limits and the audit log.
#[derive(Debug, Clone)]
pub struct SessionContext {
    named: BTreeMap<String, Sequence>,
    pub limits: SessionLimits,
    /// Record wall-clock time per call in the audit log. Off for
    /// reproducible traces.
    pub record_timings: bool,
    calls_made: usize,
    audit: Vec<AuditEntry>,
}

impl SessionContext {
    /// The query is bound as `"query"` (and carries that id).
    pub fn new(query: &Sequence, limits: SessionLimits) -> Self {
        let query = query.with_id(QUERY_REF).expect("static id is valid");
        let mut named = BTreeMap::new();
        named.insert(QUERY_REF.to_string(), query);
        SessionContext {
            named,
            limits,
            record_timings: false,
            calls_made: 0,
            audit: Vec::new(),
        }
    }

    pub fn query(&self) -> &Sequence {
        &self.named[QUERY_REF]
    }

    /// Bind another sequence under `name` (its id becomes `name`).
    pub fn bind(&mut self, name: &str, seq: &Sequence) -> Result<(), crate::seq::SeqError> {
        if name == QUERY_REF {
            return Err(crate::seq::SeqError::InvalidId(name.to_string()));
        }
        self.named.insert(name.to_string(), seq.with_id(name)?);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&Sequence> {
        self.named.get(name)
    }

    /// Calls admitted against the budget so far.
    pub fn calls_made(&self) -> usize {
        self.calls_made
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn into_audit(self) -> Vec<AuditEntry> {
        self.audit
    }
}

/// Bind `sequence_ref` to a session sequence, validate a literal `sequence`,
/// and check the remaining keys against the tool's schema.
pub fn resolve_arguments(
    descriptor: &ToolDescriptor,
    arguments: &Value,
    ctx: &SessionContext,
) -> Result<ResolvedArguments, ToolError> {
    let invalid = |m: String| ToolError::new(ErrorKind::InvalidArguments, m);
    let args = arguments
        .as_object()
        .ok_or_else(|| invalid(format!("arguments must be a JSON object, got {}", type_name(arguments))))?;
    descriptor.schema.check(args).map_err(invalid)?;

    let mut values = args.clone();
    let sequence = if descriptor.schema.takes_sequence {
        let literal = values.remove(SEQUENCE);
        let reference = values.remove(SEQUENCE_REF);
        match (literal, reference) {
            (Some(_), Some(_)) => {
                return Err(ToolError::new(
                    ErrorKind::AmbiguousArgument,
                    "pass either 'sequence' or 'sequence_ref', not both",
                ))
            }
            (None, Some(r)) => {
                let name = r
                    .as_str()
                    .ok_or_else(|| invalid("'sequence_ref' must be a string".into()))?;
                let seq = ctx.lookup(name).ok_or_else(|| {
                    ToolError::new(
                        ErrorKind::UnknownReference,
                        format!("no sequence named '{name}' in this session"),
                    )
                })?;
                Some(seq.clone())
            }
            (Some(l), None) => {
                let raw = l
                    .as_str()
                    .ok_or_else(|| invalid("'sequence' must be a string".into()))?;
                Some(validate_sequence(LITERAL_SEQUENCE_ID, raw).map_err(|e| invalid(e.to_string()))?)
            }
            (None, None) => return Err(invalid("one of 'sequence' or 'sequence_ref' is required".into())),
        }
    } else {
        None
    };
    Ok(ResolvedArguments { sequence, values })
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Run `handler` on its own thread, giving up after `timeout`. A handler
/// that overruns is left to finish in the background; its result is dropped.
fn run_with_timeout(
    handler: Arc<dyn ToolHandler>,
    args: ResolvedArguments,
    timeout: Duration,
) -> Result<Value, ToolError> {
    let (tx, rx) = mpsc::channel();
    let spawned = thread::Builder::new().name("tool-call".into()).spawn(move || {
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| handler.call(&args)));
        let _ = tx.send(outcome);
    });
    if let Err(e) = spawned {
        return Err(ToolError::new(
            ErrorKind::InternalError,
            format!("could not start tool thread: {e}"),
        ));
    }
    match rx.recv_timeout(timeout) {
        Ok(Ok(result)) => result,
        Ok(Err(panic)) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(ToolError::new(
                ErrorKind::InternalError,
                format!("tool panicked: {detail}"),
            ))
        }
        Err(mpsc::RecvTimeoutError::Timeout) => Err(ToolError::new(
            ErrorKind::Timeout,
            format!("tool did not finish within {} ms", timeout.as_millis()),
        )),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(ToolError::new(
            ErrorKind::InternalError,
            "tool thread exited without a result",
        )),
    }
}

/// Execute one call: budget check, lookup, resolution, timed dispatch. The
/// outcome is appended to the session audit log whatever it is.
pub fn invoke(registry: &Registry, call: &ToolCall, ctx: &mut SessionContext) -> ToolResponse {
    let start = Instant::now();
    let outcome = dispatch(registry, call, ctx);
    let elapsed = start.elapsed();
    let response = match outcome {
        Ok(payload) => ToolResponse {
            call_id: call.call_id.clone(),
            ok: true,
            payload,
            elapsed,
        },
        Err(e) => {
            log::debug!("tool call {} ({}) failed: {e}", call.call_id, call.name);
            ToolResponse::failure(&call.call_id, &e, elapsed)
        }
    };
    ctx.audit.push(AuditEntry {
        call_id: call.call_id.clone(),
        tool: call.name.clone(),
        arguments: call.arguments.clone(),
        ok: response.ok,
        payload: response.payload.clone(),
        elapsed_ms: ctx.record_timings.then_some(elapsed.as_secs_f64() * 1e3),
    });
    response
}

fn dispatch(registry: &Registry, call: &ToolCall, ctx: &mut SessionContext) -> Result<Value, ToolError> {
    if ctx.calls_made >= ctx.limits.max_calls {
        return Err(ToolError::new(
            ErrorKind::BudgetExhausted,
            format!("session tool-call budget of {} is used up", ctx.limits.max_calls),
        ));
    }
    ctx.calls_made += 1;
    let descriptor = registry
        .get(&call.name)
        .ok_or_else(|| ToolError::new(ErrorKind::UnknownTool, format!("no tool named '{}'", call.name)))?;
    let args = resolve_arguments(descriptor, &call.arguments, ctx)?;
    run_with_timeout(Arc::clone(&descriptor.handler), args, ctx.limits.call_timeout)
}
