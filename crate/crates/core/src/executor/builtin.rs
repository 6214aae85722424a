//! Bindings of the four evidence tools (plus the `python_eval` stub) to the
//! executor.

use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use super::schema::{ParamKind, ParamSpec, ParameterSchema};
use super::{ErrorKind, Registry, ResolvedArguments, ToolDescriptor, ToolError, ToolHandler};
use crate::seq::Sequence;
use crate::tools::domains::{self, ProfileHmm, ScanParams};
use crate::tools::homology::{self, make_evidence, EvidenceRecord, ReferenceIndex, SearchParams};
use crate::tools::topology::{self, TopologyParams, TopologyResponse};
use crate::tools::{props, MMSEQS2_BESTHIT, PFAM_HMMSCAN, PYTHON_EVAL, SEQ_BASIC_PROPS, TMBED_PREDICT};

/// Immutable stores and parameters behind the evidence tools. Shared by all
/// sessions.
#[derive(Debug, Clone)]
pub struct ToolPool {
    pub reference: ReferenceIndex,
    pub hmm_library: Vec<ProfileHmm>,
    pub search: SearchParams,
    pub scan: ScanParams,
    pub topology: TopologyParams,
}

impl ToolPool {
    pub fn new(reference: ReferenceIndex, hmm_library: Vec<ProfileHmm>) -> Self {
        ToolPool {
            reference,
            hmm_library,
            search: SearchParams::default(),
            scan: ScanParams::default(),
            topology: TopologyParams::default(),
        }
    }

    pub fn basic_props(&self, seq: &Sequence) -> Result<props::BasicProps, ToolError> {
        props::compute_basic_props(seq).map_err(tool_failure)
    }

    /// Best hit plus its annotation; `min_seq_id` overrides the pool default.
    pub fn best_hit(&self, seq: &Sequence, min_seq_id: Option<f64>) -> Result<EvidenceRecord, ToolError> {
        let params = SearchParams {
            min_seq_id: min_seq_id.unwrap_or(self.search.min_seq_id),
            ..self.search
        };
        match homology::search_best_hit(&self.reference, seq, &params).map_err(tool_failure)? {
            Some(hit) => make_evidence(hit, &self.reference).map_err(tool_failure),
            None => Ok(EvidenceRecord::no_hit()),
        }
    }

    pub fn domain_scan(&self, seq: &Sequence) -> Result<domains::DomainScanResult, ToolError> {
        domains::scan(&self.hmm_library, seq, &self.scan).map_err(tool_failure)
    }

    pub fn topology(&self, seq: &Sequence) -> Result<TopologyResponse, ToolError> {
        let prediction = topology::predict_topology(seq, &self.topology).map_err(tool_failure)?;
        Ok(TopologyResponse { prediction })
    }

    /// Run one evidence tool by wire name, outside any session. This is the
    /// direct path used by `tools run` and by trace checks.
    pub fn run(&self, name: &str, seq: &Sequence, min_seq_id: Option<f64>) -> Result<Value, ToolError> {
        match name {
            SEQ_BASIC_PROPS => to_payload(&self.basic_props(seq)?),
            MMSEQS2_BESTHIT => to_payload(&self.best_hit(seq, min_seq_id)?),
            PFAM_HMMSCAN => to_payload(&self.domain_scan(seq)?),
            TMBED_PREDICT => to_payload(&self.topology(seq)?),
            other => Err(ToolError::new(
                ErrorKind::UnknownTool,
                format!("no tool named '{other}'"),
            )),
        }
    }
}

fn tool_failure(e: impl std::fmt::Display) -> ToolError {
    ToolError::new(ErrorKind::ToolError, e.to_string())
}

fn to_payload<T: Serialize>(value: &T) -> Result<Value, ToolError> {
    serde_json::to_value(value).map_err(|e| ToolError::new(ErrorKind::InternalError, e.to_string()))
}

struct PoolTool {
    pool: Arc<ToolPool>,
    name: &'static str,
}

impl ToolHandler for PoolTool {
    fn call(&self, args: &ResolvedArguments) -> Result<Value, ToolError> {
        self.pool
            .run(self.name, args.require_sequence()?, args.f64("min_seq_id"))
    }
}

fn pool_tool(pool: &Arc<ToolPool>, name: &'static str, description: &str, schema: ParameterSchema) -> ToolDescriptor {
    let handler = PoolTool {
        pool: Arc::clone(pool),
        name,
    };
    ToolDescriptor::new(name, description, schema, Arc::new(handler))
}

/// Registry holding the four evidence tools in evidence order: properties,
/// homology, domains, topology.
pub fn standard_registry(pool: Arc<ToolPool>) -> Registry {
    let mut r = Registry::new();
    let descriptors = [
        pool_tool(
            &pool,
            SEQ_BASIC_PROPS,
            "Basic physicochemical properties: length, maximum hydrophobic run, low-complexity index and heuristic flags.",
            ParameterSchema::sequence_tool(),
        ),
        pool_tool(
            &pool,
            MMSEQS2_BESTHIT,
            "Homolog search against the curated reference database; returns the best hit and its functional annotation.",
            ParameterSchema::sequence_tool().with(
                ParamSpec::new("min_seq_id", ParamKind::Number, "Minimum fraction identity of the hit (default 0.3).")
                    .range(0.0, 1.0),
            ),
        ),
        pool_tool(
            &pool,
            PFAM_HMMSCAN,
            "Domain and family inference with profile HMMs; returns all reported hits and the selected non-overlapping domains.",
            ParameterSchema::sequence_tool(),
        ),
        pool_tool(
            &pool,
            TMBED_PREDICT,
            "Transmembrane and topology prediction; per-residue states H (strong), h (weak), . (none).",
            ParameterSchema::sequence_tool(),
        ),
    ];
    for d in descriptors {
        r.register(d).expect("standard tool names are distinct");
    }
    r
}

/// Hook for evaluating model-written code in a sandbox. No evaluator ships
/// with the runtime.
pub trait CodeEvaluator: Send + Sync {
    fn evaluate(&self, code: &str, sequence: Option<&Sequence>) -> Result<Value, String>;
}

struct PythonEval {
    evaluator: Option<Arc<dyn CodeEvaluator>>,
}

impl ToolHandler for PythonEval {
    fn call(&self, args: &ResolvedArguments) -> Result<Value, ToolError> {
        let code = args.str("code").unwrap_or_default();
        match &self.evaluator {
            Some(ev) => ev
                .evaluate(code, args.sequence.as_ref())
                .map_err(|m| ToolError::new(ErrorKind::ToolError, m)),
            None => Err(ToolError::new(
                ErrorKind::NotSupported,
                "code evaluation is not enabled in this runtime; use the registered tools",
            )),
        }
    }
}

/// `python_eval`: optional code evaluation. Without an evaluator every call
/// returns a `not_supported` envelope.
pub fn python_eval_descriptor(evaluator: Option<Arc<dyn CodeEvaluator>>) -> ToolDescriptor {
    let schema = ParameterSchema::default().with(
        ParamSpec::new(
            "code",
            ParamKind::String,
            "Python source; the value of the last expression is returned.",
        )
        .required(),
    );
    ToolDescriptor::new(
        PYTHON_EVAL,
        "Compute other properties derivable with Python code.",
        schema,
        Arc::new(PythonEval { evaluator }),
    )
}
