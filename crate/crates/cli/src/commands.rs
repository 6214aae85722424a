use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use protagent_core::agent::{
    load_result, render_trace, run_paradigm, save_result, ChatMessage, ChatRequest, LlmBackend, Paradigm,
    RemoteBackend, ScriptedBackend, SessionResult, StopReason,
};
use protagent_core::eval::{evaluate_run, load_benchmark, render_table, synth_r1_prompt, SynthRecord};
use protagent_core::executor::{invoke, standard_registry, Registry, SessionContext, ToolCall, ToolPool, QUERY_REF};
use protagent_core::seq::{parse_fasta, validate_sequence, Sequence};
use protagent_core::tools::domains::parse_hmm_library;
use protagent_core::tools::homology::{build_index, load_store, render_store, DEFAULT_K};

use crate::config::{BackendKind, RunArgs, RunConfig};
use crate::SequenceInput;

/// Write to standard output, surfacing a closed pipe as an error instead of
/// panicking like `print!` does.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_sequence(input: &SequenceInput) -> Result<Sequence> {
    match (&input.sequence, &input.sequence_file) {
        (Some(raw), _) => Ok(validate_sequence("input", raw)?),
        (None, Some(path)) => {
            let records = parse_fasta(&read(path)?).with_context(|| format!("{}", path.display()))?;
            let first = records
                .into_iter()
                .next()
                .ok_or_else(|| anyhow!("{} holds no records", path.display()))?;
            Ok(first.sequence)
        }
        (None, None) => bail!("give --sequence or --sequence-file"),
    }
}

fn load_pool(config: &RunConfig) -> Result<ToolPool> {
    let entries = load_store(&config.reference_fasta, &config.annotations).context("loading reference store")?;
    let index = build_index(entries, DEFAULT_K).context("indexing reference store")?;
    for w in index.warnings() {
        log::warn!("{w}");
    }
    let library = parse_hmm_library(&read(&config.hmm_library)?)
        .with_context(|| format!("parsing HMM library {}", config.hmm_library.display()))?;
    Ok(ToolPool::new(index, library))
}

fn load_registry(config: &RunConfig) -> Result<Registry> {
    Ok(standard_registry(Arc::new(load_pool(config)?)))
}

fn make_backend(config: &RunConfig) -> Result<Box<dyn LlmBackend>> {
    Ok(match config.backend {
        BackendKind::Remote => Box::new(RemoteBackend::from_env(config.remote()?)?),
        BackendKind::Scripted => {
            let path = config
                .script
                .as_ref()
                .ok_or_else(|| anyhow!("the scripted backend needs a reply script (config key script or --script)"))?;
            Box::new(ScriptedBackend::load(path)?)
        }
    })
}

/// File-name-safe rendering of a case id.
fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn trace_path(run_dir: &Path, id: &str) -> PathBuf {
    run_dir.join("traces").join(format!("{}.json", file_stem(id)))
}

pub fn ask(
    config_path: Option<&Path>,
    args: &RunArgs,
    paradigm: Paradigm,
    question: &str,
    input: &SequenceInput,
    case_id: Option<&str>,
) -> Result<ExitCode> {
    let config = RunConfig::resolve(config_path, args)?;
    let seq = load_sequence(input)?;
    let backend = make_backend(&config)?;
    let registry = load_registry(&config)?;
    let session_id = case_id.map_or_else(
        || format!("ask-{}", chrono::Utc::now().format("%Y%m%dT%H%M%S%.3f")),
        String::from,
    );
    let opts = config.session_options(&session_id, case_id);
    let result = run_paradigm(paradigm, backend.as_ref(), &registry, question, &seq, &opts);
    let path = trace_path(&config.run_dir, &session_id);
    save_result(&path, &result).with_context(|| format!("writing {}", path.display()))?;

    match &result.final_answer {
        Some(a) => emit(&format!("{a}\n"))?,
        None => emit(&format!("(no answer: {})\n", result.stop_reason))?,
    }
    if let Some(e) = &result.error {
        eprintln!("backend error: {e}");
    }
    eprintln!("trace: {}", path.display());
    Ok(if result.stop_reason == StopReason::BackendError {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

pub fn bench(config_path: Option<&Path>, args: &RunArgs, paradigm: Paradigm, cases_path: &Path) -> Result<ExitCode> {
    let config = RunConfig::resolve(config_path, args)?;
    let cases = load_benchmark(cases_path)?;
    let mut stems: Vec<String> = cases.iter().map(|c| file_stem(&c.case_id)).collect();
    stems.sort();
    if stems.windows(2).any(|w| w[0] == w[1]) {
        bail!("case ids collide after conversion to file names");
    }
    let backend = make_backend(&config)?;
    let registry = load_registry(&config)?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let results: Vec<SessionResult> = pool.install(|| {
        cases
            .par_iter()
            .map(|case| {
                let opts = config.session_options(&case.case_id, Some(&case.case_id));
                let r = run_paradigm(
                    paradigm,
                    backend.as_ref(),
                    &registry,
                    &case.question,
                    &case.sequence,
                    &opts,
                );
                log::info!("{}: {} ({} tool calls)", case.case_id, r.stop_reason, r.tool_calls_made);
                r
            })
            .collect()
    });

    for r in &results {
        let id = r.case_id.as_deref().expect("bench sessions carry their case id");
        let path = trace_path(&config.run_dir, id);
        save_result(&path, r).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = evaluate_run(&cases, &results)?;
    let table = render_table(&report);
    let mut report_json = serde_json::to_string_pretty(&report)?;
    report_json.push('\n');
    fs::write(config.run_dir.join("report.json"), report_json)?;
    fs::write(config.run_dir.join("report.txt"), &table)?;
    emit(&table)?;
    eprintln!("run directory: {}", config.run_dir.display());
    Ok(if report.backend_errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn index_build(fasta: &Path, annotations: &Path, out: &Path) -> Result<ExitCode> {
    let entries = load_store(fasta, annotations)?;
    let index = build_index(entries, DEFAULT_K)?;
    let (fasta_text, annotation_text) = render_store(index.entries());
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("reference.fasta"), fasta_text)?;
    fs::write(out.join("annotations.jsonl"), annotation_text)?;
    let manifest = json!({
        "entries": index.len(),
        "total_residues": index.total_residues(),
        "k": index.k(),
        "distinct_kmers": index.distinct_kmers(),
        "warnings": index.warnings(),
    });
    fs::write(
        out.join("store.json"),
        format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;
    for w in index.warnings() {
        eprintln!("warning: {w}");
    }
    emit(&format!(
        "indexed {} entries ({} residues, {} distinct {}-mers) into {}\n",
        index.len(),
        index.total_residues(),
        index.distinct_kmers(),
        index.k(),
        out.display()
    ))?;
    Ok(ExitCode::SUCCESS)
}

/// Runs through the same executor path the agent uses, so the printed
/// payload is what a model would see.
pub fn tools_run(
    config_path: Option<&Path>,
    args: &RunArgs,
    name: &str,
    input: &SequenceInput,
    min_seq_id: Option<f64>,
) -> Result<ExitCode> {
    let config = RunConfig::resolve(config_path, args)?;
    let seq = load_sequence(input)?;
    let registry = load_registry(&config)?;
    let mut arguments = Map::new();
    arguments.insert("sequence_ref".into(), Value::from(QUERY_REF));
    if let Some(t) = min_seq_id {
        arguments.insert("min_seq_id".into(), json!(t));
    }
    let mut ctx = SessionContext::new(&seq, config.limits());
    let response = invoke(
        &registry,
        &ToolCall::new("cli", name, Value::Object(arguments)),
        &mut ctx,
    );
    emit(&format!("{}\n", response.wire()))?;
    Ok(if response.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn tools_list(config_path: Option<&Path>, args: &RunArgs) -> Result<ExitCode> {
    let config = RunConfig::resolve(config_path, args)?;
    let registry = load_registry(&config)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&registry.schemas())?))?;
    Ok(ExitCode::SUCCESS)
}

pub fn trace_show(path: &Path) -> Result<ExitCode> {
    let result = load_result(path)?;
    emit(&render_trace(&result))?;
    Ok(ExitCode::SUCCESS)
}

pub fn synth(
    config_path: Option<&Path>,
    args: &RunArgs,
    cases_path: &Path,
    out: Option<&Path>,
    fill: bool,
) -> Result<ExitCode> {
    let config = RunConfig::resolve(config_path, args)?;
    let cases = load_benchmark(cases_path)?;
    let backend = if fill { Some(make_backend(&config)?) } else { None };
    let decoding = config.session_options("synth", None).decoding;

    let mut lines = String::new();
    for case in &cases {
        let prompt = synth_r1_prompt(case);
        let completion = match &backend {
            Some(b) => {
                let messages = [ChatMessage::user(prompt.clone())];
                let request = ChatRequest {
                    messages: &messages,
                    tools: &[],
                    decoding,
                    case_id: Some(&case.case_id),
                };
                let reply = b.complete(&request).with_context(|| format!("case {}", case.case_id))?;
                Some(reply.content)
            }
            None => None,
        };
        let record = SynthRecord {
            case_id: case.case_id.clone(),
            prompt,
            completion,
        };
        lines.push_str(&serde_json::to_string(&record)?);
        lines.push('\n');
    }
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} prompt(s) to {}", cases.len(), path.display());
        }
        None => emit(&lines)?,
    }
    Ok(ExitCode::SUCCESS)
}
