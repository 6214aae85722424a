//! Prompt templates of the three inference paradigms and the builders that
//! instantiate them.

use crate::seq::Sequence;

pub const DIRECT_TEMPLATE: &str = "\
[ROLE]
You are a professional bioinformatics assistant.
[TASK]
Please first provide detailed reasoning and analysis.
[CONSTRAINTS]
Then give a concise final answer wrapped strictly inside <answer></answer> tags.";

pub const RAG_TEMPLATE: &str = "\
[ROLE]
You are an expert protein analysis assistant.
[TASK]
Analyze the given protein sequence. You are provided with external tool outputs (computed properties, homology search, domain scan, and topology prediction).
Use these tool results as evidence to reasoning and answer the question.
[CONSTRAINTS]
- Do NOT request additional tools or external calls. Everything you need is already included below.
- The final answer MUST be wrapped in <answer>...</answer>.";

pub const TOOL_AGENT_TEMPLATE: &str = "\
[ROLE]
You are an expert protein analysis agent.
[TASK]
Your goal is to analyze the protein sequence and produce a biologically meaningful interpretation.
You should reason step-by-step, form hypotheses, and use tools only when they help reduce uncertainty.
[REASONING REQUIREMENTS]
Before calling tools, you MUST:
- propose hypotheses about the protein
- explain which uncertainties still remain
For EVERY tool call, you MUST:
- explicitly explain WHY this tool is needed
- describe WHAT evidence you expect it to provide
After each tool result, you MUST:
- summarize what new evidence was obtained
- update or revise your hypothesis
- decide whether additional tools are needed
[TOOLS]
You may call the following tools through function calling:
- seq_basic_props: basic physicochemical properties
- pfam_hmmscan: domain and family inference
- mmseqs2_besthit_uniprot: homolog search and functional annotation
- tmbed_predict: transmembrane and topology prediction
- In addition to the tools listed, the assistant is allowed to compute any other relevant properties that can be derived using Python code.
- Prefer {\"sequence_ref\": \"query\"} instead of pasting long sequences.
[OUTPUT]
When finished, wrap the final answer in <answer>...</answer>.";

/// Heading that opens the evidence section of a RAG user message.
pub const EVIDENCE_HEADER: &str = "[TOOL OUTPUTS]";

/// Question followed by the sequence block.
pub fn question_block(question: &str, seq: &Sequence) -> String {
    format!(
        "{}\nProtein sequence (id={}):\n```{}```",
        question.trim_end(),
        seq.id(),
        seq.residues()
    )
}

pub fn direct_user_message(question: &str, seq: &Sequence) -> String {
    question_block(question, seq)
}

/// One `### tool_name` section per evidence payload, in the given order.
pub fn rag_user_message(question: &str, seq: &Sequence, evidence: &[(&str, String)]) -> String {
    let mut out = question_block(question, seq);
    out.push('\n');
    out.push_str(EVIDENCE_HEADER);
    for (name, payload) in evidence {
        out.push_str(&format!("\n### {name}\n{payload}"));
    }
    out
}

/// Split a RAG user message back into its `(tool_name, payload)` sections.
pub fn parse_evidence_blocks(message: &str) -> Vec<(String, String)> {
    let Some((_, evidence)) = message.split_once(EVIDENCE_HEADER) else {
        return Vec::new();
    };
    evidence
        .split("\n### ")
        .skip(1)
        .filter_map(|block| {
            let (name, payload) = block.split_once('\n')?;
            Some((name.to_string(), payload.to_string()))
        })
        .collect()
}

pub fn tool_agent_user_message(question: &str, seq: &Sequence) -> String {
    format!("{TOOL_AGENT_TEMPLATE}\n{}", question_block(question, seq))
}
