//! Prompts for synthesizing `<think>` reasoning traces that connect a QA
//! case's input to its reference answer.

use serde::{Deserialize, Serialize};

use super::bench::QaCase;

pub const SYNTH_TEMPLATE: &str = "\
You are an expert AI in bioinformatics and computational biology. Your task is to generate a detailed, step-by-step intermediate reasoning process that connects the given input to the given output. The reasoning process should explain how one might logically derive the output from the input.

Input:
question: \"{question}\"
protein sequence: \"{sequence}\"

Output:
answer: \"{answer}\"

Your response should consist solely of the reasoning process enclosed in <think> ... </think>.";

/// Fill the three slots verbatim. Escaping, where needed, belongs to the
/// container the prompt is written into (e.g. JSON lines).
pub fn synth_r1_prompt(case: &QaCase) -> String {
    // Slots are located in the template once, so slot-like text inside a
    // filled value is never substituted again.
    let mut out = String::with_capacity(SYNTH_TEMPLATE.len() + case.reference_answer.len() + case.sequence.len());
    let mut rest = SYNTH_TEMPLATE;
    for (slot, value) in [
        ("{question}", case.question.as_str()),
        ("{sequence}", case.sequence.residues()),
        ("{answer}", case.reference_answer.as_str()),
    ] {
        let at = rest.find(slot).expect("template has every slot once");
        out.push_str(&rest[..at]);
        out.push_str(value);
        rest = &rest[at + slot.len()..];
    }
    out.push_str(rest);
    out
}

/// One line of a synthesis output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRecord {
    pub case_id: String,
    pub prompt: String,
    /// Backend completion, when the prompts were filled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<String>,
}
