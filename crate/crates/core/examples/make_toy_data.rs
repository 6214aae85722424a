//! Regenerate the bundled toy data under `data/`:
//!
//! * `reference/reference.fasta` + `reference/annotations.jsonl`: the MscL
//!   entry Q4L656, two synthetic MscL variants and random decoys;
//! * `pfam_toy.hmm`: an MscL profile built around the Q4L656 sequence plus
//!   decoy families built around random consensus strings;
//! * `demo/`: a small benchmark, the MscL query as FASTA, and scripted replies
//!   for each paradigm.
//!
//! Everything is seeded, so re-running reproduces the same bytes.
//!
//! ```text
//! cargo run -p protagent-core --example make_toy_data -- data
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use protagent_core::seq::{validate_sequence, write_fasta, FastaRecord, Sequence, AMINO_ALPHABET};
use protagent_core::tools::domains::hmm::{DD, DM, II, IM, MD, MI, MM};
use protagent_core::tools::domains::{write_hmm_library, ProfileHmm};
use protagent_core::tools::homology::{render_store, AnnotationRecord, ReferenceEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const MSCL: &str = "MLKEFKEFALKGNVLDLAIAVVMGAAFNKIVTSLVTYIIMPLIGKIFGSVDFAKDWEFWGIKYGLFIQSIIDFIIVAIALFIFVKIANTLVKKEEPEEEIEENTVLLTEIRDLLRAK";

/// Typical amino-acid frequencies in alphabet order (ACDEFGHIKLMNPQRSTVWY).
const BACKGROUND: [f64; 20] = [
    0.0787945, 0.0151600, 0.0535222, 0.0668298, 0.0397062, 0.0695071, 0.0229198, 0.0590092, 0.0594422, 0.0963728,
    0.0237718, 0.0414386, 0.0482904, 0.0395639, 0.0540978, 0.0683364, 0.0540687, 0.0673417, 0.0114135, 0.0304133,
];

fn background() -> [f64; 20] {
    let total: f64 = BACKGROUND.iter().sum();
    BACKGROUND.map(|p| p / total)
}

fn nll(p: f64) -> f64 {
    if p <= 0.0 {
        f64::INFINITY
    } else {
        -p.ln()
    }
}

fn random_residues(rng: &mut ChaCha8Rng, len: usize) -> String {
    let bg = background();
    (0..len)
        .map(|_| {
            let mut u: f64 = rng.gen();
            for (i, p) in bg.iter().enumerate() {
                if u < *p {
                    return AMINO_ALPHABET[i] as char;
                }
                u -= p;
            }
            'L'
        })
        .collect()
}

/// Substitute roughly `rate` of the positions with random residues.
fn mutate(rng: &mut ChaCha8Rng, seq: &str, rate: f64) -> String {
    seq.chars()
        .map(|c| {
            if rng.gen_bool(rate) {
                AMINO_ALPHABET[rng.gen_range(0..20)] as char
            } else {
                c
            }
        })
        .collect()
}

/// Profile whose match states emit the consensus residue with probability
/// `weight` plus the background share of the remainder.
fn profile_from_consensus(name: &str, accession: &str, description: &str, consensus: &str, weight: f64) -> ProfileHmm {
    let bg = background();
    let m = consensus.len();
    let match_emissions = consensus
        .bytes()
        .map(|c| {
            let ci = AMINO_ALPHABET
                .iter()
                .position(|a| *a == c)
                .expect("consensus uses the alphabet");
            let mut row = [0.0; 20];
            for (i, slot) in row.iter_mut().enumerate() {
                let p = (1.0 - weight) * bg[i] + if i == ci { weight } else { 0.0 };
                *slot = nll(p);
            }
            row
        })
        .collect();
    let insert = bg.map(nll);
    let mut transitions = Vec::with_capacity(m + 1);
    let mut begin = [0.0; 7];
    begin[MM] = nll(0.98);
    begin[MI] = nll(0.01);
    begin[MD] = nll(0.01);
    begin[IM] = nll(0.5);
    begin[II] = nll(0.5);
    begin[DM] = 0.0;
    begin[DD] = f64::INFINITY;
    transitions.push(begin);
    for k in 1..=m {
        let mut t = [0.0; 7];
        if k < m {
            t[MM] = nll(0.96);
            t[MI] = nll(0.02);
            t[MD] = nll(0.02);
            t[IM] = nll(0.6);
            t[II] = nll(0.4);
            t[DM] = nll(0.7);
            t[DD] = nll(0.3);
        } else {
            t[MM] = 0.0;
            t[MI] = f64::INFINITY;
            t[MD] = f64::INFINITY;
            t[IM] = 0.0;
            t[II] = f64::INFINITY;
            t[DM] = 0.0;
            t[DD] = f64::INFINITY;
        }
        transitions.push(t);
    }
    ProfileHmm {
        name: name.into(),
        accession: accession.into(),
        description: description.into(),
        model_length: m,
        match_emissions,
        insert_emissions: vec![insert; m],
        transitions,
        background: bg,
        compo: None,
    }
}

fn hmm_library(rng: &mut ChaCha8Rng) -> Vec<ProfileHmm> {
    let mut lib = vec![profile_from_consensus(
        "MscL",
        "PF01741.24",
        "Large-conductance mechanosensitive channel, MscL",
        MSCL,
        0.5,
    )];
    let decoys = [
        (
            "ToyHelixA",
            "TF90001.1",
            "Synthetic decoy family A (hydrophobic helix)",
            42,
        ),
        ("ToyCoilB", "TF90002.1", "Synthetic decoy family B (charged coil)", 58),
        ("ToyRepeatC", "TF90003.1", "Synthetic decoy family C (short repeat)", 24),
        ("ToyGlobD", "TF90004.1", "Synthetic decoy family D (globular)", 96),
    ];
    for (name, acc, desc, len) in decoys {
        let consensus = random_residues(rng, len);
        lib.push(profile_from_consensus(name, acc, desc, &consensus, 0.45));
    }
    lib
}

fn strings(lines: &[&str]) -> Vec<String> {
    lines.iter().map(|s| s.to_string()).collect()
}

fn mscl_annotation() -> AnnotationRecord {
    AnnotationRecord {
        accessions: vec!["Q4L656".into()],
        protein_name: "Large-conductance mechanosensitive channel {ECO:0000255|HAMAP-Rule:MF_00115}".into(),
        function: strings(&[
            "Channel that opens in response to stretch forces in the",
            "membrane lipid bilayer. May participate in the regulation of osmotic",
            "pressure changes within the cell. {ECO:0000255|HAMAP-Rule:MF_00115}.",
        ]),
        catalytic_activity: Vec::new(),
        ec: Vec::new(),
        cofactor: Vec::new(),
        subcellular_location: strings(&[
            "Cell membrane {ECO:0000255|HAMAP-Rule:MF_00115};",
            "Multi-pass membrane protein {ECO:0000255|HAMAP-Rule:MF_00115}.",
        ]),
        go: strings(&[
            "DR   GO; GO:0005886; C:plasma membrane; IEA:UniProtKB-SubCell.",
            "DR   GO; GO:0008381; F:mechanosensitive monoatomic ion channel activity; IEA:UniProtKB-UniRule.",
        ]),
    }
}

fn entry(accession: &str, residues: &str, annotation: AnnotationRecord) -> ReferenceEntry {
    ReferenceEntry {
        accession: accession.into(),
        sequence: validate_sequence(accession, residues).expect("generated residues are valid"),
        annotation,
    }
}

/// Annotation flavours handed out to decoys in turn.
fn decoy_annotation(i: usize, accession: &str) -> AnnotationRecord {
    let mut a = AnnotationRecord::named(accession, "");
    match i % 4 {
        0 => a.protein_name = format!("Uncharacterized protein {accession}"),
        1 => {
            a.protein_name = "Putative hydrolase (synthetic)".into();
            a.function = strings(&["Predicted to hydrolyse ester bonds (synthetic record)."]);
            a.catalytic_activity = strings(&["a carboxylic ester + H2O = an alcohol + a carboxylate + H(+)"]);
            a.ec = strings(&["3.1.1.1"]);
            a.subcellular_location = strings(&["Cytoplasm."]);
            a.go = strings(&["DR   GO; GO:0016787; F:hydrolase activity; IEA:InterPro."]);
        }
        2 => {
            a.protein_name = "Putative zinc-binding protein (synthetic)".into();
            a.cofactor = strings(&["Zn(2+)"]);
            a.go = strings(&["DR   GO; GO:0008270; F:zinc ion binding; IEA:InterPro."]);
        }
        _ => {
            a.protein_name = "Putative transport protein (synthetic)".into();
            a.subcellular_location = strings(&["Membrane; Multi-pass membrane protein."]);
        }
    }
    a
}

fn reference_entries(rng: &mut ChaCha8Rng) -> (Vec<ReferenceEntry>, String, String) {
    let close = mutate(rng, MSCL, 0.25);
    let far = mutate(rng, MSCL, 0.6);
    let variant = |acc: &str, how: &str| {
        let mut a = AnnotationRecord::named(
            acc,
            &format!("Large-conductance mechanosensitive channel ({how} synthetic variant)"),
        );
        a.function = strings(&["Channel that opens in response to stretch forces in the membrane lipid bilayer."]);
        a.subcellular_location = strings(&["Cell membrane; Multi-pass membrane protein."]);
        a
    };
    let mut entries = vec![
        entry("Q4L656", MSCL, mscl_annotation()),
        entry("SYN0001", &close, variant("SYN0001", "close")),
        entry("SYN0002", &far, variant("SYN0002", "distant")),
    ];
    for i in 0..60 {
        let acc = format!("DEC{:04}", i + 1);
        let len = rng.gen_range(60..=420);
        let residues = random_residues(rng, len);
        entries.push(entry(&acc, &residues, decoy_annotation(i, &acc)));
    }
    (entries, close, far)
}

fn jsonl(values: &[serde_json::Value]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

const MSCL_ANSWER: &str = "This protein is a **large-conductance mechanosensitive channel (MscL)**. \
It opens in response to stretch forces in the membrane lipid bilayer and likely helps relieve osmotic \
pressure changes within the cell. It sits in the cell membrane as a multi-pass membrane protein with \
two predicted transmembrane helices, and carries a single MscL domain (PF01741) covering nearly the whole chain.";

fn demo_cases(close: &str, decoy: &Sequence) -> Vec<serde_json::Value> {
    vec![
        json!({
            "case_id": "mscl_function",
            "task": "general_function",
            "question": "Can you give a brief overview of the function of this protein?",
            "sequence": MSCL,
            "reference_answer": "This protein is a large-conductance mechanosensitive channel that opens in response to stretch forces in the membrane lipid bilayer and may take part in regulating osmotic pressure changes within the cell."
        }),
        json!({
            "case_id": "variant_description",
            "task": "description",
            "question": "Describe this protein, including where in the cell it is found.",
            "sequence": close,
            "reference_answer": "A mechanosensitive channel of large conductance located in the cell membrane as a multi-pass membrane protein."
        }),
        json!({
            "case_id": "mscl_domain",
            "task": "domain_motif",
            "question": "Which domains or motifs does this sequence contain?",
            "sequence": MSCL,
            "reference_answer": "The sequence contains a single MscL domain spanning almost the entire protein, with two transmembrane helices."
        }),
        json!({
            "case_id": "decoy_catalysis",
            "task": "catalytic_activity",
            "question": "What reaction, if any, does this protein catalyze?",
            "sequence": decoy.residues(),
            "reference_answer": "No catalytic activity can be assigned; the protein has no detectable homologs or known domains."
        }),
    ]
}

fn call(name: &str) -> serde_json::Value {
    json!({"name": name, "arguments": {"sequence_ref": "query"}})
}

fn tool_agent_script() -> Vec<serde_json::Value> {
    let m = |turn: usize, content: &str, calls: Vec<serde_json::Value>| json!({"case_id": "mscl_function", "turn": turn, "content": content, "tool_calls": calls});
    vec![
        m(0, "Hypotheses: a 117-residue chain rich in Ile/Leu/Val could be a small membrane protein, perhaps a channel, or a soluble protein with a hydrophobic core. Open question: is it membrane-embedded at all? Calling seq_basic_props to get length, composition and the longest hydrophobic run; a long run would favour the membrane hypothesis.", vec![call("seq_basic_props")]),
        m(1, "A hydrophobic run of 12 is suggestive but below a clear transmembrane span, so the membrane question is still open. The identity of the protein is the larger uncertainty. Calling mmseqs2_besthit_uniprot: a close annotated homolog would name the family directly.", vec![call("mmseqs2_besthit_uniprot")]),
        m(2, "The best hit is Q4L656, the large-conductance mechanosensitive channel, at full identity over the whole length. If that is right, there should be two membrane-spanning helices. Calling tmbed_predict to check the topology independently of the homolog.", vec![call("tmbed_predict")]),
        m(3, "Transmembrane segments are predicted, matching a multi-pass membrane protein. Last check: calling pfam_hmmscan to confirm the domain family and its coverage, which would tie homology and topology together.", vec![call("pfam_hmmscan")]),
        json!({"case_id": "mscl_function", "turn": 4, "content": format!(
            "Summary of the evidence:\n1. Composition is hydrophobic, with a 12-residue hydrophobic stretch.\n2. The closest annotated homolog is Q4L656 at 100% identity, a mechanosensitive channel located in the cell membrane.\n3. Topology prediction finds membrane-spanning helices.\n4. The MscL family domain is selected with a very small E-value and near-complete coverage.\n\n<answer>{MSCL_ANSWER}</answer>"
        )}),
        // Other cases answer straight away; the tool-agent paradigm does not
        // force tool use.
        json!({"turn": 0, "content": "<answer>A membrane protein; the sequence alone is not enough to say more.</answer>"}),
    ]
}

fn single_round_script(paradigm: &str) -> Vec<serde_json::Value> {
    let intro = if paradigm == "rag" {
        "Reading the four tool outputs above."
    } else {
        "Reasoning from the sequence alone."
    };
    let answers = [
        ("mscl_function", MSCL_ANSWER),
        (
            "variant_description",
            "A large-conductance mechanosensitive channel in the cell membrane, a multi-pass membrane protein.",
        ),
        (
            "mscl_domain",
            "One MscL domain covering nearly all of the protein, plus two transmembrane helices.",
        ),
        (
            "decoy_catalysis",
            "No catalytic activity can be assigned from the available evidence.",
        ),
    ];
    answers
        .iter()
        .map(|(case, answer)| json!({"case_id": case, "turn": 0, "content": format!("{intro}\n<answer>{answer}</answer>")}))
        .collect()
}

fn write(root: &Path, rel: &str, text: &str) {
    let path = root.join(rel);
    fs::create_dir_all(path.parent().expect("relative paths have a parent")).expect("create data directory");
    fs::write(&path, text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let root: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data".into()).into();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d73_634c);

    let lib = hmm_library(&mut rng);
    write(&root, "pfam_toy.hmm", &write_hmm_library(&lib));

    let (entries, close, _far) = reference_entries(&mut rng);
    let (fasta, annotations) = render_store(&entries);
    write(&root, "reference/reference.fasta", &fasta);
    write(&root, "reference/annotations.jsonl", &annotations);

    let mscl = validate_sequence("sp|Q4L656|MSCL_STAA8", MSCL).expect("valid");
    let record = FastaRecord {
        header: "sp|Q4L656|MSCL_STAA8 Large-conductance mechanosensitive channel".into(),
        sequence: mscl,
    };
    write(&root, "demo/mscl.fasta", &write_fasta(&[record], 60));

    let decoy = validate_sequence("decoy", &random_residues(&mut rng, 150)).expect("valid");
    write(&root, "demo/cases.jsonl", &jsonl(&demo_cases(&close, &decoy)));
    write(&root, "demo/replies_tool_agent.jsonl", &jsonl(&tool_agent_script()));
    write(&root, "demo/replies_rag.jsonl", &jsonl(&single_round_script("rag")));
    write(
        &root,
        "demo/replies_direct.jsonl",
        &jsonl(&single_round_script("direct")),
    );
}
