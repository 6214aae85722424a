//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line with its timing, then exits nonzero if any
//! criterion failed.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use chrono::DateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use protagent_core::agent::prompts::{parse_evidence_blocks, EVIDENCE_HEADER};
use protagent_core::agent::{
    replay_trace, run_direct, run_rag, run_tool_agent, trace_json, BackendError, ChatMessage, ChatRequest, LlmBackend,
    Role, ScriptedBackend, SessionOptions, StopReason,
};
use protagent_core::eval::load_benchmark;
use protagent_core::eval::rouge::{
    lcs_len, rouge1_recall, rouge1_recall_tokens, rouge_l_recall, rouge_l_recall_tokens,
};
use protagent_core::executor::{standard_registry, ErrorKind, Registry, ToolCall, ToolPool};
use protagent_core::seq::{validate_sequence, Sequence, AMINO_ALPHABET};
use protagent_core::tools::domains::hmm::{Emissions, Transitions, DD, DM, II, IM, MD, MI, MM};
use protagent_core::tools::domains::{
    parse_hmm_library, select_domains, viterbi_score, write_hmm_library, DomainHit, ProfileHmm,
};
use protagent_core::tools::homology::{
    build_index, load_store, search_best_hit, smith_waterman, AnnotationRecord, ReferenceEntry, ReferenceIndex,
    Scoring, SearchParams, DEFAULT_K,
};
use protagent_core::tools::props::compute_basic_props;
use protagent_core::tools::topology::{predict_topology, TopologyParams};
use protagent_core::tools::EVIDENCE_TOOLS;
use protagent_core::wire::to_wire_string;

const MSCL: &str = "MLKEFKEFALKGNVLDLAIAVVMGAAFNKIVTSLVTYIIMPLIGKIFGSVDFAKDWEFWGIKYGLFIQSIIDFIIVAIALFIFVKIANTLVKKEEPEEEIEENTVLLTEIRDLLRAK";

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn seq(id: &str, residues: &str) -> Sequence {
    validate_sequence(id, residues).expect("valid test sequence")
}

fn ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

fn bundled_pool() -> ToolPool {
    let entries =
        load_store(&data("reference/reference.fasta"), &data("reference/annotations.jsonl")).expect("bundled store");
    let index = build_index(entries, DEFAULT_K).expect("index");
    let library = parse_hmm_library(&std::fs::read_to_string(data("pfam_toy.hmm")).expect("hmm file")).expect("hmm");
    ToolPool::new(index, library)
}

fn random_residues(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| AMINO_ALPHABET[rng.gen_range(0..20)] as char).collect()
}

// ---------------------------------------------------------------- tool_props

fn tool_props() -> Check {
    let q = seq("query", MSCL);
    let p = compute_basic_props(&q).map_err(|e| e.to_string())?;
    ensure!(p.length == 117, "length {}", p.length);
    ensure!(
        p.hydrophobic_run_max == 12,
        "hydrophobic_run_max {}",
        p.hydrophobic_run_max
    );
    ensure!(!p.heuristics.looks_membrane_like, "looks_membrane_like is true");
    ensure!(
        !p.heuristics.looks_low_complexity_like,
        "looks_low_complexity_like is true"
    );
    let deviation = p.low_complexity_index_0to1 - 0.1171;
    ensure!(
        deviation.abs() <= 0.05,
        "low_complexity_index {} deviates by {deviation}",
        p.low_complexity_index_0to1
    );

    let mut times: Vec<Duration> = (0..101)
        .map(|_| {
            let t = Instant::now();
            let _ = std::hint::black_box(compute_basic_props(std::hint::black_box(&q)));
            t.elapsed()
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    ensure!(median < Duration::from_millis(1), "median runtime {}", ms(median));
    Ok(format!(
        "length 117, run 12, flags false/false, LCI {:.4} (deviation {:+.4}), median {} over 101 calls",
        p.low_complexity_index_0to1,
        deviation,
        ms(median)
    ))
}

// ------------------------------------------------------------- tool_homology

/// Best local score over every substring pair and every affine-gap
/// alignment path between them.
fn brute_force_score(a: &[u8], b: &[u8], s: &Scoring) -> i32 {
    #[derive(Clone, Copy, PartialEq)]
    enum Prev {
        Start,
        Match,
        GapA,
        GapB,
    }
    fn walk(a: &[u8], b: &[u8], prev: Prev, acc: i32, s: &Scoring, best: &mut i32) {
        if a.is_empty() && b.is_empty() {
            *best = (*best).max(acc);
            return;
        }
        if !a.is_empty() && !b.is_empty() {
            walk(
                &a[1..],
                &b[1..],
                Prev::Match,
                acc + s.matrix.score_residues(a[0], b[0]),
                s,
                best,
            );
        }
        if !a.is_empty() {
            let c = if prev == Prev::GapB {
                s.gaps.extend
            } else {
                s.gaps.open + s.gaps.extend
            };
            walk(&a[1..], b, Prev::GapB, acc - c, s, best);
        }
        if !b.is_empty() {
            let c = if prev == Prev::GapA {
                s.gaps.extend
            } else {
                s.gaps.open + s.gaps.extend
            };
            walk(a, &b[1..], Prev::GapA, acc - c, s, best);
        }
    }
    let mut best = 0;
    for i in 0..a.len() {
        for i2 in i + 1..=a.len() {
            for j in 0..b.len() {
                for j2 in j + 1..=b.len() {
                    walk(&a[i..i2], &b[j..j2], Prev::Start, 0, s, &mut best);
                }
            }
        }
    }
    best
}

fn mutate(rng: &mut ChaCha8Rng, s: &str, rate: f64) -> String {
    s.chars()
        .map(|c| {
            if rng.gen_bool(rate) {
                AMINO_ALPHABET[rng.gen_range(0..20)] as char
            } else {
                c
            }
        })
        .collect()
}

/// Q4L656 plus 999 entries: MscL variants at several distances and random
/// decoys.
fn thousand_entry_store(rng: &mut ChaCha8Rng) -> Vec<ReferenceEntry> {
    let mut entries = vec![ReferenceEntry {
        accession: "Q4L656".into(),
        sequence: seq("Q4L656", MSCL),
        annotation: AnnotationRecord::named("Q4L656", "Large-conductance mechanosensitive channel"),
    }];
    for i in 1..1000 {
        let acc = format!("R{i:05}");
        let residues = if i % 50 == 0 {
            mutate(rng, MSCL, 0.1 + 0.4 * (i as f64 / 1000.0))
        } else {
            let len = rng.gen_range(50..=500);
            random_residues(rng, len)
        };
        entries.push(ReferenceEntry {
            sequence: seq(&acc, &residues),
            annotation: AnnotationRecord::named(&acc, "synthetic"),
            accession: acc,
        });
    }
    entries
}

fn best_hits_json(index: &ReferenceIndex, queries: &[Sequence]) -> Vec<String> {
    queries
        .iter()
        .map(|q| serde_json::to_string(&search_best_hit(index, q, &SearchParams::default()).expect("search")).unwrap())
        .collect()
}

fn tool_homology() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let scoring = Scoring::default();
    for i in 0..200 {
        let la = rng.gen_range(1..=6);
        let lb = rng.gen_range(1..=6);
        let a = random_residues(&mut rng, la);
        let b = random_residues(&mut rng, lb);
        let got = smith_waterman(&seq("a", &a), &seq("b", &b), &scoring).map_or(0, |x| x.score);
        let want = brute_force_score(a.as_bytes(), b.as_bytes(), &scoring);
        ensure!(got == want, "pair {i} {a} vs {b}: smith_waterman {got}, oracle {want}");
    }

    let entries = thousand_entry_store(&mut rng);
    let query = seq("query", MSCL);
    let t = Instant::now();
    let index = build_index(entries, DEFAULT_K).map_err(|e| e.to_string())?;
    let hit = search_best_hit(&index, &query, &SearchParams::default()).map_err(|e| e.to_string())?;
    let runtime = t.elapsed();
    let hit = hit.ok_or("self-query found no hit")?;
    ensure!(hit.target == "Q4L656", "best target {}", hit.target);
    ensure!(
        hit.pident == 100.0 && hit.alnlen == 117,
        "pident {} alnlen {}",
        hit.pident,
        hit.alnlen
    );
    ensure!(runtime < Duration::from_secs(5), "index + search took {}", ms(runtime));

    let mut queries = vec![query.clone()];
    for _ in 0..4 {
        queries.push(seq("query", &mutate(&mut rng, MSCL, 0.3)));
    }
    let reference = best_hits_json(&index, &queries);
    for run in 0..10 {
        ensure!(best_hits_json(&index, &queries) == reference, "run {run} differs");
    }
    for workers in [1, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| e.to_string())?;
        let got = pool.install(|| best_hits_json(&index, &queries));
        ensure!(got == reference, "{workers} worker(s) give a different BestHit");
    }
    Ok(format!(
        "200/200 oracle pairs; self-hit Q4L656 pident 100.0 alnlen 117; 10 runs + 1/8 workers byte-identical; \
         1000-entry index+search {}",
        ms(runtime)
    ))
}

// -------------------------------------------------------------- tool_domains

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

fn nll(p: &[f64]) -> Emissions {
    let mut out = [0.0; 20];
    for (o, v) in out.iter_mut().zip(p) {
        *o = -v.ln();
    }
    out
}

fn random_hmm(rng: &mut ChaCha8Rng, m: usize) -> ProfileHmm {
    let bg: Emissions = random_dist(rng, 20).try_into().unwrap();
    let transitions: Vec<Transitions> = (0..=m)
        .map(|_| {
            let mx = random_dist(rng, 3);
            let ix = random_dist(rng, 2);
            let dx = random_dist(rng, 2);
            [mx[0], mx[1], mx[2], ix[0], ix[1], dx[0], dx[1]].map(|p| -p.ln())
        })
        .collect();
    ProfileHmm {
        name: "rand".into(),
        accession: "PF99999.1".into(),
        description: String::new(),
        model_length: m,
        match_emissions: (0..m).map(|_| nll(&random_dist(rng, 20))).collect(),
        insert_emissions: (0..m).map(|_| nll(&random_dist(rng, 20))).collect(),
        transitions,
        background: bg,
        compo: None,
    }
}

/// log2 odds of the best path allowed by the local model (entry 1/M into
/// any match state, free exit from any match state), found by walking every
/// path with plain probabilities. `None` for residue X uses odds 1.
fn path_enumeration_bits(h: &ProfileHmm, x: &[Option<usize>]) -> f64 {
    #[derive(Clone, Copy)]
    enum S {
        M(usize),
        I(usize),
        D(usize),
    }
    let emit = |row: &Emissions, a: Option<usize>| a.map_or(1.0, |a| (-row[a]).exp() / h.background[a]);
    let t = |k: usize, c: usize| (-h.transitions[k][c]).exp();
    let m = h.model_length;
    let mut best = 0.0f64;
    let mut stack: Vec<(S, usize, f64)> = Vec::new();
    for (start, &a) in x.iter().enumerate() {
        for k in 1..=m {
            stack.push((S::M(k), start + 1, emit(&h.match_emissions[k - 1], a) / m as f64));
        }
    }
    while let Some((s, next, odds)) = stack.pop() {
        match s {
            S::M(k) => {
                best = best.max(odds);
                if k < m {
                    if next < x.len() {
                        stack.push((
                            S::M(k + 1),
                            next + 1,
                            odds * t(k, MM) * emit(&h.match_emissions[k], x[next]),
                        ));
                        stack.push((
                            S::I(k),
                            next + 1,
                            odds * t(k, MI) * emit(&h.insert_emissions[k - 1], x[next]),
                        ));
                    }
                    stack.push((S::D(k + 1), next, odds * t(k, MD)));
                }
            }
            S::I(k) => {
                if next < x.len() {
                    stack.push((
                        S::I(k),
                        next + 1,
                        odds * t(k, II) * emit(&h.insert_emissions[k - 1], x[next]),
                    ));
                    stack.push((
                        S::M(k + 1),
                        next + 1,
                        odds * t(k, IM) * emit(&h.match_emissions[k], x[next]),
                    ));
                }
            }
            S::D(k) => {
                if k < m {
                    stack.push((S::D(k + 1), next, odds * t(k, DD)));
                    if next < x.len() {
                        stack.push((
                            S::M(k + 1),
                            next + 1,
                            odds * t(k, DM) * emit(&h.match_emissions[k], x[next]),
                        ));
                    }
                }
            }
        }
    }
    best.log2()
}

fn appendix_hit(id: &str, acc: &str, evalue: f64, score: f64, ali: (usize, usize), hmm: (usize, usize)) -> DomainHit {
    DomainHit {
        pfam_id: id.into(),
        pfam_acc: acc.into(),
        query: "query".into(),
        evalue,
        score,
        hmm_from: hmm.0,
        hmm_to: hmm.1,
        ali_from: ali.0,
        ali_to: ali.1,
        coverage_query: (ali.1 - ali.0 + 1) as f64 / 117.0,
        desc: String::new(),
    }
}

fn tool_domains() -> Check {
    let text = std::fs::read_to_string(data("pfam_toy.hmm")).map_err(|e| e.to_string())?;
    let first = parse_hmm_library(&text).map_err(|e| e.to_string())?;
    let second = parse_hmm_library(&write_hmm_library(&first)).map_err(|e| e.to_string())?;
    ensure!(first == second, "parse -> write -> parse changed the library");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let m = rng.gen_range(1..=3);
        let h = random_hmm(&mut rng, m);
        let len = rng.gen_range(1..=4);
        let x: Vec<Option<usize>> = (0..len)
            .map(|_| (!rng.gen_bool(0.1)).then(|| rng.gen_range(0..20)))
            .collect();
        let residues: String = x.iter().map(|a| a.map_or('X', |a| AMINO_ALPHABET[a] as char)).collect();
        let oracle = path_enumeration_bits(&h, &x);
        match viterbi_score(&h, &seq("q", &residues)) {
            Some(hit) => {
                let diff = (hit.bits - oracle).abs();
                worst = worst.max(diff);
                ensure!(diff <= 1e-9, "instance {i}: viterbi {} vs oracle {oracle}", hit.bits);
            }
            None => ensure!(oracle <= 1e-9, "instance {i}: no hit but oracle finds {oracle} bits"),
        }
    }

    let hits = [
        appendix_hit("MscL", "PF01741.24", 8e-39, 133.3, (1, 115), (1, 124)),
        appendix_hit("Anoctamin", "PF04547.18", 0.045, 13.1, (23, 102), (129, 199)),
        appendix_hit("Mim2", "PF19117.6", 0.047, 13.8, (32, 48), (15, 31)),
        appendix_hit("UPF0239", "PF06783.17", 0.16, 12.8, (61, 99), (21, 60)),
        appendix_hit("DUF3917", "PF13055.11", 0.32, 12.0, (33, 84), (21, 68)),
    ];
    let chosen = select_domains(&hits, 0.01);
    let selected: Vec<&str> = chosen.iter().map(|h| h.pfam_id.as_str()).collect();
    ensure!(selected == ["MscL"], "selected {selected:?}");
    Ok(format!(
        "round-trip identical ({} profiles); 100/100 Viterbi instances (max |diff| {worst:.1e} bits); selected {{MscL}}",
        first.len()
    ))
}

// ------------------------------------------------------------- tool_topology

fn tool_topology() -> Check {
    let params = TopologyParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let len = rng.gen_range(10..=600);
        let s = seq("r", &random_residues(&mut rng, len));
        let p = predict_topology(&s, &params).map_err(|e| format!("sequence {i}: {e}"))?;
        let line = p.state_line();
        ensure!(
            line.len() == len,
            "sequence {i}: state line {} for length {len}",
            line.len()
        );
        ensure!(
            line.bytes().all(|c| matches!(c, b'H' | b'h' | b'.')),
            "sequence {i}: unexpected state letter"
        );
        let h = line.bytes().filter(|&c| c == b'H').count();
        ensure!(
            p.tm_signal_letter_hits == h,
            "sequence {i}: hits {} vs {h} 'H'",
            p.tm_signal_letter_hits
        );
        ensure!(
            p.has_tm_signal_heuristic == (h >= params.heuristic_min_hits),
            "sequence {i}: heuristic inconsistent with {h} hits"
        );
    }
    let p = predict_topology(&seq("query", MSCL), &params).map_err(|e| e.to_string())?;
    let h = p.state_line().bytes().filter(|&c| c == b'H').count();
    ensure!(
        p.has_tm_signal_heuristic && h >= 15,
        "MscL: heuristic {} with {h} 'H'",
        p.has_tm_signal_heuristic
    );
    Ok(format!(
        "1000 random sequences (length 10-600) consistent; MscL heuristic true with {h} 'H'"
    ))
}

// -------------------------------------------------------------- eval_harness

const MAX_LEN: usize = 8;

/// Position of a sequence over {0,1,2} in the length-then-lexicographic
/// listing of all sequences up to `MAX_LEN`.
fn seq_id(s: &[u8]) -> usize {
    let offset = (3usize.pow(s.len() as u32) - 1) / 2;
    offset + s.iter().fold(0, |v, &c| v * 3 + c as usize)
}

fn all_sequences() -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..MAX_LEN {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<u8>| (0..3u8).map(move |c| [s.as_slice(), &[c]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Ids of every subsequence (by position mask), with their lengths.
fn subsequences(s: &[u8]) -> Vec<(usize, usize)> {
    let mut subs: Vec<(usize, usize)> = (0u32..1 << s.len())
        .map(|mask| {
            let sub: Vec<u8> = s
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            (seq_id(&sub), sub.len())
        })
        .collect();
    subs.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    subs.dedup();
    subs
}

/// Exhaustive LCS for every pair: LCS(a, b) is the longest subsequence of
/// `a` that is also a subsequence of `b`. `contains[t]` is the bitset of
/// sequences having `t` as a subsequence; walking `a`'s subsequences from
/// longest to shortest assigns each `b` its LCS the first time it appears.
fn lcs_oracle_rows(seqs: &[Vec<u8>]) -> impl Fn(usize) -> Vec<u8> + '_ {
    let words = seqs.len().div_ceil(64);
    let mut contains = vec![0u64; seqs.len() * words];
    for (b, s) in seqs.iter().enumerate() {
        for (t, _) in subsequences(s) {
            contains[t * words + b / 64] |= 1 << (b % 64);
        }
    }
    move |a| {
        let mut row = vec![0u8; seqs.len()];
        let mut assigned = vec![0u64; words];
        for (t, len) in subsequences(&seqs[a]) {
            for (w, done) in assigned.iter_mut().enumerate() {
                let mut fresh = contains[t * words + w] & !*done;
                *done |= fresh;
                while fresh != 0 {
                    let bit = fresh.trailing_zeros() as usize;
                    row[w * 64 + bit] = len as u8;
                    fresh &= fresh - 1;
                }
            }
        }
        row
    }
}

fn random_text(rng: &mut ChaCha8Rng, max_words: usize) -> String {
    const WORDS: [&str; 6] = ["channel", "membrane", "MscL", "protein", "pore", "the"];
    const SEPS: [&str; 4] = [" ", ", ", ". ", " - "];
    let n = rng.gen_range(0..=max_words);
    let mut s = String::new();
    for i in 0..n {
        if i > 0 {
            s.push_str(SEPS[rng.gen_range(0..SEPS.len())]);
        }
        s.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
    }
    s
}

fn eval_harness() -> Check {
    let seqs = all_sequences();
    ensure!(seqs.len() == 9841, "{} sequences enumerated", seqs.len());
    let oracle = lcs_oracle_rows(&seqs);
    let vocab = ["a", "b", "c"].map(String::from);
    let as_tokens = |s: &[u8]| s.iter().map(|&c| vocab[c as usize].clone()).collect::<Vec<_>>();
    let token_seqs: Vec<Vec<String>> = seqs.iter().map(|s| as_tokens(s)).collect();

    let mut pairs = 0u64;
    let mut recall_pairs = 0u64;
    for (a, sa) in seqs.iter().enumerate() {
        let row = oracle(a);
        for (b, sb) in seqs.iter().enumerate() {
            let got = lcs_len(sa, sb);
            ensure!(got == row[b] as usize, "LCS({sa:?}, {sb:?}) = {got}, oracle {}", row[b]);
            pairs += 1;
        }
        // The recall function itself over string tokens; references must be
        // non-empty.
        if !sa.is_empty() {
            for (b, tb) in token_seqs.iter().enumerate() {
                let got = rouge_l_recall_tokens(&token_seqs[a], tb).map_err(|e| e.to_string())?;
                let want = row[b] as f64 / sa.len() as f64;
                ensure!(
                    got == want,
                    "rougeL_recall({sa:?}, {:?}) = {got}, oracle {want}",
                    seqs[b]
                );
                recall_pairs += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10_000 {
        let r = random_text(&mut rng, 30);
        let p = random_text(&mut rng, 30);
        let (Ok(r1), Ok(rl)) = (rouge1_recall(&r, &p), rouge_l_recall(&r, &p)) else {
            continue; // empty reference
        };
        ensure!(rl <= r1, "rougeL {rl} > rouge1 {r1} for {r:?} / {p:?}");
        checked += 1;
    }
    for _ in 0..1000 {
        let r = random_text(&mut rng, 30);
        if r.is_empty() {
            continue;
        }
        let junk = random_text(&mut rng, 10);
        ensure!(
            rouge1_recall(&r, &r) == Ok(1.0) && rouge_l_recall(&r, &r) == Ok(1.0),
            "identity < 1 for {r:?}"
        );
        let p = format!("{r} {junk}");
        ensure!(
            rouge1_recall(&r, &p) == Ok(1.0) && rouge_l_recall(&r, &p) == Ok(1.0),
            "appending {junk:?} lowered recall for {r:?}"
        );
    }
    let toks = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
    ensure!(
        rouge1_recall_tokens(&toks("a b"), &toks("a a a")) == Ok(0.5),
        "rouge1 counts are not clipped"
    );
    Ok(format!(
        "{pairs} LCS pairs and {recall_pairs} rougeL_recall pairs equal the exhaustive oracle; 10000 random pairs rougeL <= rouge1; identity and append-junk hold"
    ))
}

// ------------------------------------------------------ agent_runtime (e2e)

fn fixed_options(case_id: &str) -> SessionOptions {
    SessionOptions {
        created_at: DateTime::UNIX_EPOCH,
        ..SessionOptions::for_case(case_id)
    }
}

fn agent_end_to_end() -> Check {
    let t = Instant::now();
    let pool = Arc::new(bundled_pool());
    let registry = standard_registry(pool.clone());
    let backend = ScriptedBackend::load(&data("demo/replies_tool_agent.jsonl")).map_err(|e| e.to_string())?;
    let cases = load_benchmark(&data("demo/cases.jsonl")).map_err(|e| e.to_string())?;
    let case = cases
        .iter()
        .find(|c| c.case_id == "mscl_function")
        .ok_or("demo case missing")?;
    ensure!(
        case.sequence.residues() == MSCL,
        "demo case does not hold the MscL sequence"
    );

    let opts = fixed_options(&case.case_id);
    let first = run_tool_agent(&backend, &registry, &case.question, &case.sequence, &opts);
    let second = run_tool_agent(&backend, &registry, &case.question, &case.sequence, &opts);
    let elapsed = t.elapsed();

    ensure!(
        first.stop_reason == StopReason::AnswerFound,
        "stop reason {}",
        first.stop_reason
    );
    ensure!(first.tool_calls_made == 4, "tool_calls_made {}", first.tool_calls_made);
    let answer = first.final_answer.as_deref().unwrap_or("");
    ensure!(
        answer.starts_with("This protein is a **large-conductance mechanosensitive channel"),
        "answer starts {:?}",
        &answer[..answer.len().min(60)]
    );

    // Every tool message must equal a direct call on the same stores.
    let names: HashMap<&str, &str> = first
        .trace
        .messages
        .iter()
        .flat_map(|m| m.tool_calls.iter().map(|c| (c.call_id.as_str(), c.name.as_str())))
        .collect();
    let query = first.trace.query.clone();
    let mut compared = Vec::new();
    for m in first.trace.messages.iter().filter(|m| m.role == Role::Tool) {
        let id = m.tool_call_id.as_deref().ok_or("tool message without call id")?;
        let name = names.get(id).ok_or("tool message for unknown call")?;
        let direct = pool.run(name, &query, None).map_err(|e| e.to_string())?;
        ensure!(
            m.content == to_wire_string(&direct),
            "{name}: trace payload differs from direct invocation"
        );
        compared.push(*name);
    }
    compared.sort();
    let mut expected = EVIDENCE_TOOLS.to_vec();
    expected.sort();
    ensure!(compared == expected, "tools in trace {compared:?}");

    ensure!(
        trace_json(&first) == trace_json(&second),
        "two runs produced different traces"
    );
    let replay = replay_trace(&registry, &first);
    ensure!(replay.is_clean() && replay.checked == 4, "replay: {replay:?}");
    ensure!(elapsed < Duration::from_secs(10), "took {}", ms(elapsed));
    Ok(format!(
        "answer_found, 4 calls, 4 payloads equal direct invocation, traces byte-identical, replay clean; {} for load + 2 runs",
        ms(elapsed)
    ))
}

// ---------------------------------------------------------- paradigm contract

/// Backend that records what it was offered and replies with one fixed
/// message containing both a tool call and an answer.
struct Recorder {
    offered: Mutex<Vec<(usize, Vec<ChatMessage>)>>,
}

impl LlmBackend for Recorder {
    fn complete(&self, request: &ChatRequest<'_>) -> Result<ChatMessage, BackendError> {
        self.offered
            .lock()
            .unwrap()
            .push((request.tools.len(), request.messages.to_vec()));
        Ok(ChatMessage::assistant_with_calls(
            "<answer>a membrane channel</answer>",
            vec![ToolCall::new(
                "c1",
                "seq_basic_props",
                serde_json::json!({"sequence_ref": "query"}),
            )],
        ))
    }
}

fn paradigm_contract() -> Check {
    let pool = Arc::new(bundled_pool());
    let registry: Registry = standard_registry(pool.clone());
    let query = seq("query", MSCL);
    let q = "What does this protein do?";

    let rag_backend = Recorder {
        offered: Mutex::new(Vec::new()),
    };
    let rag = run_rag(&rag_backend, &registry, q, &query, &fixed_options("rag"));
    let offered = rag_backend.offered.into_inner().unwrap();
    ensure!(
        offered.len() == 1 && offered[0].0 == 0,
        "RAG offered tool schemas: {:?}",
        offered.iter().map(|o| o.0).collect::<Vec<_>>()
    );
    let user = offered[0]
        .1
        .iter()
        .find(|m| m.role == Role::User)
        .ok_or("RAG prompt has no user message")?;
    ensure!(
        user.content.contains(EVIDENCE_HEADER),
        "RAG prompt lacks the evidence header"
    );
    let blocks = parse_evidence_blocks(&user.content);
    let block_names: Vec<&str> = blocks.iter().map(|(n, _)| n.as_str()).collect();
    ensure!(block_names == EVIDENCE_TOOLS, "evidence blocks {block_names:?}");
    for (name, payload) in &blocks {
        let direct = to_wire_string(&pool.run(name, &query, None).map_err(|e| e.to_string())?);
        ensure!(*payload == direct, "{name}: RAG block differs from direct invocation");
    }
    let audit = &rag.trace.audit;
    ensure!(audit.len() == 4, "RAG audit has {} entries", audit.len());
    ensure!(
        audit.iter().all(|e| e.call_id.starts_with("rag_")),
        "model-initiated call in RAG audit"
    );
    ensure!(rag.tool_calls_made == 0, "RAG tool_calls_made {}", rag.tool_calls_made);
    let refusal = rag
        .trace
        .messages
        .iter()
        .find(|m| m.role == Role::Tool)
        .ok_or("attempted call got no reply")?;
    ensure!(
        refusal.content.contains(ErrorKind::BudgetExhausted.as_str()),
        "attempted call was not refused: {}",
        refusal.content
    );

    let direct_backend = Recorder {
        offered: Mutex::new(Vec::new()),
    };
    let direct = run_direct(&direct_backend, q, &query, &fixed_options("direct"));
    let offered = direct_backend.offered.into_inner().unwrap();
    ensure!(
        offered.len() == 1 && offered[0].0 == 0,
        "direct paradigm offered tool schemas"
    );
    ensure!(direct.trace.audit.is_empty(), "direct paradigm executed tools");
    ensure!(
        offered[0].1.iter().all(|m| !m.content.contains(EVIDENCE_HEADER)),
        "direct prompt carries tool outputs"
    );

    let agent_backend = Recorder {
        offered: Mutex::new(Vec::new()),
    };
    let mut opts = fixed_options("agent");
    opts.max_turns = 1;
    let _ = run_tool_agent(&agent_backend, &registry, q, &query, &opts);
    let offered = agent_backend.offered.into_inner().unwrap();
    ensure!(offered[0].0 == 4, "tool agent offered {} schemas", offered[0].0);
    Ok("RAG: 4 evidence blocks equal direct payloads, 0 schemas, audit = 4 rag_* entries, model call refused; direct: 0 schemas, empty audit".into())
}

// ------------------------------------------------------------------- driver

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("tool_props", tool_props),
        ("tool_homology", tool_homology),
        ("tool_domains", tool_domains),
        ("tool_topology", tool_topology),
        ("eval_harness", eval_harness),
        ("agent_runtime end-to-end", agent_end_to_end),
        ("paradigm contract", paradigm_contract),
    ];
    // Failures are reported on our own lines; keep panic output short.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    println!("acceptance: {} criteria", criteria.len());
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = t.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({}) — {detail}", ms(elapsed)),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name} ({}) — {why}", ms(elapsed));
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
