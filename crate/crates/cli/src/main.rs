//! `protagent`: ask questions about protein sequences through one of three
//! inference paradigms, run benchmarks, and inspect tools and traces.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use protagent_core::agent::Paradigm;

use config::RunArgs;

#[derive(Debug, Parser)]
#[command(name = "protagent", version, about = "Tool-augmented protein question answering")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Query sequence given inline or as the first record of a FASTA file.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SequenceInput {
    /// Residues, one-letter codes.
    #[arg(long)]
    pub sequence: Option<String>,
    /// FASTA file; its first record is used.
    #[arg(long)]
    pub sequence_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Answer one question about one sequence.
    Ask {
        #[arg(long, default_value = "tool_agent")]
        paradigm: Paradigm,
        #[arg(long)]
        question: String,
        #[command(flatten)]
        input: SequenceInput,
        /// Case id used as script key and trace name.
        #[arg(long)]
        case_id: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a paradigm over a benchmark file and score it.
    Bench {
        #[arg(long)]
        paradigm: Paradigm,
        /// Benchmark file (JSON lines).
        #[arg(long)]
        cases: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reference store maintenance.
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Run evidence tools directly, without a backend.
    Tools {
        #[command(subcommand)]
        command: ToolsCommand,
    },
    /// Inspect stored session traces.
    Trace {
        #[command(subcommand)]
        command: TraceCommand,
    },
    /// Emit reasoning-synthesis prompts for a benchmark file.
    Synth {
        #[arg(long)]
        cases: PathBuf,
        /// Output file (JSON lines); standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Send each prompt to the backend and record its completion.
        #[arg(long)]
        fill: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Subcommand)]
enum IndexCommand {
    /// Validate FASTA + annotations, index them, and write a normalized store.
    Build {
        #[arg(long)]
        fasta: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ToolsCommand {
    /// Invoke one tool and print its wire payload.
    Run {
        name: String,
        #[command(flatten)]
        input: SequenceInput,
        /// Identity threshold for the homology tool.
        #[arg(long)]
        min_seq_id: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the function schemas offered to the model.
    List {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Subcommand)]
enum TraceCommand {
    /// Render a stored trace in chat-template layout.
    Show { path: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = cli.config.as_deref();
    let outcome = match cli.command {
        Command::Ask {
            paradigm,
            question,
            input,
            case_id,
            run,
        } => commands::ask(config, &run, paradigm, &question, &input, case_id.as_deref()),
        Command::Bench { paradigm, cases, run } => commands::bench(config, &run, paradigm, &cases),
        Command::Index {
            command:
                IndexCommand::Build {
                    fasta,
                    annotations,
                    out,
                },
        } => commands::index_build(&fasta, &annotations, &out),
        Command::Tools {
            command:
                ToolsCommand::Run {
                    name,
                    input,
                    min_seq_id,
                    run,
                },
        } => commands::tools_run(config, &run, &name, &input, min_seq_id),
        Command::Tools {
            command: ToolsCommand::List { run },
        } => commands::tools_list(config, &run),
        Command::Trace {
            command: TraceCommand::Show { path },
        } => commands::trace_show(&path),
        Command::Synth { cases, out, fill, run } => commands::synth(config, &run, &cases, out.as_deref(), fill),
    };
    match outcome {
        Ok(code) => code,
        // The reader went away (e.g. `| head`); nothing left to report.
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>()
        .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
