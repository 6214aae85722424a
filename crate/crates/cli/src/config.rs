//! Run configuration: built-in defaults, overridden by an optional TOML file,
//! overridden by command-line flags. API keys are never read from the file;
//! the file may only name the environment variable that holds one.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use protagent_core::agent::remote::DEFAULT_API_KEY_ENV;
use protagent_core::agent::{Decoding, RemoteConfig, SessionOptions};
use protagent_core::executor::SessionLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Remote,
    Scripted,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remote" => Ok(BackendKind::Remote),
            "scripted" => Ok(BackendKind::Scripted),
            other => Err(format!("unknown backend '{other}' (expected remote or scripted)")),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Remote => "remote",
            BackendKind::Scripted => "scripted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// Scripted-backend reply file.
    pub script: Option<PathBuf>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub max_turns: usize,
    pub max_tool_calls: usize,
    pub call_timeout_secs: f64,
    pub request_timeout_secs: f64,
    pub reference_fasta: PathBuf,
    pub annotations: PathBuf,
    pub hmm_library: PathBuf,
    pub run_dir: PathBuf,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = SessionLimits::default();
        RunConfig {
            backend: BackendKind::Remote,
            endpoint: None,
            model: None,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            script: None,
            temperature: Decoding::default().temperature,
            max_tokens: Decoding::default().max_tokens,
            max_turns: 12,
            max_tool_calls: limits.max_calls,
            call_timeout_secs: limits.call_timeout.as_secs_f64(),
            request_timeout_secs: 120.0,
            reference_fasta: "data/reference/reference.fasta".into(),
            annotations: "data/reference/annotations.jsonl".into(),
            hmm_library: "data/pfam_toy.hmm".into(),
            run_dir: "runs".into(),
            workers: 1,
        }
    }
}

/// Flags shared by every command that runs tools or a backend. Each one
/// overrides the config file when given.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Backend kind: remote or scripted.
    #[arg(long)]
    pub backend: Option<BackendKind>,
    /// Base URL of a chat-completions endpoint.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Reply script for the scripted backend (JSON lines).
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_turns: Option<usize>,
    /// Tool-call budget per session.
    #[arg(long)]
    pub max_tool_calls: Option<usize>,
    #[arg(long)]
    pub reference_fasta: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long = "hmm")]
    pub hmm_library: Option<PathBuf>,
    #[arg(long)]
    pub run_dir: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Keys that look like they carry a secret rather than name its variable.
fn secret_keys(table: &toml::Table) -> Vec<String> {
    table
        .keys()
        .filter(|k| {
            let k = k.to_ascii_lowercase();
            (k.contains("api_key") || k.contains("token") || k.contains("secret")) && k != "api_key_env"
        })
        .cloned()
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().context("config is not valid TOML")?;
        let secrets = secret_keys(&table);
        if !secrets.is_empty() {
            bail!(
                "config key(s) {} not allowed: API keys are read from the environment only (set api_key_env to the variable name)",
                secrets.join(", ")
            );
        }
        let config: RunConfig = table.try_into().context("invalid config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("config file {}", path.display()))
    }

    /// Defaults, then the file if given, then flags.
    pub fn resolve(path: Option<&Path>, args: &RunArgs) -> Result<Self> {
        let mut config = match path {
            Some(p) => Self::load(p)?,
            None => RunConfig::default(),
        };
        config.apply(args);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, a: &RunArgs) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        set(&mut self.backend, &a.backend);
        if a.endpoint.is_some() {
            self.endpoint = a.endpoint.clone();
        }
        if a.model.is_some() {
            self.model = a.model.clone();
        }
        if a.script.is_some() {
            self.script = a.script.clone();
        }
        set(&mut self.api_key_env, &a.api_key_env);
        set(&mut self.temperature, &a.temperature);
        set(&mut self.max_turns, &a.max_turns);
        set(&mut self.max_tool_calls, &a.max_tool_calls);
        set(&mut self.reference_fasta, &a.reference_fasta);
        set(&mut self.annotations, &a.annotations);
        set(&mut self.hmm_library, &a.hmm_library);
        set(&mut self.run_dir, &a.run_dir);
        set(&mut self.workers, &a.workers);
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            bail!("temperature must be a finite non-negative number");
        }
        if !(self.call_timeout_secs > 0.0 && self.call_timeout_secs.is_finite()) {
            bail!("call_timeout_secs must be positive");
        }
        if !(self.request_timeout_secs > 0.0 && self.request_timeout_secs.is_finite()) {
            bail!("request_timeout_secs must be positive");
        }
        Ok(())
    }

    /// Endpoint settings for the remote backend; both endpoint and model are
    /// required.
    pub fn remote(&self) -> Result<RemoteConfig> {
        let (Some(endpoint), Some(model)) = (&self.endpoint, &self.model) else {
            bail!("the remote backend needs both an endpoint and a model (config keys endpoint/model or --endpoint/--model)");
        };
        let mut rc = RemoteConfig::new(endpoint, model);
        rc.api_key_env = self.api_key_env.clone();
        rc.timeout = Duration::from_secs_f64(self.request_timeout_secs);
        Ok(rc)
    }

    pub fn limits(&self) -> SessionLimits {
        SessionLimits {
            max_calls: self.max_tool_calls,
            call_timeout: Duration::from_secs_f64(self.call_timeout_secs),
        }
    }

    pub fn session_options(&self, session_id: &str, case_id: Option<&str>) -> SessionOptions {
        let mut opts = SessionOptions::new(session_id);
        opts.case_id = case_id.map(String::from);
        opts.decoding = Decoding {
            temperature: self.temperature,
            max_tokens: self.max_tokens,
        };
        opts.limits = self.limits();
        opts.max_turns = self.max_turns;
        opts
    }
}
