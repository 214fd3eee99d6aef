use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use entropic_core::domain::domain_size;
use entropic_core::{configured_cap, parse_program, LiteralFilter, ModelId, Program};
use serde::{Serialize, Serializer};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Trace,
    Volume,
}

impl ProfileKind {
    fn parse(s: &str) -> Option<ProfileKind> {
        match s {
            "trace" => Some(ProfileKind::Trace),
            "volume" => Some(ProfileKind::Volume),
            _ => None,
        }
    }
}

/// Flags of `analyze`. Every flag may also come from `--config FILE`;
/// flags given on the command line win.
#[derive(Args, Clone, Debug, Default)]
pub struct AnalyzeArgs {
    /// xor, maxps-a0 (or maxps), maxps-a1. With --program, the function the
    /// program is expected to compute.
    #[arg(long)]
    pub model: Option<String>,
    /// Analyze this program instead of the model's builtin one.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Input size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Alphabet size (default 2).
    #[arg(long)]
    pub alphabet: Option<u32>,
    /// Input for trace profiles, e.g. aaab or 0110 (repeatable).
    #[arg(long = "input")]
    pub inputs: Vec<String>,
    /// trace and/or volume (repeatable or comma separated; default volume).
    #[arg(long = "profile", value_delimiter = ',')]
    pub profiles: Vec<String>,
    /// weeded or essential (default essential).
    #[arg(long)]
    pub filter: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for CSV profiles.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Enumeration cap (default: ENTROPIC_CAP, else 2^24).
    #[arg(long)]
    pub cap: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// key=value file with defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn model_name<S: Serializer>(m: &ModelId, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

fn filter_name<S: Serializer>(f: &LiteralFilter, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

/// A validated `analyze` configuration. The serialized form is the echo in
/// the report; output locations and the thread count are left out.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "model_name")]
    pub model: ModelId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub program: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub program_source: Option<String>,
    pub n: usize,
    pub alphabet: u32,
    #[serde(serialize_with = "filter_name")]
    pub filter: LiteralFilter,
    pub profiles: Vec<ProfileKind>,
    pub inputs: Vec<String>,
    pub cap: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: usize,
}

impl RunConfig {
    /// Builtin model with volume profile and essential literals.
    pub fn new(model: ModelId, n: usize, alphabet: u32) -> RunConfig {
        RunConfig {
            model,
            program: None,
            program_source: None,
            n,
            alphabet,
            filter: LiteralFilter::Essential,
            profiles: vec![ProfileKind::Volume],
            inputs: Vec::new(),
            cap: configured_cap(),
            out: None,
            csv: None,
            jobs: 0,
        }
    }

    /// The program to analyze.
    pub fn program(&self) -> Result<Program, CliError> {
        match &self.program_source {
            Some(src) => parse_program(src).map_err(|e| CliError::Config(format!("program: {e}"))),
            None => Ok(self.model.program().clone()),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.alphabet < 2 {
            return bad(format!(
                "alphabet must be at least 2, got {}",
                self.alphabet
            ));
        }
        if self.model == ModelId::Xor && self.alphabet != 2 {
            return bad("xor works on bits; use --alphabet 2".into());
        }
        for x in &self.inputs {
            if x.chars().count() != self.n {
                return bad(format!("input {x} does not have size {}", self.n));
            }
            if entropic_core::InputInstance::parse(x, self.alphabet).is_none() {
                return bad(format!(
                    "input {x} is not a word over {} symbols",
                    self.alphabet
                ));
            }
        }
        domain_size(self.n, self.alphabet, self.cap)?;
        self.program()?;
        Ok(())
    }
}

/// Reads a `key=value` file; `#` starts a comment.
pub fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected key=value",
                path.display(),
                i + 1
            )));
        };
        out.entry(k.trim().to_string())
            .or_default()
            .push(v.trim().to_string());
    }
    Ok(out)
}

impl AnalyzeArgs {
    /// Merges the config file (if any) under the flags and validates.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut a = self.clone();
        if let Some(path) = &self.config {
            let file = read_config_file(path)?;
            for (key, values) in file {
                let last = values.last().cloned().unwrap_or_default();
                let num = |what: &str| -> Result<u64, CliError> {
                    last.parse().map_err(|_| {
                        CliError::Config(format!("config {what}: not a number: {last}"))
                    })
                };
                match key.as_str() {
                    "model" => {
                        a.model.get_or_insert(last);
                    }
                    "program" => {
                        a.program.get_or_insert(PathBuf::from(last));
                    }
                    "n" => {
                        let v = num("n")? as usize;
                        a.n.get_or_insert(v);
                    }
                    "alphabet" => {
                        let v = num("alphabet")? as u32;
                        a.alphabet.get_or_insert(v);
                    }
                    "cap" => {
                        let v = num("cap")?;
                        a.cap.get_or_insert(v);
                    }
                    "jobs" => {
                        let v = num("jobs")? as usize;
                        a.jobs.get_or_insert(v);
                    }
                    "filter" => {
                        a.filter.get_or_insert(last);
                    }
                    "out" => {
                        a.out.get_or_insert(PathBuf::from(last));
                    }
                    "csv" => {
                        a.csv.get_or_insert(PathBuf::from(last));
                    }
                    "input" => {
                        if a.inputs.is_empty() {
                            a.inputs = split_list(&values);
                        }
                    }
                    "profile" => {
                        if a.profiles.is_empty() {
                            a.profiles = split_list(&values);
                        }
                    }
                    other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
                }
            }
        }
        a.into_config()
    }

    fn into_config(self) -> Result<RunConfig, CliError> {
        let cfg = |m: String| CliError::Config(m);
        let model = match self.model.as_deref() {
            Some(name) => {
                ModelId::parse(name).ok_or_else(|| cfg(format!("unknown model `{name}`")))?
            }
            None => return Err(cfg("--model is required".into())),
        };
        let n = self.n.ok_or_else(|| cfg("--n is required".into()))?;
        let mut config = RunConfig::new(model, n, self.alphabet.unwrap_or(2));
        if let Some(path) = self.program {
            let src = fs::read_to_string(&path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            config.program = Some(path);
            config.program_source = Some(src);
        }
        if let Some(f) = self.filter {
            config.filter =
                LiteralFilter::parse(&f).ok_or_else(|| cfg(format!("unknown filter `{f}`")))?;
        }
        if !self.profiles.is_empty() {
            let mut kinds = Vec::new();
            for p in &self.profiles {
                kinds.push(
                    ProfileKind::parse(p).ok_or_else(|| cfg(format!("unknown profile `{p}`")))?,
                );
            }
            kinds.sort();
            kinds.dedup();
            config.profiles = kinds;
        }
        config.inputs = self.inputs;
        if let Some(c) = self.cap {
            config.cap = c;
        }
        config.out = self.out;
        config.csv = self.csv;
        config.jobs = self.jobs.unwrap_or(0);
        config.validate()?;
        Ok(config)
    }
}

fn split_list(values: &[String]) -> Vec<String> {
    values
        .iter()
        .flat_map(|v| v.split(','))
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
