//! The `sqpo` command line: validation, matching, single steps, strategy
//! runs and DOT export over JSON graph and rule files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sqpo::engine::{DomainRegistry, EngineError, LoadFailure, LoadStage, StrategyRegistry, Workspace};
use thiserror::Error;

pub mod demos;

#[derive(Debug, Parser)]
#[command(name = "sqpo", version, about = "Sesqui-pushout rewriting of attributed graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write results into this directory instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Host graph (JSON).
    #[arg(long)]
    pub graph: PathBuf,
    /// Rule files (JSON); each holds a rule, an array of rules or {"rules": [...]}.
    #[arg(long = "rules", num_args = 1..)]
    pub rules: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the graph and rules; exit 1 on any validation failure.
    Validate(Inputs),
    /// List the matches of the rules in the graph.
    Match {
        #[command(flatten)]
        inputs: Inputs,
        /// Only this rule.
        #[arg(long)]
        rule: Option<String>,
    },
    /// Apply one rule at one match.
    Apply {
        #[command(flatten)]
        inputs: Inputs,
        /// Rule name; defaults to the only rule.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Check the step against the categorical oracles.
        #[arg(long)]
        verify: bool,
    },
    /// Rewrite with a strategy until quiescence or the step budget.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "first-match")]
        strategy: String,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
    },
    /// Write the graph in Graphviz format.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Write the bundled demo files.
    Demo,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Load(LoadFailure),
    #[error("validation failed:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("oracle check failed: {0}")]
    Oracle(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Load(f) => match f.stage {
                LoadStage::Parse => 2,
                LoadStage::Invalid => 1,
            },
            CliError::Invalid(_) => 1,
            CliError::Engine(e) => match e {
                EngineError::IndexOutOfRange { .. } | EngineError::UnknownRule(_) => 2,
                EngineError::Cases(_) | EngineError::ResultNotTotal | EngineError::Construction(_) => 3,
                _ => 1,
            },
            CliError::Oracle(_) => 3,
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn open(inputs: &Inputs) -> Result<Box<dyn Workspace>, CliError> {
    let graph = read_json(&inputs.graph)?;
    let mut docs = Vec::new();
    for p in &inputs.rules {
        let v = read_json(p)?;
        let rules = sqpo::engine::io::rule_documents(&v).map_err(|e| CliError::Load(e.into()))?;
        docs.extend(rules.into_iter().cloned());
    }
    let rules = (!inputs.rules.is_empty()).then_some(Value::Array(docs));
    DomainRegistry::standard()
        .open(&graph, rules.as_ref())
        .map_err(CliError::Load)
}

fn open_valid(inputs: &Inputs) -> Result<Box<dyn Workspace>, CliError> {
    let ws = open(inputs)?;
    let problems = ws.validate();
    if problems.is_empty() {
        Ok(ws)
    } else {
        Err(CliError::Invalid(problems))
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Where results go: files in a directory, or one stream.
struct Sink<'a> {
    dir: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, file: &str, content: &str) -> Result<(), CliError> {
        match self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
                let path = dir.join(file);
                fs::write(&path, content).map_err(|source| CliError::Io { path, source })
            }
            None => self
                .stdout
                .write_all(content.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
        }
    }
}

fn pick_rule(ws: &dyn Workspace, rule: Option<&str>) -> Result<String, CliError> {
    match rule {
        Some(r) => Ok(r.to_string()),
        None => {
            let names = ws.rule_names();
            match names.as_slice() {
                [one] => Ok(one.clone()),
                [] => Err(CliError::Usage("no rules given".into())),
                _ => Err(CliError::Usage(format!(
                    "several rules loaded ({}); choose one with --rule",
                    names.join(", ")
                ))),
            }
        }
    }
}

/// Executes one command; diagnostics that are not results go to `stderr`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut sink = Sink {
        dir: cli.out.as_deref(),
        stdout,
    };
    let dot = cli.format == Format::Dot;
    match &cli.command {
        Command::Validate(inputs) => {
            let ws = open(inputs)?;
            let problems = ws.validate();
            if !problems.is_empty() {
                return Err(CliError::Invalid(problems));
            }
            let _ = writeln!(
                stderr,
                "ok: graph and {} rule(s) over the {} domain",
                ws.rule_names().len(),
                ws.domain()
            );
            Ok(())
        }
        Command::Match { inputs, rule } => {
            let ws = open_valid(inputs)?;
            let ms = ws.matches(rule.as_deref())?;
            sink.emit("matches.json", &pretty(&Value::Array(ms)))
        }
        Command::Apply {
            inputs,
            rule,
            index,
            verify,
        } => {
            let ws = open_valid(inputs)?;
            let rule = pick_rule(ws.as_ref(), rule.as_deref())?;
            let step = ws.apply(&rule, *index, *verify, cli.seed)?;
            if dot {
                sink.emit("D.dot", &step.d_dot)?;
                sink.emit("H.dot", &step.h_dot)?;
            } else if sink.dir.is_some() {
                sink.emit("D.json", &pretty(&step.d))?;
                sink.emit("H.json", &pretty(&step.h))?;
                sink.emit("trace.json", &pretty(&step.trace))?;
            } else {
                sink.emit("trace.json", &pretty(&step.trace))?;
            }
            if let Some(v) = &step.verify {
                let report = pretty(&v.to_json());
                let _ = stderr.write_all(report.as_bytes());
                if !v.ok() {
                    return Err(CliError::Oracle(report));
                }
                if sink.dir.is_some() {
                    sink.emit("verify.json", &report)?;
                }
            }
            Ok(())
        }
        Command::Run {
            inputs,
            strategy,
            max_steps,
        } => {
            let reg = StrategyRegistry::standard();
            let s = reg.get(strategy).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown strategy {strategy}; known: {}",
                    reg.names().join(", ")
                ))
            })?;
            let ws = open_valid(inputs)?;
            let out = ws.run(s.as_ref(), *max_steps)?;
            if sink.dir.is_some() {
                sink.emit("trace.json", &pretty(&Value::Array(out.traces)))?;
                sink.emit("summary.json", &pretty(&out.summary))?;
                if dot {
                    sink.emit("final.dot", &out.final_dot)?;
                } else {
                    sink.emit("final.json", &pretty(&out.final_graph))?;
                }
            } else if dot {
                sink.emit("final.dot", &out.final_dot)?;
            } else {
                sink.emit("summary.json", &pretty(&out.summary))?;
            }
            Ok(())
        }
        Command::ExportDot { graph } => {
            let ws = open(&Inputs {
                graph: graph.clone(),
                rules: Vec::new(),
            })?;
            let name = graph.file_stem().and_then(|s| s.to_str()).unwrap_or("G");
            sink.emit(&format!("{name}.dot"), &ws.graph_dot(name))
        }
        Command::Demo => {
            let Some(dir) = sink.dir else {
                for (path, _) in demos::FILES {
                    let _ = writeln!(sink.stdout, "{path}");
                }
                return Ok(());
            };
            for (path, content) in demos::FILES {
                let target = dir.join(path);
                if let Some(parent) = target.parent() {
                    fs::create_dir_all(parent).map_err(|source| CliError::Io {
                        path: parent.to_path_buf(),
                        source,
                    })?;
                }
                fs::write(&target, content).map_err(|source| CliError::Io { path: target, source })?;
            }
            Ok(())
        }
    }
}
