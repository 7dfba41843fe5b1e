use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use oddl_core::analysis::{self, AnalysisProfile, Scenario};
use oddl_core::diagnostics::{render_error, render_violations};
use oddl_core::imports::{load_file, FsLoader};
use oddl_core::render::{render, Format, RenderOptions};
use oddl_core::{
    assets, EvalResult, Evaluator, ImportPolicy, ModuleGraph, ValueTree, TOOL_VERSION,
};

/// Evaluate, render and compare operational design domain descriptions.
#[derive(Parser)]
#[command(name = "oddl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an instance and render it.
    Eval {
        file: PathBuf,
        /// Output format: json, yaml or plantuml.
        #[arg(short, long, default_value = "json")]
        format: Format,
        /// Spaces per indentation level (1 to 8).
        #[arg(long, default_value_t = 2)]
        indent: usize,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Check whether a scenario lies inside an ODD.
    Within {
        odd: PathBuf,
        /// JSON object mapping attribute paths to values.
        scenario: PathBuf,
        /// Analysis profile (JSON); defaults to the standard profile.
        #[arg(short, long)]
        profile: Option<PathBuf>,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Check whether OUTER covers every scenario INNER admits.
    Contains {
        outer: PathBuf,
        inner: PathBuf,
        #[arg(short, long)]
        profile: Option<PathBuf>,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// List the leaf values that differ between two instances.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// List the bundled templates, or print one.
    Templates { name: Option<String> },
}

#[derive(Args)]
struct LoadArgs {
    /// Instance to evaluate; optional when the file declares exactly one.
    #[arg(short, long)]
    instance: Option<String>,
    /// Tool version used for `minToolVersion` checks.
    #[arg(long, default_value = TOOL_VERSION)]
    tool_version: String,
}

/// A non-zero exit with the diagnostics to print on standard error.
struct Failure {
    code: u8,
    text: String,
}

impl Failure {
    fn usage(text: impl Into<String>) -> Self {
        Self {
            code: 2,
            text: text.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::usage(format!("error: {e:#}"))
    }
}

impl From<oddl_core::Error> for Failure {
    fn from(e: oddl_core::Error) -> Self {
        Self::usage(render_error(&e))
    }
}

impl From<analysis::AnalysisError> for Failure {
    fn from(e: analysis::AnalysisError) -> Self {
        Self::usage(format!("error: {e}"))
    }
}

/// Standard output text and exit code of a completed command.
struct Outcome {
    stdout: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if writeln!(stdout, "{}", out.stdout)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", f.text);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Eval {
            file,
            format,
            indent,
            load,
        } => {
            let opts = RenderOptions::new(format, indent)
                .map_err(|e| Failure::usage(format!("error: {e}")))?;
            let loaded = Loaded::open(&file, &load)?;
            match loaded.result {
                EvalResult::Success(tree) => {
                    let text = render(&tree, &opts).map_err(|e| Failure {
                        code: 1,
                        text: format!("error: {e}"),
                    })?;
                    Ok(Outcome {
                        stdout: text,
                        code: 0,
                    })
                }
                EvalResult::Failure(violations) => Err(Failure {
                    code: 1,
                    text: render_violations(&violations, &loaded.graph),
                }),
            }
        }
        Command::Within {
            odd,
            scenario,
            profile,
            load,
        } => {
            let tree = Loaded::open(&odd, &load)?.require_success()?;
            let text = read(&scenario)?;
            let scenario = Scenario::from_json(&text)?;
            let verdict =
                analysis::scenario_within(&tree, &scenario, &load_profile(profile.as_deref())?)?;
            json_outcome(&verdict, verdict.within)
        }
        Command::Contains {
            outer,
            inner,
            profile,
            load,
        } => {
            let outer = Loaded::open(&outer, &load)?.require_success()?;
            let inner = Loaded::open(&inner, &load)?.require_success()?;
            let report = analysis::contains(&outer, &inner, &load_profile(profile.as_deref())?)?;
            json_outcome(&report, report.contains)
        }
        Command::Diff { a, b, load } => {
            let a = Loaded::open(&a, &load)?.require_success()?;
            let b = Loaded::open(&b, &load)?.require_success()?;
            let entries = analysis::diff(&a, &b)?;
            json_outcome(&entries, entries.is_empty())
        }
        Command::Templates { name: None } => {
            let lines: Vec<String> = assets::standard_templates()
                .iter()
                .map(|t| {
                    let version = t.declared_min_tool_version;
                    format!("{}\t{}\t{}", t.name, t.file_name, version)
                })
                .collect();
            Ok(Outcome {
                stdout: lines.join("\n"),
                code: 0,
            })
        }
        Command::Templates { name: Some(name) } => {
            let asset =
                assets::template_asset(&name).ok_or(oddl_core::Error::UnknownTemplate(name))?;
            assets::verify_integrity(asset)?;
            Ok(Outcome {
                stdout: asset.source_text.trim_end().to_string(),
                code: 0,
            })
        }
    }
}

fn json_outcome(value: &impl serde::Serialize, ok: bool) -> Result<Outcome, Failure> {
    let stdout = serde_json::to_string_pretty(value).context("serializing report")?;
    Ok(Outcome {
        stdout,
        code: if ok { 0 } else { 1 },
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_profile(path: Option<&Path>) -> Result<AnalysisProfile, Failure> {
    match path {
        None => Ok(AnalysisProfile::standard()),
        Some(p) => Ok(AnalysisProfile::from_json(&read(p)?)?),
    }
}

/// The entry file's directory and bundled templates, plus any roots listed
/// in `ODDL_IMPORT_ROOTS`.
fn import_policy(entry: &Path) -> ImportPolicy {
    let mut policy = ImportPolicy::for_entry(entry);
    if let Some(roots) = std::env::var_os("ODDL_IMPORT_ROOTS") {
        policy
            .allowed_roots
            .extend(std::env::split_paths(&roots).filter(|p| !p.as_os_str().is_empty()));
    }
    policy
}

struct Loaded {
    graph: ModuleGraph,
    result: EvalResult,
}

impl Loaded {
    fn open(file: &Path, args: &LoadArgs) -> Result<Self, Failure> {
        let policy = import_policy(file);
        let graph = load_file(file, &FsLoader, &policy).map_err(oddl_core::Error::from)?;
        let evaluator = Evaluator::new(&graph, &args.tool_version)?;
        let instance = match &args.instance {
            Some(name) => name.clone(),
            None => sole_instance(&evaluator, file)?,
        };
        let result = evaluator.evaluate(&instance)?;
        Ok(Self { graph, result })
    }

    /// The evaluated tree; analysis commands need a valid ODD.
    fn require_success(self) -> Result<ValueTree, Failure> {
        match self.result {
            EvalResult::Success(tree) => Ok(tree),
            EvalResult::Failure(violations) => {
                Err(Failure::usage(render_violations(&violations, &self.graph)))
            }
        }
    }
}

fn sole_instance(evaluator: &Evaluator, file: &Path) -> Result<String, Failure> {
    let names: Vec<&str> = evaluator
        .schema()
        .instances()
        .iter()
        .map(|(d, _)| d.name.as_str())
        .collect();
    match names.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(Failure::usage(format!(
            "error: {} declares no instances",
            file.display()
        ))),
        many => Err(Failure::usage(format!(
            "error: {} declares several instances ({}); choose one with --instance",
            file.display(),
            many.join(", ")
        ))),
    }
}
