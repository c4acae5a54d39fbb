//! `containment`: validate models, generate LTL and SMV, and check whether a
//! low-level model contains the behavior of a high-level one.
//!
//! Exit codes: 0 success (all properties hold), 1 some property fails,
//! 2 any operational error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use containment_core::checker::{Checker, Verdict};
use containment_core::ingest::load_model;
use containment_core::ltl::{generate_properties_with, render_ltlspec, JoinMode, PropertySet};
use containment_core::model::ActivityModel;
use containment_core::nusmv::{self, Detection};
use containment_core::report::{render_report, ReportEntry, ReportFormat};
use containment_core::semantics::{build_system, dump_states, DEFAULT_CAP};
use containment_core::smv::{bundle_check_file, generate_smv, render_smv};

#[derive(Parser)]
#[command(name = "containment", version, about = "Behavioral containment checking for activity models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file (`.behavior` or `.json`).
    Validate { model: PathBuf },
    /// Write the LTL properties of a high-level model.
    GenLtl {
        high: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = JoinArg::Globally)]
        join_mode: JoinArg,
    },
    /// Write the SMV description of a low-level model.
    GenSmv {
        low: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Append the properties of this high-level model as LTLSPEC lines.
        #[arg(long, value_name = "HIGH")]
        embed_ltl: Option<PathBuf>,
    },
    /// Check the high-level properties against the low-level model.
    Check {
        high: PathBuf,
        low: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Internal)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Maximum number of reachable states.
        #[arg(long, env = "CONTAINMENT_CAP", default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Cross-check every verdict with the bounded lasso oracle.
        #[arg(long, value_name = "N")]
        depth: Option<usize>,
        /// NuSMV binary; defaults to $NUSMV_PATH, then PATH.
        #[arg(long, value_name = "PATH")]
        nusmv: Option<PathBuf>,
        /// Seconds allowed for the external checker.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        #[arg(long, value_enum, default_value_t = JoinArg::Globally)]
        join_mode: JoinArg,
        /// Print every reachable state to stderr.
        #[arg(long)]
        dump_states: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum JoinArg {
    Globally,
    Simultaneous,
}

impl From<JoinArg> for JoinMode {
    fn from(j: JoinArg) -> JoinMode {
        match j {
            JoinArg::Globally => JoinMode::Globally,
            JoinArg::Simultaneous => JoinMode::Simultaneous,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Internal,
    Nusmv,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Operational failure; reported on stderr with exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn load(path: &Path) -> Result<ActivityModel, Failure> {
    load_model(path).map_err(Failure::from)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure(format!("{}: cannot write file: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn properties(high: &Path, join: JoinArg) -> Result<PropertySet, Failure> {
    Ok(generate_properties_with(&load(high)?, join.into())?)
}

struct CheckArgs {
    engine: Engine,
    format: Format,
    cap: usize,
    depth: Option<usize>,
    nusmv: Option<PathBuf>,
    timeout: u64,
    dump_states: bool,
}

fn run_internal(
    low: &ActivityModel,
    props: &PropertySet,
    args: &CheckArgs,
) -> Result<Vec<ReportEntry>, Failure> {
    let sys = build_system(&generate_smv(low)?)?;
    let checker = Checker::new(&sys, args.cap)?;
    if args.dump_states {
        eprint!("{}", dump_states(&sys, checker.space()));
    }
    let verdicts: Vec<Verdict> = checker
        .check_all(&props.formulas())
        .into_iter()
        .collect::<Result<_, _>>()?;
    if let Some(depth) = args.depth {
        for v in &verdicts {
            let oracle = checker.oracle(&v.property, depth)?;
            if oracle.holds != v.holds {
                return Err(Failure(format!(
                    "oracle disagrees on {}: checker says {}, oracle at depth {depth} says {}",
                    v.property, v.holds, oracle.holds
                )));
            }
        }
    }
    Ok(verdicts
        .iter()
        .zip(props)
        .map(|(v, p)| ReportEntry::from_verdict(&sys, v, Some(p.primitive)))
        .collect())
}

fn run_nusmv(bundle: &str, props: &PropertySet, args: &CheckArgs) -> Result<Vec<ReportEntry>, Failure> {
    let tool = match nusmv::detect(args.nusmv.as_deref()) {
        Detection::Found(tool) => tool,
        Detection::Absent { note } => return Err(Failure(format!("tool not found: {note}"))),
    };
    let raw = nusmv::run_check(&tool, bundle, Duration::from_secs(args.timeout))?;
    let verdicts = nusmv::parse_output(&raw)?;
    if verdicts.len() != props.len() {
        return Err(Failure(format!(
            "NuSMV reported {} specifications, expected {}",
            verdicts.len(),
            props.len()
        )));
    }
    Ok(verdicts
        .iter()
        .zip(props)
        .map(|(v, p)| ReportEntry::from_valuations(v, Some(p.primitive)))
        .collect())
}

fn check(high: &Path, low: &Path, join: JoinArg, args: CheckArgs) -> Result<bool, Failure> {
    let props = properties(high, join)?;
    let low = load(low)?;
    let bundle = bundle_check_file(&low, &props)?;

    let internal = match args.engine {
        Engine::Internal | Engine::Both => Some(run_internal(&low, &props, &args)?),
        Engine::Nusmv => None,
    };
    let external = match args.engine {
        Engine::Nusmv | Engine::Both => Some(run_nusmv(&bundle, &props, &args)?),
        Engine::Internal => None,
    };
    if let (Some(a), Some(b)) = (&internal, &external) {
        for (x, y) in a.iter().zip(b) {
            if x.holds != y.holds {
                return Err(Failure(format!(
                    "engines disagree on {}: internal {}, NuSMV {}",
                    x.formula, x.holds, y.holds
                )));
            }
        }
    }
    let entries = internal.or(external).expect("at least one engine ran");
    let format = match args.format {
        Format::Text => ReportFormat::Text,
        Format::Json => ReportFormat::Json,
    };
    print!("{}", render_report(&entries, format));
    Ok(entries.iter().all(|e| e.holds))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Validate { model } => {
            let m = load(&model)?;
            println!(
                "{}: valid model '{}' ({} nodes, {} edges)",
                model.display(),
                m.name(),
                m.nodes().len(),
                m.edges().len()
            );
        }
        Command::GenLtl { high, out, join_mode } => {
            emit(out.as_deref(), &render_ltlspec(&properties(&high, join_mode)?))?;
        }
        Command::GenSmv { low, out, embed_ltl } => {
            let low = load(&low)?;
            let text = match embed_ltl {
                Some(high) => bundle_check_file(&low, &properties(&high, JoinArg::Globally)?)?,
                None => render_smv(&generate_smv(&low)?),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Check {
            high,
            low,
            engine,
            format,
            cap,
            depth,
            nusmv,
            timeout,
            join_mode,
            dump_states,
        } => {
            let args = CheckArgs {
                engine,
                format,
                cap,
                depth,
                nusmv,
                timeout,
                dump_states,
            };
            if !check(&high, &low, join_mode, args)? {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
