use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use llm_bridge::{Completer, HttpClient, ReplayStore, SystemClock};
use pipeline::{
    compute_metrics, load_reports, render_metrics, run_batch, run_pipeline, validate_candidate,
    write_report, BatchSummary, GateDecision, PipelineConfig, PipelineError, PipelineReport,
    SCHEMA_VERSION,
};
use pyharness::{
    load_problem, load_problems, mutate, run_python, save_problem, validate_mutant, HangPolicy,
    MutationKind, PythonProblem, SiteSelection,
};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(
    name = "pyverify",
    version,
    about = "Verify Python programs and localise their faults through C"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Chat-completions endpoint URL.
    #[arg(long, global = true)]
    endpoint: Option<String>,
    #[arg(long, global = true)]
    model: Option<String>,
    /// Replay fixture directory; no network access is made.
    #[arg(long, global = true, value_name = "DIR")]
    mock: Option<PathBuf>,
    /// Leave the problem description out of the transpilation prompt.
    #[arg(long, global = true)]
    no_description: bool,
    #[arg(long, global = true, value_name = "K")]
    unwind: Option<u32>,
    #[arg(long, global = true, value_name = "D")]
    inline_depth: Option<u32>,
    /// Report runs that exceed the unwind bound (fail) or drop them (assume).
    #[arg(long, global = true, value_parser = ["fail", "assume"])]
    unwind_policy: Option<String>,
    /// Python run timeout in seconds.
    #[arg(long, global = true, value_name = "S")]
    timeout: Option<f64>,
    /// Seed for mutation site selection.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "J")]
    jobs: Option<usize>,
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Benchmark label recorded in reports.
    #[arg(long, global = true)]
    benchmark: Option<String>,
    /// Python interpreter to run programs with.
    #[arg(long, global = true)]
    interpreter: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transpile a problem to C through the gated retry loop.
    Transpile { problem: PathBuf },
    /// Inject a WBO or ADC fault into a Python program.
    Mutate {
        /// A problem directory or a .py file.
        program: PathBuf,
        #[arg(long)]
        kind: MutationKind,
        /// Use this eligible site instead of a seeded choice.
        #[arg(long)]
        site: Option<usize>,
        /// Reject mutants that hang instead of flagging them.
        #[arg(long)]
        reject_hangs: bool,
        #[arg(long)]
        no_validate: bool,
    },
    /// Model check a MiniC file.
    Verify { file: PathBuf },
    /// Model check a MiniC file and localise a violation.
    Localize { file: PathBuf },
    /// Run the whole pipeline on one problem directory.
    Run { problem: PathBuf },
    /// Run the pipeline on every problem under a directory.
    Bench { dir: PathBuf },
    /// Aggregate stored reports into metrics tables.
    Report {
        dir: PathBuf,
        /// Print the metrics as JSON.
        #[arg(long)]
        json: bool,
    },
}

/// Keys of the JSON config file.
#[derive(Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    endpoint: Option<String>,
    model: Option<String>,
    mock: Option<PathBuf>,
    no_description: Option<bool>,
    unwind: Option<u32>,
    inline_depth: Option<u32>,
    unwind_policy: Option<bmc::UnwindPolicy>,
    timeout: Option<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    benchmark: Option<String>,
    interpreter: Option<PathBuf>,
    max_attempts: Option<u32>,
    /// Transpilation time budget in seconds.
    time_budget: Option<f64>,
    api_key_env: Option<String>,
}

enum Failure {
    Usage(anyhow::Error),
    Env(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn env(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Env(e.into())
}

struct Settings {
    cfg: PipelineConfig,
    mock: Option<PathBuf>,
    seed: u64,
    jobs: usize,
    out: Option<PathBuf>,
}

fn settings(o: &Opts) -> Result<Settings, Failure> {
    let file = match &o.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            serde_json::from_str::<FileConfig>(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(usage)?
        }
        None => FileConfig::default(),
    };
    let mut cfg = PipelineConfig::default();
    if let Some(v) = o.endpoint.clone().or(file.endpoint) {
        cfg.llm.endpoint = v;
    }
    if let Some(v) = o.model.clone().or(file.model) {
        cfg.llm.model = v;
    }
    cfg.llm.include_description = !(o.no_description || file.no_description.unwrap_or(false));
    if let Some(v) = file.max_attempts {
        if v == 0 {
            return Err(usage(anyhow!("max-attempts must be at least 1")));
        }
        cfg.llm.max_attempts = v;
    }
    if let Some(v) = file.time_budget {
        cfg.llm.time_budget = Duration::try_from_secs_f64(v).map_err(usage)?;
    }
    if let Some(v) = file.api_key_env {
        cfg.llm.api_key_env = v;
    }
    if let Some(v) = o.unwind.or(file.unwind) {
        cfg.unwind = v;
    }
    if let Some(v) = o.inline_depth.or(file.inline_depth) {
        cfg.inline_depth = v;
    }
    let policy = match o.unwind_policy.as_deref() {
        Some("assume") => Some(bmc::UnwindPolicy::Assume),
        Some(_) => Some(bmc::UnwindPolicy::Fail),
        None => file.unwind_policy,
    };
    if let Some(v) = policy {
        cfg.unwind_policy = v;
    }
    if let Some(v) = o.timeout.or(file.timeout) {
        if !(v.is_finite() && v > 0.0) {
            return Err(usage(anyhow!(
                "timeout must be a positive number of seconds"
            )));
        }
        cfg.python_timeout = v;
    }
    if let Some(v) = o.benchmark.clone().or(file.benchmark) {
        cfg.benchmark = v;
    }
    if let Some(v) = o.interpreter.clone().or(file.interpreter) {
        cfg.interpreter = v;
    }
    let jobs = o.jobs.or(file.jobs).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(cfg.llm.max_inflight)
    });
    Ok(Settings {
        cfg,
        mock: o.mock.clone().or(file.mock),
        seed: o.seed.or(file.seed).unwrap_or(0),
        jobs: jobs.max(1),
        out: o.out.clone().or(file.out),
    })
}

fn completer(s: &Settings) -> Result<Box<dyn Completer>, Failure> {
    Ok(match &s.mock {
        Some(dir) => Box::new(ReplayStore::load(dir).map_err(env)?),
        None => Box::new(HttpClient::new(s.cfg.llm.clone())),
    })
}

fn read_problem(path: &Path) -> Result<PythonProblem, Failure> {
    if path.is_dir() {
        return load_problem(path).map_err(usage);
    }
    let source = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(PythonProblem {
        id,
        description: None,
        source,
        ground_truth: None,
    })
}

fn read_c(path: &Path) -> Result<minic::CheckedProgram, Failure> {
    let src = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    minic::load(&src).map_err(|e| usage(anyhow!(e.render(&path.display().to_string()))))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialisable"));
}

fn emit_report(s: &Settings, r: &PipelineReport) -> Result<(), Failure> {
    match &s.out {
        Some(dir) => {
            let p = write_report(dir, r).map_err(env)?;
            eprintln!("{}: {} -> {}", r.problem_id, r.outcome.label(), p.display());
        }
        None => println!("{}", r.to_json()),
    }
    Ok(())
}

fn pipeline_failure(e: PipelineError) -> Failure {
    env(e)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let s = settings(&cli.opts)?;
    match cli.command {
        Command::Transpile { problem } => {
            let p = read_problem(&problem)?;
            let c = completer(&s)?;
            let py = run_python(&p.source, &s.cfg.python()).map_err(env)?;
            let limits = s.cfg.gate_limits();
            let mut gate = |code: &str| match validate_candidate(&py, code, &limits) {
                GateDecision::Retry {
                    kind: pipeline::RetryKind::Parse,
                    reason,
                } => llm_bridge::GateResponse::ParseFail(reason),
                GateDecision::Retry { reason, .. } => {
                    llm_bridge::GateResponse::DifferentialFail(reason)
                }
                _ => llm_bridge::GateResponse::Accept,
            };
            let result = llm_bridge::transpile_with_retry(
                &p,
                &s.cfg.llm,
                c.as_ref(),
                &SystemClock::default(),
                &mut gate,
            )
            .map_err(env)?;
            match &result {
                llm_bridge::CandidateResult::Success { c_source, .. } => match &s.out {
                    Some(dir) => {
                        std::fs::create_dir_all(dir).map_err(env)?;
                        std::fs::write(dir.join(format!("{}.c", p.id)), c_source).map_err(env)?;
                    }
                    None => print!("{c_source}"),
                },
                llm_bridge::CandidateResult::GaveUp { reason, attempts } => {
                    eprintln!("gave up ({reason:?}) after {} attempts", attempts.len());
                }
            }
            Ok(true)
        }
        Command::Mutate {
            program,
            kind,
            site,
            reject_hangs,
            no_validate,
        } => {
            let p = read_problem(&program)?;
            let sel = match site {
                Some(i) => SiteSelection::Index(i),
                None => SiteSelection::Seed(s.seed),
            };
            let (mutant, record) = mutate(&p.source, kind, sel).map_err(usage)?;
            if !no_validate {
                let policy = if reject_hangs {
                    HangPolicy::Reject
                } else {
                    HangPolicy::Accept
                };
                let v = validate_mutant(&p, &mutant, &s.cfg.python(), policy).map_err(env)?;
                eprintln!("{}", serde_json::to_string(&v).expect("serialisable"));
            }
            match &s.out {
                Some(dir) => {
                    let id = format!("{}-{}", p.id, kind.to_string().to_ascii_lowercase());
                    let m = PythonProblem {
                        id,
                        description: p.description.clone(),
                        source: mutant,
                        ground_truth: Some(record),
                    };
                    let path = save_problem(dir, &m).map_err(env)?;
                    eprintln!("wrote {}", path.display());
                }
                None => {
                    print!("{mutant}");
                    eprintln!("{}", serde_json::to_string(&record).expect("serialisable"));
                }
            }
            Ok(true)
        }
        Command::Verify { file } => {
            let prog = read_c(&file)?;
            let v = bmc::check_with(&prog, &s.cfg.bmc()).map_err(usage)?;
            print_json(&v);
            Ok(true)
        }
        Command::Localize { file } => {
            let prog = read_c(&file)?;
            let v = bmc::check_with(&prog, &s.cfg.bmc()).map_err(usage)?;
            let result = match &v {
                bmc::Verdict::Violated(cex) => Some(faultloc::localize_counterexample(
                    &prog,
                    &s.cfg.localize(s.cfg.unwind),
                    cex,
                )),
                bmc::Verdict::BoundExceeded { .. } => {
                    let k = s.cfg.unwind.min(s.cfg.bound_exceeded_unwind);
                    Some(faultloc::localize(&prog, &s.cfg.localize(k), None))
                }
                bmc::Verdict::Verified { .. } => None,
            };
            let diagnoses = match result {
                Some(r) => Some(r.map_err(usage)?.1),
                None => None,
            };
            print_json(&serde_json::json!({ "verdict": v, "diagnoses": diagnoses }));
            Ok(true)
        }
        Command::Run { problem } => {
            let p = read_problem(&problem)?;
            let c = completer(&s)?;
            let r = run_pipeline(&p, &s.cfg, c.as_ref(), &SystemClock::default())
                .map_err(pipeline_failure)?;
            emit_report(&s, &r)?;
            Ok(!r.has_environment_error())
        }
        Command::Bench { dir } => {
            let problems = load_problems(&dir).map_err(usage)?;
            let c = completer(&s)?;
            let started = std::time::Instant::now();
            let reports =
                run_batch(&problems, &s.cfg, c.as_ref(), s.jobs).map_err(pipeline_failure)?;
            if let Some(out) = &s.out {
                for r in &reports {
                    write_report(out, r).map_err(env)?;
                }
                let summary = BatchSummary {
                    schema_version: SCHEMA_VERSION,
                    benchmark: s.cfg.benchmark.clone(),
                    model: s.cfg.llm.model.clone(),
                    include_description: s.cfg.llm.include_description,
                    problems: reports.len(),
                    outcomes: reports
                        .iter()
                        .map(|r| (r.problem_id.clone(), r.outcome))
                        .collect(),
                    total_ms: started.elapsed().as_millis() as u64,
                };
                let text = serde_json::to_string_pretty(&summary).expect("serialisable") + "\n";
                std::fs::write(out.join("summary.json"), text).map_err(env)?;
            }
            match compute_metrics(&reports) {
                Ok(t) => print!("{}", render_metrics(&t)),
                Err(e) => eprintln!("{e}"),
            }
            Ok(reports.iter().all(|r| !r.has_environment_error()))
        }
        Command::Report { dir, json } => {
            let reports = load_reports(&dir).map_err(usage)?;
            let t = compute_metrics(&reports).map_err(usage)?;
            if json {
                print_json(&t);
            } else {
                print!("{}", render_metrics(&t));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Env(e)) => {
            eprintln!("environment error: {e:#}");
            ExitCode::from(2)
        }
    }
}
