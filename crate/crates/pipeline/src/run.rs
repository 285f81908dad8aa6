//! End-to-end runs: Python, transpile with gating, verify, localise and
//! back-map.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use bmc::{check_with, Verdict};
use faultloc::{
    localize, localize_counterexample, map_diagnosis_to_source, GuardedFormula, LocalizeError,
};
use llm_bridge::{
    backmap_statements, transpile_with_retry, CandidateResult, Clock, Completer, GateResponse,
    LlmError, SystemClock,
};
use pyharness::{run_python, EnvError, MutantRecord, MutationKind, PythonProblem, RunOutcome};

use crate::config::PipelineConfig;
use crate::gate::{validate_candidate, GateDecision, RetryKind};
use crate::outcome::{classify_outcome, OutcomeClass, OutcomeFacts};
use crate::report::{
    BackmapRecord, PipelineReport, PythonRuns, Stage, StageError, Timings, INT_WIDTH,
    SCHEMA_VERSION,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("environment error: {0}")]
    Environment(String),
}

impl From<EnvError> for PipelineError {
    fn from(e: EnvError) -> Self {
        PipelineError::Environment(e.to_string())
    }
}

/// Rebuilds the unmutated program from a mutant and its record.
pub fn unapply_record(mutant: &str, record: &MutantRecord) -> Option<String> {
    let idx = (record.line as usize).checked_sub(1)?;
    let lines: Vec<&str> = mutant.split_inclusive('\n').collect();
    let target = lines.get(idx)?;
    let body = target.trim_end_matches(['\n', '\r']);
    if body != record.mutated {
        return None;
    }
    let mut out = String::with_capacity(mutant.len());
    for (i, l) in lines.iter().enumerate() {
        if i != idx {
            out.push_str(l);
        } else if record.kind == MutationKind::Wbo {
            out.push_str(&record.original);
            out.push_str(&l[body.len()..]);
        }
    }
    Some(out)
}

fn llm_error(stage: Stage, e: &LlmError) -> StageError {
    StageError {
        stage,
        message: e.to_string(),
        environment: matches!(
            e,
            LlmError::Transport(_) | LlmError::NoFixture { .. } | LlmError::Store(_)
        ),
    }
}

fn stage_error(stage: Stage, message: impl ToString) -> StageError {
    StageError {
        stage,
        message: message.to_string(),
        environment: false,
    }
}

fn ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Distinct diagnosed C statements in line order, whitespace collapsed.
fn faulty_statements(ds: &faultloc::DiagnosisSet, prog: &minic::CheckedProgram) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (_, text) in map_diagnosis_to_source(ds, prog) {
        let t = text.split_whitespace().collect::<Vec<_>>().join(" ");
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Runs the whole pipeline on one problem. Stage failures are recorded in
/// the report; only a missing Python interpreter aborts.
pub fn run_pipeline(
    problem: &PythonProblem,
    cfg: &PipelineConfig,
    completer: &dyn Completer,
    clock: &dyn Clock,
) -> Result<PipelineReport, PipelineError> {
    let started = Instant::now();
    let mut timings = Timings::default();
    let mut errors = Vec::new();
    let py_cfg = cfg.python();

    let t = Instant::now();
    let program_run = run_python(&problem.source, &py_cfg)?;
    let original_run = match &problem.ground_truth {
        Some(gt) => match unapply_record(&problem.source, gt) {
            Some(orig) => Some(run_python(&orig, &py_cfg)?),
            None => {
                errors.push(stage_error(
                    Stage::Python,
                    "ground-truth record does not match the program",
                ));
                None
            }
        },
        None => None,
    };
    timings.python_ms = ms(t);

    let mut report = PipelineReport {
        schema_version: SCHEMA_VERSION,
        problem_id: problem.id.clone(),
        benchmark: cfg.benchmark.clone(),
        mutation: problem.ground_truth.as_ref().map(|g| g.kind),
        model: cfg.llm.model.clone(),
        include_description: cfg.llm.include_description,
        config: cfg.clone(),
        int_width: INT_WIDTH,
        python_source: problem.source.clone(),
        ground_truth: problem.ground_truth.clone(),
        python: PythonRuns {
            program: Some(program_run.clone()),
            original: original_run,
        },
        candidate: None,
        gate: None,
        verdict: None,
        localisation_unwind: None,
        diagnoses: None,
        c_statements: Vec::new(),
        backmap: None,
        outcome: OutcomeClass::GaveUp,
        errors: Vec::new(),
        timings: Timings::default(),
    };

    let t = Instant::now();
    let candidate = transpile(problem, cfg, completer, clock, &program_run);
    timings.transpile_ms = ms(t);
    match candidate {
        Ok((c, gate)) => {
            report.candidate = Some(c);
            report.gate = gate;
        }
        Err(e) => errors.push(llm_error(Stage::Transpile, &e)),
    }

    if let Some(c_source) = report.c_source().map(str::to_owned) {
        verify_and_localise(
            &mut report,
            &c_source,
            problem,
            cfg,
            completer,
            &mut timings,
            &mut errors,
        );
    }

    let facts = OutcomeFacts {
        candidate: report.candidate.as_ref(),
        gate: report.gate.as_ref(),
        verdict: report.verdict.as_ref(),
        has_diagnoses: report
            .diagnoses
            .as_ref()
            .is_some_and(|d| !d.diagnoses.is_empty()),
        backmapped: report.backmapped(),
    };
    report.outcome =
        classify_outcome(&facts, problem.ground_truth.as_ref()).unwrap_or(OutcomeClass::Localised);
    timings.total_ms = ms(started);
    report.timings = timings;
    report.errors = errors;
    Ok(report)
}

fn transpile(
    problem: &PythonProblem,
    cfg: &PipelineConfig,
    completer: &dyn Completer,
    clock: &dyn Clock,
    py: &RunOutcome,
) -> Result<(CandidateResult, Option<GateDecision>), LlmError> {
    let limits = cfg.gate_limits();
    let mut accepted = None;
    let mut gate = |code: &str| match validate_candidate(py, code, &limits) {
        GateDecision::Retry {
            kind: RetryKind::Parse,
            reason,
        } => GateResponse::ParseFail(reason),
        GateDecision::Retry {
            kind: RetryKind::Differential,
            reason,
        } => GateResponse::DifferentialFail(reason),
        d => {
            accepted = Some(d);
            GateResponse::Accept
        }
    };
    let result = transpile_with_retry(problem, &cfg.llm, completer, clock, &mut gate)?;
    Ok((result, accepted))
}

fn verify_and_localise(
    report: &mut PipelineReport,
    c_source: &str,
    problem: &PythonProblem,
    cfg: &PipelineConfig,
    completer: &dyn Completer,
    timings: &mut Timings,
    errors: &mut Vec<StageError>,
) {
    let prog = match minic::load(c_source) {
        Ok(p) => p,
        Err(e) => {
            errors.push(stage_error(Stage::Verify, e.render("candidate.c")));
            return;
        }
    };
    let t = Instant::now();
    let verdict = check_with(&prog, &cfg.bmc());
    timings.verify_ms = ms(t);
    let verdict = match verdict {
        Ok(v) => v,
        Err(e) => {
            errors.push(stage_error(Stage::Verify, e));
            return;
        }
    };
    report.verdict = Some(verdict.clone());

    let t = Instant::now();
    let localised: Option<Result<(GuardedFormula, faultloc::DiagnosisSet), LocalizeError>> =
        match &verdict {
            Verdict::Verified { .. } => None,
            Verdict::Violated(cex) => Some(localize_counterexample(
                &prog,
                &cfg.localize(cfg.unwind),
                cex,
            )),
            Verdict::BoundExceeded { .. } => {
                let k = cfg.unwind.min(cfg.bound_exceeded_unwind);
                Some(localize(&prog, &cfg.localize(k), None))
            }
        };
    timings.localise_ms = ms(t);
    let ds = match localised {
        None => return,
        Some(Err(e)) => {
            errors.push(stage_error(Stage::Localise, e));
            return;
        }
        Some(Ok((g, ds))) => {
            report.localisation_unwind = Some(g.unwind);
            ds
        }
    };
    report.c_statements = faulty_statements(&ds, &prog);
    report.diagnoses = Some(ds);
    if report.c_statements.is_empty() {
        return;
    }

    let t = Instant::now();
    match backmap_statements(&cfg.llm, completer, problem, &report.c_statements) {
        Ok((response, statements)) => {
            report.backmap = Some(BackmapRecord {
                response,
                statements,
            })
        }
        Err(e) => errors.push(llm_error(Stage::Backmap, &e)),
    }
    timings.backmap_ms = ms(t);
}

/// Runs `problems` on a pool of `jobs` workers. Reports come back in input
/// order. The first environment failure stops the remaining work.
pub fn run_batch(
    problems: &[PythonProblem],
    cfg: &PipelineConfig,
    completer: &dyn Completer,
    jobs: usize,
) -> Result<Vec<PipelineReport>, PipelineError> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<PipelineReport, PipelineError>>>> =
        Mutex::new((0..problems.len()).map(|_| None).collect());
    let workers = jobs.clamp(1, problems.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(p) = problems.get(i) else { break };
                let clock = SystemClock::default();
                let r = run_pipeline(p, cfg, completer, &clock);
                let stop = r.is_err();
                results.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(r);
                if stop {
                    next.store(problems.len(), Ordering::SeqCst);
                }
            });
        }
    });
    let mut out = Vec::with_capacity(problems.len());
    for r in results
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .flatten()
    {
        out.push(r?);
    }
    Ok(out)
}
