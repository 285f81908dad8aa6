#![allow(dead_code)]

use std::path::PathBuf;

use llm_bridge::{ManualClock, ReplayStore};
use pipeline::{
    run_pipeline, OutcomeClass, PipelineConfig, PipelineReport, PythonRuns, Timings, INT_WIDTH,
    SCHEMA_VERSION,
};
use pyharness::{load_problem, MutationKind, PythonProblem};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn problem(id: &str) -> PythonProblem {
    load_problem(&fixtures().join("problems").join(id)).unwrap()
}

pub fn store(model: &str) -> ReplayStore {
    ReplayStore::load(&fixtures().join("replay").join(model)).unwrap()
}

pub fn config(model: &str) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.llm.model = model.into();
    cfg.benchmark = "fixtures".into();
    cfg.python_timeout = 1.0;
    cfg
}

/// Full pipeline run of a fixture problem against a model's replay store.
pub fn replay_run(model: &str, id: &str) -> PipelineReport {
    run_pipeline(
        &problem(id),
        &config(model),
        &store(model),
        &ManualClock::default(),
    )
    .unwrap()
}

/// A report carrying only what aggregation looks at.
pub fn bare_report(
    id: &str,
    model: &str,
    mutation: Option<MutationKind>,
    outcome: OutcomeClass,
) -> PipelineReport {
    PipelineReport {
        schema_version: SCHEMA_VERSION,
        problem_id: id.into(),
        benchmark: "bench".into(),
        mutation,
        model: model.into(),
        include_description: true,
        config: PipelineConfig::default(),
        int_width: INT_WIDTH,
        python_source: String::new(),
        ground_truth: None,
        python: PythonRuns::default(),
        candidate: None,
        gate: None,
        verdict: None,
        localisation_unwind: None,
        diagnoses: None,
        c_statements: Vec::new(),
        backmap: None,
        outcome,
        errors: Vec::new(),
        timings: Timings::default(),
    }
}

/// The constructed ten-run group: 4 correct, 2 other, 3 fixed, 1 compilation error.
pub fn ten_reports() -> Vec<PipelineReport> {
    let classes = [
        (4, OutcomeClass::CorrectBugLocalised),
        (2, OutcomeClass::OtherBugsLocalised),
        (3, OutcomeClass::TranspiledFixedCode),
        (1, OutcomeClass::CompilationError),
    ];
    let mut out = Vec::new();
    for (n, c) in classes {
        for _ in 0..n {
            out.push(bare_report(
                &format!("p{}", out.len()),
                "qwen",
                Some(MutationKind::Wbo),
                c,
            ));
        }
    }
    out
}
