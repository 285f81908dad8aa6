mod common;

use std::process::Command;
use std::time::Duration;

use common::*;
use llm_bridge::{
    AttemptClass, BackmappedStatement, CandidateResult, Completer, Completion, LlmError,
    ManualClock,
};
use pipeline::{
    classify_outcome, compute_metrics, load_reports, render_metrics, run_pipeline, unapply_record,
    validate_candidate, write_report, ClassifyError, GateDecision, MetricsError, OutcomeClass,
    OutcomeFacts, RetryKind,
};
use pyharness::{MutantRecord, MutationKind, RunOutcome, RunStatus};

fn py(status: RunStatus) -> RunOutcome {
    RunOutcome {
        status,
        duration_ms: 0,
    }
}

fn py_fail() -> RunOutcome {
    py(RunStatus::AssertionFailed { line: Some(10) })
}

fn c_fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("c").join(name)).unwrap()
}

fn limits() -> minic::Limits {
    minic::Limits {
        step_limit: 1_000_000,
        timeout: Duration::from_secs(5),
    }
}

#[test]
fn gate_sends_consistent_runs_to_the_verifier() {
    let buggy = c_fixture("distribute_candies_buggy.c");
    let fixed = c_fixture("distribute_candies_fixed.c");
    assert_eq!(
        validate_candidate(&py_fail(), &buggy, &limits()),
        GateDecision::ToVerifier
    );
    assert_eq!(
        validate_candidate(&py(RunStatus::Pass), &fixed, &limits()),
        GateDecision::ToVerifier
    );
}

#[test]
fn gate_retries_when_only_c_fails() {
    let buggy = c_fixture("distribute_candies_buggy.c");
    match validate_candidate(&py(RunStatus::Pass), &buggy, &limits()) {
        GateDecision::Retry {
            kind: RetryKind::Differential,
            reason,
        } => assert_eq!(
            reason,
            "assertion distributeCandies(5, 2) == 3 failed in C but passed in Python"
        ),
        d => panic!("{d:?}"),
    }
}

#[test]
fn gate_flags_candidates_that_fix_the_program() {
    let fixed = c_fixture("distribute_candies_fixed.c");
    assert_eq!(
        validate_candidate(&py_fail(), &fixed, &limits()),
        GateDecision::FixedCodeSuspected
    );
}

#[test]
fn gate_retries_on_parse_errors() {
    let d = validate_candidate(&py(RunStatus::Pass), "int main() { return 0 }", &limits());
    let GateDecision::Retry {
        kind: RetryKind::Parse,
        reason,
    } = d
    else {
        panic!("{d:?}")
    };
    assert!(
        reason.starts_with("C compilation/parse error: candidate.c:1:"),
        "{reason}"
    );
}

#[test]
fn gate_defers_nondeterministic_candidates() {
    let src = "int main() { int x = nondet_int(); assert(x != 7); return 0; }";
    assert_eq!(
        validate_candidate(&py(RunStatus::Pass), src, &limits()),
        GateDecision::ToVerifier
    );
}

#[test]
fn hanging_python_and_hanging_c_go_to_the_verifier() {
    let granite = c_fixture("distance_traveled_granite.c");
    assert_eq!(
        validate_candidate(&py(RunStatus::Timeout), &granite, &limits()),
        GateDecision::ToVerifier
    );
}

#[test]
fn unapplying_records_restores_originals() {
    let pairs = [
        ("motivating", "distribute_candies.py"),
        ("lcb-188", "furthest_distance.py"),
        ("lcb-463", "distribute_candies_463.py"),
        ("lcb-57", "distance_traveled.py"),
        ("lcb-76", "make_integer_zero.py"),
    ];
    for (id, original) in pairs {
        let p = problem(id);
        let want = std::fs::read_to_string(fixtures().join("python").join(original)).unwrap();
        assert_eq!(
            unapply_record(&p.source, p.ground_truth.as_ref().unwrap()).as_deref(),
            Some(want.as_str()),
            "{id}"
        );
    }
    let mut wrong = problem("lcb-57").ground_truth.unwrap();
    wrong.line = 5;
    assert_eq!(unapply_record(&problem("lcb-57").source, &wrong), None);
}

fn record(line: u32) -> MutantRecord {
    MutantRecord {
        kind: MutationKind::Adc,
        line,
        original: "    ans = 0".into(),
        mutated: "    ans = 0 + 1".into(),
        seed: 0,
        site_index: 1,
    }
}

fn success() -> CandidateResult {
    CandidateResult::Success {
        c_source: String::new(),
        attempts: Vec::new(),
    }
}

fn violated() -> bmc::Verdict {
    bmc::Verdict::BoundExceeded {
        span: minic::SourceSpan::new(1, 1, 0, 1),
    }
}

fn localised<'a>(
    c: &'a CandidateResult,
    v: &'a bmc::Verdict,
    b: &'a [BackmappedStatement],
) -> OutcomeFacts<'a> {
    OutcomeFacts {
        candidate: Some(c),
        gate: Some(&GateDecision::ToVerifier),
        verdict: Some(v),
        has_diagnoses: true,
        backmapped: b,
    }
}

#[test]
fn classification_by_anchored_line() {
    let (c, v) = (success(), violated());
    let at = |line| BackmappedStatement {
        text: "x".into(),
        line: Some(line),
    };
    let (b4, b8) = ([at(4)], [at(8)]);
    let gt = record(4);
    assert_eq!(
        classify_outcome(&localised(&c, &v, &b4), Some(&gt)),
        Ok(OutcomeClass::CorrectBugLocalised)
    );
    assert_eq!(
        classify_outcome(&localised(&c, &v, &b8), Some(&gt)),
        Ok(OutcomeClass::OtherBugsLocalised)
    );
    assert_eq!(
        classify_outcome(&localised(&c, &v, &[]), Some(&gt)),
        Ok(OutcomeClass::OtherBugsLocalised)
    );
    assert_eq!(
        classify_outcome(&localised(&c, &v, &b4), None),
        Err(ClassifyError::MissingGroundTruth)
    );
}

#[test]
fn classification_of_give_ups() {
    let attempt = |class| llm_bridge::Attempt {
        prompt: String::new(),
        response: String::new(),
        class,
        reason: None,
        wall_ms: 0,
    };
    let parse = CandidateResult::GaveUp {
        reason: llm_bridge::GaveUpReason::MaxAttempts,
        attempts: (0..5).map(|_| attempt(AttemptClass::ParseFail)).collect(),
    };
    let mixed = CandidateResult::GaveUp {
        reason: llm_bridge::GaveUpReason::MaxAttempts,
        attempts: vec![
            attempt(AttemptClass::ParseFail),
            attempt(AttemptClass::DifferentialFail),
        ],
    };
    let facts = |c| OutcomeFacts {
        candidate: c,
        gate: None,
        verdict: None,
        has_diagnoses: false,
        backmapped: &[],
    };
    assert_eq!(
        classify_outcome(&facts(Some(&parse)), None),
        Ok(OutcomeClass::CompilationError)
    );
    assert_eq!(
        classify_outcome(&facts(Some(&mixed)), None),
        Ok(OutcomeClass::GaveUp)
    );
    assert_eq!(
        classify_outcome(&facts(None), None),
        Ok(OutcomeClass::GaveUp)
    );
}

#[test]
fn fixed_suspect_that_verifies_is_transpiled_fixed_code() {
    let c = success();
    let v = bmc::Verdict::Verified { bound: 64 };
    let f = OutcomeFacts {
        candidate: Some(&c),
        gate: Some(&GateDecision::FixedCodeSuspected),
        verdict: Some(&v),
        has_diagnoses: false,
        backmapped: &[],
    };
    assert_eq!(
        classify_outcome(&f, Some(&record(4))),
        Ok(OutcomeClass::TranspiledFixedCode)
    );
    let f = OutcomeFacts {
        gate: Some(&GateDecision::ToVerifier),
        ..f
    };
    assert_eq!(classify_outcome(&f, None), Ok(OutcomeClass::Verified));
}

#[test]
fn granite_problem_57_is_localised_through_the_bound() {
    let r = replay_run("granite", "lcb-57");
    assert!(matches!(
        r.verdict,
        Some(bmc::Verdict::BoundExceeded { .. })
    ));
    assert_eq!(r.localisation_unwind, Some(8));
    let ds = r.diagnoses.as_ref().unwrap();
    assert!(ds
        .diagnoses
        .iter()
        .any(|d| d.statements.iter().any(|s| s.line == 6)));
    assert_eq!(
        r.python.program.as_ref().unwrap().status,
        RunStatus::Timeout
    );
    assert!(r.python.original.as_ref().unwrap().passed());
    assert_eq!(r.backmapped()[0].line, Some(4));
    assert_eq!(r.outcome, OutcomeClass::CorrectBugLocalised);
    assert!(r.dangling_lines().is_empty());
}

#[test]
fn qwen_problem_76_is_localised() {
    let r = replay_run("qwen", "lcb-76");
    assert!(r.c_statements.iter().any(|s| s == "while (x < y)"));
    assert_eq!(r.backmapped()[0].text, "while x < y:");
    assert_eq!(r.outcome, OutcomeClass::CorrectBugLocalised);
}

#[test]
fn reports_round_trip_through_json() {
    for (model, id) in [
        ("qwen", "motivating"),
        ("deepseek", "lcb-463"),
        ("deepseek", "lcb-188"),
    ] {
        let r = replay_run(model, id);
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        let back = pipeline::PipelineReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r, "{id}");
        assert!(r.dangling_lines().is_empty(), "{id}");
    }
}

#[test]
fn missing_fixture_is_recorded_not_fatal() {
    let r = replay_run("granite", "motivating");
    assert_eq!(r.outcome, OutcomeClass::GaveUp);
    assert!(r.verdict.is_none());
    assert!(r.has_environment_error());
}

struct Fixed(&'static str);

impl Completer for Fixed {
    fn complete(&self, _: &str) -> Result<Completion, LlmError> {
        Ok(Completion {
            text: self.0.into(),
            latency: Duration::ZERO,
        })
    }
}

#[test]
fn unparseable_candidates_are_compilation_errors() {
    let r = run_pipeline(
        &problem("motivating"),
        &config("mock"),
        &Fixed("```c\nint main() { return 0 }\n```"),
        &ManualClock::default(),
    )
    .unwrap();
    assert_eq!(r.candidate.as_ref().unwrap().attempts().len(), 5);
    assert_eq!(r.outcome, OutcomeClass::CompilationError);
}

#[test]
fn wrong_candidates_for_a_passing_program_give_up() {
    let wrong = "```c\nint f() { return 4; }\nint main() { assert(f() == 3); return 0; }\n```";
    let r = run_pipeline(
        &problem("motivating-fixed"),
        &config("mock"),
        &Fixed(wrong),
        &ManualClock::default(),
    )
    .unwrap();
    let attempts = r.candidate.as_ref().unwrap().attempts();
    assert!(attempts
        .iter()
        .all(|a| a.class == AttemptClass::DifferentialFail));
    assert!(attempts[1]
        .prompt
        .contains("Reason: assertion f() == 3 failed in C but passed in Python\n"));
    assert_eq!(r.outcome, OutcomeClass::GaveUp);
}

#[test]
fn metrics_percentages_and_empty_input() {
    let t = compute_metrics(&ten_reports()).unwrap();
    let g = &t.groups[0];
    assert_eq!(g.n, 10);
    assert_eq!(
        [
            g.correct_bug_localised,
            g.other_bugs_localised,
            g.transpiled_fixed_code,
            g.compilation_errors
        ],
        [40.0, 20.0, 30.0, 10.0]
    );
    assert_eq!(compute_metrics(&[]), Err(MetricsError::EmptyGroup));
}

#[test]
fn metrics_group_by_model_mutation_and_description() {
    let mut rs = ten_reports();
    let mut other = bare_report(
        "q",
        "granite",
        Some(MutationKind::Adc),
        OutcomeClass::GaveUp,
    );
    other.include_description = false;
    rs.push(other);
    rs.push(bare_report("v", "qwen", None, OutcomeClass::Verified));
    let t = compute_metrics(&rs).unwrap();
    assert_eq!(t.groups.len(), 3);
    let text = render_metrics(&t);
    assert!(text.contains("Benchmark: bench (without description)"));
    assert!(text.contains("Bug: Assignment Duplication with Constant (ADC)"));
    assert!(text.contains("Unmutated programs"));
    assert!(text.contains("100.0%"));
}

#[test]
fn stored_reports_reload() {
    let dir = tempfile::tempdir().unwrap();
    for r in ten_reports() {
        write_report(dir.path(), &r).unwrap();
    }
    std::fs::write(dir.path().join("summary.json"), "{}").unwrap();
    let back = load_reports(dir.path()).unwrap();
    assert_eq!(back.len(), 10);
    let mut bad = bare_report("zz", "qwen", None, OutcomeClass::Verified);
    bad.schema_version = 99;
    write_report(dir.path(), &bad).unwrap();
    assert!(load_reports(dir.path()).is_err());
}

fn pyverify(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pyverify"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: std::path::PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn cli_exit_codes() {
    assert_eq!(pyverify(&["--help"]).status.code(), Some(0));
    assert_eq!(pyverify(&["--bogus"]).status.code(), Some(1));
    assert_eq!(pyverify(&["verify"]).status.code(), Some(1));
    let problem = path(fixtures().join("problems/motivating"));
    let mock = path(fixtures().join("replay/qwen"));
    let out = pyverify(&[
        "run",
        &problem,
        "--mock",
        &mock,
        "--interpreter",
        "/nonexistent/python",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = pyverify(&["run", &problem, "--mock", "/nonexistent/replay"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_verify_and_localize() {
    let fixed = path(fixtures().join("c/distribute_candies_fixed.c"));
    let out = pyverify(&["verify", &fixed, "--unwind", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "verified");
    assert_eq!(v["bound"], 8);

    let buggy = path(fixtures().join("c/distribute_candies_buggy.c"));
    let out = pyverify(&["localize", &buggy]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"]["verdict"], "violated");
    assert_eq!(v["diagnoses"]["cost"], 1);
}

#[test]
fn cli_run_bench_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = path(dir.path().join("reports"));
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"mock": "{}", "model": "qwen", "benchmark": "fixtures", "timeout": 1.0, "jobs": 2}}"#,
            path(fixtures().join("replay/qwen"))
        ),
    )
    .unwrap();
    let problems = dir.path().join("problems");
    for id in ["motivating", "motivating-fixed"] {
        let p = problem(id);
        pyharness::save_problem(&problems, &p).unwrap();
    }
    let out = pyverify(&[
        "bench",
        &path(problems),
        "--config",
        &path(config.clone()),
        "--out",
        &out_dir,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(
        table.contains("Bug: Assignment Duplication with Constant (ADC)"),
        "{table}"
    );
    assert!(std::path::Path::new(&out_dir).join("summary.json").exists());
    let reports = load_reports(std::path::Path::new(&out_dir)).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].outcome, OutcomeClass::CorrectBugLocalised);
    assert_eq!(reports[1].outcome, OutcomeClass::Verified);

    let out = pyverify(&["report", &out_dir]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("% Correct Bug Localised"));

    let run = pyverify(&[
        "run",
        &path(fixtures().join("problems/motivating")),
        "--config",
        &path(config),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let r = pipeline::PipelineReport::from_json(&String::from_utf8(run.stdout).unwrap()).unwrap();
    assert_eq!(r.outcome, OutcomeClass::CorrectBugLocalised);
}

#[test]
fn cli_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"unwnd": 3}"#).unwrap();
    let fixed = path(fixtures().join("c/distribute_candies_fixed.c"));
    assert_eq!(
        pyverify(&["verify", &fixed, "--config", &path(config)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn cli_mutate_writes_a_problem() {
    let dir = tempfile::tempdir().unwrap();
    let src = path(fixtures().join("python/distribute_candies.py"));
    let out = pyverify(&[
        "mutate",
        &src,
        "--kind",
        "adc",
        "--site",
        "1",
        "--out",
        &path(dir.path().to_path_buf()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"accepted\""));
    let p = pyharness::load_problem(&dir.path().join("distribute_candies-adc")).unwrap();
    assert_eq!(p.source, problem("motivating").source);
    assert_eq!(p.ground_truth, problem("motivating").ground_truth);
}

#[test]
fn cli_unwind_policy() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("count.c");
    std::fs::write(&file, "int main() {\n    int i = 0;\n    while (i < 100) {\n        i++;\n    }\n    assert(i == 100);\n}\n")
        .unwrap();
    let file = path(file);
    let verdict = |policy: &str| {
        let out = pyverify(&["verify", &file, "--unwind", "4", "--unwind-policy", policy]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["verdict"].clone()
    };
    assert_eq!(verdict("fail"), "bound_exceeded");
    assert_eq!(verdict("assume"), "verified");
    assert_eq!(pyverify(&["verify", &file, "--unwind-policy", "maybe"]).status.code(), Some(1));
}
