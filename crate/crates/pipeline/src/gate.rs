//! The differential gate between a transpiled candidate and the Python run.

use minic::{interpret_main, InterpError, Limits, Status};
use pyharness::RunOutcome;
use serde::{Deserialize, Serialize};

pub const PARSE_REASON_PREFIX: &str = "C compilation/parse error: ";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryKind {
    Parse,
    Differential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum GateDecision {
    ToVerifier,
    Retry { kind: RetryKind, reason: String },
    FixedCodeSuspected,
}

/// How the candidate fared when run concretely.
#[derive(Clone, Debug, PartialEq, Eq)]
enum CRun {
    Pass,
    Fail(String),
    /// Needs nondeterministic inputs, or stopped on an assumption.
    Inconclusive,
}

fn run_candidate(prog: &minic::CheckedProgram, limits: &Limits) -> CRun {
    match interpret_main(prog, limits) {
        Ok(out) => match out.status {
            Status::Completed { .. } => CRun::Pass,
            Status::AssertionViolated { span } => CRun::Fail(format!(
                "assertion {} failed in C but passed in Python",
                assertion_text(prog.source(), span)
            )),
            Status::AssumeViolated { .. } => CRun::Inconclusive,
            Status::RuntimeError { kind, span } => CRun::Fail(format!(
                "{kind} at line {} in C but Python passed",
                span.line
            )),
        },
        Err(InterpError::NondetForbidden(_) | InterpError::InputsExhausted(_)) => {
            CRun::Inconclusive
        }
        Err(e) => CRun::Fail(format!("{e} in C but Python passed")),
    }
}

/// The asserted expression, without the `assert(...)` wrapper.
fn assertion_text(source: &str, span: minic::SourceSpan) -> String {
    let s = span.snippet(source);
    let s = s.trim().trim_end_matches(';').trim();
    s.strip_prefix("assert")
        .map(str::trim)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s)
        .trim()
        .to_string()
}

/// Decides what happens to a candidate. A Python timeout counts as a failing
/// run, so a candidate that also fails goes to the verifier.
pub fn validate_candidate(py: &RunOutcome, c_source: &str, limits: &Limits) -> GateDecision {
    let prog = match minic::load(c_source) {
        Ok(p) => p,
        Err(e) => {
            return GateDecision::Retry {
                kind: RetryKind::Parse,
                reason: format!("{PARSE_REASON_PREFIX}{}", e.render("candidate.c")),
            }
        }
    };
    let py_pass = py.passed();
    match (run_candidate(&prog, limits), py_pass) {
        (CRun::Fail(reason), true) => GateDecision::Retry {
            kind: RetryKind::Differential,
            reason,
        },
        (CRun::Pass, false) => GateDecision::FixedCodeSuspected,
        _ => GateDecision::ToVerifier,
    }
}
