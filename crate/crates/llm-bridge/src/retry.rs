//! The transpile loop: ask for C, gate the candidate, and on rejection ask
//! again with the reason, until acceptance, the attempt cap or the time
//! budget.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use pyharness::PythonProblem;
use serde::{Deserialize, Serialize};

use crate::client::Completer;
use crate::extract::extract_c_code;
use crate::prompt::{render_prompt, PromptKind};
use crate::{LlmConfig, LlmError};

pub trait Clock: Send + Sync {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

#[derive(Debug)]
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

/// A clock that only moves when told to; shared between clones.
#[derive(Clone, Debug, Default)]
pub struct ManualClock(Arc<Mutex<Duration>>);

impl ManualClock {
    pub fn advance(&self, by: Duration) {
        *self.0.lock().unwrap_or_else(|e| e.into_inner()) += by;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        *self.0.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptClass {
    Accepted,
    ParseFail,
    DifferentialFail,
    Timeout,
    TransportError,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub prompt: String,
    pub response: String,
    pub class: AttemptClass,
    pub reason: Option<String>,
    pub wall_ms: u64,
}

/// What the caller's gate decided about one candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateResponse {
    Accept,
    ParseFail(String),
    DifferentialFail(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaveUpReason {
    MaxAttempts,
    TimeBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CandidateResult {
    Success {
        c_source: String,
        attempts: Vec<Attempt>,
    },
    GaveUp {
        reason: GaveUpReason,
        attempts: Vec<Attempt>,
    },
}

impl CandidateResult {
    pub fn attempts(&self) -> &[Attempt] {
        match self {
            CandidateResult::Success { attempts, .. }
            | CandidateResult::GaveUp { attempts, .. } => attempts,
        }
    }
}

pub const NO_CODE_REASON: &str = "C compilation/parse error: the response contains no C code block";

/// Runs the transpile loop. Rejected candidates count toward
/// `cfg.max_attempts`; the accepted one does not. Transport failures also
/// consume attempts and are returned as an error when they exhaust them.
/// A missing replay fixture is returned at once.
pub fn transpile_with_retry(
    problem: &PythonProblem,
    cfg: &LlmConfig,
    completer: &dyn Completer,
    clock: &dyn Clock,
    gate: &mut dyn FnMut(&str) -> GateResponse,
) -> Result<CandidateResult, LlmError> {
    let start = clock.now();
    let mut attempts = Vec::new();
    let mut failures = 0u32;
    let mut kind = PromptKind::Transpile;
    let mut last_transport = None;
    let max_attempts = cfg.max_attempts.max(1);
    loop {
        if failures >= max_attempts {
            if let Some(e) = last_transport {
                return Err(e);
            }
            return Ok(CandidateResult::GaveUp {
                reason: GaveUpReason::MaxAttempts,
                attempts,
            });
        }
        if clock.now() - start >= cfg.time_budget {
            return Ok(CandidateResult::GaveUp {
                reason: GaveUpReason::TimeBudget,
                attempts,
            });
        }
        let prompt = render_prompt(&kind, problem, cfg)?;
        let sent = clock.now();
        let reply = completer.complete(&prompt);
        let wall_ms = (clock.now() - sent).as_millis() as u64;
        let completion = match reply {
            Ok(c) => c,
            Err(e @ LlmError::Transport(_)) => {
                attempts.push(Attempt {
                    prompt,
                    response: String::new(),
                    class: AttemptClass::TransportError,
                    reason: Some(e.to_string()),
                    wall_ms,
                });
                failures += 1;
                last_transport = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        last_transport = None;
        if clock.now() - start > cfg.time_budget {
            attempts.push(Attempt {
                prompt,
                response: completion.text,
                class: AttemptClass::Timeout,
                reason: Some("time budget exceeded".into()),
                wall_ms,
            });
            return Ok(CandidateResult::GaveUp {
                reason: GaveUpReason::TimeBudget,
                attempts,
            });
        }
        let verdict = match extract_c_code(&completion.text) {
            Ok(code) => match gate(&code) {
                GateResponse::Accept => {
                    attempts.push(Attempt {
                        prompt,
                        response: completion.text,
                        class: AttemptClass::Accepted,
                        reason: None,
                        wall_ms,
                    });
                    return Ok(CandidateResult::Success {
                        c_source: code,
                        attempts,
                    });
                }
                GateResponse::ParseFail(r) => (AttemptClass::ParseFail, r),
                GateResponse::DifferentialFail(r) => (AttemptClass::DifferentialFail, r),
            },
            Err(_) => (AttemptClass::ParseFail, NO_CODE_REASON.to_string()),
        };
        let (class, reason) = verdict;
        attempts.push(Attempt {
            prompt,
            response: completion.text,
            class,
            reason: Some(reason.clone()),
            wall_ms,
        });
        failures += 1;
        kind = PromptKind::Retry { reason };
    }
}
