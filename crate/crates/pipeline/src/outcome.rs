//! Outcome classes of a finished run.

use llm_bridge::{AttemptClass, BackmappedStatement, CandidateResult};
use pyharness::MutantRecord;
use serde::{Deserialize, Serialize};

use bmc::Verdict;

use crate::gate::GateDecision;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    CorrectBugLocalised,
    OtherBugsLocalised,
    TranspiledFixedCode,
    CompilationError,
    Verified,
    VerificationFailedNoDiagnosis,
    GaveUp,
    /// Diagnoses exist but there is no ground truth to score them against.
    Localised,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 8] = [
        OutcomeClass::CorrectBugLocalised,
        OutcomeClass::OtherBugsLocalised,
        OutcomeClass::TranspiledFixedCode,
        OutcomeClass::CompilationError,
        OutcomeClass::Verified,
        OutcomeClass::VerificationFailedNoDiagnosis,
        OutcomeClass::GaveUp,
        OutcomeClass::Localised,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OutcomeClass::CorrectBugLocalised => "Correct Bug Localised",
            OutcomeClass::OtherBugsLocalised => "Other Bugs Localised",
            OutcomeClass::TranspiledFixedCode => "Transpiled Fixed Code",
            OutcomeClass::CompilationError => "Compilation Errors",
            OutcomeClass::Verified => "Verified",
            OutcomeClass::VerificationFailedNoDiagnosis => "Verification Failed, No Diagnosis",
            OutcomeClass::GaveUp => "Gave Up",
            OutcomeClass::Localised => "Localised (no ground truth)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("diagnoses exist but the problem has no ground-truth mutant")]
    MissingGroundTruth,
}

/// The recorded facts a classification depends on.
#[derive(Clone, Copy, Debug)]
pub struct OutcomeFacts<'a> {
    pub candidate: Option<&'a CandidateResult>,
    pub gate: Option<&'a GateDecision>,
    pub verdict: Option<&'a Verdict>,
    pub has_diagnoses: bool,
    pub backmapped: &'a [BackmappedStatement],
}

/// Maps a run to its class. Localisation classes need `ground_truth`.
pub fn classify_outcome(
    f: &OutcomeFacts<'_>,
    ground_truth: Option<&MutantRecord>,
) -> Result<OutcomeClass, ClassifyError> {
    match f.candidate {
        None => return Ok(OutcomeClass::GaveUp),
        Some(CandidateResult::GaveUp { attempts, .. }) => {
            let all_parse =
                !attempts.is_empty() && attempts.iter().all(|a| a.class == AttemptClass::ParseFail);
            return Ok(if all_parse {
                OutcomeClass::CompilationError
            } else {
                OutcomeClass::GaveUp
            });
        }
        Some(CandidateResult::Success { .. }) => {}
    }
    match f.verdict {
        Some(Verdict::Verified { .. }) => {
            return Ok(if f.gate == Some(&GateDecision::FixedCodeSuspected) {
                OutcomeClass::TranspiledFixedCode
            } else {
                OutcomeClass::Verified
            })
        }
        None => return Ok(OutcomeClass::VerificationFailedNoDiagnosis),
        Some(_) => {}
    }
    if !f.has_diagnoses {
        return Ok(OutcomeClass::VerificationFailedNoDiagnosis);
    }
    let gt = ground_truth.ok_or(ClassifyError::MissingGroundTruth)?;
    let hit = f.backmapped.iter().any(|s| s.line == Some(gt.line));
    Ok(if hit {
        OutcomeClass::CorrectBugLocalised
    } else {
        OutcomeClass::OtherBugsLocalised
    })
}
