//! Mapping localised C statements back to lines of the Python program.

use pyharness::PythonProblem;
use serde::{Deserialize, Serialize};

use crate::client::Completer;
use crate::extract::extract_fenced;
use crate::prompt::{render_prompt, PromptKind};
use crate::{LlmConfig, LlmError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackmappedStatement {
    /// Statement as returned by the model, trimmed.
    pub text: String,
    /// First program line whose trimmed text equals `text`.
    pub line: Option<u32>,
}

impl BackmappedStatement {
    pub fn anchored(&self) -> bool {
        self.line.is_some()
    }
}

/// Anchors each returned statement by exact match after trimming.
pub fn anchor(source: &str, statements: &str) -> Vec<BackmappedStatement> {
    statements
        .lines()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|text| BackmappedStatement {
            text: text.to_string(),
            line: source
                .lines()
                .position(|l| l.trim() == text)
                .map(|i| i as u32 + 1),
        })
        .collect()
}

/// Asks the model which Python statements correspond to `c_statements`.
/// The prompt ends inside an open python fence, so a reply that is only
/// code followed by a closing fence is accepted as well.
pub fn backmap_statements(
    cfg: &LlmConfig,
    completer: &dyn Completer,
    problem: &PythonProblem,
    c_statements: &[String],
) -> Result<(String, Vec<BackmappedStatement>), LlmError> {
    let prompt = render_prompt(
        &PromptKind::Backmap {
            statements: c_statements.to_vec(),
        },
        problem,
        cfg,
    )?;
    let reply = completer.complete(&prompt)?.text;
    let body = match extract_fenced(&reply, &["python", "py"]) {
        Ok(b) => b,
        Err(_) => match reply.split_once("\n```") {
            Some((code, _)) if !reply.trim_start().starts_with("```") => code.to_string(),
            _ => return Err(LlmError::NoCodeBlock),
        },
    };
    let mapped = anchor(&problem.source, &body);
    if mapped.is_empty() {
        return Err(LlmError::EmptyMapping);
    }
    Ok((reply, mapped))
}
