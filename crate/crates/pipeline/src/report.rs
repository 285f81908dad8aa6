//! Per-problem report documents.

use std::collections::BTreeMap;
use std::path::Path;

use bmc::Verdict;
use faultloc::DiagnosisSet;
use llm_bridge::{BackmappedStatement, CandidateResult};
use pyharness::{MutantRecord, MutationKind, RunOutcome};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::PipelineConfig;
use crate::gate::GateDecision;
use crate::outcome::OutcomeClass;

/// MiniC evaluates every integer type as 32-bit two's complement.
pub const INT_WIDTH: u32 = 32;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PythonRuns {
    /// The program under test as given.
    pub program: Option<RunOutcome>,
    /// The unmutated program, rebuilt from the ground-truth record.
    pub original: Option<RunOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackmapRecord {
    pub response: String,
    pub statements: Vec<BackmappedStatement>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Python,
    Transpile,
    Verify,
    Localise,
    Backmap,
    Classify,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
    /// The failure lies outside the program: interpreter, endpoint or fixtures.
    pub environment: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub python_ms: u64,
    pub transpile_ms: u64,
    pub verify_ms: u64,
    pub localise_ms: u64,
    pub backmap_ms: u64,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub problem_id: String,
    pub benchmark: String,
    pub mutation: Option<MutationKind>,
    pub model: String,
    pub include_description: bool,
    pub config: PipelineConfig,
    /// Bit width of C `int` assumed by the interpreter and the model checker.
    pub int_width: u32,
    pub python_source: String,
    pub ground_truth: Option<MutantRecord>,
    pub python: PythonRuns,
    pub candidate: Option<CandidateResult>,
    pub gate: Option<GateDecision>,
    pub verdict: Option<Verdict>,
    /// Unwind bound the diagnoses were computed at.
    pub localisation_unwind: Option<u32>,
    pub diagnoses: Option<DiagnosisSet>,
    /// Distinct faulty C statements sent for back-mapping, by line.
    pub c_statements: Vec<String>,
    pub backmap: Option<BackmapRecord>,
    pub outcome: OutcomeClass,
    pub errors: Vec<StageError>,
    pub timings: Timings,
}

impl PipelineReport {
    /// The accepted C candidate, if any.
    pub fn c_source(&self) -> Option<&str> {
        match &self.candidate {
            Some(CandidateResult::Success { c_source, .. }) => Some(c_source),
            _ => None,
        }
    }

    pub fn backmapped(&self) -> &[BackmappedStatement] {
        self.backmap
            .as_ref()
            .map(|b| b.statements.as_slice())
            .unwrap_or(&[])
    }

    pub fn has_environment_error(&self) -> bool {
        self.errors.iter().any(|e| e.environment)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Line numbers that do not exist in the recorded sources.
    pub fn dangling_lines(&self) -> Vec<u32> {
        let py_lines = self.python_source.lines().count() as u32;
        let c_lines = self
            .c_source()
            .map(|c| c.lines().count() as u32)
            .unwrap_or(0);
        let mut bad = Vec::new();
        for s in self.backmapped() {
            if let Some(l) = s.line.filter(|&l| l == 0 || l > py_lines) {
                bad.push(l);
            }
        }
        if let Some(ds) = &self.diagnoses {
            for st in ds.diagnoses.iter().flat_map(|d| &d.statements) {
                if st.line == 0 || st.line > c_lines {
                    bad.push(st.line);
                }
            }
        }
        bad
    }
}

/// Copy of `v` with every `*_ms` number set to zero.
pub fn zero_timings(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.iter()
                .map(|(k, x)| {
                    let x = if k.ends_with("_ms") && x.is_number() {
                        Value::from(0)
                    } else {
                        zero_timings(x)
                    };
                    (k.clone(), x)
                })
                .collect(),
        ),
        Value::Array(a) => Value::Array(a.iter().map(zero_timings).collect()),
        other => other.clone(),
    }
}

/// Batch-level document written next to the per-problem reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema_version: u32,
    pub benchmark: String,
    pub model: String,
    pub include_description: bool,
    pub problems: usize,
    pub outcomes: BTreeMap<String, OutcomeClass>,
    pub total_ms: u64,
}

pub fn write_report(dir: &Path, report: &PipelineReport) -> std::io::Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", report.problem_id));
    std::fs::write(&path, report.to_json() + "\n")?;
    Ok(path)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: unsupported schema version {found}")]
    Schema { path: String, found: u32 },
}

/// Loads every report in `dir`, skipping `summary.json`, sorted by id.
pub fn load_reports(dir: &Path) -> Result<Vec<PipelineReport>, LoadError> {
    let io = |path: &Path, source| LoadError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| io(dir, e))? {
        let path = entry.map_err(|e| io(dir, e))?.path();
        if path.extension().is_none_or(|e| e != "json")
            || path.file_name().is_some_and(|n| n == "summary.json")
        {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
        let r = PipelineReport::from_json(&text).map_err(|source| LoadError::Json {
            path: path.display().to_string(),
            source,
        })?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(LoadError::Schema {
                path: path.display().to_string(),
                found: r.schema_version,
            });
        }
        out.push(r);
    }
    out.sort_by(|a, b| a.problem_id.cmp(&b.problem_id));
    Ok(out)
}
