//! Run configuration shared by the library entry points and the CLI.

use std::path::PathBuf;
use std::time::Duration;

use llm_bridge::LlmConfig;
use pyharness::PythonConfig;
use serde::{Deserialize, Serialize};

/// Unwind bound used to localise a `BoundExceeded` verdict, where no
/// counterexample exists to derive one from.
pub const BOUND_EXCEEDED_UNWIND: u32 = 8;
/// Step budget for running a candidate concretely in the gate.
pub const GATE_STEP_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Benchmark label used to group reports.
    pub benchmark: String,
    pub llm: LlmConfig,
    pub unwind: u32,
    pub inline_depth: u32,
    /// Whether executions that exceed the unwind bound are reported or dropped.
    #[serde(default)]
    pub unwind_policy: bmc::UnwindPolicy,
    /// Maximum diagnoses enumerated per run.
    pub diagnosis_cap: usize,
    pub interpreter: PathBuf,
    /// Per-run Python timeout, in seconds.
    pub python_timeout: f64,
    pub gate_step_limit: u64,
    pub bound_exceeded_unwind: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            benchmark: "default".into(),
            llm: LlmConfig::default(),
            unwind: bmc::DEFAULT_UNWIND,
            inline_depth: bmc::DEFAULT_INLINE_DEPTH,
            unwind_policy: bmc::UnwindPolicy::Fail,
            diagnosis_cap: faultloc::DEFAULT_CAP,
            interpreter: PythonConfig::default().interpreter,
            python_timeout: pyharness::DEFAULT_TIMEOUT.as_secs_f64(),
            gate_step_limit: GATE_STEP_LIMIT,
            bound_exceeded_unwind: BOUND_EXCEEDED_UNWIND,
        }
    }
}

impl PipelineConfig {
    pub fn python(&self) -> PythonConfig {
        PythonConfig {
            interpreter: self.interpreter.clone(),
            timeout: Duration::try_from_secs_f64(self.python_timeout)
                .unwrap_or(pyharness::DEFAULT_TIMEOUT),
        }
    }

    pub fn gate_limits(&self) -> minic::Limits {
        minic::Limits {
            step_limit: self.gate_step_limit,
            timeout: Duration::from_secs(10),
        }
    }

    pub fn bmc(&self) -> bmc::BmcConfig {
        bmc::BmcConfig {
            unwind: self.unwind,
            inline_depth: self.inline_depth,
            unwind_policy: self.unwind_policy,
            ..bmc::BmcConfig::default()
        }
    }

    pub fn localize(&self, unwind: u32) -> faultloc::LocalizeConfig {
        faultloc::LocalizeConfig {
            unwind,
            inline_depth: self.inline_depth,
            cap: self.diagnosis_cap,
            ..faultloc::LocalizeConfig::default()
        }
    }
}
