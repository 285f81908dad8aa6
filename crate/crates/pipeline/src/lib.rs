//! The orchestrator: run the Python program, transpile it to C through a
//! gated retry loop, model check the candidate, localise failures and map
//! them back to Python lines; then classify and aggregate the runs.

pub mod config;
pub mod gate;
pub mod metrics;
pub mod outcome;
pub mod report;
pub mod run;

pub use config::PipelineConfig;
pub use gate::{validate_candidate, GateDecision, RetryKind};
pub use metrics::{
    compute_metrics, render_metrics, GroupKey, GroupMetrics, MetricsError, MetricsTable,
};
pub use outcome::{classify_outcome, ClassifyError, OutcomeClass, OutcomeFacts};
pub use report::{
    load_reports, write_report, zero_timings, BackmapRecord, BatchSummary, PipelineReport,
    PythonRuns, Stage, StageError, Timings, INT_WIDTH, SCHEMA_VERSION,
};
pub use run::{run_batch, run_pipeline, unapply_record, PipelineError};
