//! Aggregation of reports into the localisation and verification tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use pyharness::MutationKind;
use serde::{Deserialize, Serialize};

use crate::outcome::OutcomeClass;
use crate::report::PipelineReport;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub benchmark: String,
    pub mutation: Option<MutationKind>,
    pub model: String,
    pub include_description: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub key: GroupKey,
    /// Attempted problems; the denominator of every percentage.
    pub n: usize,
    pub counts: BTreeMap<OutcomeClass, usize>,
    pub correct_bug_localised: f64,
    pub other_bugs_localised: f64,
    pub transpiled_fixed_code: f64,
    pub compilation_errors: f64,
    /// Compilation errors with give-ups folded in.
    pub compilation_errors_or_gave_up: f64,
    pub verified: f64,
}

impl GroupMetrics {
    pub fn count(&self, c: OutcomeClass) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn percent(&self, c: OutcomeClass) -> f64 {
        pct(self.count(c), self.n)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub groups: Vec<GroupMetrics>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no reports to aggregate")]
    EmptyGroup,
}

fn pct(count: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * count as f64 / n as f64
    }
}

pub fn format_pct(v: f64) -> String {
    format!("{v:.1}%")
}

pub fn compute_metrics(reports: &[PipelineReport]) -> Result<MetricsTable, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::EmptyGroup);
    }
    let mut groups: BTreeMap<GroupKey, BTreeMap<OutcomeClass, usize>> = BTreeMap::new();
    for r in reports {
        let key = GroupKey {
            benchmark: r.benchmark.clone(),
            mutation: r.mutation,
            model: r.model.clone(),
            include_description: r.include_description,
        };
        *groups.entry(key).or_default().entry(r.outcome).or_default() += 1;
    }
    let groups = groups
        .into_iter()
        .map(|(key, counts)| {
            let n = counts.values().sum();
            let c = |k| counts.get(&k).copied().unwrap_or(0);
            GroupMetrics {
                correct_bug_localised: pct(c(OutcomeClass::CorrectBugLocalised), n),
                other_bugs_localised: pct(c(OutcomeClass::OtherBugsLocalised), n),
                transpiled_fixed_code: pct(c(OutcomeClass::TranspiledFixedCode), n),
                compilation_errors: pct(c(OutcomeClass::CompilationError), n),
                compilation_errors_or_gave_up: pct(
                    c(OutcomeClass::CompilationError) + c(OutcomeClass::GaveUp),
                    n,
                ),
                verified: pct(c(OutcomeClass::Verified), n),
                key,
                n,
                counts,
            }
        })
        .collect();
    Ok(MetricsTable { groups })
}

const COLUMNS: [&str; 5] = [
    "% Correct Bug Localised",
    "% Other Bugs Localised",
    "% Transpiled Fixed Code",
    "% Compilation Errors",
    "% Compilation Errors + Gave Up",
];

const REMAINDER: [OutcomeClass; 4] = [
    OutcomeClass::Verified,
    OutcomeClass::VerificationFailedNoDiagnosis,
    OutcomeClass::GaveUp,
    OutcomeClass::Localised,
];

fn bug_title(m: Option<MutationKind>) -> &'static str {
    match m {
        Some(MutationKind::Wbo) => "Bug: Wrong Binary Operator (WBO)",
        Some(MutationKind::Adc) => "Bug: Assignment Duplication with Constant (ADC)",
        None => "Unmutated programs",
    }
}

fn row(out: &mut String, cells: &[String], widths: &[usize]) {
    let line: Vec<String> = cells
        .iter()
        .zip(widths)
        .enumerate()
        .map(|(i, (c, w))| {
            if i == 0 {
                format!("{c:<w$}")
            } else {
                format!("{c:>w$}")
            }
        })
        .collect();
    let _ = writeln!(out, "{}", line.join(" | ").trim_end());
}

/// Renders one section per bug kind with a row per model, grouped by
/// benchmark and description setting, each followed by a remainder footer.
pub fn render_metrics(t: &MetricsTable) -> String {
    let mut by_table: BTreeMap<(&str, bool), BTreeMap<Option<MutationKind>, Vec<&GroupMetrics>>> =
        BTreeMap::new();
    for g in &t.groups {
        by_table
            .entry((g.key.benchmark.as_str(), g.key.include_description))
            .or_default()
            .entry(g.key.mutation)
            .or_default()
            .push(g);
    }
    let mut out = String::new();
    for ((bench, desc), sections) in by_table {
        let _ = writeln!(
            out,
            "Benchmark: {bench} ({})",
            if desc {
                "with description"
            } else {
                "without description"
            }
        );
        for (mutation, rows) in sections {
            let model_w = rows
                .iter()
                .map(|g| g.key.model.len())
                .chain([4])
                .max()
                .unwrap_or(4);
            let _ = writeln!(out);
            let _ = writeln!(out, "{}", bug_title(mutation));
            if mutation.is_none() {
                let widths = [model_w, "% Verified".len(), 3];
                row(
                    &mut out,
                    &["LLMs".into(), "% Verified".into(), "n".into()],
                    &widths,
                );
                for g in &rows {
                    row(
                        &mut out,
                        &[g.key.model.clone(), format_pct(g.verified), g.n.to_string()],
                        &widths,
                    );
                }
                continue;
            }
            let mut widths = vec![model_w];
            widths.extend(COLUMNS.iter().map(|c| c.len()));
            widths.push(3);
            let mut header = vec!["LLMs".to_string()];
            header.extend(COLUMNS.iter().map(|c| c.to_string()));
            header.push("n".into());
            row(&mut out, &header, &widths);
            for g in &rows {
                row(
                    &mut out,
                    &[
                        g.key.model.clone(),
                        format_pct(g.correct_bug_localised),
                        format_pct(g.other_bugs_localised),
                        format_pct(g.transpiled_fixed_code),
                        format_pct(g.compilation_errors),
                        format_pct(g.compilation_errors_or_gave_up),
                        g.n.to_string(),
                    ],
                    &widths,
                );
            }
            for g in &rows {
                let rest: Vec<String> = REMAINDER
                    .iter()
                    .map(|&c| format!("{} {}", c.label(), format_pct(g.percent(c))))
                    .collect();
                let _ = writeln!(out, "  {} remainder: {}", g.key.model, rest.join(", "));
            }
        }
        let _ = writeln!(out);
    }
    out
}
