//! Seeded fault injection: wrong binary operator (WBO) and assignment
//! duplication with constant (ADC).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lex::{logical_lines, tokenize, LexError, Token, TokenKind};
use crate::problem::PythonProblem;
use crate::run::{run_python, EnvError, PythonConfig, RunStatus};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MutationKind {
    #[serde(rename = "WBO")]
    Wbo,
    #[serde(rename = "ADC")]
    Adc,
}

impl std::fmt::Display for MutationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MutationKind::Wbo => "WBO",
            MutationKind::Adc => "ADC",
        })
    }
}

impl std::str::FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "wbo" => Ok(MutationKind::Wbo),
            "adc" => Ok(MutationKind::Adc),
            _ => Err(format!("unknown mutation kind '{s}' (expected WBO or ADC)")),
        }
    }
}

/// Where a mutation can be applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Site {
    pub kind: MutationKind,
    pub line: u32,
    pub col: u32,
    /// Byte range of the operator (WBO) or of the whole assignment (ADC).
    pub start: usize,
    pub end: usize,
    pub text: String,
    /// The site sits in an `assert` statement; such sites are never mutated.
    pub on_assert_line: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub kind: MutationKind,
    /// 1-based line of the mutated (WBO) or inserted (ADC) line in the mutant.
    pub line: u32,
    /// The replaced line (WBO) or the duplicated assignment line (ADC).
    pub original: String,
    pub mutated: String,
    /// Seed of the site choice; 0 when the site was given explicitly.
    pub seed: u64,
    /// Index into the eligible sites of this kind.
    pub site_index: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SiteSelection {
    Seed(u64),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutateError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("no eligible {0} site")]
    NoSite(MutationKind),
    #[error("site index {index} out of range ({count} eligible sites)")]
    SiteOutOfRange { index: usize, count: usize },
    #[error("record does not match the source at line {line}")]
    RecordMismatch { line: u32 },
}

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

/// The fixed operator replacement table.
fn flip(op: &str) -> Option<&'static str> {
    Some(match op {
        "==" => "!=",
        "!=" => "==",
        "<" => ">=",
        ">=" => "<",
        ">" => "<=",
        "<=" => ">",
        _ => return None,
    })
}

fn is_simple_assignment(line: &[&Token]) -> bool {
    let [target, eq, rest @ ..] = line else {
        return false;
    };
    if target.kind != TokenKind::Name || KEYWORDS.contains(&target.text.as_str()) {
        return false;
    }
    if eq.kind != TokenKind::Op || eq.text != "=" || rest.is_empty() {
        return false;
    }
    if line.first().map(|t| t.line) != line.last().map(|t| t.line) {
        return false;
    }
    let mut depth = 0i32;
    for t in rest {
        if t.kind != TokenKind::Op {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            // Chained assignment or several statements on one line.
            "=" | ";" if depth == 0 => return false,
            _ => {}
        }
    }
    true
}

/// All sites of `kind` in `source`, ordered by position.
pub fn scan_mutation_sites(source: &str, kind: MutationKind) -> Result<Vec<Site>, LexError> {
    let tokens = tokenize(source)?;
    let mut sites = Vec::new();
    for line in logical_lines(&tokens) {
        let on_assert_line = line[0].kind == TokenKind::Name && line[0].text == "assert";
        match kind {
            MutationKind::Wbo => {
                for t in line
                    .iter()
                    .filter(|t| t.kind == TokenKind::Op && flip(&t.text).is_some())
                {
                    sites.push(Site {
                        kind,
                        line: t.line,
                        col: t.col,
                        start: t.start,
                        end: t.end,
                        text: t.text.clone(),
                        on_assert_line,
                    });
                }
            }
            MutationKind::Adc => {
                if is_simple_assignment(&line) {
                    let (first, last) = (line[0], line[line.len() - 1]);
                    sites.push(Site {
                        kind,
                        line: first.line,
                        col: first.col,
                        start: first.start,
                        end: last.end,
                        text: source[first.start..last.end].to_string(),
                        on_assert_line,
                    });
                }
            }
        }
    }
    Ok(sites)
}

/// Lines of `source` as (content, line ending) pairs.
fn split_lines(source: &str) -> Vec<(&str, &str)> {
    source
        .split_inclusive('\n')
        .map(|l| {
            if let Some(body) = l.strip_suffix("\r\n") {
                (body, "\r\n")
            } else if let Some(body) = l.strip_suffix('\n') {
                (body, "\n")
            } else {
                (l, "")
            }
        })
        .collect()
}

fn join_lines(lines: &[(String, String)]) -> String {
    lines
        .iter()
        .flat_map(|(b, e)| [b.as_str(), e.as_str()])
        .collect()
}

fn pick(
    eligible: &[Site],
    sel: SiteSelection,
    kind: MutationKind,
) -> Result<(usize, u64), MutateError> {
    if eligible.is_empty() {
        return Err(MutateError::NoSite(kind));
    }
    match sel {
        SiteSelection::Seed(seed) => Ok((
            ChaCha8Rng::seed_from_u64(seed).random_range(0..eligible.len()),
            seed,
        )),
        SiteSelection::Index(i) if i < eligible.len() => Ok((i, 0)),
        SiteSelection::Index(index) => Err(MutateError::SiteOutOfRange {
            index,
            count: eligible.len(),
        }),
    }
}

fn eligible(source: &str, kind: MutationKind) -> Result<Vec<Site>, MutateError> {
    Ok(scan_mutation_sites(source, kind)?
        .into_iter()
        .filter(|s| !s.on_assert_line)
        .collect())
}

/// Flips one comparison operator outside assert statements.
pub fn mutate_wbo(source: &str, sel: SiteSelection) -> Result<(String, MutantRecord), MutateError> {
    let sites = eligible(source, MutationKind::Wbo)?;
    let (index, seed) = pick(&sites, sel, MutationKind::Wbo)?;
    let site = &sites[index];
    let lines = split_lines(source);
    let line_start: usize = lines[..site.line as usize - 1]
        .iter()
        .map(|(b, e)| b.len() + e.len())
        .sum();
    let original = lines[site.line as usize - 1].0;
    let col = site.start - line_start;
    let mutated = format!(
        "{}{}{}",
        &original[..col],
        flip(&site.text).expect("comparison site"),
        &original[col + site.text.len()..]
    );
    let record = MutantRecord {
        kind: MutationKind::Wbo,
        line: site.line,
        original: original.to_string(),
        mutated,
        seed,
        site_index: index,
    };
    let mutant = apply_record(source, &record)?;
    Ok((mutant, record))
}

/// Duplicates one simple assignment right below itself with ` + 1` appended
/// to the copy's right-hand side.
pub fn mutate_adc(source: &str, sel: SiteSelection) -> Result<(String, MutantRecord), MutateError> {
    let sites = eligible(source, MutationKind::Adc)?;
    let (index, seed) = pick(&sites, sel, MutationKind::Adc)?;
    let site = &sites[index];
    let lines = split_lines(source);
    let original = lines[site.line as usize - 1].0;
    let indent = &original[..site.col as usize];
    let record = MutantRecord {
        kind: MutationKind::Adc,
        line: site.line + 1,
        original: original.to_string(),
        mutated: format!("{indent}{} + 1", site.text),
        seed,
        site_index: index,
    };
    let mutant = apply_record(source, &record)?;
    Ok((mutant, record))
}

pub fn mutate(
    source: &str,
    kind: MutationKind,
    sel: SiteSelection,
) -> Result<(String, MutantRecord), MutateError> {
    match kind {
        MutationKind::Wbo => mutate_wbo(source, sel),
        MutationKind::Adc => mutate_adc(source, sel),
    }
}

/// Rebuilds a mutant from the original source and its record.
pub fn apply_record(source: &str, record: &MutantRecord) -> Result<String, MutateError> {
    let mut lines: Vec<(String, String)> = split_lines(source)
        .into_iter()
        .map(|(b, e)| (b.to_string(), e.to_string()))
        .collect();
    let mismatch = MutateError::RecordMismatch { line: record.line };
    match record.kind {
        MutationKind::Wbo => {
            let slot = lines
                .get_mut((record.line as usize).wrapping_sub(1))
                .ok_or(mismatch.clone())?;
            if slot.0 != record.original {
                return Err(mismatch);
            }
            slot.0 = record.mutated.clone();
        }
        MutationKind::Adc => {
            let at = (record.line as usize).wrapping_sub(1);
            let dup = lines.get_mut(at.wrapping_sub(1)).ok_or(mismatch.clone())?;
            if dup.0 != record.original {
                return Err(mismatch);
            }
            let ending = if dup.1.is_empty() {
                dup.1 = "\n".into();
                String::new()
            } else {
                dup.1.clone()
            };
            lines.insert(at, (record.mutated.clone(), ending));
        }
    }
    Ok(join_lines(&lines))
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HangPolicy {
    /// A mutant that times out is accepted and flagged.
    #[default]
    Accept,
    /// Only assertion failures count.
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    /// The mutant passes every assertion.
    EquivalentMutant,
    /// The unmutated program does not pass, so nothing can be concluded.
    OriginalFails {
        status: RunStatus,
    },
    RuntimeError {
        message: String,
    },
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "validation", rename_all = "snake_case")]
pub enum Validation {
    Accepted { timed_out: bool },
    Rejected(RejectReason),
}

impl Validation {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Validation::Accepted { .. })
    }
}

/// Accepts a mutant that fails an assertion the original passes.
pub fn validate_mutant(
    original: &PythonProblem,
    mutant: &str,
    cfg: &PythonConfig,
    policy: HangPolicy,
) -> Result<Validation, EnvError> {
    let base = run_python(&original.source, cfg)?;
    if !base.passed() {
        return Ok(Validation::Rejected(RejectReason::OriginalFails {
            status: base.status,
        }));
    }
    let run = run_python(mutant, cfg)?;
    Ok(match run.status {
        RunStatus::AssertionFailed { .. } => Validation::Accepted { timed_out: false },
        RunStatus::Timeout if policy == HangPolicy::Accept => {
            Validation::Accepted { timed_out: true }
        }
        RunStatus::Timeout => Validation::Rejected(RejectReason::Timeout),
        RunStatus::Pass => Validation::Rejected(RejectReason::EquivalentMutant),
        RunStatus::RuntimeError { message } => {
            Validation::Rejected(RejectReason::RuntimeError { message })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replacement_table_is_an_involution() {
        for op in ["==", "!=", "<", "<=", ">", ">="] {
            assert_eq!(flip(flip(op).unwrap()), Some(op));
        }
        assert_eq!(flip("+"), None);
    }

    #[test]
    fn augmented_and_chained_assignments_are_not_sites() {
        assert!(scan_mutation_sites("x += 1\n", MutationKind::Adc)
            .unwrap()
            .is_empty());
        assert!(scan_mutation_sites("a = b = 1\n", MutationKind::Adc)
            .unwrap()
            .is_empty());
        assert!(scan_mutation_sites("a, b = 1, 2\n", MutationKind::Adc)
            .unwrap()
            .is_empty());
        assert!(scan_mutation_sites("x: int = 1\n", MutationKind::Adc)
            .unwrap()
            .is_empty());
        assert!(scan_mutation_sites("a = 1; b = 2\n", MutationKind::Adc)
            .unwrap()
            .is_empty());
        assert_eq!(
            scan_mutation_sites("y = f(k=1)\n", MutationKind::Adc)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn single_site_wbo() {
        let (m, r) = mutate_wbo("if a == b:\n    pass\n", SiteSelection::Seed(9)).unwrap();
        assert_eq!(m, "if a != b:\n    pass\n");
        assert_eq!(r.line, 1);
        assert_eq!(r.mutated, "if a != b:");
    }

    #[test]
    fn comparisons_in_strings_are_not_sites() {
        let src = "s = 'a < b'\nprint(\"x == y\")\n";
        assert_eq!(
            mutate_wbo(src, SiteSelection::Seed(0)),
            Err(MutateError::NoSite(MutationKind::Wbo))
        );
    }

    #[test]
    fn empty_source_has_no_adc_site() {
        assert_eq!(
            mutate_adc("", SiteSelection::Seed(0)),
            Err(MutateError::NoSite(MutationKind::Adc))
        );
    }

    #[test]
    fn adc_on_last_line_without_newline() {
        let (m, r) = mutate_adc("x = 1", SiteSelection::Index(0)).unwrap();
        assert_eq!(m, "x = 1\nx = 1 + 1");
        assert_eq!(apply_record("x = 1", &r).unwrap(), m);
    }

    #[test]
    fn adc_keeps_crlf_and_drops_trailing_comment() {
        let (m, _) = mutate_adc(
            "def f():\r\n    y = 2  # two\r\n    return y\r\n",
            SiteSelection::Index(0),
        )
        .unwrap();
        assert_eq!(
            m,
            "def f():\r\n    y = 2  # two\r\n    y = 2 + 1\r\n    return y\r\n"
        );
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(
            mutate_wbo("a < b\n", SiteSelection::Index(3)),
            Err(MutateError::SiteOutOfRange { index: 3, count: 1 })
        );
    }
}
