//! Prompt templates. The text, including its line breaks and trailing
//! spaces, is fixed; only the placeholders vary.

use pyharness::{split_assertions, PythonProblem};
use serde::{Deserialize, Serialize};

use crate::{LlmConfig, LlmError};

const TRANSPILE_HEADER: &str = "Transpile Python to C Code With Assertion: 
You are an exceptionally intelligent coding 
assistant who consistently produces accurate 
and reliable <C code> by transpiling the given 
<Python code> into semantically equivalent 
<C code>. <NL_Description> gives a natural 
language description of the python code. 
Do not forget to  also transpile the given 
Python assertion  into a C assertion!";

const DESCRIPTION_BLOCK: &str = "<NL_Description>
{description}";

const CODE_BLOCK: &str = "<Python Code>
```python
{python_code}
{assertion}
```";

const C_OPENER: &str = "<C Code>
```c";

const RETRY: &str = "Your previous code translation was INCORRECT!
Reason: {Reason}
Try again.
{Transpilation Prompt}";

const BACKMAP_HEAD: &str = "Map C program statements back to the original python 
program:
We have detected that both the Python and C programs 
are buggy. We have localised the following faulty 
statements in the C program:
{list of faulty C statements}";

const BACKMAP_TAIL: &str = "Provide us only with the corresponding Python 
statements from the original program that 
correspond to these buggy statements.
```python";

/// Separator between template sections.
const SECTION: &str = "\n\n";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PromptKind {
    Transpile,
    Retry { reason: String },
    Backmap { statements: Vec<String> },
}

/// Substitutes placeholders in one left-to-right pass, so substituted text
/// is never scanned again.
fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while !rest.is_empty() {
        match values.iter().find(|(k, _)| rest.starts_with(k)) {
            Some((k, v)) => {
                out.push_str(v);
                rest = &rest[k.len()..];
            }
            None => {
                let c = rest.chars().next().unwrap();
                out.push(c);
                rest = &rest[c.len_utf8()..];
            }
        }
    }
    out
}

fn transpile(problem: &PythonProblem, cfg: &LlmConfig) -> Result<String, LlmError> {
    let (code, assertion) = split_assertions(&problem.source);
    if code.is_empty() {
        return Err(LlmError::MissingField("python_code"));
    }
    if assertion.is_empty() {
        return Err(LlmError::MissingField("assertion"));
    }
    let mut sections = vec![TRANSPILE_HEADER.to_string()];
    if cfg.include_description {
        let d = problem
            .description
            .as_deref()
            .ok_or(LlmError::MissingField("description"))?;
        sections.push(fill(DESCRIPTION_BLOCK, &[("{description}", d)]));
    }
    sections.push(fill(
        CODE_BLOCK,
        &[("{python_code}", &code), ("{assertion}", &assertion)],
    ));
    sections.push(C_OPENER.to_string());
    Ok(sections.join(SECTION))
}

/// Renders `kind` for `problem`. Without `cfg.include_description` the
/// description section is left out entirely.
pub fn render_prompt(
    kind: &PromptKind,
    problem: &PythonProblem,
    cfg: &LlmConfig,
) -> Result<String, LlmError> {
    match kind {
        PromptKind::Transpile => transpile(problem, cfg),
        PromptKind::Retry { reason } => {
            let t = transpile(problem, cfg)?;
            Ok(fill(
                RETRY,
                &[("{Reason}", reason), ("{Transpilation Prompt}", &t)],
            ))
        }
        PromptKind::Backmap { statements } => {
            if statements.is_empty() {
                return Err(LlmError::MissingField("list of faulty C statements"));
            }
            let list = statements.join("\n");
            let head = fill(BACKMAP_HEAD, &[("{list of faulty C statements}", &list)]);
            Ok(format!("{head}{SECTION}{BACKMAP_TAIL}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(description: Option<&str>) -> PythonProblem {
        PythonProblem {
            id: "p".into(),
            description: description.map(String::from),
            source: "def f():\n    return 1\n\nassert f() == 1\n".into(),
            ground_truth: None,
        }
    }

    #[test]
    fn description_is_required_only_when_enabled() {
        let cfg = LlmConfig::default();
        assert_eq!(
            render_prompt(&PromptKind::Transpile, &problem(None), &cfg),
            Err(LlmError::MissingField("description"))
        );
        let cfg = LlmConfig {
            include_description: false,
            ..cfg
        };
        let p = render_prompt(&PromptKind::Transpile, &problem(None), &cfg).unwrap();
        assert!(!p.contains("<NL_Description>\n"));
        assert!(p.ends_with("<C Code>\n```c"));
    }

    #[test]
    fn placeholders_in_program_text_survive() {
        let mut p = problem(Some("d"));
        p.source = "s = '{assertion}'\n\nassert s\n".into();
        let out = render_prompt(&PromptKind::Transpile, &p, &LlmConfig::default()).unwrap();
        assert!(out.contains("s = '{assertion}'\nassert s\n```"));
    }

    #[test]
    fn backmap_needs_statements() {
        let r = render_prompt(
            &PromptKind::Backmap { statements: vec![] },
            &problem(None),
            &LlmConfig::default(),
        );
        assert!(matches!(r, Err(LlmError::MissingField(_))));
    }
}
