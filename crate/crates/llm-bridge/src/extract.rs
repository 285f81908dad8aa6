//! Pulling code out of markdown-style fenced blocks.

use crate::LlmError;

struct Block<'a> {
    label: &'a str,
    body: String,
}

fn blocks(text: &str) -> Vec<Block<'_>> {
    let mut out = Vec::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let Some(label) = line.trim_start().strip_prefix("```") else {
            continue;
        };
        let mut body = Vec::new();
        for inner in lines.by_ref() {
            if inner.trim() == "```" {
                break;
            }
            body.push(inner);
        }
        // An unterminated fence runs to the end of the text.
        out.push(Block {
            label: label.trim(),
            body: body.join("\n"),
        });
    }
    out
}

/// Body of the first block labelled with one of `labels`
/// (case-insensitive), else of the first unlabelled block.
pub fn extract_fenced(text: &str, labels: &[&str]) -> Result<String, LlmError> {
    let bs = blocks(text);
    bs.iter()
        .find(|b| labels.iter().any(|l| b.label.eq_ignore_ascii_case(l)))
        .or_else(|| bs.iter().find(|b| b.label.is_empty()))
        .map(|b| b.body.clone())
        .ok_or(LlmError::NoCodeBlock)
}

pub fn extract_c_code(response: &str) -> Result<String, LlmError> {
    extract_fenced(response, &["c"]).map(|mut code| {
        code.push('\n');
        code
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_c_block_wins() {
        let r = "text\n```c\nint a;\n```\nmore\n```python\nx = 1\n```\n";
        assert_eq!(extract_c_code(r).unwrap(), "int a;\n");
        let r = "```python\nx = 1\n```\n```c\nint b;\n```";
        assert_eq!(extract_c_code(r).unwrap(), "int b;\n");
    }

    #[test]
    fn unlabelled_fallback_and_prose() {
        assert_eq!(extract_c_code("```\nint c;\n```").unwrap(), "int c;\n");
        assert_eq!(extract_c_code("just words"), Err(LlmError::NoCodeBlock));
    }

    #[test]
    fn indented_fence() {
        assert_eq!(
            extract_c_code(" ```c\nint d;\n```\nprose").unwrap(),
            "int d;\n"
        );
    }
}
