use serde::{Deserialize, Serialize};

/// Location of a syntax node: 1-based line/column of its first byte plus the
/// byte range it covers in the source text.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SourceSpan {
    pub line: u32,
    pub col: u32,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(line: u32, col: u32, start: usize, end: usize) -> Self {
        SourceSpan {
            line,
            col,
            start,
            end,
        }
    }

    /// Span from the start of `self` to the end of `other`.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            line: self.line,
            col: self.col,
            start: self.start,
            end: other.end.max(self.end),
        }
    }

    /// Source text covered by the span, with line breaks and their
    /// surrounding indentation collapsed to single spaces.
    pub fn snippet(&self, source: &str) -> String {
        let raw = source.get(self.start..self.end).unwrap_or("");
        let mut out = String::with_capacity(raw.len());
        for (i, line) in raw.split('\n').enumerate() {
            let part = if i == 0 { line.trim_end() } else { line.trim() };
            if part.is_empty() {
                continue;
            }
            if i > 0 && !out.is_empty() {
                out.push(' ');
            }
            out.push_str(part);
        }
        out
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snippet_collapses_continuation_lines() {
        let src = "x = a -\n        b;\n";
        let sp = SourceSpan::new(1, 1, 0, src.len() - 1);
        assert_eq!(sp.snippet(src), "x = a - b;");
    }
}
