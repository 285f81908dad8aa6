//! Benchmark problems on disk:
//! `<root>/<id>/program.py`, optional `description.txt` and `mutant.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lex::{logical_lines, tokenize};
use crate::mutate::MutantRecord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PythonProblem {
    pub id: String,
    pub description: Option<String>,
    /// Program text including its module-level assertions.
    pub source: String,
    pub ground_truth: Option<MutantRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn read(path: &Path) -> Result<String, ProblemError> {
    std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_optional(path: &Path) -> Result<Option<String>, ProblemError> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(ProblemError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Loads the problem stored in `dir`; its id is the directory name.
pub fn load_problem(dir: &Path) -> Result<PythonProblem, ProblemError> {
    let id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let source = read(&dir.join("program.py"))?;
    let description =
        read_optional(&dir.join("description.txt"))?.map(|d| d.trim_end().to_string());
    let mutant_path = dir.join("mutant.json");
    let ground_truth = match read_optional(&mutant_path)? {
        None => None,
        Some(text) => Some(
            serde_json::from_str(&text).map_err(|source| ProblemError::Json {
                path: mutant_path,
                source,
            })?,
        ),
    };
    Ok(PythonProblem {
        id,
        description,
        source,
        ground_truth,
    })
}

/// Loads every problem below `root` (or `root/problems` when present),
/// ordered by id.
pub fn load_problems(root: &Path) -> Result<Vec<PythonProblem>, ProblemError> {
    let base = if root.join("problems").is_dir() {
        root.join("problems")
    } else {
        root.to_path_buf()
    };
    let entries = std::fs::read_dir(&base).map_err(|source| ProblemError::Io {
        path: base.clone(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("program.py").is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| load_problem(d)).collect()
}

/// Writes `p` under `root/<id>/`.
pub fn save_problem(root: &Path, p: &PythonProblem) -> Result<PathBuf, ProblemError> {
    let dir = root.join(&p.id);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ProblemError::Io { path, source }
    };
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    let program = dir.join("program.py");
    std::fs::write(&program, &p.source).map_err(io(&program))?;
    if let Some(d) = &p.description {
        let path = dir.join("description.txt");
        std::fs::write(&path, format!("{d}\n")).map_err(io(&path))?;
    }
    if let Some(m) = &p.ground_truth {
        let path = dir.join("mutant.json");
        let json = serde_json::to_string_pretty(m).expect("record serialises");
        std::fs::write(&path, json + "\n").map_err(io(&path))?;
    }
    Ok(dir)
}

/// Splits a program into its code and its module-level assertions, both
/// without trailing blank lines. Assertions keep their source order.
pub fn split_assertions(source: &str) -> (String, String) {
    let lines: Vec<&str> = source.lines().collect();
    let mut is_assert = vec![false; lines.len()];
    match tokenize(source) {
        Ok(tokens) => {
            for line in logical_lines(&tokens) {
                let first = line[0];
                if first.text == "assert" && first.col == 0 {
                    let last = line[line.len() - 1].line;
                    for l in first.line..=last {
                        is_assert[l as usize - 1] = true;
                    }
                }
            }
        }
        Err(_) => {
            for (i, l) in lines.iter().enumerate() {
                is_assert[i] = l.starts_with("assert ") || l.starts_with("assert(");
            }
        }
    }
    let pick = |want: bool| {
        let kept: Vec<&str> = lines
            .iter()
            .zip(&is_assert)
            .filter(|(_, &a)| a == want)
            .map(|(l, _)| *l)
            .collect();
        kept.join("\n").trim_end().to_string()
    };
    (pick(false), pick(true))
}
