//! Running a Python module in a child process with a wall-clock limit.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PythonConfig {
    pub interpreter: PathBuf,
    pub timeout: Duration,
}

impl Default for PythonConfig {
    fn default() -> Self {
        PythonConfig {
            interpreter: PathBuf::from("python3"),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

/// Failures of the environment, as opposed to failures of the program.
#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("Python interpreter {0:?} not found")]
    InterpreterMissing(PathBuf),
    #[error("I/O error while running Python: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Pass,
    /// `line` is the program line of the failing assert, when the traceback
    /// names one.
    AssertionFailed {
        line: Option<u32>,
    },
    RuntimeError {
        message: String,
    },
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    #[serde(flatten)]
    pub status: RunStatus,
    pub duration_ms: u64,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.status == RunStatus::Pass
    }

    pub fn assertion_failed(&self) -> bool {
        matches!(self.status, RunStatus::AssertionFailed { .. })
    }
}

/// Classifies a finished run from its exit status and stderr.
fn classify(success: bool, stderr: &str, file_name: &str) -> RunStatus {
    if success {
        return RunStatus::Pass;
    }
    let last = stderr
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim();
    if last == "AssertionError" || last.starts_with("AssertionError:") {
        // The innermost frame in the program file is the assert itself.
        let line = stderr
            .lines()
            .filter(|l| l.trim_start().starts_with("File ") && l.contains(file_name))
            .filter_map(|l| {
                l.rsplit_once("line ")
                    .and_then(|(_, rest)| rest.split(',').next()?.trim().parse().ok())
            })
            .last();
        return RunStatus::AssertionFailed { line };
    }
    let message = if last.is_empty() {
        "process exited with a failure status".to_string()
    } else {
        last.to_string()
    };
    RunStatus::RuntimeError { message }
}

/// Runs `source` as a module in a fresh interpreter process. The process is
/// killed once `cfg.timeout` elapses.
pub fn run_python(source: &str, cfg: &PythonConfig) -> Result<RunOutcome, EnvError> {
    let mut file = tempfile::Builder::new()
        .prefix("pyverify-")
        .suffix(".py")
        .tempfile()?;
    file.write_all(source.as_bytes())?;
    file.flush()?;
    let file_name = file
        .path()
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let started = Instant::now();
    let mut child = match Command::new(&cfg.interpreter)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(EnvError::InterpreterMissing(cfg.interpreter.clone()))
        }
        Err(e) => return Err(e.into()),
    };
    // Drain stderr on a thread so a chatty program cannot block on a full pipe.
    let mut pipe = child.stderr.take().expect("piped stderr");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = pipe.read_to_end(&mut buf);
        buf
    });

    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if started.elapsed() >= cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let duration_ms = started.elapsed().as_millis() as u64;
    let stderr = String::from_utf8_lossy(&reader.join().unwrap_or_default()).into_owned();
    let status = match exit {
        None => RunStatus::Timeout,
        Some(s) => classify(s.success(), &stderr, &file_name),
    };
    Ok(RunOutcome {
        status,
        duration_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traceback_classification() {
        let tb = "Traceback (most recent call last):\n  File \"/tmp/p.py\", line 11, in <module>\n    assert f() == 3\nAssertionError\n";
        assert_eq!(
            classify(false, tb, "p.py"),
            RunStatus::AssertionFailed { line: Some(11) }
        );
        let nested = "Traceback (most recent call last):\n  File \"/tmp/p.py\", line 9, in <module>\n    g()\n  File \"/tmp/p.py\", line 2, in g\n    assert x\nAssertionError: boom\n";
        assert_eq!(
            classify(false, nested, "p.py"),
            RunStatus::AssertionFailed { line: Some(2) }
        );
        let zero = "Traceback (most recent call last):\n  File \"/tmp/p.py\", line 1, in <module>\nZeroDivisionError: division by zero\n";
        assert_eq!(
            classify(false, zero, "p.py"),
            RunStatus::RuntimeError {
                message: "ZeroDivisionError: division by zero".into()
            }
        );
        assert_eq!(classify(true, "", "p.py"), RunStatus::Pass);
    }
}
