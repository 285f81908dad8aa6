//! Chat-completion clients: a blocking HTTP client for OpenAI-compatible
//! endpoints and a replay store keyed by the SHA-256 of the prompt.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::{LlmConfig, LlmError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub latency: Duration,
}

pub trait Completer: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError>;
}

/// Lowercase hex SHA-256 of the prompt bytes.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Counting semaphore capping concurrent requests.
#[derive(Debug)]
struct Inflight {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Inflight {
    fn acquire(&self) {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
    }

    fn release(&self) {
        *self.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.cv.notify_one();
    }
}

pub struct HttpClient {
    cfg: LlmConfig,
    agent: ureq::Agent,
    inflight: Inflight,
}

impl HttpClient {
    pub fn new(cfg: LlmConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(10))
            .timeout(cfg.time_budget)
            .build();
        let slots = cfg.max_inflight.max(1);
        HttpClient {
            cfg,
            agent,
            inflight: Inflight {
                free: Mutex::new(slots),
                cv: Condvar::new(),
            },
        }
    }

    fn request(&self, prompt: &str) -> Result<String, LlmError> {
        let body = json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
        });
        let mut req = self.agent.post(&self.cfg.endpoint);
        if let Ok(key) = std::env::var(&self.cfg.api_key_env) {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = match req.send_json(body) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) => {
                let text = r.into_string().unwrap_or_default();
                return Err(LlmError::Transport(format!("HTTP {code}: {}", text.trim())));
            }
            Err(e) => return Err(LlmError::Transport(e.to_string())),
        };
        let v: serde_json::Value = resp
            .into_json()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(String::from)
            .ok_or_else(|| LlmError::Transport("response has no choices[0].message.content".into()))
    }
}

impl Completer for HttpClient {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        self.inflight.acquire();
        let started = Instant::now();
        let r = self.request(prompt);
        self.inflight.release();
        Ok(Completion {
            text: r?,
            latency: started.elapsed(),
        })
    }
}

/// Recorded responses, one file `<hash>.txt` per prompt holding the raw
/// response bytes.
#[derive(Clone, Debug, Default)]
pub struct ReplayStore {
    entries: HashMap<String, String>,
}

impl ReplayStore {
    pub fn load(dir: &Path) -> Result<Self, LlmError> {
        let err = |e: std::io::Error| LlmError::Store(format!("{}: {e}", dir.display()));
        let mut entries = HashMap::new();
        for entry in std::fs::read_dir(dir).map_err(err)? {
            let path = entry.map_err(err)?.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let is_hash = stem.len() == 64 && stem.bytes().all(|b| b.is_ascii_hexdigit());
            if is_hash && path.is_file() {
                entries.insert(
                    stem.to_ascii_lowercase(),
                    std::fs::read_to_string(&path).map_err(err)?,
                );
            }
        }
        Ok(ReplayStore { entries })
    }

    pub fn insert(&mut self, prompt: &str, response: impl Into<String>) {
        self.entries.insert(prompt_hash(prompt), response.into());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes one fixture file and returns its path.
    pub fn write_fixture(dir: &Path, prompt: &str, response: &str) -> Result<PathBuf, LlmError> {
        let path = dir.join(format!("{}.txt", prompt_hash(prompt)));
        std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&path, response))
            .map_err(|e| LlmError::Store(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

impl Completer for ReplayStore {
    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        let hash = prompt_hash(prompt);
        match self.entries.get(&hash) {
            Some(text) => Ok(Completion {
                text: text.clone(),
                latency: Duration::ZERO,
            }),
            None => Err(LlmError::NoFixture { hash }),
        }
    }
}
