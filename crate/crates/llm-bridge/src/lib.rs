//! Everything that talks to a language model: prompt templates, an
//! OpenAI-compatible client with a hash-keyed replay store, code-fence
//! extraction, the transpile/retry loop and statement back-mapping.

pub mod backmap;
pub mod client;
pub mod extract;
pub mod prompt;
pub mod retry;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use backmap::{backmap_statements, BackmappedStatement};
pub use client::{prompt_hash, Completer, Completion, HttpClient, ReplayStore};
pub use extract::{extract_c_code, extract_fenced};
pub use prompt::{render_prompt, PromptKind};
pub use retry::{
    transpile_with_retry, Attempt, AttemptClass, CandidateResult, Clock, GateResponse,
    GaveUpReason, ManualClock, SystemClock,
};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 5;
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(600);
pub const DEFAULT_INFLIGHT: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    /// Always 0; kept in the config so reports show it.
    pub temperature: f64,
    pub max_attempts: u32,
    #[serde(with = "secs")]
    pub time_budget: Duration,
    pub include_description: bool,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: String,
    pub max_inflight: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            model: "default".into(),
            temperature: 0.0,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            time_budget: DEFAULT_TIME_BUDGET,
            include_description: true,
            api_key_env: "OPENAI_API_KEY".into(),
            max_inflight: DEFAULT_INFLIGHT,
        }
    }
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no replay fixture for prompt hash {hash}")]
    NoFixture { hash: String },
    #[error("response contains no code block")]
    NoCodeBlock,
    #[error("the model returned no statements")]
    EmptyMapping,
    #[error("prompt needs a value for {0}")]
    MissingField(&'static str),
    #[error("replay store: {0}")]
    Store(String),
}
