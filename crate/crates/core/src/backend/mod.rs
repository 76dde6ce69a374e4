//! Decision backends: the interface the trial loop queries each turn, the
//! prompt renderer and action grammar, and the deterministic, scripted and
//! remote chat implementations.

mod deterministic;
mod prompt;
mod remote;
mod scripted;

use std::time::Duration;

use crate::agent::{AowState, ObservationBundle, Rejection, StepDecision};

pub use deterministic::DeterministicBackend;
pub use prompt::{
    parse_action, parse_action_text, parse_sensor_segment, render_action, render_messages,
    render_prompt, render_response, ActionParseError, MEMORY_MARKER, OBSERVATION_MARKER,
    SYSTEM_MARKER,
};
pub use remote::{
    ConfigError, RemoteChatBackend, RemoteConfig, TransportKind, ENV_ENDPOINT, ENV_KEY, ENV_MODEL,
    ENV_RETRIES, ENV_TIMEOUT_MS,
};
pub use scripted::ScriptedBackend;

#[derive(Debug, Clone, Copy)]
pub struct DecisionRequest<'a> {
    pub bundle: &'a ObservationBundle,
    pub aow: &'a AowState,
    pub step_index: u32,
    /// Proposals already turned down during this turn.
    pub rejections: &'a [Rejection],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionResponse {
    pub decision: StepDecision,
    /// Verbatim backend output; the decision parses from it when present.
    pub raw_text: Option<String>,
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("unparsable reply: {0}")]
    Parse(#[from] ActionParseError),
    #[error("script exhausted after {consumed} replies")]
    ScriptExhausted { consumed: usize },
    #[error("transport error ({kind}): {message}")]
    Transport { kind: TransportKind, message: String },
    #[error("http status {status}: {body}")]
    HttpStatus { status: u16, body: String },
    #[error("malformed chat response: {0}")]
    Protocol(String),
}

pub trait DecisionBackend {
    fn name(&self) -> &str;

    fn decide(&mut self, request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError>;
}

impl<B: DecisionBackend + ?Sized> DecisionBackend for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError> {
        (**self).decide(request)
    }
}

/// Wraps a backend and keeps every raw reply it produced, in order.
#[derive(Debug)]
pub struct RecordingBackend<B> {
    pub inner: B,
    pub transcript: Vec<String>,
}

impl<B: DecisionBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        Self {
            inner,
            transcript: Vec::new(),
        }
    }
}

impl<B: DecisionBackend> DecisionBackend for RecordingBackend<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError> {
        let resp = self.inner.decide(request)?;
        self.transcript.push(
            resp.raw_text
                .clone()
                .unwrap_or_else(|| render_response(&resp.decision)),
        );
        Ok(resp)
    }
}
