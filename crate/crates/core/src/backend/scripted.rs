use std::time::Duration;

use super::{parse_action_text, BackendError, DecisionBackend, DecisionRequest, DecisionResponse};

/// Replays canned replies in order through the action parser.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    script: Vec<String>,
    next: usize,
}

impl ScriptedBackend {
    pub fn new<I, S>(script: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            script: script.into_iter().map(Into::into).collect(),
            next: 0,
        }
    }

    /// One reply per blank-line-separated block.
    pub fn from_text(text: &str) -> Self {
        Self::new(
            text.split("\n\n")
                .map(str::trim)
                .filter(|s| !s.is_empty()),
        )
    }

    pub fn remaining(&self) -> usize {
        self.script.len() - self.next
    }
}

impl DecisionBackend for ScriptedBackend {
    fn name(&self) -> &str {
        "scripted"
    }

    fn decide(&mut self, _request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError> {
        let text = self
            .script
            .get(self.next)
            .ok_or(BackendError::ScriptExhausted {
                consumed: self.next,
            })?
            .clone();
        self.next += 1;
        let decision = parse_action_text(&text)?;
        Ok(DecisionResponse {
            decision,
            raw_text: Some(text),
            latency: Duration::ZERO,
        })
    }
}
