use std::time::Instant;

use super::{render_response, BackendError, DecisionBackend, DecisionRequest, DecisionResponse};
use crate::agent::{aow_step, AgentConfig};

/// The window policy behind the backend interface. Reads only the structured
/// bundle and window state, never the rendered text.
#[derive(Debug, Clone, Default)]
pub struct DeterministicBackend {
    pub config: AgentConfig,
}

impl DeterministicBackend {
    pub fn new(config: AgentConfig) -> Self {
        Self { config }
    }
}

impl DecisionBackend for DeterministicBackend {
    fn name(&self) -> &str {
        "deterministic"
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError> {
        let started = Instant::now();
        let (_, decision) = aow_step(request.aow, request.bundle, &self.config);
        Ok(DecisionResponse {
            raw_text: Some(render_response(&decision)),
            decision,
            latency: started.elapsed(),
        })
    }
}
