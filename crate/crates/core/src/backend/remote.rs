use std::fmt;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{
    parse_action_text, render_messages, BackendError, DecisionBackend, DecisionRequest,
    DecisionResponse,
};

pub const ENV_ENDPOINT: &str = "SATPLAN_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "SATPLAN_LLM_MODEL";
pub const ENV_KEY: &str = "SATPLAN_LLM_KEY";
pub const ENV_TIMEOUT_MS: &str = "SATPLAN_LLM_TIMEOUT_MS";
pub const ENV_RETRIES: &str = "SATPLAN_LLM_RETRIES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransportKind {
    Timeout,
    Connect,
    Io,
    Other,
}

impl fmt::Display for TransportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransportKind::Timeout => "timeout",
            TransportKind::Connect => "connect",
            TransportKind::Io => "io",
            TransportKind::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("{ENV_ENDPOINT} is not set; point it at a chat-completions URL")]
    MissingEndpoint,
    #[error("{name} must be a non-negative integer, got {value:?}")]
    BadNumber { name: &'static str, value: String },
}

/// Chat endpoint settings. The API key is redacted from `Debug` output.
#[derive(Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub retries: u32,
}

impl fmt::Debug for RemoteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteConfig")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("timeout", &self.timeout)
            .field("retries", &self.retries)
            .finish()
    }
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: None,
            timeout: Duration::from_millis(60_000),
            retries: 2,
        }
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let endpoint = get(ENV_ENDPOINT)
            .filter(|s| !s.trim().is_empty())
            .ok_or(ConfigError::MissingEndpoint)?;
        let number = |name: &'static str, default: u64| match get(name) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| ConfigError::BadNumber { name, value: v }),
        };
        Ok(Self {
            endpoint,
            model: get(ENV_MODEL).unwrap_or_else(|| "default".into()),
            api_key: get(ENV_KEY).filter(|k| !k.is_empty()),
            timeout: Duration::from_millis(number(ENV_TIMEOUT_MS, 60_000)?),
            retries: number(ENV_RETRIES, 2)? as u32,
        })
    }
}

/// Chat-completions client: one blocking request per decision, bounded retries
/// on transport failures and 429/5xx responses.
pub struct RemoteChatBackend {
    config: RemoteConfig,
    agent: ureq::Agent,
    /// Retries spent across all requests so far.
    pub retries_used: u64,
}

impl fmt::Debug for RemoteChatBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteChatBackend")
            .field("config", &self.config)
            .field("retries_used", &self.retries_used)
            .finish()
    }
}

impl RemoteChatBackend {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            config,
            agent,
            retries_used: 0,
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn request_body(&self, system: &str, user: &str) -> Value {
        json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": 0,
        })
    }

    fn attempt(&self, body: &Value) -> Result<String, BackendError> {
        let mut req = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let resp = req.send_json(body).map_err(transport_error)?;
        let status = resp.status().as_u16();
        let text = resp
            .into_body()
            .read_to_string()
            .map_err(transport_error)?;
        if !(200..300).contains(&status) {
            return Err(BackendError::HttpStatus {
                status,
                body: text.chars().take(512).collect(),
            });
        }
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| BackendError::Protocol(format!("invalid JSON: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| BackendError::Protocol("missing choices[0].message.content".into()))
    }
}

fn transport_error(e: ureq::Error) -> BackendError {
    let kind = match &e {
        ureq::Error::Timeout(_) => TransportKind::Timeout,
        ureq::Error::ConnectionFailed | ureq::Error::HostNotFound => TransportKind::Connect,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::ConnectionRefused => {
            TransportKind::Connect
        }
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => TransportKind::Timeout,
        ureq::Error::Io(_) => TransportKind::Io,
        _ => TransportKind::Other,
    };
    BackendError::Transport {
        kind,
        message: e.to_string(),
    }
}

fn retryable(e: &BackendError) -> bool {
    match e {
        BackendError::Transport { .. } => true,
        BackendError::HttpStatus { status, .. } => *status == 429 || *status >= 500,
        _ => false,
    }
}

impl DecisionBackend for RemoteChatBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> Result<DecisionResponse, BackendError> {
        let (system, user) = render_messages(request.bundle);
        let mut user = user;
        for r in request.rejections {
            user.push_str(&format!("Rejected proposal: {}\n", r.detail));
        }
        let body = self.request_body(&system, &user);
        let started = Instant::now();
        let mut attempt = 0;
        let text = loop {
            match self.attempt(&body) {
                Ok(text) => break text,
                Err(e) if retryable(&e) && attempt < self.config.retries => {
                    attempt += 1;
                    self.retries_used += 1;
                    log::warn!(
                        "chat request failed ({e}); retry {attempt} of {}",
                        self.config.retries
                    );
                }
                Err(e) => return Err(e),
            }
        };
        if attempt > 0 {
            log::info!("chat request succeeded after {attempt} retries");
        }
        let decision = parse_action_text(&text)?;
        Ok(DecisionResponse {
            decision,
            raw_text: Some(text),
            latency: started.elapsed(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_defaults() {
        let cfg = RemoteConfig::from_lookup(|k| (k == ENV_ENDPOINT).then(|| "http://x/v1".into())).unwrap();
        assert_eq!(cfg.timeout, Duration::from_millis(60_000));
        assert_eq!(cfg.retries, 2);
        assert_eq!(cfg.api_key, None);
        assert_eq!(RemoteConfig::from_lookup(|_| None), Err(ConfigError::MissingEndpoint));
        let bad = RemoteConfig::from_lookup(|k| match k {
            ENV_ENDPOINT => Some("http://x".into()),
            ENV_RETRIES => Some("many".into()),
            _ => None,
        });
        assert!(matches!(bad, Err(ConfigError::BadNumber { name: ENV_RETRIES, .. })));
    }

    #[test]
    fn debug_output_hides_the_key() {
        let mut cfg = RemoteConfig::new("http://x", "m");
        cfg.api_key = Some("sk-secret-value".into());
        let shown = format!("{:?}", RemoteChatBackend::new(cfg));
        assert!(!shown.contains("sk-secret-value"));
        assert!(shown.contains("redacted"));
    }
}
