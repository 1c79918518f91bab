//! Chat-completions endpoint over blocking HTTP.

use std::time::Duration;

use regmmd::harness::{BackendError, ChatBackend, ChatRequest, ChatResponse};

pub struct HttpBackend {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(base_url: &str, api_key: Option<String>) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(30))
            .timeout_read(Duration::from_secs(600))
            .build();
        HttpBackend {
            agent,
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            api_key,
        }
    }
}

fn transient(status: u16) -> bool {
    status == 408 || status == 409 || status == 429 || status >= 500
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        let mut call = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let response = match call.send_json(request) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) => {
                let body = r.into_string().unwrap_or_default();
                let message = format!("HTTP {code}: {body}");
                return Err(if transient(code) {
                    BackendError::Transient(message)
                } else {
                    BackendError::Permanent(message)
                });
            }
            Err(e) => return Err(BackendError::Transient(e.to_string())),
        };
        let parsed: ChatResponse = response
            .into_json()
            .map_err(|e| BackendError::Transient(format!("unreadable response: {e}")))?;
        parsed
            .text()
            .map(str::to_string)
            .ok_or_else(|| BackendError::Permanent("response has no choices".into()))
    }
}
