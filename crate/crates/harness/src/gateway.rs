//! Chat-completion client with a content-addressed response cache.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::num::NonZeroU32;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicIsize, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use governor::{DefaultDirectRateLimiter, Quota, RateLimiter};
use opinion_align::prompt::{sha256_hex, PromptText};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use crate::mock::{MockError, MockQuery, MockRespondent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationParams {
    pub top_p: f64,
    pub temperature: f64,
    pub max_new_tokens: u32,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { top_p: 1.0, temperature: 0.0, max_new_tokens: 256, frequency_penalty: 0.0, presence_penalty: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before attempt `i + 2`; the last entry repeats.
    pub backoff_ms: Vec<u64>,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 4, backoff_ms: vec![500, 2000, 8000] }
    }
}

impl RetryPolicy {
    fn delay(&self, failed_attempts: u32) -> Duration {
        let i = (failed_attempts as usize).saturating_sub(1);
        let ms = self.backoff_ms.get(i).or(self.backoff_ms.last()).copied().unwrap_or(0);
        Duration::from_millis(ms)
    }
}

/// How the rendered prompt is split into chat messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageScheme {
    /// The whole prompt as one user message.
    #[default]
    SingleUser,
    /// Instruction paragraph as the system message, the rest as the user message.
    InstructionAsSystem,
}

/// An OpenAI-compatible endpoint. `auth_env` names the variable holding the
/// bearer token; the token itself is never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub name: String,
    pub base_url: String,
    pub model_id: String,
    #[serde(default)]
    pub auth_env: Option<String>,
    #[serde(default = "default_concurrency")]
    pub max_concurrency: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default)]
    pub requests_per_second: Option<f64>,
    #[serde(default)]
    pub messages: MessageScheme,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_concurrency() -> usize {
    4
}

fn default_timeout() -> u64 {
    120
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("transport: {message} (after {attempts} attempts)")]
    Transport { attempts: u32, message: String },
    #[error("provider returned HTTP {status}: {body}")]
    Provider { status: u16, body: String },
    #[error(transparent)]
    Mock(#[from] MockError),
    #[error("cache: {0}")]
    Cache(String),
    #[error("request budget exhausted")]
    Interrupted,
}

/// `sha256(model_id, fingerprint, params)`; the only cache identity.
pub fn cache_key(model_id: &str, fingerprint: &str, params: &GenerationParams) -> String {
    let params = serde_json::to_string(params).expect("params serialize");
    let mut buf = Vec::with_capacity(model_id.len() + fingerprint.len() + params.len() + 2);
    buf.extend_from_slice(model_id.as_bytes());
    buf.push(0);
    buf.extend_from_slice(fingerprint.as_bytes());
    buf.push(0);
    buf.extend_from_slice(params.as_bytes());
    sha256_hex(&buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestMeta {
    pub provider: String,
    pub model_id: String,
    pub fingerprint: String,
    pub params: GenerationParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub request_meta: RequestMeta,
    pub raw_response: String,
    pub timestamp: u64,
    pub attempt_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub cache_key: String,
    pub prompt: PromptText,
    pub raw_response: String,
    pub timestamp: u64,
    pub attempt_count: u32,
}

fn sanitize(model_id: &str) -> String {
    model_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

/// `{dir}/{model_id}/{key[..2]}/{key}.json`, written via temp file + rename.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, model_id: &str, key: &str) -> PathBuf {
        self.dir.join(sanitize(model_id)).join(&key[..2]).join(format!("{key}.json"))
    }

    /// A corrupt or mismatched entry is reported as a miss.
    pub fn get(&self, model_id: &str, key: &str) -> Option<CacheEntry> {
        let path = self.path(model_id, key);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(e) if e.request_meta.model_id == model_id => Some(e),
            Ok(_) => {
                log::warn!("cache entry {} belongs to another model; refetching", path.display());
                None
            }
            Err(err) => {
                log::warn!("corrupt cache entry {}: {err}; refetching", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &str, entry: &CacheEntry) -> Result<(), GatewayError> {
        let path = self.path(&entry.request_meta.model_id, key);
        let parent = path.parent().expect("cache path has a parent");
        let io = |e: std::io::Error| GatewayError::Cache(format!("{}: {e}", path.display()));
        fs::create_dir_all(parent).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(io)?;
        serde_json::to_writer_pretty(&mut tmp, entry).map_err(|e| GatewayError::Cache(e.to_string()))?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Every entry path under the cache directory.
    pub fn entries(&self) -> Vec<PathBuf> {
        fn walk(dir: &Path, out: &mut Vec<PathBuf>) {
            let Ok(rd) = fs::read_dir(dir) else { return };
            let mut items: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
            items.sort();
            for p in items {
                if p.is_dir() {
                    walk(&p, out);
                } else if p.extension().is_some_and(|e| e == "json") {
                    out.push(p);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.dir, &mut out);
        out
    }
}

/// Caps the number of uncached calls across all gateways of a run; used to
/// stop a run part-way.
#[derive(Debug)]
pub struct RequestBudget(AtomicIsize);

impl RequestBudget {
    pub fn new(limit: usize) -> Arc<Self> {
        Arc::new(RequestBudget(AtomicIsize::new(limit as isize)))
    }

    fn take(&self) -> bool {
        self.0.fetch_sub(1, Ordering::SeqCst) > 0
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Mock(MockRespondent),
    Http(ProviderConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempt_count: u32,
}

pub struct Gateway {
    name: String,
    model_id: String,
    backend: Backend,
    params: GenerationParams,
    cache: Option<ResponseCache>,
    client: reqwest::Client,
    permits: Arc<Semaphore>,
    limiter: Option<DefaultDirectRateLimiter>,
    inflight: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    calls: AtomicUsize,
    budget: Option<Arc<RequestBudget>>,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway").field("name", &self.name).field("model_id", &self.model_id).finish()
    }
}

impl Gateway {
    pub fn new(
        name: impl Into<String>,
        model_id: impl Into<String>,
        backend: Backend,
        params: GenerationParams,
        cache: Option<ResponseCache>,
    ) -> Result<Self, GatewayError> {
        let (concurrency, limiter, timeout) = match &backend {
            Backend::Mock(_) => (usize::MAX >> 4, None, 120),
            Backend::Http(p) => {
                if p.max_concurrency == 0 {
                    return Err(GatewayError::Config(format!("{}: max_concurrency must be at least 1", p.name)));
                }
                let limiter = match p.requests_per_second {
                    Some(r) if r > 0.0 && r.is_finite() => {
                        let burst = NonZeroU32::new(p.max_concurrency as u32).unwrap_or(NonZeroU32::MIN);
                        let quota = Quota::with_period(Duration::from_secs_f64(1.0 / r))
                            .ok_or_else(|| GatewayError::Config(format!("{}: bad request rate {r}", p.name)))?
                            .allow_burst(burst);
                        Some(RateLimiter::direct(quota))
                    }
                    Some(r) => return Err(GatewayError::Config(format!("{}: bad request rate {r}", p.name))),
                    None => None,
                };
                (p.max_concurrency, limiter, p.timeout_secs)
            }
        };
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(timeout))
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(Gateway {
            name: name.into(),
            model_id: model_id.into(),
            backend,
            params,
            cache,
            client,
            permits: Arc::new(Semaphore::new(concurrency)),
            limiter,
            inflight: Mutex::new(HashMap::new()),
            calls: AtomicUsize::new(0),
            budget: None,
        })
    }

    pub fn with_budget(mut self, budget: Arc<RequestBudget>) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn params(&self) -> &GenerationParams {
        &self.params
    }

    pub fn max_concurrency(&self) -> usize {
        match &self.backend {
            Backend::Mock(_) => 16,
            Backend::Http(p) => p.max_concurrency,
        }
    }

    /// Uncached backend calls made so far.
    pub fn call_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn cache_key(&self, prompt: &PromptText) -> String {
        cache_key(&self.model_id, prompt.fingerprint.as_str(), &self.params)
    }

    /// One backend call, no cache. `query` carries the structured request the
    /// mock answers from; HTTP backends ignore it.
    pub async fn complete(&self, prompt: &PromptText, query: &MockQuery) -> Result<Completion, GatewayError> {
        if let Some(b) = &self.budget {
            if !b.take() {
                return Err(GatewayError::Interrupted);
            }
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        match &self.backend {
            Backend::Mock(m) => Ok(Completion { text: m.respond(query, prompt)?, attempt_count: 1 }),
            Backend::Http(p) => {
                let _permit = self.permits.acquire().await.expect("semaphore never closed");
                self.http_complete(p, prompt).await
            }
        }
    }

    async fn http_complete(&self, p: &ProviderConfig, prompt: &PromptText) -> Result<Completion, GatewayError> {
        let token = match &p.auth_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                GatewayError::Config(format!("{}: environment variable {var} is not set", p.name))
            })?),
            None => None,
        };
        let messages = match p.messages {
            MessageScheme::SingleUser => serde_json::json!([{ "role": "user", "content": prompt.rendered }]),
            MessageScheme::InstructionAsSystem => {
                let (system, user) = prompt.rendered.split_once("\n\n").unwrap_or(("", &prompt.rendered));
                serde_json::json!([{ "role": "system", "content": system }, { "role": "user", "content": user }])
            }
        };
        let body = serde_json::json!({
            "model": p.model_id,
            "messages": messages,
            "temperature": self.params.temperature,
            "top_p": self.params.top_p,
            "max_tokens": self.params.max_new_tokens,
            "frequency_penalty": self.params.frequency_penalty,
            "presence_penalty": self.params.presence_penalty,
        });
        let url = format!("{}/chat/completions", p.base_url.trim_end_matches('/'));
        let attempts = p.retry.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            if attempt > 1 {
                tokio::time::sleep(p.retry.delay(attempt - 1)).await;
            }
            if let Some(l) = &self.limiter {
                l.until_ready().await;
            }
            let mut req = self.client.post(&url).json(&body);
            if let Some(t) = &token {
                req = req.bearer_auth(t);
            }
            match req.send().await {
                Ok(resp) => {
                    let status = resp.status();
                    let text = resp.text().await.unwrap_or_default();
                    if status.is_success() {
                        return extract_content(&text)
                            .map(|text| Completion { text, attempt_count: attempt })
                            .ok_or_else(|| GatewayError::Provider {
                                status: status.as_u16(),
                                body: format!("no message content in response: {}", excerpt(&text)),
                            });
                    }
                    if status.as_u16() == 429 || status.is_server_error() {
                        log::warn!("{}: HTTP {status} on attempt {attempt}/{attempts}", p.name);
                        last = format!("HTTP {}: {}", status.as_u16(), excerpt(&text));
                        continue;
                    }
                    return Err(GatewayError::Provider { status: status.as_u16(), body: excerpt(&text) });
                }
                Err(e) => {
                    log::warn!("{}: {e} on attempt {attempt}/{attempts}", p.name);
                    last = e.to_string();
                }
            }
        }
        Err(GatewayError::Transport { attempts, message: last })
    }

    /// Cache lookup, then a backend call on a miss. Concurrent misses on the
    /// same key wait for the first and then read its entry.
    pub async fn cached_complete(
        &self,
        prompt: &PromptText,
        query: &MockQuery,
    ) -> Result<(RequestRecord, bool), GatewayError> {
        let key = self.cache_key(prompt);
        let Some(cache) = &self.cache else {
            let c = self.complete(prompt, query).await?;
            return Ok((self.record(key, prompt, c.text, now(), c.attempt_count), false));
        };
        let lock = {
            let mut map = self.inflight.lock().expect("inflight map");
            map.entry(key.clone()).or_default().clone()
        };
        let guard = lock.lock().await;
        let result = match cache.get(&self.model_id, &key) {
            Some(e) => Ok((self.record(key.clone(), prompt, e.raw_response, e.timestamp, e.attempt_count), true)),
            None => match self.complete(prompt, query).await {
                Ok(c) => {
                    let entry = CacheEntry {
                        request_meta: RequestMeta {
                            provider: self.name.clone(),
                            model_id: self.model_id.clone(),
                            fingerprint: prompt.fingerprint.to_string(),
                            params: self.params.clone(),
                        },
                        raw_response: c.text,
                        timestamp: now(),
                        attempt_count: c.attempt_count,
                    };
                    cache.put(&key, &entry)?;
                    Ok((self.record(key.clone(), prompt, entry.raw_response, entry.timestamp, entry.attempt_count), false))
                }
                Err(e) => Err(e),
            },
        };
        drop(guard);
        let mut map = self.inflight.lock().expect("inflight map");
        if map.get(&key).is_some_and(|l| Arc::strong_count(l) == 2) {
            map.remove(&key);
        }
        drop(map);
        result
    }

    fn record(&self, cache_key: String, prompt: &PromptText, raw: String, ts: u64, attempts: u32) -> RequestRecord {
        RequestRecord { cache_key, prompt: prompt.clone(), raw_response: raw, timestamp: ts, attempt_count: attempts }
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn excerpt(s: &str) -> String {
    s.chars().take(200).collect()
}

fn extract_content(body: &str) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(body).ok()?;
    v.get("choices")?.get(0)?.get("message")?.get("content")?.as_str().map(str::to_string)
}
