//! Prompt rendering and corpus generation against chat-completions style
//! endpoints.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::RawRecord;
use crate::text_prep::{clean_text, count_words, SOFT_LIMIT};

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("unresolved placeholder `{{{0}}}`")]
    Unresolved(String),
    #[error("unterminated placeholder starting at byte {0}")]
    Unterminated(usize),
    #[error("few-shot template must contain exactly one placeholder, found {0}")]
    FewshotPlaceholders(usize),
    #[error("requested {requested} shots from a pool of {available}")]
    PoolTooSmall { requested: usize, available: usize },
    #[error("no built-in template for register `{register}`, variant `{variant}`")]
    UnknownTemplate { register: String, variant: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrefixTransport {
    /// A trailing partial assistant turn.
    #[default]
    Assistant,
    /// Appended to the final user message, for endpoints without
    /// continuation support.
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptTemplate {
    pub register: String,
    #[serde(default = "base_variant")]
    pub variant_id: String,
    pub system: String,
    pub user: String,
    pub assistant_prefix: String,
    pub fewshot_assistant: String,
    /// Case-insensitive model-id substring to text appended to the target
    /// user message.
    #[serde(default = "default_suffixes")]
    pub model_suffixes: BTreeMap<String, String>,
}

fn base_variant() -> String {
    "base".into()
}

pub fn default_suffixes() -> BTreeMap<String, String> {
    BTreeMap::from([("qwen3".to_string(), "\\nothink".to_string())])
}

const CERTAINLY: &str = "Certainly, here is my answer:";

fn template(
    register: &str,
    variant: &str,
    system: &str,
    user: &str,
    prefix: &str,
    text_key: &str,
) -> PromptTemplate {
    PromptTemplate {
        register: register.into(),
        variant_id: variant.into(),
        system: system.into(),
        user: user.into(),
        assistant_prefix: prefix.into(),
        fewshot_assistant: format!("{prefix} {{{text_key}}}"),
        model_suffixes: default_suffixes(),
    }
}

/// The built-in templates, including the prompt-stability variant.
pub fn builtin_templates() -> Vec<PromptTemplate> {
    vec![
        template(
            "WritingPrompts",
            "base",
            "You are a participant on an online creative writing forum where users write short stories inspired by prompts from other members. Your task is to write the opening section of a story based on the given prompt. Write the beginning of a story of at least 400 words. You do not need to finish the story. Please output only your story text.",
            "Please write a story for the following prompt: {prompt}",
            CERTAINLY,
            "story",
        ),
        template(
            "BNC2014Spoken",
            "base",
            "You are tasked with writing a conversation between 2 or more people given context about the speakers and the conversation. Write a conversation of at least 400 words. You do not need to finish the conversation or cover all topics mentioned. You can start with an already ongoing conversation. Please indicate each speaker with \"Speaker_1:\", \"Speaker_2:\", etc.",
            "Please write a conversation given the following context: {Speaker_Metadata} {Conversation_Context}",
            CERTAINLY,
            "Conversation",
        ),
        template(
            "BNC2014Spoken",
            "ablation-1",
            "Your task is to write a multi-speaker conversation based on the provided context information about the speakers and situation. The conversation should be at least 400 words long. It may begin in the middle of an interaction. Label turns as 'Speaker_1:', 'Speaker_2:', and so on.",
            "Generate a conversation using the following information: {Speaker_Metadata} {Conversation_Context}",
            "Sure, here is my answer:",
            "Conversation",
        ),
        template(
            "S2ORC_ACL",
            "base",
            "You are an author of ACL papers. Your task is to write the introduction of a paper given its title and abstract. Write an introduction of at least 400 words. Output only the introduction text.",
            "Please write a paper given the following title and abstract: {title}{abstract}",
            CERTAINLY,
            "introduction",
        ),
        template(
            "wikiHow",
            "base",
            "You are the author of a wikiHow article. Your task is to write the full article given the title and headline. Write an article of at least 400 words. Please only output the article text.",
            "Please write an article given the following title and headline: {title}{headline}",
            CERTAINLY,
            "text",
        ),
        template(
            "XSum",
            "base",
            "You are a writer for a British newspaper. Your task is to write the beginning of an article based on a short summary of the content. If necessary, you can add names and other facts to the story. Write a beginning of at least 400 words. You do not need to finish the article. Please output only the article text.",
            "Please write an article given the following summary: {summary}",
            CERTAINLY,
            "document",
        ),
    ]
}

impl PromptTemplate {
    pub fn builtin(register: &str, variant: &str) -> Result<PromptTemplate, PromptError> {
        builtin_templates()
            .into_iter()
            .find(|t| t.register.eq_ignore_ascii_case(register) && t.variant_id == variant)
            .ok_or_else(|| PromptError::UnknownTemplate {
                register: register.into(),
                variant: variant.into(),
            })
    }

    /// Suffix for `model_id`, if any key is a case-insensitive substring.
    pub fn suffix_for(&self, model_id: &str) -> Option<&str> {
        let id = model_id.to_lowercase();
        self.model_suffixes
            .iter()
            .find(|(k, _)| id.contains(&k.to_lowercase()))
            .map(|(_, v)| v.as_str())
    }
}

enum Piece<'a> {
    Literal(&'a str),
    Slot(&'a str),
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-'
}

/// Splits `{key}` placeholders out of a template. Braces that do not
/// enclose a key are literal text.
fn pieces(template: &str) -> Result<Vec<Piece<'_>>, PromptError> {
    let mut out = Vec::new();
    let mut rest = template;
    let mut offset = 0;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}');
        match close {
            Some(c) if c > 0 && after[..c].chars().all(is_key_char) => {
                if open > 0 {
                    out.push(Piece::Literal(&rest[..open]));
                }
                out.push(Piece::Slot(&after[..c]));
                let consumed = open + 1 + c + 1;
                rest = &rest[consumed..];
                offset += consumed;
            }
            None if after.chars().take_while(|&ch| is_key_char(ch)).count() == after.len()
                && !after.is_empty() =>
            {
                return Err(PromptError::Unterminated(offset + open));
            }
            _ => {
                out.push(Piece::Literal(&rest[..open + 1]));
                rest = after;
                offset += open + 1;
            }
        }
    }
    if !rest.is_empty() {
        out.push(Piece::Literal(rest));
    }
    Ok(out)
}

pub fn placeholders(template: &str) -> Result<Vec<String>, PromptError> {
    Ok(pieces(template)?
        .into_iter()
        .filter_map(|p| match p {
            Piece::Slot(k) => Some(k.to_string()),
            Piece::Literal(_) => None,
        })
        .collect())
}

/// Substitutes every placeholder from `values`.
pub fn fill(template: &str, values: &BTreeMap<String, String>) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len());
    for piece in pieces(template)? {
        match piece {
            Piece::Literal(s) => out.push_str(s),
            Piece::Slot(k) => out.push_str(
                values
                    .get(k)
                    .ok_or_else(|| PromptError::Unresolved(k.to_string()))?,
            ),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        ChatMessage {
            role: role.into(),
            content: content.into(),
        }
    }
}

/// A demonstration: the shot's metadata and its human text.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot<'a> {
    pub metadata: &'a BTreeMap<String, String>,
    pub text: &'a str,
}

pub fn render_prompt(
    template: &PromptTemplate,
    metadata: &BTreeMap<String, String>,
    shots: &[Shot],
    model_id: &str,
    transport: PrefixTransport,
) -> Result<Vec<ChatMessage>, PromptError> {
    let shot_slots = placeholders(&template.fewshot_assistant)?;
    let mut messages = vec![ChatMessage::new("system", fill(&template.system, metadata)?)];
    for shot in shots {
        messages.push(ChatMessage::new("user", fill(&template.user, shot.metadata)?));
        if shot_slots.len() != 1 {
            return Err(PromptError::FewshotPlaceholders(shot_slots.len()));
        }
        let values = BTreeMap::from([(shot_slots[0].clone(), shot.text.to_string())]);
        messages.push(ChatMessage::new(
            "assistant",
            fill(&template.fewshot_assistant, &values)?,
        ));
    }
    let mut user = fill(&template.user, metadata)?;
    if let Some(suffix) = template.suffix_for(model_id) {
        user.push_str(suffix);
    }
    match transport {
        PrefixTransport::Assistant => {
            messages.push(ChatMessage::new("user", user));
            messages.push(ChatMessage::new("assistant", template.assistant_prefix.clone()));
        }
        PrefixTransport::User => {
            user.push_str("\n\n");
            user.push_str(&template.assistant_prefix);
            messages.push(ChatMessage::new("user", user));
        }
    }
    Ok(messages)
}

/// Deterministic in `(seed, target_doc_id, s)` and the pool contents; the
/// pool order does not matter.
pub fn select_fewshots(
    pool: &[String],
    target_doc_id: &str,
    s: usize,
    seed: u64,
) -> Result<Vec<String>, PromptError> {
    if s == 0 {
        return Ok(Vec::new());
    }
    let mut sorted: Vec<&String> = pool.iter().collect();
    sorted.sort();
    sorted.dedup();
    if s > sorted.len() {
        return Err(PromptError::PoolTooSmall {
            requested: s,
            available: sorted.len(),
        });
    }
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((s as u64).to_le_bytes());
    h.update(target_doc_id.as_bytes());
    let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
    Ok(index::sample(&mut rng, sorted.len(), s)
        .into_iter()
        .map(|i| sorted[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationJob {
    pub model_id: String,
    pub endpoint: String,
    pub temperature: f64,
    pub top_p: f64,
    pub shots: usize,
    pub seed: u64,
    pub max_new_tokens: usize,
    #[serde(default)]
    pub prefix_transport: PrefixTransport,
}

impl GenerationJob {
    pub fn new(model_id: &str, endpoint: &str) -> Self {
        GenerationJob {
            model_id: model_id.into(),
            endpoint: endpoint.into(),
            temperature: 1.0,
            top_p: 1.0,
            shots: 0,
            seed: 0,
            max_new_tokens: 1024,
            prefix_transport: PrefixTransport::Assistant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub doc_id: String,
    pub rendered_messages: Vec<ChatMessage>,
    pub raw_output: String,
    pub cleaned_output: String,
    /// Filled once the cleaned output has been tagged and truncated.
    pub truncated_output: Option<String>,
    pub job: GenerationJob,
    pub fewshot_ids: Vec<String>,
    pub attempts: u32,
    /// Empty generations are kept for the audit trail but excluded from
    /// analysis.
    pub empty_output: bool,
    /// Fewer words than the soft truncation limit.
    pub short_output: bool,
}

impl GenerationRecord {
    pub fn usable(&self) -> bool {
        !self.empty_output
    }
}

/// Request body of the chat-completions protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub choices: Vec<ChatChoice>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatChoice {
    pub message: ChatMessage,
}

impl ChatResponse {
    pub fn text(&self) -> Option<&str> {
        self.choices.first().map(|c| c.message.content.as_str())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BackendError {
    /// Worth retrying: timeouts, rate limits, server errors.
    #[error("transient backend failure: {0}")]
    Transient(String),
    #[error("permanent backend failure: {0}")]
    Permanent(String),
}

pub trait ChatBackend: Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 6,
            base_delay_ms: 500,
            max_delay_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    pub fn delay(&self, attempt: u32) -> Duration {
        let ms = self
            .base_delay_ms
            .saturating_mul(1u64 << attempt.min(30))
            .min(self.max_delay_ms);
        Duration::from_millis(ms)
    }
}

/// Calls the backend until it succeeds, fails permanently or runs out of
/// attempts. Returns the text and the number of attempts used.
pub fn complete_with_retry(
    backend: &dyn ChatBackend,
    request: &ChatRequest,
    policy: &RetryPolicy,
) -> Result<(String, u32), BackendError> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match backend.complete(request) {
            Ok(text) => return Ok((text, attempt)),
            Err(BackendError::Transient(msg)) if attempt < policy.max_attempts => {
                let wait = policy.delay(attempt - 1);
                log::warn!("attempt {attempt} failed ({msg}); retrying in {wait:?}");
                std::thread::sleep(wait);
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerationOptions {
    pub parallelism: usize,
    /// Minimum spacing between request starts.
    pub min_interval: Duration,
    pub retry: RetryPolicy,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions {
            parallelism: 4,
            min_interval: Duration::ZERO,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("few-shot pool overlaps the evaluation set on `{0}`")]
    PoolOverlap(String),
    #[error("generation aborted at `{failed_id}`: {reason}; {} documents completed", completed.len())]
    Aborted {
        failed_id: String,
        reason: BackendError,
        /// Finished records in human-corpus order, for resumption.
        completed: Vec<GenerationRecord>,
    },
}

/// Everything needed to issue one request.
#[derive(Debug, Clone)]
pub struct PreparedRequest {
    pub doc_id: String,
    pub fewshot_ids: Vec<String>,
    pub request: ChatRequest,
}

pub fn prepare_requests(
    human_eval: &[RawRecord],
    pool: &[RawRecord],
    template: &PromptTemplate,
    job: &GenerationJob,
) -> Result<Vec<PreparedRequest>, GenerationError> {
    let eval_ids: HashSet<&str> = human_eval.iter().map(|r| r.id.as_str()).collect();
    if let Some(r) = pool.iter().find(|r| eval_ids.contains(r.id.as_str())) {
        return Err(GenerationError::PoolOverlap(r.id.clone()));
    }
    let pool_ids: Vec<String> = pool.iter().map(|r| r.id.clone()).collect();
    let by_id: HashMap<&str, &RawRecord> = pool.iter().map(|r| (r.id.as_str(), r)).collect();
    human_eval
        .iter()
        .map(|doc| {
            let fewshot_ids = select_fewshots(&pool_ids, &doc.id, job.shots, job.seed)?;
            let shots: Vec<Shot> = fewshot_ids
                .iter()
                .map(|id| {
                    let r = by_id[id.as_str()];
                    Shot {
                        metadata: &r.metadata,
                        text: &r.text,
                    }
                })
                .collect();
            let messages =
                render_prompt(template, &doc.metadata, &shots, &job.model_id, job.prefix_transport)?;
            Ok(PreparedRequest {
                doc_id: doc.id.clone(),
                fewshot_ids,
                request: ChatRequest {
                    model: job.model_id.clone(),
                    messages,
                    temperature: job.temperature,
                    top_p: job.top_p,
                    max_tokens: job.max_new_tokens,
                },
            })
        })
        .collect()
}

fn to_record(p: &PreparedRequest, job: &GenerationJob, raw: String, attempts: u32) -> GenerationRecord {
    let (cleaned, _) = clean_text(&raw);
    let empty_output = cleaned.is_empty();
    if empty_output {
        log::warn!("`{}`: empty generation, excluded from analysis", p.doc_id);
    }
    GenerationRecord {
        doc_id: p.doc_id.clone(),
        rendered_messages: p.request.messages.clone(),
        short_output: !empty_output && count_words(&cleaned) < SOFT_LIMIT,
        raw_output: raw,
        cleaned_output: cleaned,
        truncated_output: None,
        job: job.clone(),
        fewshot_ids: p.fewshot_ids.clone(),
        attempts,
        empty_output,
    }
}

/// Generates one record per human document, in human-corpus order.
/// Documents already present in `done` are not requested again.
/// `on_record` sees each new record as soon as it is finished.
#[allow(clippy::too_many_arguments)]
pub fn generate_corpus(
    human_eval: &[RawRecord],
    pool: &[RawRecord],
    template: &PromptTemplate,
    job: &GenerationJob,
    backend: &dyn ChatBackend,
    options: &GenerationOptions,
    done: &[GenerationRecord],
    on_record: &(dyn Fn(&GenerationRecord) + Sync),
) -> Result<Vec<GenerationRecord>, GenerationError> {
    let prepared = prepare_requests(human_eval, pool, template, job)?;
    let finished: HashMap<&str, &GenerationRecord> =
        done.iter().map(|r| (r.doc_id.as_str(), r)).collect();
    let slots: Vec<Mutex<Option<GenerationRecord>>> = prepared
        .iter()
        .map(|p| Mutex::new(finished.get(p.doc_id.as_str()).map(|r| (*r).clone())))
        .collect();
    let todo: Vec<usize> = (0..prepared.len())
        .filter(|&i| slots[i].lock().unwrap().is_none())
        .collect();
    if todo.len() < prepared.len() {
        log::info!("resuming: {} of {} documents already done", prepared.len() - todo.len(), prepared.len());
    }

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let failure: Mutex<Option<(usize, BackendError)>> = Mutex::new(None);
    let last_start: Mutex<Option<Instant>> = Mutex::new(None);
    let worker = || loop {
        if abort.load(Ordering::SeqCst) {
            return;
        }
        let k = next.fetch_add(1, Ordering::SeqCst);
        let Some(&i) = todo.get(k) else {
            return;
        };
        if !options.min_interval.is_zero() {
            let mut last = last_start.lock().unwrap();
            if let Some(t) = *last {
                let ready = t + options.min_interval;
                let now = Instant::now();
                if ready > now {
                    std::thread::sleep(ready - now);
                }
            }
            *last = Some(Instant::now());
        }
        let p = &prepared[i];
        match complete_with_retry(backend, &p.request, &options.retry) {
            Ok((raw, attempts)) => {
                let record = to_record(p, job, raw, attempts);
                on_record(&record);
                *slots[i].lock().unwrap() = Some(record);
            }
            Err(e) => {
                abort.store(true, Ordering::SeqCst);
                let mut f = failure.lock().unwrap();
                if f.as_ref().is_none_or(|(j, _)| i < *j) {
                    *f = Some((i, e));
                }
                return;
            }
        }
    };
    let threads = options.parallelism.max(1).min(todo.len().max(1));
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(worker);
            }
        });
    }

    let records: Vec<GenerationRecord> = slots
        .into_iter()
        .filter_map(|s| s.into_inner().unwrap())
        .collect();
    if let Some((i, reason)) = failure.into_inner().unwrap() {
        return Err(GenerationError::Aborted {
            failed_id: prepared[i].doc_id.clone(),
            reason,
            completed: records,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn zero_shot_writing_prompt() {
        let t = PromptTemplate::builtin("WritingPrompts", "base").unwrap();
        let m = render_prompt(&t, &meta(&[("prompt", "P")]), &[], "llama-3-8b", PrefixTransport::Assistant)
            .unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].role, "system");
        assert_eq!(m[1].content, "Please write a story for the following prompt: P");
        assert_eq!(m[2], ChatMessage::new("assistant", "Certainly, here is my answer:"));
    }

    #[test]
    fn shots_and_suffix() {
        let t = PromptTemplate::builtin("XSum", "base").unwrap();
        let sm = meta(&[("summary", "S1")]);
        let shots = [Shot { metadata: &sm, text: "T1" }, Shot { metadata: &sm, text: "T2" }];
        let m = render_prompt(&t, &meta(&[("summary", "X")]), &shots, "Qwen3-32B", PrefixTransport::Assistant)
            .unwrap();
        let roles: Vec<&str> = m.iter().map(|c| c.role.as_str()).collect();
        assert_eq!(roles, ["system", "user", "assistant", "user", "assistant", "user", "assistant"]);
        assert_eq!(m[2].content, "Certainly, here is my answer: T1");
        assert!(m[5].content.ends_with("X\\nothink"));
        assert!(!m[1].content.contains("nothink"));
    }

    #[test]
    fn prefix_in_user_message() {
        let t = PromptTemplate::builtin("XSum", "base").unwrap();
        let m = render_prompt(&t, &meta(&[("summary", "X")]), &[], "m", PrefixTransport::User).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m[1].content.ends_with("X\n\nCertainly, here is my answer:"));
    }

    #[test]
    fn unresolved_placeholder_is_named() {
        let t = PromptTemplate::builtin("S2ORC_ACL", "base").unwrap();
        let err = render_prompt(&t, &meta(&[("title", "T")]), &[], "m", PrefixTransport::Assistant);
        assert_eq!(err, Err(PromptError::Unresolved("abstract".into())));
    }

    #[test]
    fn literal_braces_survive() {
        let v = meta(&[("a", "1")]);
        assert_eq!(fill("{a} {not a key} {}", &v).unwrap(), "1 {not a key} {}");
        assert_eq!(fill("x {abc", &v), Err(PromptError::Unterminated(2)));
    }

    #[test]
    fn fewshot_selection() {
        let pool: Vec<String> = (0..50).map(|i| format!("p{i}")).collect();
        assert!(select_fewshots(&pool, "t", 0, 1).unwrap().is_empty());
        let a = select_fewshots(&pool, "t1", 3, 1).unwrap();
        let mut shuffled = pool.clone();
        shuffled.reverse();
        assert_eq!(a, select_fewshots(&shuffled, "t1", 3, 1).unwrap());
        assert_ne!(a, select_fewshots(&pool, "t2", 3, 1).unwrap());
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 3);
        assert!(select_fewshots(&pool, "t", 51, 1).is_err());
    }

    #[test]
    fn all_builtins_have_one_shot_slot() {
        for t in builtin_templates() {
            assert_eq!(placeholders(&t.fewshot_assistant).unwrap().len(), 1, "{}", t.register);
            assert!(t.fewshot_assistant.starts_with(&t.assistant_prefix));
        }
    }

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 100,
            max_delay_ms: 350,
        };
        assert_eq!(p.delay(0), Duration::from_millis(100));
        assert_eq!(p.delay(1), Duration::from_millis(200));
        assert_eq!(p.delay(2), Duration::from_millis(350));
    }
}
