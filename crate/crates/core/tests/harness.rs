use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use regmmd::corpus::RawRecord;
use regmmd::harness::*;

fn record(id: &str, summary: &str, text: &str) -> RawRecord {
    RawRecord {
        id: id.into(),
        register: "XSum".into(),
        text: text.into(),
        metadata: BTreeMap::from([("summary".to_string(), summary.to_string())]),
    }
}

fn corpus(prefix: &str, n: usize) -> Vec<RawRecord> {
    (0..n)
        .map(|i| record(&format!("{prefix}{i:03}"), &format!("summary {i}"), &format!("human text {i}")))
        .collect()
}

/// Echoes a digest of the request; optionally fails or returns nothing.
struct Stub {
    calls: AtomicUsize,
    seen: Mutex<Vec<String>>,
    transient_first: usize,
    permanent_on: Option<String>,
    empty_on: Option<String>,
}

impl Stub {
    fn new() -> Self {
        Stub {
            calls: AtomicUsize::new(0),
            seen: Mutex::new(Vec::new()),
            transient_first: 0,
            permanent_on: None,
            empty_on: None,
        }
    }
}

impl ChatBackend for Stub {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        if call < self.transient_first {
            return Err(BackendError::Transient("busy".into()));
        }
        let target = &request.messages[request.messages.len() - 2].content;
        self.seen.lock().unwrap().push(target.clone());
        if self.permanent_on.as_ref().is_some_and(|p| target.contains(p.as_str())) {
            return Err(BackendError::Permanent("forbidden".into()));
        }
        if self.empty_on.as_ref().is_some_and(|p| target.contains(p.as_str())) {
            return Ok("   ".into());
        }
        Ok(format!("Generated  reply to: {target}"))
    }
}

fn quick() -> GenerationOptions {
    GenerationOptions {
        parallelism: 3,
        retry: RetryPolicy {
            max_attempts: 4,
            base_delay_ms: 0,
            max_delay_ms: 0,
        },
        ..Default::default()
    }
}

fn job(model: &str, shots: usize) -> GenerationJob {
    GenerationJob {
        shots,
        seed: 17,
        ..GenerationJob::new(model, "http://stub")
    }
}

fn template() -> PromptTemplate {
    PromptTemplate::builtin("XSum", "base").unwrap()
}

#[test]
fn one_record_per_document_in_order() {
    let eval = corpus("e", 40);
    let pool = corpus("p", 10);
    let stub = Stub::new();
    let out = generate_corpus(&eval, &pool, &template(), &job("m", 2), &stub, &quick(), &[], &|_| {}).unwrap();
    let ids: Vec<&str> = out.iter().map(|r| r.doc_id.as_str()).collect();
    let want: Vec<&str> = eval.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, want);
    let eval_ids: HashSet<&str> = want.iter().copied().collect();
    for r in &out {
        assert_eq!(r.fewshot_ids.len(), 2);
        assert!(r.fewshot_ids.iter().all(|f| !eval_ids.contains(f.as_str())));
        assert_eq!(r.rendered_messages.len(), 7);
        assert!(r.cleaned_output.starts_with("Generated reply"));
        assert!(r.short_output && !r.empty_output);
        assert_eq!(r.job.temperature, 1.0);
    }
}

#[test]
fn resume_requests_only_missing_documents() {
    let eval = corpus("e", 20);
    let stub = Stub::new();
    let first = generate_corpus(&eval[..12], &[], &template(), &job("m", 0), &stub, &quick(), &[], &|_| {}).unwrap();
    let stub2 = Stub::new();
    let all = generate_corpus(&eval, &[], &template(), &job("m", 0), &stub2, &quick(), &first, &|_| {}).unwrap();
    assert_eq!(stub2.calls.load(Ordering::SeqCst), 8);
    assert_eq!(all.len(), 20);
    assert_eq!(&all[..12], &first[..]);
}

#[test]
fn transient_failures_are_retried() {
    let eval = corpus("e", 3);
    let stub = Stub {
        transient_first: 2,
        ..Stub::new()
    };
    let opts = GenerationOptions {
        parallelism: 1,
        ..quick()
    };
    let out = generate_corpus(&eval, &[], &template(), &job("m", 0), &stub, &opts, &[], &|_| {}).unwrap();
    assert_eq!(out[0].attempts, 3);
    assert_eq!(out[1].attempts, 1);
}

#[test]
fn permanent_failure_aborts_with_completed_records() {
    let eval = corpus("e", 10);
    let stub = Stub {
        permanent_on: Some("summary 6".into()),
        ..Stub::new()
    };
    let opts = GenerationOptions {
        parallelism: 1,
        ..quick()
    };
    let err = generate_corpus(&eval, &[], &template(), &job("m", 0), &stub, &opts, &[], &|_| {}).unwrap_err();
    match err {
        GenerationError::Aborted {
            failed_id,
            completed,
            reason,
        } => {
            assert_eq!(failed_id, "e006");
            assert_eq!(completed.len(), 6);
            assert_eq!(reason, BackendError::Permanent("forbidden".into()));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn empty_output_is_flagged() {
    let eval = corpus("e", 4);
    let stub = Stub {
        empty_on: Some("summary 2".into()),
        ..Stub::new()
    };
    let out = generate_corpus(&eval, &[], &template(), &job("m", 0), &stub, &quick(), &[], &|_| {}).unwrap();
    assert!(out[2].empty_output && !out[2].usable());
    assert_eq!(out.iter().filter(|r| r.usable()).count(), 3);
}

#[test]
fn pool_overlap_rejected() {
    let eval = corpus("e", 4);
    let stub = Stub::new();
    let err = generate_corpus(&eval, &eval[..1], &template(), &job("m", 1), &stub, &quick(), &[], &|_| {});
    assert!(matches!(err, Err(GenerationError::PoolOverlap(id)) if id == "e000"));
}

#[test]
fn callback_sees_every_new_record() {
    let eval = corpus("e", 9);
    let stub = Stub::new();
    let seen = Mutex::new(Vec::new());
    generate_corpus(&eval, &[], &template(), &job("m", 0), &stub, &quick(), &[], &|r| {
        seen.lock().unwrap().push(r.doc_id.clone())
    })
    .unwrap();
    let mut seen = seen.into_inner().unwrap();
    seen.sort();
    assert_eq!(seen.len(), 9);
}

#[test]
fn selections_differ_across_targets() {
    let pool: Vec<String> = (0..200).map(|i| format!("p{i}")).collect();
    let picks: HashSet<Vec<String>> = (0..100)
        .map(|i| select_fewshots(&pool, &format!("t{i}"), 3, 5).unwrap())
        .collect();
    assert!(picks.len() >= 99);
}

#[test]
fn request_serializes_to_chat_completions_shape() {
    let req = ChatRequest {
        model: "m".into(),
        messages: vec![ChatMessage::new("user", "hi")],
        temperature: 1.0,
        top_p: 1.0,
        max_tokens: 1024,
    };
    let v: serde_json::Value = serde_json::to_value(&req).unwrap();
    assert_eq!(v["messages"][0]["role"], "user");
    assert_eq!(v["max_tokens"], 1024);
    let resp: ChatResponse =
        serde_json::from_str(r#"{"choices":[{"message":{"role":"assistant","content":"ok"}}]}"#).unwrap();
    assert_eq!(resp.text(), Some("ok"));
}
