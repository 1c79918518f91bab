//! Document model and corpus readers.
//!
//! Tagged corpora arrive as CoNLL-U, one `# newdoc id = ...` block per
//! document. Document-level comments of the form `# meta.<key> = <value>`
//! carry the situational metadata used by prompt templates; `# register`,
//! `# source` and `# shots` carry provenance. Untagged texts (human or
//! generated, before they go through an external tagger) travel as JSONL.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected 10 tab-separated fields, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("line {line}: missing `{field}` field")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: invalid JSON: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot assemble an empty corpus")]
    EmptyCorpus,
    #[error("documents do not belong to register `{register}`: {offenders:?}")]
    MixedRegisters {
        register: String,
        offenders: Vec<String>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Who produced a text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Human,
    Model(String),
}

impl Source {
    pub fn parse(label: &str) -> Self {
        match label.trim() {
            "" | "human" => Source::Human,
            other => Source::Model(other.to_string()),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Source::Human => "human",
            Source::Model(name) => name,
        }
    }
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: Option<String>,
    /// 1-based index of the syntactic head within the sentence, 0 for root.
    pub head: usize,
    pub deprel: String,
    pub feats: Option<String>,
    pub misc: Option<String>,
    pub is_punct: bool,
    pub is_space: bool,
}

impl TaggedToken {
    /// Builds a token and derives the punctuation/space flags from its tags.
    pub fn new(
        surface: impl Into<String>,
        lemma: impl Into<String>,
        upos: impl Into<String>,
        xpos: Option<&str>,
        head: usize,
        deprel: impl Into<String>,
    ) -> Self {
        let mut token = TaggedToken {
            surface: surface.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            xpos: xpos.map(str::to_string),
            head,
            deprel: deprel.into(),
            feats: None,
            misc: None,
            is_punct: false,
            is_space: false,
        };
        token.refresh_flags();
        token
    }

    fn refresh_flags(&mut self) {
        self.is_space = self.upos == "SPACE"
            || self.xpos.as_deref() == Some("_SP")
            || (!self.surface.is_empty() && self.surface.chars().all(char::is_whitespace));
        self.is_punct = !self.is_space && (self.upos == "PUNCT" || self.deprel == "punct");
    }

    /// Neither punctuation nor whitespace.
    pub fn is_lexical(&self) -> bool {
        !self.is_punct && !self.is_space
    }

    pub fn xpos(&self) -> &str {
        self.xpos.as_deref().unwrap_or("")
    }

    fn space_after(&self) -> bool {
        !self
            .misc
            .as_deref()
            .map(|m| m.split('|').any(|f| f == "SpaceAfter=No"))
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: Option<String>,
    pub tokens: Vec<TaggedToken>,
}

impl Sentence {
    pub fn new(tokens: Vec<TaggedToken>) -> Self {
        Sentence { text: None, tokens }
    }

    pub fn lexical_len(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_lexical()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedDocument {
    pub doc_id: String,
    pub register: String,
    pub sentences: Vec<Sentence>,
    pub metadata: BTreeMap<String, String>,
    pub source: Source,
    pub shots: u32,
}

impl TaggedDocument {
    pub fn new(doc_id: impl Into<String>, register: impl Into<String>) -> Self {
        TaggedDocument {
            doc_id: doc_id.into(),
            register: register.into(),
            sentences: Vec::new(),
            metadata: BTreeMap::new(),
            source: Source::Human,
            shots: 0,
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TaggedToken> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Reassembles surface text, honouring `SpaceAfter=No`.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            for token in &sentence.tokens {
                out.push_str(&token.surface);
                if token.space_after() {
                    out.push(' ');
                }
            }
        }
        out.trim_end().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub register: String,
    pub documents: Vec<TaggedDocument>,
}

impl Corpus {
    pub fn size(&self) -> usize {
        self.documents.len()
    }

    pub fn get(&self, doc_id: &str) -> Option<&TaggedDocument> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

/// Builds a corpus for one register. Documents without a register label
/// adopt `register`; documents labelled with any other register are rejected.
pub fn assemble_corpus(
    documents: Vec<TaggedDocument>,
    register: &str,
) -> Result<Corpus, IngestError> {
    if documents.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }
    let offenders: Vec<String> = documents
        .iter()
        .filter(|d| !d.register.is_empty() && d.register != register)
        .map(|d| d.doc_id.clone())
        .collect();
    if !offenders.is_empty() {
        return Err(IngestError::MixedRegisters {
            register: register.to_string(),
            offenders,
        });
    }
    let mut seen = HashSet::new();
    for doc in &documents {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(IngestError::DuplicateDocId(doc.doc_id.clone()));
        }
    }
    let documents = documents
        .into_iter()
        .map(|mut d| {
            d.register = register.to_string();
            d
        })
        .collect();
    Ok(Corpus {
        register: register.to_string(),
        documents,
    })
}

fn optional_column(value: &str) -> Option<String> {
    (value != "_").then(|| value.to_string())
}

fn comment_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let rest = comment.strip_prefix(key)?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.trim())
}

struct ConlluReader {
    documents: Vec<TaggedDocument>,
    seen: HashSet<String>,
    current_sentence: Vec<TaggedToken>,
    sentence_text: Option<String>,
    sentence_start: usize,
    auto_ids: usize,
}

impl ConlluReader {
    fn current_doc(&mut self) -> &mut TaggedDocument {
        if self.documents.is_empty() {
            self.auto_ids += 1;
            self.documents
                .push(TaggedDocument::new(format!("_auto{}", self.auto_ids), ""));
        }
        self.documents.last_mut().expect("document present")
    }

    fn flush_sentence(&mut self) -> Result<(), IngestError> {
        if self.current_sentence.is_empty() {
            self.sentence_text = None;
            return Ok(());
        }
        let tokens = std::mem::take(&mut self.current_sentence);
        let len = tokens.len();
        if let Some(bad) = tokens.iter().position(|t| t.head > len) {
            return Err(IngestError::Malformed {
                line: self.sentence_start + bad,
                message: format!("head {} outside sentence of {len} tokens", tokens[bad].head),
            });
        }
        let text = self.sentence_text.take();
        self.current_doc().sentences.push(Sentence { text, tokens });
        Ok(())
    }

    fn start_document(&mut self, id: &str, line: usize) -> Result<(), IngestError> {
        self.flush_sentence()?;
        if id.is_empty() {
            return Err(IngestError::Malformed {
                line,
                message: "empty document id".into(),
            });
        }
        if !self.seen.insert(id.to_string()) {
            return Err(IngestError::DuplicateDocId(id.to_string()));
        }
        self.documents.push(TaggedDocument::new(id, ""));
        Ok(())
    }

    fn comment(&mut self, body: &str, line: usize) -> Result<(), IngestError> {
        let body = body.trim();
        if let Some(id) = comment_value(body, "newdoc id") {
            return self.start_document(id, line);
        }
        if let Some(text) = comment_value(body, "text") {
            self.sentence_text = Some(text.to_string());
        } else if let Some(rest) = body.strip_prefix("meta.") {
            if let Some((key, value)) = rest.split_once('=') {
                self.current_doc()
                    .metadata
                    .insert(key.trim().to_string(), value.trim().to_string());
            }
        } else if let Some(register) = comment_value(body, "register") {
            self.current_doc().register = register.to_string();
        } else if let Some(source) = comment_value(body, "source") {
            self.current_doc().source = Source::parse(source);
        } else if let Some(shots) = comment_value(body, "shots") {
            let shots = shots.parse().map_err(|_| IngestError::Malformed {
                line,
                message: format!("invalid shot count `{shots}`"),
            })?;
            self.current_doc().shots = shots;
        }
        Ok(())
    }

    fn token(&mut self, text: &str, line: usize) -> Result<(), IngestError> {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 10 {
            return Err(IngestError::ColumnCount {
                line,
                found: fields.len(),
            });
        }
        // Multiword ranges (1-2) and empty nodes (1.1) carry no syntactic word.
        if fields[0].contains('-') || fields[0].contains('.') {
            return Ok(());
        }
        let id: usize = fields[0].parse().map_err(|_| IngestError::Malformed {
            line,
            message: format!("invalid token id `{}`", fields[0]),
        })?;
        if self.current_sentence.is_empty() {
            self.sentence_start = line;
        }
        if id != self.current_sentence.len() + 1 {
            return Err(IngestError::Malformed {
                line,
                message: format!(
                    "token id {id} out of sequence (expected {})",
                    self.current_sentence.len() + 1
                ),
            });
        }
        let head = match fields[6] {
            "_" => 0,
            h => h.parse().map_err(|_| IngestError::Malformed {
                line,
                message: format!("invalid head `{h}`"),
            })?,
        };
        let mut token = TaggedToken {
            surface: fields[1].to_string(),
            lemma: fields[2].to_string(),
            upos: fields[3].to_string(),
            xpos: optional_column(fields[4]),
            head,
            deprel: fields[7].to_string(),
            feats: optional_column(fields[5]),
            misc: optional_column(fields[9]),
            is_punct: false,
            is_space: false,
        };
        token.refresh_flags();
        self.current_sentence.push(token);
        Ok(())
    }
}

/// Parses CoNLL-U into documents, preserving input order.
pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<TaggedDocument>, IngestError> {
    let mut reader = ConlluReader {
        documents: Vec::new(),
        seen: HashSet::new(),
        current_sentence: Vec::new(),
        sentence_text: None,
        sentence_start: 0,
        auto_ids: 0,
    };
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            reader.flush_sentence()?;
        } else if let Some(body) = line.strip_prefix('#') {
            reader.comment(body, line_no)?;
        } else {
            reader.token(line, line_no)?;
        }
    }
    reader.flush_sentence()?;
    Ok(reader.documents)
}

pub fn parse_conllu_str(input: &str) -> Result<Vec<TaggedDocument>, IngestError> {
    parse_conllu(input.as_bytes())
}

/// Writes documents back to CoNLL-U. `parse_conllu` of the output yields
/// the same documents.
pub fn write_conllu(documents: &[TaggedDocument]) -> String {
    let mut out = String::new();
    for doc in documents {
        let _ = writeln!(out, "# newdoc id = {}", doc.doc_id);
        if !doc.register.is_empty() {
            let _ = writeln!(out, "# register = {}", doc.register);
        }
        if doc.source != Source::Human {
            let _ = writeln!(out, "# source = {}", doc.source.label());
        }
        if doc.shots > 0 {
            let _ = writeln!(out, "# shots = {}", doc.shots);
        }
        for (key, value) in &doc.metadata {
            let _ = writeln!(out, "# meta.{key} = {value}");
        }
        for sentence in &doc.sentences {
            if let Some(text) = &sentence.text {
                let _ = writeln!(out, "# text = {text}");
            }
            for (i, t) in sentence.tokens.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t{}",
                    i + 1,
                    t.surface,
                    t.lemma,
                    t.upos,
                    t.xpos.as_deref().unwrap_or("_"),
                    t.feats.as_deref().unwrap_or("_"),
                    t.head,
                    t.deprel,
                    t.misc.as_deref().unwrap_or("_"),
                );
            }
            out.push('\n');
        }
    }
    out
}

/// An untagged text with its metadata, as read from JSONL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub register: String,
    pub text: String,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JsonlLoad {
    pub records: Vec<RawRecord>,
    pub blank_lines: usize,
}

/// Flattens nested JSON objects into dot-joined keys. Non-string scalars
/// keep their JSON spelling.
pub fn flatten_metadata(value: &serde_json::Value) -> BTreeMap<String, String> {
    fn walk(prefix: &str, value: &serde_json::Value, out: &mut BTreeMap<String, String>) {
        match value {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::String(s) => {
                out.insert(prefix.to_string(), s.clone());
            }
            serde_json::Value::Null => {
                out.insert(prefix.to_string(), String::new());
            }
            other => {
                out.insert(prefix.to_string(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk("", value, &mut out);
    out
}

/// Reads `{"id", "text", "meta"}` records. Blank lines are counted and
/// skipped; anything else that is not a valid record is an error.
pub fn load_corpus_jsonl<R: BufRead>(input: R, register: &str) -> Result<JsonlLoad, IngestError> {
    let mut load = JsonlLoad::default();
    let mut seen = HashSet::new();
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            load.blank_lines += 1;
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|source| IngestError::Json {
                line: line_no,
                source,
            })?;
        let text = value
            .get("text")
            .and_then(|v| v.as_str())
            .ok_or(IngestError::MissingField {
                line: line_no,
                field: "text",
            })?;
        let id = match value.get("id") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => {
                return Err(IngestError::MissingField {
                    line: line_no,
                    field: "id",
                })
            }
        };
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateDocId(id));
        }
        let metadata = value
            .get("meta")
            .map(flatten_metadata)
            .unwrap_or_default();
        load.records.push(RawRecord {
            id,
            register: register.to_string(),
            text: text.to_string(),
            metadata,
        });
    }
    if load.blank_lines > 0 {
        log::warn!("skipped {} blank line(s)", load.blank_lines);
    }
    Ok(load)
}
