//! Tokenization, stemming, chunking, and corpus loading.

mod porter;

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use porter::stem;

/// Default excerpt length in tokens.
pub const DEFAULT_CHUNK_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub raw: String,
    pub tokens: Vec<String>,
    pub label: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, raw: impl Into<String>, label: Option<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Document {
            id: id.into(),
            raw,
            tokens,
            label,
        }
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub name: String,
    pub docs: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate document ids.
    pub fn new(name: impl Into<String>, docs: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(docs.len());
        for doc in &docs {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate document id {:?}",
                    doc.id
                )));
            }
        }
        Ok(Corpus {
            name: name.into(),
            docs,
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits text into lowercase tokens.
///
/// Letters and digits form tokens. Hyphens and apostrophes are kept only when
/// they sit between two word characters, so `ak-47` and `it's` stay whole.
/// The typographic apostrophe is folded to `'`.
pub fn tokenize(raw: &str) -> Vec<String> {
    let chars: Vec<char> = raw.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if is_word_char(c) {
            current.extend(c.to_lowercase());
        } else if is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|&n| is_word_char(n))
        {
            current.push(if c == '-' { '-' } else { '\'' });
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Maps a word or phrase onto lexicon key space: tokenize, stem each token,
/// join with single spaces. Returns `None` when no tokens remain.
pub fn normalize_key(text: &str) -> Option<String> {
    let stems: Vec<String> = tokenize(text).iter().map(|t| stem(t)).collect();
    if stems.is_empty() {
        None
    } else {
        Some(stems.join(" "))
    }
}

/// Cuts a document into consecutive non-overlapping windows of `size`
/// tokens. The trailing remainder is dropped.
pub fn chunk(doc: &Document, size: usize) -> Result<Vec<Document>> {
    if size == 0 {
        return Err(Error::Argument("chunk size must be at least 1".into()));
    }
    Ok(doc
        .tokens
        .chunks_exact(size)
        .enumerate()
        .map(|(index, window)| {
            let tokens = window.to_vec();
            Document {
                id: format!("{}#{}", doc.id, index),
                raw: tokens.join(" "),
                tokens,
                label: doc.label.clone(),
            }
        })
        .collect())
}

pub fn chunk_corpus(corpus: &Corpus, size: usize) -> Result<Corpus> {
    let mut docs = Vec::new();
    for doc in &corpus.docs {
        docs.extend(chunk(doc, size)?);
    }
    Corpus::new(corpus.name.clone(), docs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    TxtDir,
}

impl CorpusFormat {
    /// Directories load as `txt-dir`, everything else as JSONL.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            CorpusFormat::TxtDir
        } else {
            CorpusFormat::Jsonl
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusRow {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    let docs = match format {
        CorpusFormat::Jsonl => read_jsonl(path)?,
        CorpusFormat::TxtDir => read_txt_dir(path)?,
    };
    Corpus::new(name, docs)
}

fn read_jsonl(path: &Path) -> Result<Vec<Document>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: CorpusRow =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        docs.push(Document::new(row.id, row.text, row.label));
    }
    Ok(docs)
}

/// Reads every `*.txt` file in a directory, sorted by file name; ids are the
/// file stems.
fn read_txt_dir(path: &Path) -> Result<Vec<Document>> {
    let mut files: Vec<_> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|file| {
            let raw = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let id = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Document::new(id, raw, None))
        })
        .collect()
}
