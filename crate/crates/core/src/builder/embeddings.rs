//! Word vectors in the common text layout: one word per line followed by its
//! components, optionally preceded by a `<count> <dim>` header line.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    words: Vec<String>,
    index: HashMap<String, usize>,
    /// Unit vectors; `None` for zero-norm rows, which never take part in
    /// similarity queries.
    unit: Vec<Option<Vec<f64>>>,
    dim: usize,
}

impl EmbeddingTable {
    pub fn new(entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let dim = entries.first().map_or(0, |e| e.1.len());
        if dim == 0 {
            return Err(Error::Argument("embedding table is empty".into()));
        }
        let mut words = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        let mut unit = Vec::with_capacity(entries.len());
        for (word, v) in entries {
            if v.len() != dim {
                return Err(Error::Validation(format!(
                    "vector for {word:?} has {} components, expected {dim}",
                    v.len()
                )));
            }
            if index.insert(word.clone(), words.len()).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate embedding word {word:?}"
                )));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            unit.push(
                (norm > 0.0 && norm.is_finite()).then(|| v.iter().map(|x| x / norm).collect()),
            );
            words.push(word);
        }
        Ok(EmbeddingTable {
            words,
            index,
            unit,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vocabulary row for a seed: exact match first, then with spaces
    /// replaced by underscores (the usual phrase spelling in vector files).
    pub fn lookup(&self, seed: &str) -> Option<usize> {
        self.index
            .get(seed)
            .or_else(|| self.index.get(&seed.replace(' ', "_")))
            .copied()
    }

    /// The `k` most cosine-similar vocabulary words to row `query`, excluding
    /// the query itself. Equal similarities are ordered by word.
    pub fn nearest(&self, query: usize, k: usize) -> Vec<(&str, f64)> {
        let Some(q) = &self.unit[query] else {
            return Vec::new();
        };
        let mut scored: Vec<(&str, f64)> = self
            .unit
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != query)
            .filter_map(|(i, u)| {
                let u = u.as_ref()?;
                Some((
                    self.words[i].as_str(),
                    q.iter().zip(u).map(|(a, b)| a * b).sum::<f64>(),
                ))
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        scored.truncate(k);
        scored
    }

    pub fn has_unit_vector(&self, row: usize) -> bool {
        self.unit[row].is_some()
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text, path)
}

pub fn parse_embeddings(text: &str, origin: &Path) -> Result<EmbeddingTable> {
    let mut lines = text.lines().enumerate().peekable();
    let mut declared: Option<(usize, usize)> = None;
    if let Some((_, first)) = lines.peek() {
        let parts: Vec<&str> = first.split_whitespace().collect();
        if parts.len() == 2 {
            if let (Ok(count), Ok(dim)) = (parts[0].parse::<usize>(), parts[1].parse::<usize>()) {
                declared = Some((count, dim));
                lines.next();
            }
        }
    }
    let parsed: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    let entries = parsed
        .par_iter()
        .map(|&(i, line)| {
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-blank line");
            let v = parts
                .map(|p| p.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::parse(origin, i + 1, "non-numeric vector component"))?;
            if v.is_empty() {
                return Err(Error::parse(origin, i + 1, "word without a vector"));
            }
            Ok((word.to_string(), v))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = declared
        .map(|d| d.1)
        .or_else(|| entries.first().map(|e| e.1.len()));
    if let Some(dim) = dim {
        if let Some(pos) = entries.iter().position(|e| e.1.len() != dim) {
            return Err(Error::parse(
                origin,
                parsed[pos].0 + 1,
                format!("expected {dim} components"),
            ));
        }
    }
    if let Some((count, _)) = declared {
        if count != entries.len() {
            return Err(Error::Validation(format!(
                "{}: header declares {count} words, found {}",
                origin.display(),
                entries.len()
            )));
        }
    }
    EmbeddingTable::new(entries)
}
