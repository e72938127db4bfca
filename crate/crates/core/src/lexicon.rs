//! Rated category wordlists and their TSV file format.
//!
//! A lexicon file looks like this, with tabs between columns:
//!
//! ```text
//! #version_tag  threshold-7
//! #threshold  7
//! #categories  planning,violence,weaponry
//! key  category  mean_rating  n_ratings
//! gun  weaponry  8.250000  12
//! last resort  desperation  7.100000  9
//! ```
//!
//! The `#` directives are optional. Without `#categories` categories follow
//! the order of first appearance. Any other line starting with `#` is ignored.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TSV_HEADER: &str = "key\tcategory\tmean_rating\tn_ratings";

/// Category identifiers of the canonical grievance lexicon, in canonical order.
pub const GRIEVANCE_CATEGORIES: [&str; 22] = [
    "planning",
    "violence",
    "weaponry",
    "help",
    "hate",
    "frustration",
    "suicide",
    "threat",
    "grievance",
    "fixation",
    "desperation",
    "deadline",
    "murder",
    "relationship",
    "loneliness",
    "surveillance",
    "soldier",
    "honour",
    "impostor",
    "jealousy",
    "god",
    "paranoia",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    /// Lowercase stem, or space-separated stems for a phrase.
    pub key: String,
    pub category: String,
    pub mean_rating: f64,
    pub n_ratings: u32,
}

impl LexiconEntry {
    pub fn new(
        key: impl Into<String>,
        category: impl Into<String>,
        mean_rating: f64,
        n_ratings: u32,
    ) -> Self {
        LexiconEntry {
            key: key.into(),
            category: category.into(),
            mean_rating,
            n_ratings,
        }
    }

    pub fn is_phrase(&self) -> bool {
        self.key.contains(' ')
    }

    pub fn token_len(&self) -> usize {
        self.key.split(' ').count()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        validate_key(&self.key)?;
        if !(0.0..=10.0).contains(&self.mean_rating) {
            return Err(format!("rating {} outside [0, 10]", self.mean_rating));
        }
        if self.n_ratings == 0 {
            return Err("n_ratings must be at least 1".into());
        }
        Ok(())
    }
}

fn validate_key(key: &str) -> std::result::Result<(), String> {
    if key.is_empty() {
        return Err("empty key".into());
    }
    if key != key.trim() {
        return Err(format!("key {key:?} has surrounding whitespace"));
    }
    if key.chars().any(char::is_uppercase) {
        return Err(format!("key {key:?} is not lowercase"));
    }
    if key.split(' ').any(str::is_empty) || key.chars().any(|c| c.is_whitespace() && c != ' ') {
        return Err(format!("key {key:?} must separate tokens by single spaces"));
    }
    Ok(())
}

fn validate_category(category: &str) -> Result<()> {
    if category.is_empty()
        || category != category.trim()
        || category.contains(['\t', ',', '\n', '\r'])
    {
        return Err(Error::Validation(format!(
            "invalid category identifier {category:?}"
        )));
    }
    Ok(())
}

/// An immutable, validated lexicon. Entries are kept in canonical order:
/// by category position, then by key.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    categories: Vec<String>,
    pub version_tag: String,
    pub threshold: Option<f64>,
}

impl Lexicon {
    pub fn new(
        categories: Vec<String>,
        mut entries: Vec<LexiconEntry>,
        version_tag: impl Into<String>,
        threshold: Option<f64>,
    ) -> Result<Self> {
        let version_tag = version_tag.into();
        if version_tag.contains(['\t', '\n', '\r']) {
            return Err(Error::Validation(
                "version tag contains control characters".into(),
            ));
        }
        let mut index = HashMap::with_capacity(categories.len());
        for (i, c) in categories.iter().enumerate() {
            validate_category(c)?;
            if index.insert(c.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate category {c:?}")));
            }
        }
        if let Some(theta) = threshold {
            check_threshold(theta)?;
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            e.validate().map_err(Error::Validation)?;
            if !index.contains_key(e.category.as_str()) {
                return Err(Error::Validation(format!(
                    "entry {:?} references unknown category {:?}",
                    e.key, e.category
                )));
            }
            if !seen.insert((e.key.as_str(), e.category.as_str())) {
                return Err(Error::Validation(format!(
                    "duplicate entry ({:?}, {:?})",
                    e.key, e.category
                )));
            }
            if let Some(theta) = threshold {
                if e.mean_rating < theta {
                    return Err(Error::Validation(format!(
                        "entry {:?} rated {} below threshold {theta}",
                        e.key, e.mean_rating
                    )));
                }
            }
        }
        entries.sort_by(|a, b| {
            index[a.category.as_str()]
                .cmp(&index[b.category.as_str()])
                .then_with(|| a.key.cmp(&b.key))
        });
        Ok(Lexicon {
            entries,
            categories,
            version_tag,
            threshold,
        })
    }

    /// Builds a lexicon whose category list is the order of first appearance.
    pub fn from_entries(
        entries: Vec<LexiconEntry>,
        version_tag: impl Into<String>,
    ) -> Result<Self> {
        let mut categories: Vec<String> = Vec::new();
        for e in &entries {
            if !categories.contains(&e.category) {
                categories.push(e.category.clone());
            }
        }
        Lexicon::new(categories, entries, version_tag, None)
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    /// Entries of one category in canonical key order.
    pub fn entries_in<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a LexiconEntry> {
        self.entries.iter().filter(move |e| e.category == category)
    }

    /// Keeps entries rated at or above `theta`. Empty categories are kept
    /// unless `prune_categories` is set.
    pub fn filter_by_threshold(&self, theta: f64, prune_categories: bool) -> Result<Lexicon> {
        check_threshold(theta)?;
        let entries: Vec<LexiconEntry> = self
            .entries
            .iter()
            .filter(|e| e.mean_rating >= theta)
            .cloned()
            .collect();
        let categories = if prune_categories {
            self.categories
                .iter()
                .filter(|c| entries.iter().any(|e| &e.category == *c))
                .cloned()
                .collect()
        } else {
            self.categories.clone()
        };
        let effective = self.threshold.map_or(theta, |t| t.max(theta));
        Lexicon::new(
            categories,
            entries,
            format!("threshold-{effective}"),
            Some(effective),
        )
    }

    pub fn write_tsv<W: Write>(&self, mut w: W, preamble: &[String]) -> io::Result<()> {
        for line in preamble {
            writeln!(w, "# {line}")?;
        }
        if !self.version_tag.is_empty() {
            writeln!(w, "#version_tag\t{}", self.version_tag)?;
        }
        if let Some(theta) = self.threshold {
            writeln!(w, "#threshold\t{theta}")?;
        }
        writeln!(w, "#categories\t{}", self.categories.join(","))?;
        writeln!(w, "{TSV_HEADER}")?;
        for e in &self.entries {
            writeln!(
                w,
                "{}\t{}\t{:.6}\t{}",
                e.key, e.category, e.mean_rating, e.n_ratings
            )?;
        }
        Ok(())
    }
}

fn check_threshold(theta: f64) -> Result<()> {
    if !(0.0..=10.0).contains(&theta) {
        return Err(Error::Argument(format!(
            "threshold {theta} outside [0, 10]"
        )));
    }
    Ok(())
}

pub fn save_lexicon(lex: &Lexicon, path: &Path) -> Result<()> {
    save_lexicon_with_preamble(lex, path, &[])
}

pub fn save_lexicon_with_preamble(lex: &Lexicon, path: &Path, preamble: &[String]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    lex.write_tsv(&mut w, preamble)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_lexicon(BufReader::new(file), path)
}

/// Parses lexicon TSV from any reader; `origin` is used in error messages.
pub fn read_lexicon<R: BufRead>(reader: R, origin: &Path) -> Result<Lexicon> {
    let mut version_tag = String::new();
    let mut threshold = None;
    let mut declared: Option<Vec<String>> = None;
    let mut seen_header = false;
    let mut entries = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if let Some(directive) = line.strip_prefix('#') {
            if seen_header {
                continue;
            }
            if let Some((name, value)) = directive.split_once('\t') {
                match name {
                    "version_tag" => version_tag = value.to_string(),
                    "threshold" => {
                        let theta: f64 = value
                            .parse()
                            .map_err(|_| Error::parse(origin, lineno, "bad threshold"))?;
                        threshold = Some(theta);
                    }
                    "categories" => {
                        declared = Some(
                            value
                                .split(',')
                                .filter(|c| !c.is_empty())
                                .map(str::to_string)
                                .collect(),
                        )
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if line != TSV_HEADER {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("expected header {TSV_HEADER:?}"),
                ));
            }
            seen_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        entries.push(parse_row(line).map_err(|msg| Error::parse(origin, lineno, msg))?);
    }
    if !seen_header {
        return Err(Error::parse(origin, 0, "missing header"));
    }
    match declared {
        Some(categories) => Lexicon::new(categories, entries, version_tag, threshold),
        None => {
            let mut lex = Lexicon::from_entries(entries, version_tag)?;
            if threshold.is_some() {
                lex = Lexicon::new(lex.categories, lex.entries, lex.version_tag, threshold)?;
            }
            Ok(lex)
        }
    }
}

fn parse_row(line: &str) -> std::result::Result<LexiconEntry, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 4 {
        return Err(format!("expected 4 columns, found {}", cols.len()));
    }
    let mean_rating: f64 = cols[2]
        .parse()
        .map_err(|_| format!("bad rating {:?}", cols[2]))?;
    let n_ratings: u32 = cols[3]
        .parse()
        .map_err(|_| format!("bad rating count {:?}", cols[3]))?;
    let entry = LexiconEntry::new(cols[0], cols[1], mean_rating, n_ratings);
    entry.validate()?;
    validate_category(cols[1]).map_err(|e| e.to_string())?;
    Ok(entry)
}
