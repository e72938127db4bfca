//! Readers for the builder's plain-text inputs.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Seed words of one category, lowercased, duplicates removed, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedList {
    pub category: String,
    pub words: Vec<String>,
}

fn clean_word(w: &str) -> String {
    w.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// `category<TAB>word` lines; `#` lines and blank lines are skipped.
/// Categories keep their order of first appearance.
pub fn load_seeds(path: &Path) -> Result<Vec<SeedList>> {
    parse_seeds(&read(path)?, path)
}

pub fn parse_seeds(text: &str, origin: &Path) -> Result<Vec<SeedList>> {
    let mut lists: Vec<SeedList> = Vec::new();
    for (lineno, line) in content_lines(text) {
        let Some((category, word)) = line.split_once('\t') else {
            return Err(Error::parse(origin, lineno, "expected category<TAB>word"));
        };
        let (category, word) = (category.trim(), clean_word(word));
        if category.is_empty() || word.is_empty() || word.contains('\t') {
            return Err(Error::parse(origin, lineno, "empty category or word"));
        }
        let list = match lists.iter_mut().position(|l| l.category == category) {
            Some(i) => &mut lists[i],
            None => {
                lists.push(SeedList {
                    category: category.to_string(),
                    words: Vec::new(),
                });
                lists.last_mut().expect("just pushed")
            }
        };
        if !list.words.contains(&word) {
            list.words.push(word);
        }
    }
    if lists.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no seed words",
            origin.display()
        )));
    }
    Ok(lists)
}

/// Word -> related words, from `word<TAB>related1,related2,...` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynonymProvider {
    map: HashMap<String, Vec<String>>,
}

impl SynonymProvider {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut map: HashMap<String, Vec<String>> = HashMap::new();
        for (word, related) in pairs {
            let slot = map.entry(clean_word(word.as_ref())).or_default();
            slot.extend(
                related
                    .iter()
                    .map(|r| clean_word(r.as_ref()))
                    .filter(|r| !r.is_empty()),
            );
        }
        SynonymProvider { map }
    }

    pub fn related(&self, word: &str) -> Option<&[String]> {
        self.map.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

pub fn load_synonyms(path: &Path) -> Result<SynonymProvider> {
    parse_synonyms(&read(path)?, path)
}

pub fn parse_synonyms(text: &str, origin: &Path) -> Result<SynonymProvider> {
    let mut pairs = Vec::new();
    for (lineno, line) in content_lines(text) {
        let (word, related) = line.split_once('\t').unwrap_or((line, ""));
        if word.trim().is_empty() || related.contains('\t') {
            return Err(Error::parse(
                origin,
                lineno,
                "expected word<TAB>related1,related2,...",
            ));
        }
        pairs.push((
            word.to_string(),
            related.split(',').map(str::to_string).collect(),
        ));
    }
    Ok(SynonymProvider::from_pairs(pairs))
}

/// One crowdsourced judgement. `rating` is `None` exactly when the rater
/// marked the word as unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub participant_id: String,
    pub word: String,
    pub category: String,
    pub rating: Option<u8>,
    pub attention_pass: bool,
}

#[derive(Debug, Deserialize)]
struct RatingRow {
    participant_id: String,
    word: String,
    category: String,
    rating: String,
    unknown: String,
    attention_pass: String,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// `participant_id,word,category,rating,unknown,attention_pass`; `rating`
/// is blank when `unknown` is true.
pub fn load_ratings(path: &Path) -> Result<Vec<RatingRecord>> {
    parse_ratings(read(path)?.as_bytes(), path)
}

pub fn parse_ratings(bytes: &[u8], origin: &Path) -> Result<Vec<RatingRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(bytes);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::parse(origin, line, e.to_string())
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut records = Vec::new();
    for raw in reader.records() {
        let raw = raw.map_err(csv_err)?;
        let line = raw.position().map_or(0, |p| p.line() as usize);
        let row: RatingRow = raw
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(origin, line, e.to_string()))?;
        let bad = |msg: String| Error::parse(origin, line, msg);
        let unknown = parse_bool(&row.unknown)
            .ok_or_else(|| bad(format!("bad unknown flag {:?}", row.unknown)))?;
        let attention_pass = parse_bool(&row.attention_pass)
            .ok_or_else(|| bad(format!("bad attention_pass {:?}", row.attention_pass)))?;
        let rating = match (unknown, row.rating.trim()) {
            (true, "") => None,
            (true, r) => return Err(bad(format!("rating {r:?} given for an unknown word"))),
            (false, r) => match r.parse::<u8>() {
                Ok(v) if v <= 10 => Some(v),
                _ => return Err(bad(format!("rating {r:?} is not an integer 0-10"))),
            },
        };
        let word = clean_word(&row.word);
        if word.is_empty() || row.participant_id.trim().is_empty() || row.category.trim().is_empty()
        {
            return Err(bad("empty participant, word or category".into()));
        }
        records.push(RatingRecord {
            participant_id: row.participant_id.trim().to_string(),
            word,
            category: row.category.trim().to_string(),
            rating,
            attention_pass,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t")
    }

    #[test]
    fn seeds_lowercase_and_dedup() {
        let s = parse_seeds(
            "# seeds\nweaponry\tKnife\nweaponry\tknife\nmurder\tkill\n\nweaponry\tGun  Shot\n",
            p(),
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].words, vec!["knife", "gun shot"]);
        assert_eq!(s[1].category, "murder");
        assert!(matches!(
            parse_seeds("a\n", p()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_seeds("# nothing\n", p()).is_err());
    }

    #[test]
    fn synonyms_file() {
        let s = parse_synonyms("knife\tDagger,machete, shiv\nlonely\n", p()).unwrap();
        assert_eq!(s.related("knife").unwrap(), ["dagger", "machete", "shiv"]);
        assert_eq!(s.related("lonely").unwrap().len(), 0);
        assert!(s.related("gun").is_none());
    }

    #[test]
    fn ratings_csv() {
        let text = "participant_id,word,category,rating,unknown,attention_pass\n\
                    p1,Kills,murder,8,false,true\n\
                    p2,kills,murder,,true,TRUE\n";
        let r = parse_ratings(text.as_bytes(), p()).unwrap();
        assert_eq!(r[0].rating, Some(8));
        assert_eq!(r[0].word, "kills");
        assert_eq!(r[1].rating, None);

        let bad =
            "participant_id,word,category,rating,unknown,attention_pass\np1,a,b,11,false,true\n";
        assert!(matches!(
            parse_ratings(bad.as_bytes(), p()),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad =
            "participant_id,word,category,rating,unknown,attention_pass\np1,a,b,5,true,true\n";
        assert!(parse_ratings(bad.as_bytes(), p()).is_err());
    }
}
