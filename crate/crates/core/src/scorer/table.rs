//! Score table CSV: `doc_id,token_count,<category>...` with six-decimal
//! scores. Leading `#` lines carry provenance and are skipped on read; a
//! `#mode<TAB>weighted` line records the scoring mode.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{ScoreMode, ScoreProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub mode: ScoreMode,
    pub categories: Vec<String>,
    pub profiles: Vec<ScoreProfile>,
}

impl ScoreTable {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.profiles.iter().map(|p| p.scores[j]).collect()
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        self.profiles.iter().map(|p| p.doc_id.as_str()).collect()
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::parse(path, line, e.to_string())
}

fn write_table<F>(table: &ScoreTable, path: &Path, preamble: &[String], cell: F) -> Result<()>
where
    F: Fn(&ScoreProfile, usize) -> String,
{
    let mut buf = Vec::new();
    for line in preamble {
        writeln!(buf, "# {line}").expect("vec write");
    }
    writeln!(buf, "#mode\t{}", table.mode).expect("vec write");
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec!["doc_id".to_string(), "token_count".to_string()];
        header.extend(table.categories.iter().cloned());
        w.write_record(&header).map_err(|e| csv_error(path, e))?;
        for p in &table.profiles {
            let mut row = vec![p.doc_id.clone(), p.token_count.to_string()];
            row.extend((0..table.categories.len()).map(|j| cell(p, j)));
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn write_score_csv(table: &ScoreTable, path: &Path, preamble: &[String]) -> Result<()> {
    write_table(table, path, preamble, |p, j| format!("{:.6}", p.scores[j]))
}

/// Writes the match-count companion of a score table.
pub fn write_counts_csv(table: &ScoreTable, path: &Path, preamble: &[String]) -> Result<()> {
    if table
        .profiles
        .iter()
        .any(|p| p.match_counts.len() != table.categories.len())
    {
        return Err(Error::Argument(
            "score table carries no match counts".into(),
        ));
    }
    write_table(table, path, preamble, |p, j| p.match_counts[j].to_string())
}

/// `scores.csv` -> `scores_counts.csv`
pub fn counts_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_counts.csv"))
}

struct RawTable {
    mode: ScoreMode,
    categories: Vec<String>,
    rows: Vec<(String, usize, Vec<String>)>,
}

fn read_raw(path: &Path) -> Result<RawTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut mode = ScoreMode::Proportional;
    let mut skipped = 0usize;
    let mut offset = 0usize;
    for line in text.split_inclusive('\n') {
        if !line.starts_with('#') {
            break;
        }
        if let Some(value) = line.trim_end().strip_prefix("#mode\t") {
            mode = value.parse()?;
        }
        skipped += 1;
        offset += line.len();
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(&text.as_bytes()[offset..]);
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 || &header[0] != "doc_id" || &header[1] != "token_count" {
        return Err(Error::parse(
            path,
            skipped + 1,
            "expected header doc_id,token_count,...",
        ));
    }
    let categories: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (idx, record) in reader.records().enumerate() {
        let lineno = skipped + idx + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != header.len() {
            return Err(Error::parse(path, lineno, "wrong column count"));
        }
        let doc_id = record[0].to_string();
        if !seen.insert(doc_id.clone()) {
            return Err(Error::Validation(format!(
                "duplicate doc id {doc_id:?} in {}",
                path.display()
            )));
        }
        let token_count: usize = record[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad token_count"))?;
        rows.push((
            doc_id,
            token_count,
            record.iter().skip(2).map(str::to_string).collect(),
        ));
    }
    Ok(RawTable {
        mode,
        categories,
        rows,
    })
}

/// Reads a score table; picks up `<stem>_counts.csv` next to it when present.
pub fn read_score_csv(path: &Path) -> Result<ScoreTable> {
    let raw = read_raw(path)?;
    let mut profiles = Vec::with_capacity(raw.rows.len());
    for (i, (doc_id, token_count, cells)) in raw.rows.into_iter().enumerate() {
        let scores = cells
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, i + 2, format!("bad score {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        profiles.push(ScoreProfile {
            doc_id,
            mode: raw.mode,
            token_count,
            scores,
            match_counts: Vec::new(),
        });
    }

    let companion = counts_path(path);
    if companion.is_file() {
        let counts = read_raw(&companion)?;
        if counts.categories != raw.categories || counts.rows.len() != profiles.len() {
            return Err(Error::Validation(format!(
                "{} does not match {}",
                companion.display(),
                path.display()
            )));
        }
        for (p, (doc_id, _, cells)) in profiles.iter_mut().zip(counts.rows) {
            if doc_id != p.doc_id {
                return Err(Error::Validation(format!(
                    "count row {doc_id:?} out of order"
                )));
            }
            p.match_counts = cells
                .iter()
                .map(|c| {
                    c.parse::<u64>()
                        .map_err(|_| Error::Validation(format!("bad count {c:?}")))
                })
                .collect::<Result<_>>()?;
        }
    }

    Ok(ScoreTable {
        mode: raw.mode,
        categories: raw.categories,
        profiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ScoreTable {
        ScoreTable {
            mode: ScoreMode::Weighted,
            categories: vec!["hate".into(), "god".into()],
            profiles: vec![
                ScoreProfile {
                    doc_id: "a,1".into(),
                    mode: ScoreMode::Weighted,
                    token_count: 10,
                    scores: vec![7.5, 0.0],
                    match_counts: vec![2, 0],
                },
                ScoreProfile {
                    doc_id: "b".into(),
                    mode: ScoreMode::Weighted,
                    token_count: 3,
                    scores: vec![0.0, 9.25],
                    match_counts: vec![0, 1],
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip_with_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let t = table();
        write_score_csv(&t, &path, &["grievlex test".into()]).unwrap();
        write_counts_csv(&t, &counts_path(&path), &[]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# grievlex test\n#mode\tweighted\ndoc_id,token_count,hate,god\n"));
        assert!(text.contains("\"a,1\",10,7.500000,0.000000\n"));
        assert_eq!(read_score_csv(&path).unwrap(), t);
    }

    #[test]
    fn rejects_bad_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "doc_id,token_count,hate\na,3,x\n").unwrap();
        assert!(matches!(read_score_csv(&path), Err(Error::Parse { .. })));
        fs::write(&path, "id,hate\na,3\n").unwrap();
        assert!(matches!(read_score_csv(&path), Err(Error::Parse { .. })));
        fs::write(&path, "doc_id,token_count,hate\na,3,0.1\na,3,0.2\n").unwrap();
        assert!(matches!(read_score_csv(&path), Err(Error::Validation(_))));
    }
}
