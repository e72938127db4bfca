mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grievlex::scorer::{write_score_csv, ScoreTable};
use tempfile::TempDir;

use common::*;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn grievlex(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grievlex"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GRIEVLEX_LEXICON")
        .output()
        .expect("spawn grievlex")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn save(dir: &Path, name: &str, table: &ScoreTable) -> String {
    let path = dir.join(name);
    write_score_csv(table, &path, &[]).unwrap();
    path.to_string_lossy().into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn score_writes_one_row_per_document() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "score",
            "--corpus",
            s(&fixture("score/corpus.jsonl")),
            "--lexicon",
            s(&fixture("score/lexicon.tsv")),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&dir.path().join("scores.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("d1,15,"));
    let counts = data_rows(&dir.path().join("scores_counts.csv"));
    assert_eq!(counts[0], "d1,15,3,0,0");
    assert_eq!(counts[3], "d4,11,0,2,3");
    let text = fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    assert!(text.starts_with("# grievlex "));
}

#[test]
fn missing_lexicon_is_an_error() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "score",
            "--corpus",
            s(&fixture("score/corpus.jsonl")),
            "--lexicon",
            "/nonexistent/lexicon.tsv",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("lexicon.tsv"));
}

#[test]
fn weighted_scores_with_threshold_warn() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "--threshold",
            "7",
            "score",
            "--mode",
            "weighted",
            "--corpus",
            s(&fixture("score/corpus.jsonl")),
            "--lexicon",
            s(&fixture("score/lexicon.tsv")),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).to_lowercase().contains("warning"));
}

#[test]
fn alpha_requires_a_corpus() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &["alpha", "--lexicon", s(&fixture("score/lexicon.tsv"))],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alpha_reports_each_category() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "alpha",
            "--corpus",
            s(&fixture("score/corpus.jsonl")),
            "--lexicon",
            s(&fixture("score/lexicon.tsv")),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&dir.path().join("alpha.csv"));
    let cats: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(cats, ["hate", "violence", "desperation"]);
}

#[test]
fn paired_compare_rejects_mismatched_ids() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(1);
    let a = save(
        dir.path(),
        "a.csv",
        &synthetic_table(&mut r, "x", 10, 2, 0.0),
    );
    let b = save(
        dir.path(),
        "b.csv",
        &synthetic_table(&mut r, "y", 10, 2, 0.0),
    );
    let out = grievlex(
        dir.path(),
        &["compare", "--target", &a, "--control", &b, "--paired"],
    );
    assert!(!out.status.success());

    let c = save(
        dir.path(),
        "c.csv",
        &synthetic_table(&mut r, "x", 10, 2, 0.01),
    );
    let out = grievlex(
        dir.path(),
        &["compare", "--target", &a, "--control", &c, "--paired"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(data_rows(&dir.path().join("comparison.csv")).len(), 2);
}

#[test]
fn compare_is_reproducible_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(2);
    let t = save(
        dir.path(),
        "t.csv",
        &synthetic_table(&mut r, "t", 30, 3, 0.005),
    );
    let c = save(
        dir.path(),
        "c.csv",
        &synthetic_table(&mut r, "c", 90, 3, 0.0),
    );
    let run = |sub: &str, seed: &str| {
        let out_dir = dir.path().join(sub);
        fs::create_dir_all(&out_dir).unwrap();
        let out = grievlex(
            &out_dir,
            &[
                "--seed",
                seed,
                "--iterations",
                "20",
                "compare",
                "--target",
                &t,
                "--control",
                &c,
            ],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read(out_dir.join("comparison.csv")).unwrap()
    };
    assert_eq!(run("one", "7"), run("two", "7"));
    assert_ne!(run("one", "7"), run("three", "8"));
}

#[test]
fn classify_separates_shifted_groups() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(3);
    let t = save(
        dir.path(),
        "t.csv",
        &synthetic_table(&mut r, "t", 60, 3, 0.2),
    );
    let c = save(
        dir.path(),
        "c.csv",
        &synthetic_table(&mut r, "c", 60, 3, 0.0),
    );
    let out = grievlex(
        dir.path(),
        &[
            "--iterations",
            "10",
            "classify",
            "--target",
            &t,
            "--control",
            &c,
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&dir.path().join("metrics.csv"));
    let accuracy: f64 = rows[0].split(',').nth(2).unwrap().parse().unwrap();
    assert!(accuracy > 0.99, "{accuracy}");
    assert_eq!(data_rows(&dir.path().join("importance.csv")).len(), 3);
}

#[test]
fn cross_sample_needs_matching_columns() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(4);
    let t = save(
        dir.path(),
        "t.csv",
        &synthetic_table(&mut r, "t", 20, 3, 0.1),
    );
    let c = save(
        dir.path(),
        "c.csv",
        &synthetic_table(&mut r, "c", 20, 3, 0.0),
    );
    let tt = save(
        dir.path(),
        "tt.csv",
        &synthetic_table(&mut r, "u", 20, 2, 0.1),
    );
    let tc = save(
        dir.path(),
        "tc.csv",
        &synthetic_table(&mut r, "v", 20, 2, 0.0),
    );
    let out = grievlex(
        dir.path(),
        &[
            "--iterations",
            "5",
            "classify",
            "--target",
            &t,
            "--control",
            &c,
            "--test-target",
            &tt,
            "--test-control",
            &tc,
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn build_writes_three_lexicons_and_a_report() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "build",
            "--seeds",
            s(&fixture("build/seeds.tsv")),
            "--synonyms",
            s(&fixture("build/synonyms.tsv")),
            "--embeddings",
            s(&fixture("build/embeddings.txt")),
            "--ratings",
            s(&fixture("build/ratings.csv")),
            "--neighbours",
            "2",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "candidates.tsv",
        "lexicon_weighted.tsv",
        "lexicon_threshold7.tsv",
        "lexicon_threshold5.tsv",
    ] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("build_report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["final_stems"], 5);
}

#[test]
fn build_without_ratings_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = grievlex(
        dir.path(),
        &[
            "build",
            "--seeds",
            s(&fixture("build/seeds.tsv")),
            "--synonyms",
            s(&fixture("build/synonyms.tsv")),
            "--embeddings",
            s(&fixture("build/embeddings.txt")),
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chunk_emits_full_windows() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let words: Vec<String> = (0..437).map(|i| format!("w{i}")).collect();
    fs::write(
        &corpus,
        serde_json::json!({"id": "long", "text": words.join(" ")}).to_string() + "\n",
    )
    .unwrap();
    let out = grievlex(dir.path(), &["chunk", "--corpus", s(&corpus)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lines: Vec<serde_json::Value> = fs::read_to_string(dir.path().join("chunks.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["id"], "long#3");

    let out = grievlex(
        dir.path(),
        &["--chunk-size", "0", "chunk", "--corpus", s(&corpus)],
    );
    assert_eq!(out.status.code(), Some(2));
}
