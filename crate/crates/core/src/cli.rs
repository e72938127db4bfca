//! The `grievlex` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::builder::{self, BuildInputs, DEFAULT_NEIGHBOURS};
use crate::classifier::{
    assemble_features, bootstrap_classify, cross_sample_classify, roc_importance,
    write_importance_csv, write_metrics_csv, ClassScores, ClassificationReport, ClassifyOptions,
    FeatureSet, MetricsRow, DEFAULT_TRAIN_FRACTION,
};
use crate::error::{Error, Result};
use crate::inferstats::{
    bootstrap_compare, paired_compare, write_comparison_csv, BootstrapOptions, DEFAULT_BF_SCALE,
    DEFAULT_ITERATIONS, DEFAULT_SEED,
};
use crate::lexicon::{load_lexicon, save_lexicon_with_preamble, Lexicon};
use crate::psychometrics::{alpha_suite, cross_correlate, write_alpha_csv, write_correlation_csv};
use crate::scorer::{
    counts_path, read_score_csv, write_counts_csv, write_score_csv, ScoreMode, ScoreTable, Scorer,
};
use crate::textprep::{
    chunk_corpus, load_corpus, Corpus, CorpusFormat, CorpusRow, DEFAULT_CHUNK_SIZE,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_THRESHOLD: f64 = 7.0;
pub const LEXICON_ENV: &str = "GRIEVLEX_LEXICON";

#[derive(Debug, Parser)]
#[command(
    name = "grievlex",
    version,
    about = "Lexicon-based text scoring, lexicon building and validation statistics"
)]
pub struct Cli {
    /// Seed for every randomised step
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Bootstrap iterations
    #[arg(long, global = true, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    /// Rating threshold. `score` and `alpha` filter the lexicon only when this is given.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Excerpt length in tokens
    #[arg(long, global = true, default_value_t = DEFAULT_CHUNK_SIZE)]
    pub chunk_size: usize,
    /// Cauchy prior scale of the Bayes factor
    #[arg(long, global = true, default_value_t = DEFAULT_BF_SCALE)]
    pub bf_scale: f64,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct LexiconArg {
    /// Lexicon TSV
    #[arg(long, env = LEXICON_ENV)]
    pub lexicon: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a corpus against a lexicon
    Score {
        /// JSONL file or directory of .txt files
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value = "proportional")]
        mode: ScoreMode,
        /// Score `--chunk-size` token excerpts instead of whole documents
        #[arg(long)]
        chunk: bool,
        /// Output file stem
        #[arg(long, default_value = "scores")]
        name: String,
    },
    /// Cronbach's alpha per category and corpus
    Alpha {
        #[arg(long = "corpus", required = true, num_args = 1..)]
        corpora: Vec<PathBuf>,
        #[command(flatten)]
        lexicon: LexiconArg,
        /// Restrict to these categories
        #[arg(long = "category")]
        categories: Vec<String>,
    },
    /// Correlate every category of one score table with every category of another
    Correlate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Compare two score tables (bootstrap down-sampling, or paired)
    Compare {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        control: PathBuf,
        /// Dependent samples, documents paired by id
        #[arg(long)]
        paired: bool,
    },
    /// Naive Bayes classification of target vs control documents
    Classify(ClassifyArgs),
    /// Build lexicon versions from seeds, expansions and ratings
    Build {
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        synonyms: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        ratings: PathBuf,
        /// Nearest neighbours per seed
        #[arg(long, default_value_t = DEFAULT_NEIGHBOURS)]
        neighbours: usize,
    },
    /// Cut a corpus into `--chunk-size` token excerpts
    Chunk {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Show defaults and, if given, a lexicon summary
    Info {
        #[arg(long, env = LEXICON_ENV)]
        lexicon: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Grievance score table of the target class
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub control: Option<PathBuf>,
    /// External score table of the target class
    #[arg(long)]
    pub target_ext: Option<PathBuf>,
    #[arg(long)]
    pub control_ext: Option<PathBuf>,
    #[arg(long, default_value = "grievance")]
    pub features: FeatureSet,
    /// Label for the task column
    #[arg(long, default_value = "task")]
    pub task: String,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    /// Train on all target/control rows and test on these tables
    #[arg(long)]
    pub test_target: Option<PathBuf>,
    #[arg(long)]
    pub test_control: Option<PathBuf>,
    #[arg(long)]
    pub test_target_ext: Option<PathBuf>,
    #[arg(long)]
    pub test_control_ext: Option<PathBuf>,
}

/// Settings every output records. Paths and thread count are left out so
/// the same inputs give the same bytes wherever they run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub iterations: usize,
    pub chunk_size: usize,
    pub threshold: f64,
    pub bf_scale: f64,
    /// Command-specific settings, in a fixed order.
    pub options: Vec<(String, String)>,
}

impl RunConfig {
    fn new(cli: &Cli, command: &str) -> Self {
        RunConfig {
            version: VERSION.to_string(),
            command: command.to_string(),
            seed: cli.seed,
            iterations: cli.iterations,
            chunk_size: cli.chunk_size,
            threshold: cli.threshold.unwrap_or(DEFAULT_THRESHOLD),
            bf_scale: cli.bf_scale,
            options: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.options.push((key.to_string(), value.to_string()));
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "grievlex {} {} seed={} iterations={} chunk_size={} threshold={} bf_scale={}",
            self.version,
            self.command,
            self.seed,
            self.iterations,
            self.chunk_size,
            self.threshold,
            self.bf_scale
        );
        for (k, v) in &self.options {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn preamble(&self) -> Vec<String> {
        vec![self.line()]
    }

    pub fn json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "iterations": self.iterations,
            "chunk_size": self.chunk_size,
            "threshold": self.threshold,
            "bf_scale": self.bf_scale,
        });
        for (k, val) in &self.options {
            v[k] = serde_json::Value::String(val.clone());
        }
        v
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn load_lexicon_for(cli: &Cli, path: &Path) -> Result<Lexicon> {
    let lex = load_lexicon(path)?;
    match cli.threshold {
        Some(theta) => lex.filter_by_threshold(theta, false),
        None => Ok(lex),
    }
}

fn load(path: &Path) -> Result<Corpus> {
    load_corpus(path, CorpusFormat::detect(path))
}

fn cmd_score(
    cli: &Cli,
    corpus: &Path,
    lexicon: &Path,
    mode: ScoreMode,
    chunk: bool,
    name: &str,
) -> Result<()> {
    let lex = load_lexicon_for(cli, lexicon)?;
    if mode == ScoreMode::Weighted && lex.threshold.is_some() {
        warn("weighted scoring against a thresholded lexicon: all weights lie above the threshold");
    }
    let mut corpus = load(corpus)?;
    if chunk {
        corpus = chunk_corpus(&corpus, cli.chunk_size)?;
    }
    let table = Scorer::new(&lex).score_corpus(&corpus, mode);
    let config = RunConfig::new(cli, "score")
        .with("mode", mode)
        .with("chunked", chunk)
        .with("lexicon_version", &lex.version_tag)
        .with(
            "lexicon_threshold",
            lex.threshold.map_or("none".to_string(), |t| t.to_string()),
        );
    let path = cli.out.join(format!("{name}.csv"));
    write_score_csv(&table, &path, &config.preamble())?;
    wrote(&path);
    let counts = counts_path(&path);
    write_counts_csv(&table, &counts, &config.preamble())?;
    wrote(&counts);
    Ok(())
}

fn cmd_alpha(cli: &Cli, corpora: &[PathBuf], lexicon: &Path, categories: &[String]) -> Result<()> {
    let lex = load_lexicon_for(cli, lexicon)?;
    let loaded = corpora
        .iter()
        .map(|p| load(p))
        .collect::<Result<Vec<_>>>()?;
    for (i, c) in loaded.iter().enumerate() {
        if loaded[..i].iter().any(|o| o.name == c.name) {
            return Err(Error::Argument(format!(
                "two corpora are named {:?}",
                c.name
            )));
        }
    }
    let reports = alpha_suite(&loaded, &lex, categories)?;
    for r in &reports {
        for c in r.per_corpus.iter().filter(|c| c.alpha.is_none()) {
            warn(&format!(
                "alpha undefined for {} in {}: {}",
                r.category,
                c.corpus,
                c.note.as_deref().unwrap_or("")
            ));
        }
    }
    let config = RunConfig::new(cli, "alpha")
        .with("lexicon_version", &lex.version_tag)
        .with(
            "lexicon_threshold",
            lex.threshold.map_or("none".to_string(), |t| t.to_string()),
        );
    let path = cli.out.join("alpha.csv");
    write_alpha_csv(&reports, &path, &config.preamble())?;
    wrote(&path);
    Ok(())
}

fn cmd_correlate(cli: &Cli, a: &Path, b: &Path) -> Result<()> {
    let report = cross_correlate(&read_score_csv(a)?, &read_score_csv(b)?)?;
    let config = RunConfig::new(cli, "correlate").with("n", report.n);
    let path = cli.out.join("correlations.csv");
    write_correlation_csv(&report, &path, &config.preamble())?;
    wrote(&path);
    Ok(())
}

fn cmd_compare(cli: &Cli, target: &Path, control: &Path, paired: bool) -> Result<()> {
    let (t, c) = (read_score_csv(target)?, read_score_csv(control)?);
    let reports = if paired {
        paired_compare(&t, &c, cli.bf_scale)?
    } else {
        let opts = BootstrapOptions {
            iterations: cli.iterations,
            seed: cli.seed,
            bf_scale: cli.bf_scale,
        };
        bootstrap_compare(&t, &c, &opts)?
    };
    for r in reports.iter().filter(|r| r.degenerate_iterations > 0) {
        warn(&format!(
            "{}: {} of {} iterations degenerate",
            r.category, r.degenerate_iterations, r.iterations
        ));
    }
    let design = if paired {
        "paired"
    } else {
        "independent-bootstrap"
    };
    let config = RunConfig::new(cli, "compare").with("design", design);
    let path = cli.out.join("comparison.csv");
    write_comparison_csv(&reports, &path, &config.preamble())?;
    wrote(&path);
    Ok(())
}

fn read_opt(path: &Option<PathBuf>) -> Result<Option<ScoreTable>> {
    path.as_deref().map(read_score_csv).transpose()
}

fn cmd_classify(cli: &Cli, args: &ClassifyArgs) -> Result<()> {
    let tables = [
        &args.target,
        &args.control,
        &args.target_ext,
        &args.control_ext,
    ]
    .into_iter()
    .map(read_opt)
    .collect::<Result<Vec<_>>>()?;
    let scores = |g: usize, e: usize| ClassScores {
        grievance: tables[g].as_ref(),
        external: tables[e].as_ref(),
    };
    let train = assemble_features(args.features, scores(0, 2), scores(1, 3))?;
    let opts = ClassifyOptions {
        iterations: cli.iterations,
        seed: cli.seed,
        train_fraction: args.train_fraction,
    };
    let mut rows = vec![MetricsRow {
        task: args.task.clone(),
        feature_set: args.features.to_string(),
        report: bootstrap_classify(&train, &opts)?,
    }];

    let cross = args.test_target.is_some() || args.test_control.is_some();
    if cross {
        let tests = [
            &args.test_target,
            &args.test_control,
            &args.test_target_ext,
            &args.test_control_ext,
        ]
        .into_iter()
        .map(read_opt)
        .collect::<Result<Vec<_>>>()?;
        let t = |g: usize, e: usize| ClassScores {
            grievance: tests[g].as_ref(),
            external: tests[e].as_ref(),
        };
        let test = assemble_features(args.features, t(0, 2), t(1, 3))?;
        let metrics = cross_sample_classify(&train, &test)?;
        rows.push(MetricsRow {
            task: format!("{}-cross", args.task),
            feature_set: args.features.to_string(),
            report: ClassificationReport::from_runs(&[metrics], None),
        });
    }

    let config = RunConfig::new(cli, "classify")
        .with("task", &args.task)
        .with("features", args.features)
        .with("train_fraction", args.train_fraction)
        .with("cross_test", cross);
    let metrics_path = cli.out.join("metrics.csv");
    write_metrics_csv(&rows, &metrics_path, &config.preamble())?;
    wrote(&metrics_path);
    let importance_path = cli.out.join("importance.csv");
    write_importance_csv(
        &roc_importance(&train)?,
        &importance_path,
        &config.preamble(),
    )?;
    wrote(&importance_path);
    Ok(())
}

fn cmd_build(
    cli: &Cli,
    seeds: &Path,
    synonyms: Option<&Path>,
    embeddings: Option<&Path>,
    ratings: &Path,
    neighbours: usize,
) -> Result<()> {
    let seeds = builder::load_seeds(seeds)?;
    let synonyms = synonyms.map(builder::load_synonyms).transpose()?;
    let embeddings = embeddings.map(builder::load_embeddings).transpose()?;
    let ratings = builder::load_ratings(ratings)?;
    let out = builder::build(&BuildInputs {
        seeds: &seeds,
        synonyms: synonyms.as_ref(),
        embeddings: embeddings.as_ref(),
        neighbours,
        ratings: &ratings,
    })?;
    if out.report.seeds_missing_embeddings > 0 {
        warn(&format!(
            "{} seeds not in the embedding vocabulary",
            out.report.seeds_missing_embeddings
        ));
    }
    let config = RunConfig::new(cli, "build")
        .with("neighbours", neighbours)
        .with("synonyms", synonyms.is_some())
        .with("embeddings", embeddings.is_some());
    let preamble = config.preamble();

    let candidates = cli.out.join("candidates.tsv");
    builder::write_candidates(&out.candidates, &candidates, &preamble)?;
    wrote(&candidates);
    let weighted = cli.out.join("lexicon_weighted.tsv");
    save_lexicon_with_preamble(&out.weighted, &weighted, &preamble)?;
    wrote(&weighted);
    for (theta, lex) in &out.thresholded {
        let path = cli.out.join(format!("lexicon_threshold{theta}.tsv"));
        save_lexicon_with_preamble(lex, &path, &preamble)?;
        wrote(&path);
    }
    let report = cli.out.join("build_report.json");
    builder::write_build_report(&out.report, &config.json(), &report)?;
    wrote(&report);
    Ok(())
}

fn cmd_chunk(cli: &Cli, corpus: &Path) -> Result<()> {
    let chunks = chunk_corpus(&load(corpus)?, cli.chunk_size)?;
    let mut buf = Vec::new();
    for doc in &chunks.docs {
        let row = CorpusRow {
            id: doc.id.clone(),
            text: doc.raw.clone(),
            label: doc.label.clone(),
        };
        serde_json::to_writer(&mut buf, &row).expect("row serializes");
        buf.push(b'\n');
    }
    let path = cli.out.join("chunks.jsonl");
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    wrote(&path);
    let config = RunConfig::new(cli, "chunk").with("documents", chunks.docs.len());
    let meta = cli.out.join("chunks.jsonl.meta.json");
    let text = serde_json::to_string_pretty(&serde_json::json!({ "config": config.json() }))
        .expect("serializes");
    fs::write(&meta, text + "\n").map_err(|e| Error::io(&meta, e))?;
    wrote(&meta);
    Ok(())
}

fn cmd_info(cli: &Cli, lexicon: Option<&Path>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let mut lines = vec![
        format!("grievlex {VERSION}"),
        format!("defaults: {}", RunConfig::new(cli, "info").line()),
    ];
    if let Some(path) = lexicon {
        let lex = load_lexicon(path)?;
        let phrases = lex.entries().iter().filter(|e| e.is_phrase()).count();
        lines.push(format!("lexicon: {}", path.display()));
        lines.push(format!(
            "  version: {}",
            if lex.version_tag.is_empty() {
                "-"
            } else {
                &lex.version_tag
            }
        ));
        lines.push(format!(
            "  threshold: {}",
            lex.threshold.map_or("none".to_string(), |t| t.to_string())
        ));
        lines.push(format!("  entries: {} ({phrases} phrases)", lex.len()));
        for c in lex.categories() {
            lines.push(format!("  {c}\t{}", lex.entries_in(c).count()));
        }
    }
    for l in lines {
        writeln!(out, "{l}").map_err(|e| Error::io(Path::new("<stdout>"), e))?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Argument(format!("cannot set up {n} threads: {e}")))?;
    }
    if !matches!(cli.command, Command::Info { .. }) {
        fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    }
    match &cli.command {
        Command::Score {
            corpus,
            lexicon,
            mode,
            chunk,
            name,
        } => cmd_score(cli, corpus, &lexicon.lexicon, *mode, *chunk, name),
        Command::Alpha {
            corpora,
            lexicon,
            categories,
        } => cmd_alpha(cli, corpora, &lexicon.lexicon, categories),
        Command::Correlate { a, b } => cmd_correlate(cli, a, b),
        Command::Compare {
            target,
            control,
            paired,
        } => cmd_compare(cli, target, control, *paired),
        Command::Classify(args) => cmd_classify(cli, args),
        Command::Build {
            seeds,
            synonyms,
            embeddings,
            ratings,
            neighbours,
        } => cmd_build(
            cli,
            seeds,
            synonyms.as_deref(),
            embeddings.as_deref(),
            ratings,
            *neighbours,
        ),
        Command::Chunk { corpus } => cmd_chunk(cli, corpus),
        Command::Info { lexicon } => cmd_info(cli, lexicon.as_deref()),
    }
}

/// Argument problems exit with 2, like clap's own usage errors; everything
/// else with 1.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Argument(_)) {
                2
            } else {
                1
            })
        }
    }
}
