//! C ABI over the grievlex core.
//!
//! Every fallible call returns a [`GlxStatus`]; on failure the message is
//! available from [`glx_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Strings returned to the
//! caller are released with [`glx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::mem::ManuallyDrop;
use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::ptr;

use grievlex::inferstats::{cohen_d, jzs_bayes_factor, welch_t, SampleStats, TDesign};
use grievlex::lexicon::{load_lexicon, save_lexicon, Lexicon};
use grievlex::psychometrics::cronbach_alpha;
use grievlex::scorer::{ScoreMode, Scorer, WordOccurrenceMatrix};
use grievlex::textprep::Document;
use grievlex::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Argument = 6,
    UndefinedAlpha = 7,
    Degenerate = 8,
    Numerical = 9,
    Training = 10,
    Build = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlxScoreMode {
    Proportional = 0,
    Weighted = 1,
}

/// A validated lexicon.
pub struct GlxLexicon {
    inner: Lexicon,
}

/// A compiled matcher over its own copy of a lexicon.
pub struct GlxScorer {
    scorer: ManuallyDrop<Scorer<'static>>,
    lexicon: *mut Lexicon,
}

impl Drop for GlxScorer {
    fn drop(&mut self) {
        // the scorer borrows from `lexicon`, so it goes first
        unsafe {
            ManuallyDrop::drop(&mut self.scorer);
            drop(Box::from_raw(self.lexicon));
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> GlxStatus {
    match err {
        Error::Parse { .. } => GlxStatus::Parse,
        Error::Validation(_) => GlxStatus::Validation,
        Error::Argument(_) => GlxStatus::Argument,
        Error::Io { .. } => GlxStatus::Io,
        Error::UndefinedAlpha(_) => GlxStatus::UndefinedAlpha,
        Error::Degenerate(_) => GlxStatus::Degenerate,
        Error::Numerical(_) => GlxStatus::Numerical,
        Error::Training(_) => GlxStatus::Training,
        Error::Build(_) => GlxStatus::Build,
    }
}

struct Fail(GlxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F>(f: F) -> GlxStatus
where
    F: FnOnce() -> Result<(), Fail> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => GlxStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside grievlex");
            GlxStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(GlxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GlxStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn stats(n: usize, mean: f64, sd: f64) -> Result<SampleStats, Fail> {
    Ok(SampleStats::new(n, mean, sd)?)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn glx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn glx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn glx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_load(
    path: *const c_char,
    out: *mut *mut GlxLexicon,
) -> GlxStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = load_lexicon(Path::new(path))?;
        *out = Box::into_raw(Box::new(GlxLexicon { inner }));
        Ok(())
    })
}

/// # Safety
/// `lex` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_free(lex: *mut GlxLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// # Safety
/// `lex` must be a live handle; `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_save(
    lex: *const GlxLexicon,
    path: *const c_char,
) -> GlxStatus {
    guard(|| {
        let lex = handle(lex, "lexicon")?;
        let path = str_arg(path, "path")?;
        save_lexicon(&lex.inner, Path::new(path))?;
        Ok(())
    })
}

/// Number of entries, or 0 for NULL.
///
/// # Safety
/// `lex` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_len(lex: *const GlxLexicon) -> usize {
    lex.as_ref().map_or(0, |l| l.inner.len())
}

/// Number of categories, or 0 for NULL.
///
/// # Safety
/// `lex` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_category_count(lex: *const GlxLexicon) -> usize {
    lex.as_ref().map_or(0, |l| l.inner.categories().len())
}

/// Name of category `index`; free it with `glx_string_free`.
///
/// # Safety
/// `lex` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_category_name(
    lex: *const GlxLexicon,
    index: usize,
    out: *mut *mut c_char,
) -> GlxStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lex = handle(lex, "lexicon")?;
        let name = lex.inner.categories().get(index).ok_or_else(|| {
            Fail(
                GlxStatus::Argument,
                format!("category index {index} out of range"),
            )
        })?;
        *out = CString::new(name.as_str())
            .expect("names carry no nul")
            .into_raw();
        Ok(())
    })
}

/// New lexicon holding the entries rated at or above `theta`.
///
/// # Safety
/// `lex` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_lexicon_filter(
    lex: *const GlxLexicon,
    theta: f64,
    prune_categories: bool,
    out: *mut *mut GlxLexicon,
) -> GlxStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lex = handle(lex, "lexicon")?;
        let inner = lex.inner.filter_by_threshold(theta, prune_categories)?;
        *out = Box::into_raw(Box::new(GlxLexicon { inner }));
        Ok(())
    })
}

/// Compiles a matcher over a copy of `lex`; the lexicon handle stays owned
/// by the caller.
///
/// # Safety
/// `lex` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_scorer_new(
    lex: *const GlxLexicon,
    out: *mut *mut GlxScorer,
) -> GlxStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let lex = handle(lex, "lexicon")?;
        let owned: *mut Lexicon = Box::into_raw(Box::new(lex.inner.clone()));
        let scorer = Scorer::new(&*owned);
        *out = Box::into_raw(Box::new(GlxScorer {
            scorer: ManuallyDrop::new(scorer),
            lexicon: owned,
        }));
        Ok(())
    })
}

/// # Safety
/// `scorer` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glx_scorer_free(scorer: *mut GlxScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}

/// Scores one text. `scores` receives one value per category in lexicon
/// order and `len` must equal the category count. `token_count` may be NULL.
///
/// # Safety
/// `scorer` must be a live handle, `text` nul-terminated, `scores` writable
/// for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn glx_score_text(
    scorer: *const GlxScorer,
    text: *const c_char,
    mode: GlxScoreMode,
    scores: *mut f64,
    len: usize,
    token_count: *mut usize,
) -> GlxStatus {
    guard(|| {
        let scorer = handle(scorer, "scorer")?;
        let text = str_arg(text, "text")?;
        if scores.is_null() {
            return Err(null("scores"));
        }
        let n_cat = (*scorer.lexicon).categories().len();
        if len != n_cat {
            return Err(Fail(
                GlxStatus::Argument,
                format!("scores has length {len}, lexicon has {n_cat} categories"),
            ));
        }
        let mode = match mode {
            GlxScoreMode::Proportional => ScoreMode::Proportional,
            GlxScoreMode::Weighted => ScoreMode::Weighted,
        };
        let profile = scorer
            .scorer
            .score(&Document::new("text", text, None), mode);
        std::slice::from_raw_parts_mut(scores, len).copy_from_slice(&profile.scores);
        if let Some(t) = token_count.as_mut() {
            *t = profile.token_count;
        }
        Ok(())
    })
}

/// Cronbach's alpha over a row-major `rows` x `cols` matrix.
///
/// # Safety
/// `values` must be readable for `rows * cols` doubles; `alpha` writable.
#[no_mangle]
pub unsafe extern "C" fn glx_cronbach_alpha(
    values: *const f64,
    rows: usize,
    cols: usize,
    alpha: *mut f64,
) -> GlxStatus {
    guard(|| {
        let alpha = out_arg(alpha, "alpha")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let total = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(GlxStatus::Argument, "rows * cols overflows".into()))?;
        let flat = std::slice::from_raw_parts(values, total);
        let matrix = if cols == 0 {
            vec![Vec::new(); rows]
        } else {
            flat.chunks(cols).map(<[f64]>::to_vec).collect()
        };
        *alpha = cronbach_alpha(&WordOccurrenceMatrix::from_rows(matrix))?.value;
        Ok(())
    })
}

/// Welch's t-test from summary statistics. Any output pointer may be NULL.
///
/// # Safety
/// Non-NULL output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_welch_t(
    n_a: usize,
    mean_a: f64,
    sd_a: f64,
    n_b: usize,
    mean_b: f64,
    sd_b: f64,
    t: *mut f64,
    df: *mut f64,
    p: *mut f64,
) -> GlxStatus {
    guard(|| {
        let r = welch_t(&stats(n_a, mean_a, sd_a)?, &stats(n_b, mean_b, sd_b)?)?;
        for (dst, v) in [(t, r.t), (df, r.df), (p, r.p)] {
            if let Some(dst) = dst.as_mut() {
                *dst = v;
            }
        }
        Ok(())
    })
}

/// Cohen's d with a 95% interval. Any output pointer may be NULL.
///
/// # Safety
/// Non-NULL output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_cohen_d(
    n_a: usize,
    mean_a: f64,
    sd_a: f64,
    n_b: usize,
    mean_b: f64,
    sd_b: f64,
    d: *mut f64,
    ci_low: *mut f64,
    ci_high: *mut f64,
) -> GlxStatus {
    guard(|| {
        let r = cohen_d(&stats(n_a, mean_a, sd_a)?, &stats(n_b, mean_b, sd_b)?)?;
        for (dst, v) in [(d, r.d), (ci_low, r.ci_low), (ci_high, r.ci_high)] {
            if let Some(dst) = dst.as_mut() {
                *dst = v;
            }
        }
        Ok(())
    })
}

/// JZS Bayes factor for a t statistic. `n_b == 0` selects the one-sample
/// design with `n_a` observations. Either output pointer may be NULL.
///
/// # Safety
/// Non-NULL output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn glx_jzs_bf(
    t: f64,
    n_a: usize,
    n_b: usize,
    scale: f64,
    bf10: *mut f64,
    ln_bf10: *mut f64,
) -> GlxStatus {
    guard(|| {
        let design = if n_b == 0 {
            TDesign::OneSample { n: n_a }
        } else {
            TDesign::TwoSample { na: n_a, nb: n_b }
        };
        let r = jzs_bayes_factor(t, design, scale)?;
        for (dst, v) in [(bf10, r.bf10), (ln_bf10, r.ln_bf10)] {
            if let Some(dst) = dst.as_mut() {
                *dst = v;
            }
        }
        Ok(())
    })
}
