use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use grievlex_ffi::*;

fn toy_lexicon() -> CString {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/score/lexicon.tsv");
    CString::new(path.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = glx_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load() -> *mut GlxLexicon {
    let mut lex = ptr::null_mut();
    assert_eq!(
        unsafe { glx_lexicon_load(toy_lexicon().as_ptr(), &mut lex) },
        GlxStatus::Ok
    );
    lex
}

#[test]
fn lexicon_handle_lifecycle() {
    let lex = load();
    unsafe {
        assert_eq!(glx_lexicon_len(lex), 7);
        assert_eq!(glx_lexicon_category_count(lex), 3);
        let mut name = ptr::null_mut();
        assert_eq!(glx_lexicon_category_name(lex, 2, &mut name), GlxStatus::Ok);
        assert_eq!(CStr::from_ptr(name).to_str().unwrap(), "desperation");
        glx_string_free(name);
        assert_eq!(
            glx_lexicon_category_name(lex, 3, &mut name),
            GlxStatus::Argument
        );
        assert!(name.is_null());

        let mut filtered = ptr::null_mut();
        assert_eq!(
            glx_lexicon_filter(lex, 8.0, false, &mut filtered),
            GlxStatus::Ok
        );
        assert_eq!(glx_lexicon_len(filtered), 4);

        let dir = tempfile::tempdir().unwrap();
        let out = CString::new(dir.path().join("f.tsv").to_str().unwrap()).unwrap();
        assert_eq!(glx_lexicon_save(filtered, out.as_ptr()), GlxStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(glx_lexicon_load(out.as_ptr(), &mut back), GlxStatus::Ok);
        assert_eq!(glx_lexicon_len(back), 4);

        glx_lexicon_free(back);
        glx_lexicon_free(filtered);
        glx_lexicon_free(lex);
        glx_lexicon_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let missing = CString::new("/nonexistent/lexicon.tsv").unwrap();
    let mut lex = ptr::null_mut();
    unsafe {
        assert_eq!(glx_lexicon_load(missing.as_ptr(), &mut lex), GlxStatus::Io);
        assert!(lex.is_null());
        assert!(last_error().contains("nonexistent"));
        assert_eq!(
            glx_lexicon_load(ptr::null(), &mut lex),
            GlxStatus::NullPointer
        );
        assert_eq!(
            glx_lexicon_load(missing.as_ptr(), ptr::null_mut()),
            GlxStatus::NullPointer
        );
        let bad = [0xffu8, 0];
        assert_eq!(
            glx_lexicon_load(bad.as_ptr().cast(), &mut lex),
            GlxStatus::InvalidUtf8
        );
    }
}

#[test]
fn scoring_through_the_handle() {
    let lex = load();
    let mut scorer = ptr::null_mut();
    unsafe {
        assert_eq!(glx_scorer_new(lex, &mut scorer), GlxStatus::Ok);
        glx_lexicon_free(lex);
        let text = CString::new("I hate them. The last resort is to attack.").unwrap();
        let mut scores = [0.0; 3];
        let mut tokens = 0usize;
        let st = glx_score_text(
            scorer,
            text.as_ptr(),
            GlxScoreMode::Proportional,
            scores.as_mut_ptr(),
            3,
            &mut tokens,
        );
        assert_eq!(st, GlxStatus::Ok);
        assert_eq!(tokens, 9);
        assert_eq!(scores, [1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0]);
        let st = glx_score_text(
            scorer,
            text.as_ptr(),
            GlxScoreMode::Weighted,
            scores.as_mut_ptr(),
            3,
            ptr::null_mut(),
        );
        assert_eq!(st, GlxStatus::Ok);
        assert_eq!(scores, [9.0, 6.0, 8.5]);
        let st = glx_score_text(
            scorer,
            text.as_ptr(),
            GlxScoreMode::Weighted,
            scores.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(st, GlxStatus::Argument);
        glx_scorer_free(scorer);
    }
}

#[test]
fn statistics_entry_points() {
    unsafe {
        let (mut d, mut lo, mut hi) = (0.0, 0.0, 0.0);
        assert_eq!(
            glx_cohen_d(10, 1.5, 1.0, 10, 1.0, 1.0, &mut d, &mut lo, &mut hi),
            GlxStatus::Ok
        );
        assert_eq!(d, 0.5);
        assert!(lo < d && d < hi);

        let (mut t, mut df) = (0.0, 0.0);
        assert_eq!(
            glx_welch_t(10, 1.5, 1.0, 10, 1.0, 1.0, &mut t, &mut df, ptr::null_mut()),
            GlxStatus::Ok
        );
        assert!((t - 0.5 * 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(df, 18.0);
        assert_eq!(
            glx_welch_t(
                1,
                0.0,
                1.0,
                10,
                0.0,
                1.0,
                &mut t,
                ptr::null_mut(),
                ptr::null_mut()
            ),
            GlxStatus::Argument
        );

        let (mut bf, mut ln) = (0.0, 0.0);
        assert_eq!(
            glx_jzs_bf(
                3.0,
                50,
                50,
                std::f64::consts::FRAC_1_SQRT_2,
                &mut bf,
                &mut ln
            ),
            GlxStatus::Ok
        );
        assert!((bf.ln() - ln).abs() < 1e-12);
        assert!(bf > 10.0);

        let rows = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 0.0, 0.0];
        let mut alpha = 0.0;
        assert_eq!(
            glx_cronbach_alpha(rows.as_ptr(), 4, 2, &mut alpha),
            GlxStatus::Ok
        );
        assert!((alpha - 1.0).abs() < 1e-12);
        let flat = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(
            glx_cronbach_alpha(flat.as_ptr(), 2, 2, &mut alpha),
            GlxStatus::UndefinedAlpha
        );
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let lib = target_dir().join("libgrievlex_ffi.a");
    assert!(lib.is_file(), "{} missing", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe)
        .arg(toy_lexicon().to_str().unwrap())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "hate 4 0.500000\n");
}
