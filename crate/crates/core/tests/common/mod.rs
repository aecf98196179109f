#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures").join(name)
}

pub fn fixture_lines(name: &str) -> Vec<String> {
    fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli<I, T>(args: I, stdin: &str) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut input = stdin.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args: Vec<OsString> = std::iter::once(OsString::from("lid"))
        .chain(args.into_iter().map(Into::into))
        .collect();
    let code = lid_core::cli::run(args, &mut input, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Builds the fixture model into `dir` through the CLI.
pub fn build_fixture_model(dir: &Path) {
    let (code, _, err) = run_cli(
        [
            OsString::from("build"),
            "--hin".into(),
            fixture("hin.corpus.txt").into(),
            "--mag".into(),
            fixture("mag.corpus.txt").into(),
            "--out".into(),
            dir.into(),
        ],
        "",
    );
    assert_eq!(code, 0, "build failed: {err}");
}

const ORACLE_PUNCT: &str = "।॥?!.,;:'\"()[]-";

/// Whitespace split with punctuation trimmed from both ends; empty
/// pieces dropped.
pub fn oracle_words(line: &str) -> Vec<&str> {
    line.split_whitespace()
        .map(|w| w.trim_matches(|c| ORACLE_PUNCT.contains(c)))
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn oracle_is_devanagari(word: &str) -> bool {
    !word.is_empty() && word.chars().all(|c| ('\u{0900}'..='\u{0963}').contains(&c) || ('\u{0970}'..='\u{097F}').contains(&c))
}

pub fn oracle_unigram_counts<S: AsRef<str>>(lines: &[S]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for line in lines {
        for w in oracle_words(line.as_ref()) {
            if oracle_is_devanagari(w) {
                *counts.entry(w.to_string()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Keys of a saved unigram file, read without the library.
pub fn tsv_keys(path: &Path) -> HashSet<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}
