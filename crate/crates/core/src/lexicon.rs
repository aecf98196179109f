//! Per-language unigram frequency lexicons and 2–3 word dictionaries.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{LidError, Result};
use crate::lang::Language;
use crate::textcore::{normalize, tokenize, Token};
use crate::tsv;

/// True when `word` could be a lexicon key: one normalized, non-hidden
/// Devanagari word token.
pub fn is_lexicon_key(word: &str) -> bool {
    if word.is_empty() || normalize(word) != word {
        return false;
    }
    let tokens = tokenize(word);
    tokens.len() == 1 && tokens[0].surface == word && tokens[0].is_devanagari_word()
}

fn check_word_key(key: &str) -> std::result::Result<(), String> {
    if is_lexicon_key(key) {
        Ok(())
    } else {
        Err(format!("`{key}` is not a normalized Devanagari word"))
    }
}

fn check_ngram_key(key: &str) -> std::result::Result<(), String> {
    let parts: Vec<&str> = key.split(' ').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("n-gram `{key}` must have 2 or 3 words"));
    }
    parts.iter().try_for_each(|p| check_word_key(p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnigramLexicon {
    language: Language,
    entries: BTreeMap<String, u64>,
    total_tokens: u64,
}

impl UnigramLexicon {
    pub fn empty(language: Language) -> Self {
        UnigramLexicon {
            language,
            entries: BTreeMap::new(),
            total_tokens: 0,
        }
    }

    /// Validated constructor for lexicons assembled outside the builder.
    pub fn from_entries(
        language: Language,
        entries: BTreeMap<String, u64>,
        total_tokens: u64,
    ) -> Result<Self> {
        validate_entries(&entries, check_word_key)?;
        let sum: u64 = entries.values().sum();
        if sum > total_tokens {
            return Err(LidError::Integrity(format!(
                "frequency sum {sum} exceeds total_tokens {total_tokens}"
            )));
        }
        Ok(UnigramLexicon {
            language,
            entries,
            total_tokens,
        })
    }

    /// Counts every non-hidden Devanagari word of the corpus. `total_tokens`
    /// counts all word tokens, including hidden and numeric ones.
    pub fn build<I, S>(corpus: I, language: Language) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = UnigramLexicon::empty(language);
        for line in corpus {
            lex.add_line(line.as_ref());
        }
        lex
    }

    /// Adds one corpus line; used for streaming construction.
    pub fn add_line(&mut self, line: &str) {
        for token in tokenize(&normalize(line)) {
            if !token.is_word() {
                continue;
            }
            self.total_tokens += 1;
            if token.is_devanagari_word() {
                *self.entries.entry(token.surface).or_insert(0) += 1;
            }
        }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn entries(&self) -> &BTreeMap<String, u64> {
        &self.entries
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn lookup(&self, word: &str) -> MatchResult {
        match self.entries.get(word) {
            Some(&frequency) => MatchResult {
                matched_length: 1,
                frequency,
                source: Some(MatchSource::Unigram),
            },
            None => MatchResult::NONE,
        }
    }

    /// Merges entries from an external word list (e.g. a morphological
    /// analyser dictionary). Lines are `word` or `word<TAB>frequency`;
    /// a missing frequency counts as 1, `#` lines and blanks are skipped.
    pub fn import<R: BufRead>(&mut self, reader: R, source: &str) -> Result<usize> {
        let mut added = 0;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| LidError::parse(source, lineno, e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, freq) = match line.split_once('\t') {
                Some((w, f)) => {
                    let f: u64 = f.parse().map_err(|_| {
                        LidError::parse(source, lineno, format!("non-numeric frequency `{f}`"))
                    })?;
                    (w, f)
                }
                None => (line, 1),
            };
            if freq == 0 {
                return Err(LidError::parse(source, lineno, "frequency must be at least 1"));
            }
            let word = normalize(word);
            check_word_key(&word).map_err(|m| LidError::parse(source, lineno, m))?;
            *self.entries.entry(word).or_insert(0) += freq;
            self.total_tokens += freq;
            added += 1;
        }
        Ok(added)
    }

    /// Drops every word that also occurs in `other`, from both lexicons.
    pub fn retain_exclusive(&mut self, other: &mut UnigramLexicon) {
        let shared: Vec<String> = self
            .entries
            .keys()
            .filter(|k| other.entries.contains_key(*k))
            .cloned()
            .collect();
        for key in shared {
            self.entries.remove(&key);
            other.entries.remove(&key);
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::io::Result<()> {
        tsv::write_table(out, self.language, self.total_tokens, &self.entries)
    }

    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let (header, entries) = tsv::read_table(reader, source, check_word_key)?;
        let sum: u64 = entries.values().sum();
        if sum > header.total {
            return Err(LidError::Integrity(format!(
                "{source}: frequency sum {sum} exceeds total={}",
                header.total
            )));
        }
        Ok(UnigramLexicon {
            language: header.language,
            entries,
            total_tokens: header.total,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tsv::save_table(path, self.language, self.total_tokens, &self.entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(tsv::open(path)?, &path.display().to_string())
    }
}

fn validate_entries(
    entries: &BTreeMap<String, u64>,
    check: impl Fn(&str) -> std::result::Result<(), String>,
) -> Result<()> {
    for (key, &freq) in entries {
        check(key).map_err(LidError::Integrity)?;
        if freq == 0 {
            return Err(LidError::Integrity(format!("zero frequency for `{key}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatchSource {
    Unigram,
    Bigram,
    Trigram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    /// Number of tokens covered; 0 means no match.
    pub matched_length: usize,
    pub frequency: u64,
    pub source: Option<MatchSource>,
}

impl MatchResult {
    pub const NONE: MatchResult = MatchResult {
        matched_length: 0,
        frequency: 0,
        source: None,
    };

    pub fn is_match(&self) -> bool {
        self.matched_length > 0
    }
}

/// Contiguous 2- and 3-word groups with their corpus counts. Keys are the
/// words joined by a single space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NgramDictionary {
    language: Language,
    entries: BTreeMap<String, u64>,
    total: u64,
}

impl NgramDictionary {
    pub fn empty(language: Language) -> Self {
        NgramDictionary {
            language,
            entries: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_entries(language: Language, entries: BTreeMap<String, u64>) -> Result<Self> {
        validate_entries(&entries, check_ngram_key)?;
        let total = entries.values().sum();
        Ok(NgramDictionary {
            language,
            entries,
            total,
        })
    }

    pub fn build<I, S>(corpus: I, language: Language, max_n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        check_max_n(max_n)?;
        let mut dict = NgramDictionary::empty(language);
        for line in corpus {
            dict.add_line(line.as_ref(), max_n);
        }
        Ok(dict)
    }

    /// Counts all windows of 2..=max_n words inside runs of Devanagari
    /// words; punctuation, digits and hidden tokens break a run.
    pub fn add_line(&mut self, line: &str, max_n: usize) {
        let tokens = tokenize(&normalize(line));
        for run in tokens.split(|t| !t.is_devanagari_word()) {
            for n in 2..=max_n {
                for window in run.windows(n) {
                    let key = join_surfaces(window);
                    *self.entries.entry(key).or_insert(0) += 1;
                    self.total += 1;
                }
            }
        }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn entries(&self) -> &BTreeMap<String, u64> {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequency(&self, words: &[&str]) -> Option<u64> {
        self.entries.get(&words.join(" ")).copied()
    }

    /// Longest dictionary match starting at `start`: trigram, then bigram.
    /// Windows that contain a non-Devanagari token never match.
    pub fn match_at(&self, tokens: &[Token], start: usize) -> Result<MatchResult> {
        if start >= tokens.len() {
            return Err(LidError::Precondition(format!(
                "start index {start} outside token sequence of length {}",
                tokens.len()
            )));
        }
        for (n, source) in [(3, MatchSource::Trigram), (2, MatchSource::Bigram)] {
            let Some(window) = tokens.get(start..start + n) else {
                continue;
            };
            if !window.iter().all(Token::is_devanagari_word) {
                continue;
            }
            if let Some(&frequency) = self.entries.get(&join_surfaces(window)) {
                return Ok(MatchResult {
                    matched_length: n,
                    frequency,
                    source: Some(source),
                });
            }
        }
        Ok(MatchResult::NONE)
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::io::Result<()> {
        tsv::write_table(out, self.language, self.total, &self.entries)
    }

    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let (header, entries) = tsv::read_table(reader, source, check_ngram_key)?;
        Ok(NgramDictionary {
            language: header.language,
            entries,
            total: header.total,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        tsv::save_table(path, self.language, self.total, &self.entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(tsv::open(path)?, &path.display().to_string())
    }
}

fn check_max_n(max_n: usize) -> Result<()> {
    if (2..=3).contains(&max_n) {
        Ok(())
    } else {
        Err(LidError::Config(format!(
            "max n-gram length must be 2 or 3, got {max_n}"
        )))
    }
}

fn join_surfaces(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn build_unigram_lexicon<I, S>(corpus: I, language: Language) -> UnigramLexicon
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    UnigramLexicon::build(corpus, language)
}

pub fn build_ngram_dictionary<I, S>(corpus: I, language: Language, max_n: usize) -> Result<NgramDictionary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    NgramDictionary::build(corpus, language, max_n)
}

pub fn lookup_unigram(lexicon: &UnigramLexicon, word: &str) -> MatchResult {
    lexicon.lookup(word)
}

pub fn match_multiword(dict: &NgramDictionary, tokens: &[Token], start: usize) -> Result<MatchResult> {
    dict.match_at(tokens, start)
}
