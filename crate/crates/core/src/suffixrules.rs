//! Suffix tables (word-final runs of 1–3 grapheme clusters) and the
//! hand-written linguistic rules that separate Magahi from Hindi.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{LidError, Result};
use crate::lang::Language;
use crate::lexicon::is_lexicon_key;
use crate::textcore::{classify_char, grapheme_split, normalize, tokenize, ScriptClass, Token};
use crate::tsv;

/// Longest suffix, in grapheme clusters, that is ever extracted or matched.
pub const MAX_SUFFIX_LEN: usize = 3;

/// Rule file shipped with every model built by `lid build`.
pub const DEFAULT_RULES: &str = include_str!("../data/default_rules.tsv");

fn check_suffix_key(key: &str) -> std::result::Result<(), String> {
    if key.is_empty() || normalize(key) != key || key.chars().any(char::is_whitespace) {
        return Err(format!("`{key}` is not a normalized suffix"));
    }
    if !key.chars().all(|c| classify_char(c) == ScriptClass::Devanagari) {
        return Err(format!("suffix `{key}` is not Devanagari"));
    }
    let clusters = grapheme_split(key).map_err(|e| e.to_string())?.len();
    if clusters > MAX_SUFFIX_LEN {
        return Err(format!("suffix `{key}` has {clusters} grapheme clusters"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuffixTable {
    language: Language,
    entries: BTreeMap<String, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuffixMatch {
    pub suffix: String,
    /// Length in grapheme clusters.
    pub clusters: usize,
    pub frequency: u64,
}

impl SuffixTable {
    pub fn empty(language: Language) -> Self {
        SuffixTable {
            language,
            entries: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_entries(language: Language, entries: BTreeMap<String, u64>) -> Result<Self> {
        for (key, &freq) in &entries {
            check_suffix_key(key).map_err(LidError::Integrity)?;
            if freq == 0 {
                return Err(LidError::Integrity(format!("zero frequency for `{key}`")));
            }
        }
        let total = entries.values().sum();
        Ok(SuffixTable {
            language,
            entries,
            total,
        })
    }

    /// Counts every proper suffix of 1..=min(max_len, g−1) clusters of
    /// each non-hidden Devanagari word, `g` being the word's cluster count.
    pub fn extract<I, S>(corpus: I, language: Language, max_len: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        check_max_len(max_len)?;
        let mut table = SuffixTable::empty(language);
        for line in corpus {
            table.add_line(line.as_ref(), max_len);
        }
        Ok(table)
    }

    pub fn add_line(&mut self, line: &str, max_len: usize) {
        for token in tokenize(&normalize(line)) {
            if token.is_devanagari_word() {
                self.add_word(&token.surface, max_len);
            }
        }
    }

    fn add_word(&mut self, word: &str, max_len: usize) {
        let Ok(clusters) = grapheme_split(word) else {
            return;
        };
        let g = clusters.len();
        for k in 1..=max_len.min(g.saturating_sub(1)) {
            let suffix = clusters[g - k..].concat();
            *self.entries.entry(suffix).or_insert(0) += 1;
            self.total += 1;
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

    pub fn contains(&self, suffix: &str) -> bool {
        self.entries.contains_key(suffix)
    }

    /// Longest proper suffix of `word` present in the table, trying 3, 2,
    /// then 1 clusters.
    pub fn match_word(&self, word: &str) -> Option<SuffixMatch> {
        let clusters = grapheme_split(word).ok()?;
        let g = clusters.len();
        (1..=MAX_SUFFIX_LEN.min(g.saturating_sub(1)))
            .rev()
            .find_map(|k| {
                let suffix = clusters[g - k..].concat();
                self.entries.get(&suffix).map(|&frequency| SuffixMatch {
                    suffix,
                    clusters: k,
                    frequency,
                })
            })
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::io::Result<()> {
        tsv::write_table(out, self.language, self.total, &self.entries)
    }

    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let (header, entries) = tsv::read_table(reader, source, check_suffix_key)?;
        Ok(SuffixTable {
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

fn check_max_len(max_len: usize) -> Result<()> {
    if (1..=MAX_SUFFIX_LEN).contains(&max_len) {
        Ok(())
    } else {
        Err(LidError::Config(format!(
            "suffix length must be between 1 and {MAX_SUFFIX_LEN}, got {max_len}"
        )))
    }
}

pub fn extract_suffixes<I, S>(corpus: I, language: Language, max_len: usize) -> Result<SuffixTable>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    SuffixTable::extract(corpus, language, max_len)
}

pub fn match_suffix(word: &str, table: &SuffixTable) -> Option<SuffixMatch> {
    table.match_word(word)
}

/// Key-set overlap between two suffix tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuffixOverlap {
    pub shared: usize,
    pub union: usize,
    pub only_first: usize,
    pub only_second: usize,
    /// `shared / union`.
    pub fraction: f64,
}

pub fn shared_suffix_fraction(a: &SuffixTable, b: &SuffixTable) -> Result<SuffixOverlap> {
    if a.is_empty() || b.is_empty() {
        return Err(LidError::UndefinedRatio(
            "shared suffix fraction needs two non-empty tables".into(),
        ));
    }
    let shared = a.entries.keys().filter(|k| b.entries.contains_key(*k)).count();
    let union = a.len() + b.len() - shared;
    Ok(SuffixOverlap {
        shared,
        union,
        only_first: a.len() - shared,
        only_second: b.len() - shared,
        fraction: shared as f64 / union as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum RulePattern {
    /// Word ends with the string and is longer than it.
    EndsWithSuffix(String),
    /// Word equals the string.
    ContainsToken(String),
    /// Word equals the second element and the preceding word equals the
    /// first; `None` is the `*` wildcard.
    TokenFollows(Option<String>, Option<String>),
}

impl RulePattern {
    fn kind(&self) -> &'static str {
        match self {
            RulePattern::EndsWithSuffix(_) => "ENDS",
            RulePattern::ContainsToken(_) => "CONTAINS",
            RulePattern::TokenFollows(..) => "FOLLOWS",
        }
    }

    fn parse(kind: &str, pattern: &str) -> std::result::Result<Self, String> {
        match kind {
            "ENDS" => {
                if pattern.is_empty()
                    || normalize(pattern) != pattern
                    || !pattern.chars().all(|c| classify_char(c) == ScriptClass::Devanagari)
                {
                    return Err(format!("suffix pattern `{pattern}` is not normalized Devanagari"));
                }
                Ok(RulePattern::EndsWithSuffix(pattern.to_string()))
            }
            "CONTAINS" => {
                if !is_lexicon_key(pattern) {
                    return Err(format!("token pattern `{pattern}` is not a normalized Devanagari word"));
                }
                Ok(RulePattern::ContainsToken(pattern.to_string()))
            }
            "FOLLOWS" => {
                let (first, second) = pattern
                    .split_once(' ')
                    .ok_or_else(|| format!("FOLLOWS pattern `{pattern}` needs two space-separated words"))?;
                let part = |w: &str| -> std::result::Result<Option<String>, String> {
                    if w == "*" {
                        Ok(None)
                    } else if is_lexicon_key(w) {
                        Ok(Some(w.to_string()))
                    } else {
                        Err(format!("`{w}` is neither `*` nor a normalized Devanagari word"))
                    }
                };
                let (first, second) = (part(first)?, part(second)?);
                if first.is_none() && second.is_none() {
                    return Err("FOLLOWS pattern cannot be `* *`".into());
                }
                Ok(RulePattern::TokenFollows(first, second))
            }
            other => Err(format!("unknown pattern kind `{other}`")),
        }
    }

    /// Whether the pattern fires at `tokens[index]`.
    pub fn matches_at(&self, tokens: &[Token], index: usize) -> bool {
        let Some(token) = tokens.get(index) else {
            return false;
        };
        if !token.is_devanagari_word() {
            return false;
        }
        let word = token.surface.as_str();
        match self {
            RulePattern::EndsWithSuffix(s) => word.len() > s.len() && word.ends_with(s.as_str()),
            RulePattern::ContainsToken(w) => word == w,
            RulePattern::TokenFollows(first, second) => {
                if index == 0 {
                    return false;
                }
                let prev = &tokens[index - 1];
                if !prev.is_word() {
                    return false;
                }
                let ok = |want: &Option<String>, got: &str| want.as_deref().is_none_or(|w| w == got);
                ok(first, &prev.surface) && ok(second, word)
            }
        }
    }
}

impl fmt::Display for RulePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RulePattern::EndsWithSuffix(s) | RulePattern::ContainsToken(s) => f.write_str(s),
            RulePattern::TokenFollows(a, b) => write!(
                f,
                "{} {}",
                a.as_deref().unwrap_or("*"),
                b.as_deref().unwrap_or("*")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub id: String,
    pub pattern: RulePattern,
    pub language: Language,
    pub priority: u32,
    /// Free-text label of the linguistic feature the rule encodes.
    pub feature_ref: String,
}

impl Rule {
    pub fn weight(&self) -> u64 {
        1 + u64::from(self.priority)
    }
}

/// Rules ordered by descending priority; file order within equal priority.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(mut rules: Vec<Rule>) -> Result<Self> {
        let mut seen = HashSet::new();
        for rule in &rules {
            if !seen.insert(rule.id.clone()) {
                return Err(LidError::Integrity(format!("duplicate rule id `{}`", rule.id)));
            }
        }
        rules.sort_by_key(|r| std::cmp::Reverse(r.priority));
        Ok(RuleSet { rules })
    }

    pub fn default_rules() -> Self {
        Self::read_from(DEFAULT_RULES.as_bytes(), "default_rules.tsv")
            .expect("bundled rule file is valid")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Format: `<id>\t<ENDS|CONTAINS|FOLLOWS>\t<pattern>\t<hin|mag>\t<priority>`
    /// with an optional sixth feature-label column. `#` lines are comments.
    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| LidError::parse(source, lineno, e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if !(5..=6).contains(&fields.len()) {
                return Err(LidError::parse(
                    source,
                    lineno,
                    format!("expected 5 tab-separated fields, found {}", fields.len()),
                ));
            }
            let err = |m: String| LidError::parse(source, lineno, m);
            let id = fields[0];
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                return Err(err(format!("invalid rule id `{id}`")));
            }
            if !seen.insert(id.to_string()) {
                return Err(err(format!("duplicate rule id `{id}`")));
            }
            let pattern = RulePattern::parse(fields[1], fields[2]).map_err(err)?;
            let language = fields[3]
                .parse::<Language>()
                .map_err(|e| LidError::parse(source, lineno, e.to_string()))?;
            let priority = fields[4]
                .parse::<u32>()
                .map_err(|_| LidError::parse(source, lineno, format!("invalid priority `{}`", fields[4])))?;
            rules.push(Rule {
                id: id.to_string(),
                pattern,
                language,
                priority,
                feature_ref: fields.get(5).unwrap_or(&"").to_string(),
            });
        }
        RuleSet::new(rules)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# id\tkind\tpattern\tlang\tpriority\tfeature")?;
        for r in &self.rules {
            write!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.id,
                r.pattern.kind(),
                r.pattern,
                r.language.tag(),
                r.priority
            )?;
            if !r.feature_ref.is_empty() {
                write!(out, "\t{}", r.feature_ref)?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| LidError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| LidError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(tsv::open(path)?, &path.display().to_string())
    }

    /// Evidence from the rules of `language` that fire at `tokens[index]`.
    pub fn evidence_at(&self, tokens: &[Token], index: usize, language: Language) -> Vec<Evidence> {
        self.rules
            .iter()
            .filter(|r| r.language == language && r.pattern.matches_at(tokens, index))
            .map(|r| Evidence::rule(r, index))
            .collect()
    }
}

pub fn load_rules(path: &Path) -> Result<RuleSet> {
    RuleSet::load(path)
}

/// Every rule against every token, in token order then rule order.
pub fn apply_rules(tokens: &[Token], ruleset: &RuleSet) -> Vec<Evidence> {
    let mut out = Vec::new();
    for index in 0..tokens.len() {
        for rule in &ruleset.rules {
            if rule.pattern.matches_at(tokens, index) {
                out.push(Evidence::rule(rule, index));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EvidenceSource {
    UnigramLex,
    MultiwordLex,
    SuffixRule,
    SuffixTable,
}

impl EvidenceSource {
    pub fn is_lexical(self) -> bool {
        matches!(self, EvidenceSource::UnigramLex | EvidenceSource::MultiwordLex)
    }
}

/// One piece of language evidence in a verdict trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Evidence {
    pub language: Language,
    pub source: EvidenceSource,
    pub weight: u64,
    /// Matched word, word group, suffix, or rule id with its pattern.
    pub detail: String,
    /// Corpus frequency behind lexical and suffix-table evidence; 0 for rules.
    pub frequency: u64,
    /// Index of the first token the evidence covers.
    pub token_index: usize,
}

impl Evidence {
    fn rule(rule: &Rule, token_index: usize) -> Self {
        Evidence {
            language: rule.language,
            source: EvidenceSource::SuffixRule,
            weight: rule.weight(),
            detail: format!("{}:{}", rule.id, rule.pattern),
            frequency: 0,
            token_index,
        }
    }
}
