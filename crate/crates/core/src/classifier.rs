//! The identification cascade: script gate, lexicon stage, suffix/rule
//! stage (Magahi first, per token), fallback.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LidError, Result};
use crate::lang::{Label, Language};
use crate::lexicon::{NgramDictionary, UnigramLexicon};
use crate::suffixrules::{Evidence, EvidenceSource, RuleSet, SuffixTable};
use crate::textcore::{detect_script, detokenize, normalize, normalize_bytes, tokenize, Token};
use crate::tsv;

pub const UNIGRAMS_FILE: &str = "unigrams.tsv";
pub const NGRAMS_FILE: &str = "ngrams.tsv";
pub const SUFFIXES_FILE: &str = "suffixes.tsv";
pub const RULES_FILE: &str = "rules.tsv";
pub const THRESHOLDS_FILE: &str = "thresholds.tsv";

/// File name of a per-language resource, e.g. `mag.unigrams.tsv`.
pub fn resource_file(language: Language, kind: &str) -> String {
    format!("{}.{kind}", language.tag())
}

/// The eight files a model directory must hold.
pub fn model_files() -> Vec<String> {
    let mut files = Vec::new();
    for lang in Language::ALL {
        for kind in [UNIGRAMS_FILE, NGRAMS_FILE, SUFFIXES_FILE] {
            files.push(resource_file(lang, kind));
        }
    }
    files.push(RULES_FILE.to_string());
    files.push(THRESHOLDS_FILE.to_string());
    files
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Minimum share of Devanagari letter tokens to pass the script gate.
    pub min_devanagari_fraction: f64,
    /// Score difference that must be exceeded to decide a language.
    pub decision_margin: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_devanagari_fraction: 0.5,
            decision_margin: 0.0,
        }
    }
}

impl Thresholds {
    pub fn new(min_devanagari_fraction: f64, decision_margin: f64) -> Result<Self> {
        let t = Thresholds {
            min_devanagari_fraction,
            decision_margin,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.min_devanagari_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(LidError::Config(format!(
                "min_devanagari_fraction must be in (0, 1], got {f}"
            )));
        }
        if !(self.decision_margin >= 0.0 && self.decision_margin.is_finite()) {
            return Err(LidError::Config(format!(
                "decision_margin must be a non-negative number, got {}",
                self.decision_margin
            )));
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "min_devanagari_fraction\t{}", self.min_devanagari_fraction)?;
        writeln!(out, "decision_margin\t{}", self.decision_margin)?;
        out.flush()
    }

    /// `key<TAB>value` lines; missing keys keep their defaults.
    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut t = Thresholds::default();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| LidError::parse(source, lineno, e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| LidError::parse(source, lineno, "expected `<key>\\t<value>`"))?;
            let value: f64 = value
                .parse()
                .map_err(|_| LidError::parse(source, lineno, format!("non-numeric value `{value}`")))?;
            match key {
                "min_devanagari_fraction" => t.min_devanagari_fraction = value,
                "decision_margin" => t.decision_margin = value,
                other => {
                    return Err(LidError::parse(source, lineno, format!("unknown key `{other}`")))
                }
            }
        }
        t.validate()
            .map_err(|e| LidError::parse(source, 0, e.to_string()))?;
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| LidError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| LidError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(tsv::open(path)?, &path.display().to_string())
    }
}

/// Lexicon, word-group dictionary and suffix table for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageResources {
    pub unigrams: UnigramLexicon,
    pub ngrams: NgramDictionary,
    pub suffixes: SuffixTable,
}

impl LanguageResources {
    pub fn empty(language: Language) -> Self {
        LanguageResources {
            unigrams: UnigramLexicon::empty(language),
            ngrams: NgramDictionary::empty(language),
            suffixes: SuffixTable::empty(language),
        }
    }

    fn check(&self, language: Language) -> Result<()> {
        let tags = [
            ("unigram lexicon", self.unigrams.language()),
            ("n-gram dictionary", self.ngrams.language()),
            ("suffix table", self.suffixes.language()),
        ];
        for (what, tag) in tags {
            if tag != language {
                return Err(LidError::Integrity(format!(
                    "{what} tagged `{tag}` used as `{language}` resource"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    hindi: LanguageResources,
    magahi: LanguageResources,
    rules: RuleSet,
    thresholds: Thresholds,
}

impl Model {
    pub fn new(
        hindi: LanguageResources,
        magahi: LanguageResources,
        rules: RuleSet,
        thresholds: Thresholds,
    ) -> Result<Self> {
        hindi.check(Language::Hindi)?;
        magahi.check(Language::Magahi)?;
        thresholds.validate()?;
        Ok(Model {
            hindi,
            magahi,
            rules,
            thresholds,
        })
    }

    pub fn resources(&self, language: Language) -> &LanguageResources {
        match language {
            Language::Hindi => &self.hindi,
            Language::Magahi => &self.magahi,
        }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Result<Self> {
        thresholds.validate()?;
        self.thresholds = thresholds;
        Ok(self)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let missing: Vec<String> = model_files()
            .into_iter()
            .filter(|f| !dir.join(f).is_file())
            .collect();
        if !missing.is_empty() {
            return Err(LidError::io(
                dir,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("model directory is missing {}", missing.join(", ")),
                ),
            ));
        }
        let load_lang = |lang: Language| -> Result<LanguageResources> {
            Ok(LanguageResources {
                unigrams: UnigramLexicon::load(&dir.join(resource_file(lang, UNIGRAMS_FILE)))?,
                ngrams: NgramDictionary::load(&dir.join(resource_file(lang, NGRAMS_FILE)))?,
                suffixes: SuffixTable::load(&dir.join(resource_file(lang, SUFFIXES_FILE)))?,
            })
        };
        Model::new(
            load_lang(Language::Hindi)?,
            load_lang(Language::Magahi)?,
            RuleSet::load(&dir.join(RULES_FILE))?,
            Thresholds::load(&dir.join(THRESHOLDS_FILE))?,
        )
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| LidError::io(dir, e))?;
        for lang in Language::ALL {
            let res = self.resources(lang);
            res.unigrams.save(&dir.join(resource_file(lang, UNIGRAMS_FILE)))?;
            res.ngrams.save(&dir.join(resource_file(lang, NGRAMS_FILE)))?;
            res.suffixes.save(&dir.join(resource_file(lang, SUFFIXES_FILE)))?;
        }
        self.rules.save(&dir.join(RULES_FILE))?;
        self.thresholds.save(&dir.join(THRESHOLDS_FILE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stage {
    ScriptGate,
    LexiconStage,
    SuffixStage,
    Fallback,
}

impl Stage {
    pub const ALL: [Stage; 4] = [
        Stage::ScriptGate,
        Stage::LexiconStage,
        Stage::SuffixStage,
        Stage::Fallback,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Stage::ScriptGate => "script_gate",
            Stage::LexiconStage => "lexicon",
            Stage::SuffixStage => "suffix",
            Stage::Fallback => "fallback",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Stage {
    type Err = LidError;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.tag() == s)
            .ok_or_else(|| LidError::Input(format!("unknown stage `{s}`")))
    }
}

/// Per-language score totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Scores {
    pub hindi: u64,
    pub magahi: u64,
}

impl Scores {
    pub fn get(&self, language: Language) -> u64 {
        match language {
            Language::Hindi => self.hindi,
            Language::Magahi => self.magahi,
        }
    }

    fn add(&mut self, language: Language, weight: u64) {
        match language {
            Language::Hindi => self.hindi += weight,
            Language::Magahi => self.magahi += weight,
        }
    }

    pub fn from_evidence<'a>(evidence: impl IntoIterator<Item = &'a Evidence>) -> Self {
        let mut s = Scores::default();
        for e in evidence {
            s.add(e.language, e.weight);
        }
        s
    }

    pub fn max(&self) -> u64 {
        self.hindi.max(self.magahi)
    }

    /// The strictly higher-scoring language, if any.
    pub fn leader(&self) -> Option<Language> {
        match self.hindi.cmp(&self.magahi) {
            std::cmp::Ordering::Greater => Some(Language::Hindi),
            std::cmp::Ordering::Less => Some(Language::Magahi),
            std::cmp::Ordering::Equal => None,
        }
    }

    fn gap(&self) -> u64 {
        self.hindi.abs_diff(self.magahi)
    }

    /// Leader whose lead exceeds `margin`.
    fn decided(&self, margin: f64) -> Option<Language> {
        if self.max() > 0 && self.gap() as f64 > margin {
            self.leader()
        } else {
            None
        }
    }
}

impl std::ops::Add for Scores {
    type Output = Scores;

    fn add(self, rhs: Scores) -> Scores {
        Scores {
            hindi: self.hindi + rhs.hindi,
            magahi: self.magahi + rhs.magahi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Label,
    pub stage: Stage,
    pub scores: Scores,
    pub evidence: Vec<Evidence>,
    /// Input rebuilt from its tokens.
    pub echo: String,
}

impl Verdict {
    /// `<label>\t<stage>\t<score_hin>\t<score_mag>\t<echo>`
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.label.tag(),
            self.stage.tag(),
            self.scores.hindi,
            self.scores.magahi,
            self.echo
        )
    }
}

/// Greedy left-to-right longest match, run independently for each
/// language: trigram (weight 3), bigram (2), else unigram (1). Only
/// Devanagari word tokens are considered.
pub fn score_lexicon_stage(tokens: &[Token], model: &Model) -> (Scores, Vec<Evidence>) {
    let mut evidence = Vec::new();
    for lang in Language::ALL {
        let res = model.resources(lang);
        let mut i = 0;
        while i < tokens.len() {
            if !tokens[i].is_devanagari_word() {
                i += 1;
                continue;
            }
            let multi = res
                .ngrams
                .match_at(tokens, i)
                .expect("index is within the token sequence");
            if multi.is_match() {
                let words: Vec<&str> = tokens[i..i + multi.matched_length]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect();
                evidence.push(Evidence {
                    language: lang,
                    source: EvidenceSource::MultiwordLex,
                    weight: multi.matched_length as u64,
                    detail: words.join(" "),
                    frequency: multi.frequency,
                    token_index: i,
                });
                i += multi.matched_length;
                continue;
            }
            let uni = res.unigrams.lookup(&tokens[i].surface);
            if uni.is_match() {
                evidence.push(Evidence {
                    language: lang,
                    source: EvidenceSource::UnigramLex,
                    weight: 1,
                    detail: tokens[i].surface.clone(),
                    frequency: uni.frequency,
                    token_index: i,
                });
            }
            i += 1;
        }
    }
    evidence.sort_by_key(|e| (e.token_index, e.language));
    (Scores::from_evidence(&evidence), evidence)
}

/// Rule and suffix-table evidence of one language for `tokens[index]`.
/// Suffixes found in both languages' tables carry no evidence.
pub fn token_suffix_evidence(
    tokens: &[Token],
    index: usize,
    language: Language,
    model: &Model,
) -> Vec<Evidence> {
    let mut out = model.rules().evidence_at(tokens, index, language);
    let own = &model.resources(language).suffixes;
    let rival = &model.resources(language.other()).suffixes;
    if let Some(m) = own.match_word(&tokens[index].surface) {
        if !rival.contains(&m.suffix) {
            out.push(Evidence {
                language,
                source: EvidenceSource::SuffixTable,
                weight: 1,
                detail: m.suffix,
                frequency: m.frequency,
                token_index: index,
            });
        }
    }
    out
}

/// Per token: Magahi rules and suffixes first; Hindi only when the token
/// produced no Magahi evidence.
pub fn score_suffix_stage(tokens: &[Token], model: &Model) -> (Scores, Vec<Evidence>) {
    let mut evidence = Vec::new();
    for index in 0..tokens.len() {
        if !tokens[index].is_devanagari_word() {
            continue;
        }
        let magahi = token_suffix_evidence(tokens, index, Language::Magahi, model);
        if magahi.is_empty() {
            evidence.extend(token_suffix_evidence(tokens, index, Language::Hindi, model));
        } else {
            evidence.extend(magahi);
        }
    }
    (Scores::from_evidence(&evidence), evidence)
}

/// Σ weight × frequency over lexical evidence, per language.
fn frequency_weight(evidence: &[Evidence], language: Language) -> u128 {
    evidence
        .iter()
        .filter(|e| e.language == language && e.source.is_lexical())
        .map(|e| u128::from(e.weight) * u128::from(e.frequency))
        .sum()
}

pub fn classify(text: &str, model: &Model) -> Verdict {
    let normalized = normalize(text);
    classify_normalized(normalized, model)
}

/// Like [`classify`] on raw bytes; fails on invalid UTF-8.
pub fn classify_bytes(bytes: &[u8], model: &Model) -> Result<Verdict> {
    Ok(classify_normalized(normalize_bytes(bytes)?, model))
}

fn classify_normalized(text: String, model: &Model) -> Verdict {
    let thresholds = model.thresholds();
    let tokens = tokenize(&text);
    let echo = detokenize(&tokens, &text).expect("tokens come from this text");
    let verdict = |label, stage, scores, evidence| Verdict {
        label,
        stage,
        scores,
        evidence,
        echo: echo.clone(),
    };

    let report = detect_script(&text);
    if report.devanagari_fraction < thresholds.min_devanagari_fraction {
        return verdict(Label::Other, Stage::ScriptGate, Scores::default(), Vec::new());
    }

    let (lex_scores, mut evidence) = score_lexicon_stage(&tokens, model);
    if let Some(lang) = lex_scores.decided(thresholds.decision_margin) {
        return verdict(lang.into(), Stage::LexiconStage, lex_scores, evidence);
    }

    let (suffix_scores, suffix_evidence) = score_suffix_stage(&tokens, model);
    evidence.extend(suffix_evidence);
    let scores = lex_scores + suffix_scores;
    if scores.max() == 0 {
        return verdict(Label::Other, Stage::Fallback, scores, evidence);
    }
    if let Some(lang) = scores.decided(thresholds.decision_margin) {
        return verdict(lang.into(), Stage::SuffixStage, scores, evidence);
    }
    let label = if scores.gap() == 0 {
        let hin = frequency_weight(&evidence, Language::Hindi);
        let mag = frequency_weight(&evidence, Language::Magahi);
        match hin.cmp(&mag) {
            std::cmp::Ordering::Greater => Label::Hindi,
            std::cmp::Ordering::Less => Label::Magahi,
            std::cmp::Ordering::Equal => Label::Other,
        }
    } else {
        Label::Other
    };
    verdict(label, Stage::SuffixStage, scores, evidence)
}

/// One result per line, in input order; lines are classified in parallel.
pub fn classify_batch<S>(lines: &[S], model: &Model) -> Vec<Result<Verdict>>
where
    S: AsRef<[u8]> + Sync,
{
    lines
        .par_iter()
        .map(|line| classify_bytes(line.as_ref(), model))
        .collect()
}

/// Number of verdicts decided at each stage.
pub fn stage_histogram<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> BTreeMap<Stage, u64> {
    let mut counts = BTreeMap::new();
    for v in verdicts {
        *counts.entry(v.stage).or_insert(0) += 1;
    }
    counts
}
