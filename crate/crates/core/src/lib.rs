//! Rule-based identification of Hindi and Magahi text.
//!
//! Input goes through a cascade: a Devanagari script gate, simultaneous
//! lookup in per-language word and word-group lexicons, then a per-token
//! suffix/rule stage that checks Magahi before Hindi. The crate also
//! builds every model resource (frequency lexicons, 2–3 word dictionaries,
//! suffix tables) from raw one-sentence-per-line corpora and evaluates a
//! model against a labeled test set.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod evalharness;
pub mod lang;
pub mod lexicon;
pub mod suffixrules;
pub mod textcore;
mod tsv;

pub use classifier::{
    classify, classify_batch, classify_bytes, score_lexicon_stage, score_suffix_stage,
    LanguageResources, Model, Scores, Stage, Thresholds, Verdict,
};
pub use error::{LidError, Result};
pub use evalharness::{
    categorize_errors, evaluate, parse_testset, ErrorCategory, ErrorRecord, EvalReport,
    LabeledExample,
};
pub use lang::{Label, Language};
pub use lexicon::{
    build_ngram_dictionary, build_unigram_lexicon, lookup_unigram, match_multiword, MatchResult,
    MatchSource, NgramDictionary, UnigramLexicon,
};
pub use suffixrules::{
    apply_rules, extract_suffixes, load_rules, match_suffix, shared_suffix_fraction, Evidence,
    EvidenceSource, Rule, RulePattern, RuleSet, SuffixMatch, SuffixOverlap, SuffixTable,
};
pub use textcore::{
    detect_script, detokenize, grapheme_split, normalize, normalize_bytes, tokenize, ScriptClass,
    ScriptReport, Token,
};
