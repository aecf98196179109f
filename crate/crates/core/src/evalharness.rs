//! Accuracy, confusion matrix and error taxonomy over a labeled test set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{classify, token_suffix_evidence, Model, Stage, Verdict};
use crate::error::{LidError, Result};
use crate::lang::{Label, Language};
use crate::textcore::{normalize, tokenize};

/// Sentences of at most this many words are "short".
pub const SHORT_SENTENCE_MAX_WORDS: usize = 3;

/// Annotation marking a gold sentence as containing a typo.
pub const TYPO_ANNOTATION: &str = "typo";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledExample {
    pub text: String,
    pub gold: Label,
    /// Free-form tags from an optional third column, e.g. `typo`.
    pub annotations: Vec<String>,
}

impl LabeledExample {
    pub fn new(gold: Label, text: impl Into<String>) -> Result<Self> {
        let text = normalize(&text.into());
        if text.trim().is_empty() {
            return Err(LidError::Input("labeled example text is empty".into()));
        }
        Ok(LabeledExample {
            text,
            gold,
            annotations: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ErrorCategory {
    NamedEntity,
    TypoSpelling,
    ShortSentence,
    BorrowedLexicon,
    Uncategorized,
}

impl ErrorCategory {
    pub fn tag(self) -> &'static str {
        match self {
            ErrorCategory::NamedEntity => "named_entity",
            ErrorCategory::TypoSpelling => "typo_spelling",
            ErrorCategory::ShortSentence => "short_sentence",
            ErrorCategory::BorrowedLexicon => "borrowed_lexicon",
            ErrorCategory::Uncategorized => "uncategorized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub example: LabeledExample,
    pub verdict: Verdict,
    pub categories: Vec<ErrorCategory>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[gold][predicted]`, indexed by [`Label::index`].
    pub confusion: [[u64; 3]; 3],
    pub per_stage_counts: BTreeMap<Stage, u64>,
    pub errors: Vec<ErrorRecord>,
}

impl EvalReport {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..3).map(|i| self.confusion[i][i]).sum()
    }

    pub fn cell(&self, gold: Label, predicted: Label) -> u64 {
        self.confusion[gold.index()][predicted.index()]
    }

    /// Machine-readable sections: accuracy, confusion cells, stage counts,
    /// error rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# accuracy");
        let _ = writeln!(out, "accuracy\t{:.6}\t{}\t{}", self.accuracy, self.correct(), self.total());
        let _ = writeln!(out, "# confusion\tgold\tpredicted\tcount");
        for gold in Label::ALL {
            for pred in Label::ALL {
                let _ = writeln!(out, "confusion\t{gold}\t{pred}\t{}", self.cell(gold, pred));
            }
        }
        let _ = writeln!(out, "# stages");
        for stage in Stage::ALL {
            let n = self.per_stage_counts.get(&stage).copied().unwrap_or(0);
            let _ = writeln!(out, "stage\t{stage}\t{n}");
        }
        let _ = writeln!(out, "# errors\tgold\tpredicted\tstage\tcategories\ttext");
        for e in &self.errors {
            let tags: Vec<&str> = e.categories.iter().map(|c| c.tag()).collect();
            let _ = writeln!(
                out,
                "error\t{}\t{}\t{}\t{}\t{}",
                e.example.gold,
                e.verdict.label,
                e.verdict.stage,
                tags.join(","),
                e.example.text
            );
        }
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Accuracy: {:.2}% ({} of {} sentences)",
            self.accuracy * 100.0,
            self.correct(),
            self.total()
        );
        let _ = writeln!(out, "Error rate: {:.2}%", (1.0 - self.accuracy) * 100.0);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<12}{:>8}{:>8}{:>8}", "gold \\ pred", "hin", "mag", "other");
        for gold in Label::ALL {
            let _ = writeln!(
                out,
                "{:<12}{:>8}{:>8}{:>8}",
                gold.tag(),
                self.cell(gold, Label::Hindi),
                self.cell(gold, Label::Magahi),
                self.cell(gold, Label::Other)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Decisions by stage:");
        for stage in Stage::ALL {
            let n = self.per_stage_counts.get(&stage).copied().unwrap_or(0);
            let _ = writeln!(out, "  {:<12}{n:>6}", stage.tag());
        }
        if !self.errors.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "Errors ({}):", self.errors.len());
            for e in &self.errors {
                let tags: Vec<&str> = e.categories.iter().map(|c| c.tag()).collect();
                let _ = writeln!(
                    out,
                    "  [{} -> {}] {}  ({})",
                    e.example.gold,
                    e.verdict.label,
                    e.example.text,
                    tags.join(", ")
                );
            }
        }
        out
    }
}

/// Parses a test set. Accepted line shapes:
/// - `<gold>\t<sentence>`
/// - `<gold>\t<sentence>\t<annotations,comma,separated>`
/// - a verdict line `<label>\t<stage>\t<score_hin>\t<score_mag>\t<echo>`,
///   read as gold label plus sentence.
///
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_testset<R: BufRead>(reader: R, source: &str) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let err = |m: String| LidError::parse(source, lineno, m);
        let line = line.map_err(|e| err(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (gold, text, annotations) = match fields.len() {
            2 => (fields[0], fields[1], None),
            3 => (fields[0], fields[1], Some(fields[2])),
            5 => {
                fields[1].parse::<Stage>().map_err(|e| err(e.to_string()))?;
                for score in &fields[2..4] {
                    score
                        .parse::<u64>()
                        .map_err(|_| err(format!("non-numeric score `{score}`")))?;
                }
                (fields[0], fields[4], None)
            }
            n => return Err(err(format!("expected 2, 3 or 5 tab-separated fields, found {n}"))),
        };
        let gold: Label = gold.parse().map_err(|e: LidError| err(e.to_string()))?;
        let mut example = LabeledExample::new(gold, text).map_err(|e| err(e.to_string()))?;
        if let Some(a) = annotations {
            example.annotations = a
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect();
        }
        out.push(example);
    }
    Ok(out)
}

/// Classifies every example (in parallel) and assembles the report.
pub fn evaluate(testset: &[LabeledExample], model: &Model) -> Result<EvalReport> {
    if testset.is_empty() {
        return Err(LidError::Precondition("test set is empty".into()));
    }
    let verdicts: Vec<Verdict> = testset.par_iter().map(|ex| classify(&ex.text, model)).collect();

    let mut confusion = [[0u64; 3]; 3];
    let mut per_stage_counts = BTreeMap::new();
    let mut errors = Vec::new();
    for (example, verdict) in testset.iter().zip(verdicts) {
        confusion[example.gold.index()][verdict.label.index()] += 1;
        *per_stage_counts.entry(verdict.stage).or_insert(0) += 1;
        if verdict.label != example.gold {
            errors.push((example.clone(), verdict));
        }
    }
    let correct: u64 = (0..3).map(|i| confusion[i][i]).sum();
    Ok(EvalReport {
        accuracy: correct as f64 / testset.len() as f64,
        confusion,
        per_stage_counts,
        errors: categorize_errors(errors, model),
    })
}

/// Tags each misclassification with the mechanical error categories:
/// short sentence (≤ 3 words), borrowed lexicon (a word known to both
/// lexicons), named entity (a Devanagari word unknown to both lexicons
/// and silent in both suffix stages), typo (annotation only).
pub fn categorize_errors(errors: Vec<(LabeledExample, Verdict)>, model: &Model) -> Vec<ErrorRecord> {
    errors
        .into_iter()
        .map(|(example, verdict)| {
            let categories = categories_for(&example, model);
            ErrorRecord {
                example,
                verdict,
                categories,
            }
        })
        .collect()
}

fn categories_for(example: &LabeledExample, model: &Model) -> Vec<ErrorCategory> {
    let tokens = tokenize(&normalize(&example.text));
    let hin = &model.resources(Language::Hindi).unigrams;
    let mag = &model.resources(Language::Magahi).unigrams;

    let named_entity = tokens.iter().enumerate().any(|(i, t)| {
        t.is_devanagari_word()
            && !hin.contains(&t.surface)
            && !mag.contains(&t.surface)
            && Language::ALL
                .iter()
                .all(|&lang| token_suffix_evidence(&tokens, i, lang, model).is_empty())
    });
    let typo = example.annotations.iter().any(|a| a == TYPO_ANNOTATION);
    let words = tokens.iter().filter(|t| t.is_word()).count();
    let borrowed = tokens
        .iter()
        .any(|t| t.is_devanagari_word() && hin.contains(&t.surface) && mag.contains(&t.surface));

    let mut cats = Vec::new();
    if named_entity {
        cats.push(ErrorCategory::NamedEntity);
    }
    if typo {
        cats.push(ErrorCategory::TypoSpelling);
    }
    if words <= SHORT_SENTENCE_MAX_WORDS {
        cats.push(ErrorCategory::ShortSentence);
    }
    if borrowed {
        cats.push(ErrorCategory::BorrowedLexicon);
    }
    if cats.is_empty() {
        cats.push(ErrorCategory::Uncategorized);
    }
    cats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{LanguageResources, Thresholds};
    use crate::lexicon::{build_ngram_dictionary, build_unigram_lexicon};
    use crate::suffixrules::{extract_suffixes, RuleSet};

    fn res(lang: Language, corpus: &[&str]) -> LanguageResources {
        LanguageResources {
            unigrams: build_unigram_lexicon(corpus, lang),
            ngrams: build_ngram_dictionary(corpus, lang, 3).unwrap(),
            suffixes: extract_suffixes(corpus, lang, 3).unwrap(),
        }
    }

    fn model() -> Model {
        Model::new(
            res(Language::Hindi, &["राम ने सीता को आम दिया", "मात्र पचास रुपये"]),
            res(Language::Magahi, &["आउ ऊ गेल", "उज्जर बाल", "मात्र"]),
            RuleSet::default_rules(),
            Thresholds::default(),
        )
        .unwrap()
    }

    fn ex(gold: Label, text: &str) -> LabeledExample {
        LabeledExample::new(gold, text).unwrap()
    }

    #[test]
    fn perfect_and_single_error() {
        let m = model();
        let set = vec![ex(Label::Magahi, "आउ ऊ गेल"), ex(Label::Other, "hello world")];
        let r = evaluate(&set, &m).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.cell(Label::Magahi, Label::Magahi), 1);
        assert_eq!(r.cell(Label::Other, Label::Other), 1);
        assert!(r.errors.is_empty());

        let set = vec![ex(Label::Hindi, "आउ ऊ गेल")];
        let r = evaluate(&set, &m).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.cell(Label::Hindi, Label::Magahi), 1);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.total(), 1);
    }

    #[test]
    fn empty_testset_rejected() {
        assert!(matches!(evaluate(&[], &model()), Err(LidError::Precondition(_))));
    }

    #[test]
    fn short_and_borrowed() {
        let m = model();
        let v = classify("मात्र पचास रूपड़या।", &m);
        let out = categorize_errors(vec![(ex(Label::Magahi, "मात्र पचास रूपड़या।"), v)], &m);
        assert!(out[0].categories.contains(&ErrorCategory::ShortSentence));
        assert!(out[0].categories.contains(&ErrorCategory::BorrowedLexicon));
        assert!(categorize_errors(Vec::new(), &m).is_empty());
    }

    #[test]
    fn named_entity_and_typo() {
        let m = model();
        let text = "राम ने सीता को आम दिया चंपत";
        let mut example = ex(Label::Magahi, text);
        example.annotations.push("typo".into());
        let out = categorize_errors(vec![(example, classify(text, &m))], &m);
        assert_eq!(
            out[0].categories,
            vec![ErrorCategory::NamedEntity, ErrorCategory::TypoSpelling]
        );
        let text = "राम ने सीता को आम दिया";
        let out = categorize_errors(vec![(ex(Label::Magahi, text), classify(text, &m))], &m);
        assert_eq!(out[0].categories, vec![ErrorCategory::Uncategorized]);
    }

    #[test]
    fn testset_parsing() {
        let src = "# comment\nhin\tराम गया\nmag\tआउ ऊ गेल\ttypo, x\n\nother\tscript_gate\t0\t0\thello\n";
        let set = parse_testset(src.as_bytes(), "t").unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set[1].annotations, vec!["typo", "x"]);
        assert_eq!(set[2].gold, Label::Other);
        assert_eq!(set[2].text, "hello");

        for bad in ["xx\tराम", "hin", "hin\ta\tb\tc", "mag\t  ", "hin\tbogus\t0\t0\tराम"] {
            match parse_testset(format!("hin\tराम\n{bad}\n").as_bytes(), "t") {
                Err(LidError::Parse { line, .. }) => assert_eq!(line, 2, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn report_sections() {
        let m = model();
        let set = vec![ex(Label::Hindi, "आउ ऊ गेल"), ex(Label::Magahi, "आउ ऊ गेल")];
        let r = evaluate(&set, &m).unwrap();
        let tsv = r.to_tsv();
        assert!(tsv.contains("accuracy\t0.500000\t1\t2"));
        assert_eq!(tsv.lines().filter(|l| l.starts_with("confusion\t")).count(), 9);
        assert!(tsv.contains("error\thin\tmag\tlexicon\t"));
        assert!(r.to_human().starts_with("Accuracy: 50.00%"));
    }
}
