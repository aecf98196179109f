//! Text plumbing shared by every stage: normalization, script classes,
//! word tokenization with position-preserving spans, and grapheme clusters.

use std::collections::BTreeMap;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{LidError, Result};

const ZWNJ: char = '\u{200C}';
const ZWJ: char = '\u{200D}';

/// Script class of a single code point, and by majority vote, of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ScriptClass {
    Devanagari,
    Latin,
    Digit,
    Punctuation,
    OtherScript,
}

impl ScriptClass {
    /// Letter classes take part in the majority vote; digits and
    /// punctuation are script-neutral.
    pub fn is_letter(self) -> bool {
        matches!(
            self,
            ScriptClass::Devanagari | ScriptClass::Latin | ScriptClass::OtherScript
        )
    }
}

/// Classifies one code point. Total over `char`.
pub fn classify_char(c: char) -> ScriptClass {
    match c {
        '0'..='9' | '\u{0966}'..='\u{096F}' => ScriptClass::Digit,
        // danda, double danda, abbreviation sign
        '\u{0964}' | '\u{0965}' | '\u{0970}' => ScriptClass::Punctuation,
        '\u{0900}'..='\u{097F}' | '\u{A8E0}'..='\u{A8FF}' => ScriptClass::Devanagari,
        c if c.is_ascii_alphabetic() => ScriptClass::Latin,
        c if c.is_ascii() => ScriptClass::Punctuation,
        c if c.is_whitespace() => ScriptClass::Punctuation,
        c if c.is_numeric() => ScriptClass::Digit,
        '\u{00C0}'..='\u{024F}' | '\u{0300}'..='\u{036F}' | '\u{1E00}'..='\u{1EFF}' => {
            if c.is_alphabetic() || ('\u{0300}'..='\u{036F}').contains(&c) {
                ScriptClass::Latin
            } else {
                ScriptClass::Punctuation
            }
        }
        c if c.is_alphabetic() => ScriptClass::OtherScript,
        c if is_symbol_block(c) => ScriptClass::Punctuation,
        // combining marks and other non-alphabetic code points of other scripts
        _ => ScriptClass::OtherScript,
    }
}

fn is_symbol_block(c: char) -> bool {
    matches!(c,
        '\u{0080}'..='\u{00BF}'
        | '\u{00D7}' | '\u{00F7}'
        | '\u{2000}'..='\u{2BFF}'
        | '\u{2E00}'..='\u{2E7F}'
        | '\u{3000}'..='\u{303F}'
        | '\u{FE00}'..='\u{FE6F}'
        | '\u{FF00}'..='\u{FF0F}'
        | '\u{1F000}'..='\u{1FAFF}')
}

/// Majority class over the letters of `s`. Ties prefer Devanagari, then
/// Latin. Strings without letters are `Digit` if they hold a digit and
/// `Punctuation` otherwise.
pub fn majority_script(s: &str) -> ScriptClass {
    let (mut deva, mut latin, mut other, mut digits) = (0usize, 0usize, 0usize, 0usize);
    for c in s.chars() {
        match classify_char(c) {
            ScriptClass::Devanagari => deva += 1,
            ScriptClass::Latin => latin += 1,
            ScriptClass::OtherScript => other += 1,
            ScriptClass::Digit => digits += 1,
            ScriptClass::Punctuation => {}
        }
    }
    if deva + latin + other == 0 {
        return if digits > 0 {
            ScriptClass::Digit
        } else {
            ScriptClass::Punctuation
        };
    }
    if deva >= latin && deva >= other {
        ScriptClass::Devanagari
    } else if latin >= other {
        ScriptClass::Latin
    } else {
        ScriptClass::OtherScript
    }
}

/// A word or punctuation token with its code-point span in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    pub script: ScriptClass,
    /// Set for word tokens written in a script other than Devanagari.
    pub hidden: bool,
    /// Half-open `[start, end)` range in code points.
    pub span: (usize, usize),
}

impl Token {
    fn new(surface: String, start: usize, end: usize) -> Self {
        let script = majority_script(&surface);
        let hidden = script.is_letter() && script != ScriptClass::Devanagari;
        Token {
            surface,
            script,
            hidden,
            span: (start, end),
        }
    }

    pub fn is_punctuation(&self) -> bool {
        self.script == ScriptClass::Punctuation
    }

    /// Anything that is not punctuation counts as a word, hidden or not.
    pub fn is_word(&self) -> bool {
        !self.is_punctuation()
    }

    /// Word carrying Devanagari language evidence.
    pub fn is_devanagari_word(&self) -> bool {
        self.script == ScriptClass::Devanagari
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptReport {
    pub total_letter_tokens: usize,
    pub devanagari_fraction: f64,
    pub per_class_counts: BTreeMap<ScriptClass, usize>,
}

/// Canonical composition with ZWJ/ZWNJ removed.
pub fn normalize(text: &str) -> String {
    text.chars()
        .filter(|&c| c != ZWJ && c != ZWNJ)
        .nfc()
        .collect()
}

/// Decodes raw bytes and normalizes them.
pub fn normalize_bytes(bytes: &[u8]) -> Result<String> {
    match std::str::from_utf8(bytes) {
        Ok(text) => Ok(normalize(text)),
        Err(e) => Err(LidError::Decode {
            offset: e.valid_up_to(),
        }),
    }
}

/// Counts whitespace-separated tokens by majority script.
pub fn detect_script(text: &str) -> ScriptReport {
    let mut per_class_counts = BTreeMap::new();
    let mut letters = 0usize;
    let mut deva = 0usize;
    for word in text.split_whitespace() {
        let class = majority_script(word);
        *per_class_counts.entry(class).or_insert(0) += 1;
        if class.is_letter() {
            letters += 1;
            if class == ScriptClass::Devanagari {
                deva += 1;
            }
        }
    }
    let devanagari_fraction = if letters == 0 {
        0.0
    } else {
        deva as f64 / letters as f64
    };
    ScriptReport {
        total_letter_tokens: letters,
        devanagari_fraction,
        per_class_counts,
    }
}

/// Splits on whitespace and peels leading/trailing punctuation off each
/// chunk, one token per punctuation code point. Inner punctuation
/// (`है/हे`, `e-go`) stays inside the word.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        push_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn push_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let is_punct = |c: char| classify_char(c) == ScriptClass::Punctuation;
    let mut lo = start;
    while lo < end && is_punct(chars[lo]) {
        out.push(Token::new(chars[lo].to_string(), lo, lo + 1));
        lo += 1;
    }
    if lo == end {
        return;
    }
    let mut hi = end;
    while hi > lo && is_punct(chars[hi - 1]) {
        hi -= 1;
    }
    out.push(Token::new(chars[lo..hi].iter().collect(), lo, hi));
    for (k, &c) in chars[hi..end].iter().enumerate() {
        out.push(Token::new(c.to_string(), hi + k, hi + k + 1));
    }
}

/// Rebuilds the text from token spans, taking inter-token gaps from
/// `original`.
pub fn detokenize(tokens: &[Token], original: &str) -> Result<String> {
    let chars: Vec<char> = original.chars().collect();
    let mut out = String::with_capacity(original.len());
    let mut cursor = 0usize;
    for (idx, token) in tokens.iter().enumerate() {
        let (start, end) = token.span;
        if start < cursor || end <= start || end > chars.len() {
            return Err(LidError::Integrity(format!(
                "token {idx} span {start}..{end} out of range (cursor {cursor}, length {})",
                chars.len()
            )));
        }
        let source: String = chars[start..end].iter().collect();
        if source != token.surface {
            return Err(LidError::Integrity(format!(
                "token {idx} surface `{}` does not match source `{source}`",
                token.surface
            )));
        }
        out.extend(&chars[cursor..start]);
        out.push_str(&token.surface);
        cursor = end;
    }
    out.extend(&chars[cursor..]);
    Ok(out)
}

/// Extended grapheme clusters of a non-empty word.
pub fn grapheme_split(word: &str) -> Result<Vec<&str>> {
    if word.is_empty() {
        return Err(LidError::Precondition(
            "grapheme_split requires a non-empty word".into(),
        ));
    }
    Ok(word.graphemes(true).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn normalize_identity_and_empty() {
        assert_eq!(normalize("राम"), "राम");
        assert_eq!(normalize(""), "");
    }

    #[test]
    fn normalize_strips_joiners_only() {
        // क ् ZWNJ ष  -> क ् ष
        let input = "\u{0915}\u{094D}\u{200C}\u{0937}";
        let out = normalize(input);
        let cps: Vec<u32> = out.chars().map(|c| c as u32).collect();
        assert_eq!(cps, vec![0x0915, 0x094D, 0x0937]);
        assert_eq!(normalize("a\u{200D}b"), "ab");
    }

    #[test]
    fn normalize_composes() {
        // e + combining acute
        assert_eq!(normalize("e\u{0301}"), "\u{00E9}");
        // NFC keeps the nukta decomposed for composition-excluded letters
        assert_eq!(normalize("\u{0958}"), "\u{0915}\u{093C}");
    }

    #[test]
    fn normalize_bytes_reports_offset() {
        let mut bytes = "राम".as_bytes().to_vec();
        bytes.push(0xFF);
        match normalize_bytes(&bytes) {
            Err(LidError::Decode { offset }) => assert_eq!(offset, 9),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn char_classes() {
        assert_eq!(classify_char('क'), ScriptClass::Devanagari);
        assert_eq!(classify_char('\u{093F}'), ScriptClass::Devanagari);
        assert_eq!(classify_char('\u{A8F2}'), ScriptClass::Devanagari);
        assert_eq!(classify_char('।'), ScriptClass::Punctuation);
        assert_eq!(classify_char('॥'), ScriptClass::Punctuation);
        assert_eq!(classify_char('५'), ScriptClass::Digit);
        assert_eq!(classify_char('7'), ScriptClass::Digit);
        assert_eq!(classify_char('Q'), ScriptClass::Latin);
        assert_eq!(classify_char('é'), ScriptClass::Latin);
        assert_eq!(classify_char('“'), ScriptClass::Punctuation);
        assert_eq!(classify_char('অ'), ScriptClass::OtherScript);
        assert_eq!(classify_char('ب'), ScriptClass::OtherScript);
        assert_eq!(classify_char('\u{09CD}'), ScriptClass::OtherScript);
    }

    #[test]
    fn detect_script_fractions() {
        assert_eq!(detect_script("राम गया").devanagari_fraction, 1.0);
        assert_eq!(detect_script("hello world").devanagari_fraction, 0.0);
        let mixed = detect_script("राम went home");
        assert_eq!(mixed.total_letter_tokens, 3);
        assert_eq!(mixed.devanagari_fraction, 1.0 / 3.0);
        let empty = detect_script("");
        assert_eq!(empty.total_letter_tokens, 0);
        assert_eq!(empty.devanagari_fraction, 0.0);
        // digits and punctuation are not letter tokens
        let r = detect_script("राम 2019 ।");
        assert_eq!(r.total_letter_tokens, 1);
        assert_eq!(r.per_class_counts[&ScriptClass::Digit], 1);
    }

    #[test]
    fn tokenize_paper_sentence() {
        let tokens = tokenize("का हो रामौतार ।");
        assert_eq!(surfaces(&tokens), vec!["का", "हो", "रामौतार", "।"]);
        assert_eq!(tokens[3].script, ScriptClass::Punctuation);
        assert!(tokens.iter().all(|t| !t.hidden));
        assert_eq!(tokens[2].span, (6, 13));
    }

    #[test]
    fn tokenize_splits_attached_punctuation() {
        let tokens = tokenize("“गया।”");
        assert_eq!(surfaces(&tokens), vec!["“", "गया", "।", "”"]);
        let tokens = tokenize("है/हे,");
        assert_eq!(surfaces(&tokens), vec!["है/हे", ","]);
    }

    #[test]
    fn tokenize_hidden_flags() {
        assert!(tokenize("").is_empty());
        let tokens = tokenize("राम ABC गया");
        assert_eq!(tokens.len(), 3);
        assert_eq!(
            tokens.iter().map(|t| t.hidden).collect::<Vec<_>>(),
            vec![false, true, false]
        );
        let digits = tokenize("२०१९");
        assert_eq!(digits[0].script, ScriptClass::Digit);
        assert!(!digits[0].hidden);
        // stray Latin letter inside a Devanagari word
        assert!(!tokenize("रामx")[0].hidden);
    }

    #[test]
    fn detokenize_round_trip_and_errors() {
        let text = "का हो रामौतार ।";
        assert_eq!(detokenize(&tokenize(text), text).unwrap(), text);
        assert_eq!(detokenize(&[], "").unwrap(), "");
        let spaced = "  राम   गया।  ";
        assert_eq!(detokenize(&tokenize(spaced), spaced).unwrap(), spaced);

        let mut bad = tokenize(text);
        bad[3].span = (14, 40);
        assert!(matches!(
            detokenize(&bad, text),
            Err(LidError::Integrity(_))
        ));
    }

    #[test]
    fn grapheme_examples() {
        assert_eq!(grapheme_split("गेल").unwrap(), vec!["गे", "ल"]);
        assert_eq!(grapheme_split("क").unwrap(), vec!["क"]);
        assert_eq!(grapheme_split("आउ").unwrap(), vec!["आ", "उ"]);
        assert!(matches!(
            grapheme_split(""),
            Err(LidError::Precondition(_))
        ));
    }

    fn mixed_text() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "राम", "गया", "।", "॥", ",", "\"", "घरवा", "ABC", "x", "२०", "12", " ", "  ",
            "\t", "हे/है", "अ", "ि", "\u{200C}", "ক",
        ]);
        prop::collection::vec(pieces, 0..16).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn round_trip(raw in mixed_text()) {
            let text = normalize(&raw);
            let tokens = tokenize(&text);
            prop_assert_eq!(detokenize(&tokens, &text).unwrap(), text);
        }

        #[test]
        fn spans_increase_and_hidden_is_sound(raw in mixed_text()) {
            let text = normalize(&raw);
            let tokens = tokenize(&text);
            for pair in tokens.windows(2) {
                prop_assert!(pair[0].span.1 <= pair[1].span.0);
            }
            for t in &tokens {
                prop_assert!(!t.surface.is_empty());
                let has_letter = t.surface.chars().any(|c| classify_char(c).is_letter());
                prop_assert_eq!(
                    t.hidden,
                    has_letter && majority_script(&t.surface) != ScriptClass::Devanagari
                );
            }
        }

        #[test]
        fn grapheme_concat(word in "[\u{0900}-\u{097F}a-z]{1,12}") {
            let parts = grapheme_split(&word).unwrap();
            prop_assert_eq!(parts.concat(), word);
        }

        #[test]
        fn devanagari_token_never_lowers_fraction(raw in mixed_text()) {
            let text = normalize(&raw);
            let before = detect_script(&text).devanagari_fraction;
            let after = detect_script(&format!("{text} गेल")).devanagari_fraction;
            prop_assert!(after >= before);
        }
    }
}
