use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::LidError;

/// One of the two target languages a model carries resources for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Hindi,
    Magahi,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::Hindi, Language::Magahi];

    /// Short tag used in model files (`hin` / `mag`).
    pub fn tag(self) -> &'static str {
        match self {
            Language::Hindi => "hin",
            Language::Magahi => "mag",
        }
    }

    pub fn other(self) -> Language {
        match self {
            Language::Hindi => Language::Magahi,
            Language::Magahi => Language::Hindi,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Language {
    type Err = LidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hin" => Ok(Language::Hindi),
            "mag" => Ok(Language::Magahi),
            other => Err(LidError::Input(format!("unknown language tag `{other}`"))),
        }
    }
}

/// Classification outcome: one of the target languages or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Hindi,
    Magahi,
    Other,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Hindi, Label::Magahi, Label::Other];

    pub fn tag(self) -> &'static str {
        match self {
            Label::Hindi => "hin",
            Label::Magahi => "mag",
            Label::Other => "other",
        }
    }

    /// Row/column position in a confusion matrix.
    pub fn index(self) -> usize {
        match self {
            Label::Hindi => 0,
            Label::Magahi => 1,
            Label::Other => 2,
        }
    }

    /// Human-readable sentence printed by `lid identify`.
    pub fn phrase(self) -> &'static str {
        match self {
            Label::Hindi => "The text is Hindi",
            Label::Magahi => "The text is Magahi",
            Label::Other => "Text is of other language",
        }
    }
}

impl From<Language> for Label {
    fn from(lang: Language) -> Self {
        match lang {
            Language::Hindi => Label::Hindi,
            Language::Magahi => Label::Magahi,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Label {
    type Err = LidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hin" => Ok(Label::Hindi),
            "mag" => Ok(Label::Magahi),
            "other" => Ok(Label::Other),
            other => Err(LidError::Input(format!("unknown label `{other}`"))),
        }
    }
}
