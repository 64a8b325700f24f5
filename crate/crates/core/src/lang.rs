//! Prompt languages and country codes.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("invalid country code `{0}` (expected three ASCII letters)")]
    InvalidCountry(String),
    #[error("country list: {0}")]
    CountryList(String),
}

/// Languages with shipped questionnaires and instruction templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    En,
    De,
    Es,
    Ja,
    Ko,
    Pt,
    Ru,
    Vi,
    Zh,
}

impl Language {
    pub const ALL: [Language; 9] = [
        Language::En,
        Language::De,
        Language::Es,
        Language::Ja,
        Language::Ko,
        Language::Pt,
        Language::Ru,
        Language::Vi,
        Language::Zh,
    ];

    /// Two-letter tag used in asset file names (`lang-De_dist-random.txt`).
    pub fn code(self) -> &'static str {
        match self {
            Language::En => "En",
            Language::De => "De",
            Language::Es => "Es",
            Language::Ja => "Ja",
            Language::Ko => "Ko",
            Language::Pt => "Pt",
            Language::Ru => "Ru",
            Language::Vi => "Vi",
            Language::Zh => "Zh",
        }
    }

    /// English name used in questionnaire file names (`WV7_German.jsonl`).
    pub fn name(self) -> &'static str {
        match self {
            Language::En => "English",
            Language::De => "German",
            Language::Es => "Spanish",
            Language::Ja => "Japanese",
            Language::Ko => "Korean",
            Language::Pt => "Portuguese",
            Language::Ru => "Russian",
            Language::Vi => "Vietnamese",
            Language::Zh => "Chinese",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::ALL
            .into_iter()
            .find(|l| l.code().eq_ignore_ascii_case(s) || l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| LangError::UnknownLanguage(s.to_string()))
    }
}

/// ISO 3166 alpha-3 style code, upper case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode(String);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, LangError> {
        let c = code.trim();
        if c.len() == 3 && c.bytes().all(|b| b.is_ascii_alphabetic()) {
            Ok(CountryCode(c.to_ascii_uppercase()))
        } else {
            Err(LangError::InvalidCountry(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CountryCode {
    type Error = LangError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        CountryCode::new(&s)
    }
}

impl From<CountryCode> for String {
    fn from(c: CountryCode) -> String {
        c.0
    }
}

impl FromStr for CountryCode {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CountryCode::new(s)
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One row of the wave-7 country list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Country {
    pub code: CountryCode,
    pub name: String,
    /// Languages the questionnaire was fielded in, by English name.
    pub survey_languages: Vec<String>,
}

impl Country {
    /// The prompt language matching the country's only survey language, if
    /// the country was surveyed in exactly one language we ship.
    pub fn sole_language(&self) -> Option<Language> {
        match self.survey_languages.as_slice() {
            [only] => only.parse().ok(),
            _ => None,
        }
    }
}

/// Reads `code,name,survey_languages` rows; languages are `;`-separated.
pub fn parse_countries(text: &str) -> Result<Vec<Country>, LangError> {
    #[derive(Deserialize)]
    struct Row {
        code: String,
        name: String,
        survey_languages: String,
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| LangError::CountryList(e.to_string()))?;
        out.push(Country {
            code: CountryCode::new(&row.code)?,
            name: row.name,
            survey_languages: row
                .survey_languages
                .split(';')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        });
    }
    Ok(out)
}

pub fn load_countries(path: &Path) -> Result<Vec<Country>, LangError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LangError::CountryList(format!("{}: {e}", path.display())))?;
    parse_countries(&text)
}
