//! Deterministic offline respondent used in place of a model.

use std::collections::BTreeMap;
use std::sync::Arc;

use opinion_align::prompt::{format_units_line, percent_units, Permutation, PromptText};
use opinion_align::survey::{average_human_distribution, HumanTable, QuestionId, Wave};
use opinion_align::Language;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Pseudo-country holding the unweighted mean of all countries.
pub const AVERAGE_COUNTRY: &str = "AVG";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MockError {
    #[error("mock has no distribution for ({country}, {question})")]
    MissingEntry { country: String, question: QuestionId },
    #[error("mock has no country for language {0}")]
    UnmappedLanguage(String),
    #[error("mock table entry for {question} has {got} options, prompt has {expected}")]
    Shape { question: QuestionId, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "behavior", rename_all = "snake_case")]
pub enum MockBehavior {
    EchoCountry { country: String },
    Uniform,
    LanguageSensitive { language_map: BTreeMap<Language, String> },
    Noisy { country: String, sigma: f64 },
}

/// What the mock needs to answer: the canonical question, the language the
/// prompt is in, and the option order it was shown in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockQuery {
    pub question: QuestionId,
    pub n_options: usize,
    pub language: Language,
    pub permutation: Permutation,
}

/// Canonical-order distributions keyed by (country, question).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MockTable(BTreeMap<(String, QuestionId), Vec<f64>>);

impl MockTable {
    pub fn insert(&mut self, country: impl Into<String>, question: QuestionId, probs: Vec<f64>) {
        self.0.insert((country.into(), question), probs);
    }

    pub fn get(&self, country: &str, question: &QuestionId) -> Option<&[f64]> {
        self.0.get(&(country.to_string(), question.clone())).map(Vec::as_slice)
    }

    /// Every country's distributions for `wave`, plus the [`AVERAGE_COUNTRY`] row.
    pub fn from_human(table: &HumanTable, wave: Wave, questions: &[QuestionId]) -> Self {
        let mut out = MockTable::default();
        for q in questions {
            let mut ds = Vec::new();
            for (c, d) in table.for_question(wave, q) {
                out.insert(c.as_str(), q.clone(), d.probs().to_vec());
                ds.push(d);
            }
            if let Ok(avg) = average_human_distribution(q, ds) {
                out.insert(AVERAGE_COUNTRY, q.clone(), avg.probs().to_vec());
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct MockRespondent {
    pub behavior: MockBehavior,
    pub table: Arc<MockTable>,
    pub seed: u64,
}

impl MockRespondent {
    pub fn new(behavior: MockBehavior, table: Arc<MockTable>, seed: u64) -> Self {
        MockRespondent { behavior, table, seed }
    }

    fn lookup(&self, country: &str, q: &MockQuery) -> Result<Vec<f64>, MockError> {
        let probs = self
            .table
            .get(country, &q.question)
            .ok_or_else(|| MockError::MissingEntry { country: country.to_string(), question: q.question.clone() })?;
        if probs.len() != q.n_options {
            return Err(MockError::Shape { question: q.question.clone(), expected: q.n_options, got: probs.len() });
        }
        Ok(probs.to_vec())
    }

    /// Canonical-order distribution the mock states for this query.
    pub fn canonical_answer(&self, q: &MockQuery, prompt: &PromptText) -> Result<Vec<f64>, MockError> {
        match &self.behavior {
            MockBehavior::EchoCountry { country } => self.lookup(country, q),
            MockBehavior::Uniform => Ok(vec![1.0 / q.n_options as f64; q.n_options]),
            MockBehavior::LanguageSensitive { language_map } => {
                let country = language_map
                    .get(&q.language)
                    .ok_or_else(|| MockError::UnmappedLanguage(q.language.code().to_string()))?;
                self.lookup(country, q)
            }
            MockBehavior::Noisy { country, sigma } => {
                let base = self.lookup(country, q)?;
                if *sigma == 0.0 {
                    return Ok(base);
                }
                let mut h = Sha256::new();
                h.update(self.seed.to_le_bytes());
                h.update(b"noise\0");
                h.update(prompt.fingerprint.as_str().as_bytes());
                let mut rng = ChaCha20Rng::from_seed(h.finalize().into());
                let noisy: Vec<f64> = base
                    .iter()
                    .map(|p| (p + sigma * rng.sample::<f64, _>(StandardNormal)).max(0.0))
                    .collect();
                let total: f64 = noisy.iter().sum();
                Ok(if total > 0.0 { noisy.iter().map(|p| p / total).collect() } else { base })
            }
        }
    }

    /// The answer line, with hundredths-of-a-percent units fixed in canonical
    /// order and then listed in presentation order.
    pub fn respond(&self, q: &MockQuery, prompt: &PromptText) -> Result<String, MockError> {
        let units = percent_units(&self.canonical_answer(q, prompt)?);
        let shown = q.permutation.present(&units);
        let keys: Vec<String> = (1..=q.n_options).map(|k| k.to_string()).collect();
        Ok(format_units_line(keys.iter().map(String::as_str), &shown))
    }
}
