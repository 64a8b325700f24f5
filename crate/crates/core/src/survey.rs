//! Questionnaires, response counts and human opinion distributions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{CountryCode, Language};

/// Tolerance on the probability sum of a distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SurveyError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("wave {0} is not one of 5, 6, 7")]
    InvalidWave(u8),
    #[error("question {question}: option key `{key}` not in the option list")]
    Join { question: String, key: String },
    #[error("question {0}: no substantive responses")]
    EmptySample(String),
    #[error("question {0}: no country has data")]
    MissingData(String),
    #[error("crossmap {canonical}: scale sizes differ across waves ({sizes})")]
    IncompatibleScale { canonical: String, sizes: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuestionId(String);

impl QuestionId {
    pub fn new(id: impl Into<String>) -> Self {
        QuestionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for QuestionId {
    fn from(s: &str) -> Self {
        QuestionId(s.to_string())
    }
}

/// Survey wave; only 5, 6 and 7 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Wave(u8);

impl Wave {
    pub const ALL: [Wave; 3] = [Wave(5), Wave(6), Wave(7)];

    pub fn new(w: u8) -> Result<Self, SurveyError> {
        if (5..=7).contains(&w) {
            Ok(Wave(w))
        } else {
            Err(SurveyError::InvalidWave(w))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Wave {
    type Error = SurveyError;
    fn try_from(w: u8) -> Result<Self, Self::Error> {
        Wave::new(w)
    }
}

impl From<Wave> for u8 {
    fn from(w: Wave) -> u8 {
        w.0
    }
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerOption {
    pub key: String,
    pub label: String,
}

/// One survey item. Option order is the canonical ordinal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: QuestionId,
    pub text: String,
    pub options: Vec<AnswerOption>,
    /// Combined display string from the source file.
    pub answer: String,
}

impl Question {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        options: Vec<AnswerOption>,
    ) -> Result<Self, SurveyError> {
        let answer = options
            .iter()
            .map(|o| format!("{}. {}", o.key, o.label))
            .collect::<Vec<_>>()
            .join(" ");
        let q = Question { id: QuestionId(id.into()), text: text.into(), options, answer };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<(), SurveyError> {
        if self.options.len() < 2 {
            return Err(SurveyError::Schema(format!(
                "question {} has {} options; at least 2 required",
                self.id,
                self.options.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for o in &self.options {
            if !seen.insert(o.key.as_str()) {
                return Err(SurveyError::Schema(format!(
                    "question {} repeats option key `{}`",
                    self.id, o.key
                )));
            }
        }
        Ok(())
    }

    pub fn scale_size(&self) -> usize {
        self.options.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.options.iter().map(|o| o.key.as_str())
    }

    pub fn key_index(&self, key: &str) -> Option<usize> {
        self.options.iter().position(|o| o.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Questionnaire {
    pub language: Language,
    pub wave: Wave,
    pub questions: Vec<Question>,
}

#[derive(Serialize, Deserialize)]
struct JsonlRow {
    id: String,
    question: String,
    choice_keys: Vec<String>,
    choices: Vec<String>,
    #[serde(default)]
    answer: String,
}

impl Questionnaire {
    pub fn get(&self, id: &QuestionId) -> Option<&Question> {
        self.questions.iter().find(|q| &q.id == id)
    }

    pub fn ids(&self) -> BTreeSet<QuestionId> {
        self.questions.iter().map(|q| q.id.clone()).collect()
    }

    /// Parses the JSONL format; `source` only labels error messages.
    pub fn from_jsonl(
        text: &str,
        language: Language,
        wave: Wave,
        source: &str,
    ) -> Result<Self, SurveyError> {
        let mut questions: Vec<Question> = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: JsonlRow = serde_json::from_str(line).map_err(|e| SurveyError::Parse {
                path: source.to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
            if row.choice_keys.len() != row.choices.len() {
                return Err(SurveyError::Schema(format!(
                    "{source}: line {}: {} choice_keys but {} choices",
                    i + 1,
                    row.choice_keys.len(),
                    row.choices.len()
                )));
            }
            if !seen.insert(row.id.clone()) {
                return Err(SurveyError::Schema(format!(
                    "{source}: line {}: duplicate question id {}",
                    i + 1,
                    row.id
                )));
            }
            let options = row
                .choice_keys
                .into_iter()
                .zip(row.choices)
                .map(|(key, label)| AnswerOption { key, label })
                .collect();
            let q = Question {
                id: QuestionId(row.id),
                text: row.question,
                options,
                answer: row.answer,
            };
            q.validate().map_err(|e| match e {
                SurveyError::Schema(m) => SurveyError::Schema(format!("{source}: line {}: {m}", i + 1)),
                other => other,
            })?;
            questions.push(q);
        }
        Ok(Questionnaire { language, wave, questions })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for q in &self.questions {
            let row = JsonlRow {
                id: q.id.0.clone(),
                question: q.text.clone(),
                choice_keys: q.options.iter().map(|o| o.key.clone()).collect(),
                choices: q.options.iter().map(|o| o.label.clone()).collect(),
                answer: q.answer.clone(),
            };
            out.push_str(&serde_json::to_string(&row).expect("plain strings serialize"));
            out.push('\n');
        }
        out
    }
}

pub fn load_questionnaire(
    path: &Path,
    language: Language,
    wave: Wave,
) -> Result<Questionnaire, SurveyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SurveyError::Io(format!("{}: {e}", path.display())))?;
    Questionnaire::from_jsonl(&text, language, wave, &path.display().to_string())
}

/// `WV7_English.jsonl` etc.
pub fn questionnaire_file_name(wave: Wave, language: Language) -> String {
    format!("WV{}_{}.jsonl", wave.get(), language.name())
}

/// Response counts for one (country, wave, question). Keys are raw option
/// codes as they appear in the source, including negative non-substantive codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseCounts {
    pub country: CountryCode,
    pub wave: Wave,
    pub question_id: QuestionId,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Deserialize)]
struct CountRow {
    country: String,
    wave: u8,
    question_id: String,
    option_key: String,
    count: String,
}

type CountKey = (CountryCode, Wave, QuestionId);

/// Accumulates long-format count rows; rows for the same key are summed.
#[derive(Debug, Default)]
pub struct CountsBuilder {
    table: BTreeMap<CountKey, BTreeMap<String, u64>>,
}

impl CountsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_csv<R: Read>(&mut self, reader: R, source: &str) -> Result<(), SurveyError> {
        let mut rdr = csv::Reader::from_reader(reader);
        for (i, row) in rdr.deserialize::<CountRow>().enumerate() {
            // header is line 1
            let line = i + 2;
            let err = |message: String| SurveyError::Parse { path: source.to_string(), line, message };
            let row = row.map_err(|e| err(e.to_string()))?;
            let count: i64 = row
                .count
                .trim()
                .parse()
                .map_err(|_| err(format!("count `{}` is not an integer", row.count)))?;
            if count < 0 {
                return Err(SurveyError::Schema(format!(
                    "{source}: line {line}: negative count {count}"
                )));
            }
            let country = CountryCode::new(&row.country).map_err(|e| err(e.to_string()))?;
            let wave = Wave::new(row.wave)?;
            let key = (country, wave, QuestionId(row.question_id.trim().to_string()));
            *self
                .table
                .entry(key)
                .or_default()
                .entry(row.option_key.trim().to_string())
                .or_insert(0) += count as u64;
        }
        Ok(())
    }

    pub fn add_path(&mut self, path: &Path) -> Result<(), SurveyError> {
        let file = std::fs::File::open(path)
            .map_err(|e| SurveyError::Io(format!("{}: {e}", path.display())))?;
        self.add_csv(file, &path.display().to_string())
    }

    /// Sorted by (country, wave, question id).
    pub fn finish(self) -> Vec<ResponseCounts> {
        self.table
            .into_iter()
            .map(|((country, wave, question_id), counts)| ResponseCounts {
                country,
                wave,
                question_id,
                counts,
            })
            .collect()
    }
}

/// Loads and merges one or more count CSVs.
pub fn load_response_counts(paths: &[&Path]) -> Result<Vec<ResponseCounts>, SurveyError> {
    let mut b = CountsBuilder::new();
    for p in paths {
        b.add_path(p)?;
    }
    Ok(b.finish())
}

/// Probability vector aligned with a question's option order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpinionDistribution {
    pub question_id: QuestionId,
    probs: Vec<f64>,
}

impl OpinionDistribution {
    pub fn new(question_id: QuestionId, probs: Vec<f64>) -> Result<Self, SurveyError> {
        if probs.is_empty() {
            return Err(SurveyError::InvalidDistribution("empty probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(SurveyError::InvalidDistribution(format!("probability {p} outside [0,1]")));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SUM_TOLERANCE {
            return Err(SurveyError::InvalidDistribution(format!("probabilities sum to {s}")));
        }
        Ok(OpinionDistribution { question_id, probs })
    }

    pub fn uniform(question_id: QuestionId, n: usize) -> Self {
        OpinionDistribution { question_id, probs: vec![1.0 / n as f64; n] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn is_non_substantive(key: &str) -> bool {
    key.parse::<i64>().map(|k| k < 0).unwrap_or(false)
}

/// `count[n] / Σ count` over the question's substantive options. Negative
/// codes (don't know, no answer, refused) are dropped first.
pub fn human_distribution(
    counts: &ResponseCounts,
    question: &Question,
) -> Result<OpinionDistribution, SurveyError> {
    let mut tally = vec![0u64; question.scale_size()];
    for (key, &c) in &counts.counts {
        if is_non_substantive(key) {
            continue;
        }
        let idx = question.key_index(key).ok_or_else(|| SurveyError::Join {
            question: question.id.to_string(),
            key: key.clone(),
        })?;
        tally[idx] += c;
    }
    let total: u64 = tally.iter().sum();
    if total == 0 {
        return Err(SurveyError::EmptySample(question.id.to_string()));
    }
    let total = total as f64;
    let probs = tally.into_iter().map(|c| c as f64 / total).collect();
    OpinionDistribution::new(question.id.clone(), probs)
}

/// Unweighted mean over the countries that have data for the question.
pub fn average_human_distribution<'a, I>(
    question_id: &QuestionId,
    distributions: I,
) -> Result<OpinionDistribution, SurveyError>
where
    I: IntoIterator<Item = &'a OpinionDistribution>,
{
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for d in distributions {
        if sum.is_empty() {
            sum = vec![0.0; d.len()];
        } else if sum.len() != d.len() {
            return Err(SurveyError::InvalidDistribution(format!(
                "question {question_id}: distributions of length {} and {}",
                sum.len(),
                d.len()
            )));
        }
        for (s, p) in sum.iter_mut().zip(d.probs()) {
            *s += p;
        }
        n += 1;
    }
    if n == 0 {
        return Err(SurveyError::MissingData(question_id.to_string()));
    }
    let probs = sum.into_iter().map(|s| s / n as f64).collect();
    OpinionDistribution::new(question_id.clone(), probs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExclusionReason {
    NotMultipleChoice,
    RequiresLifeExperience,
    SlotEditing,
    Objective,
    RequiresNationality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionRule {
    pub question_id: QuestionId,
    pub reason: ExclusionReason,
}

pub fn parse_exclusion_rules(text: &str) -> Result<Vec<ExclusionRule>, SurveyError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(|e: csv::Error| SurveyError::Schema(format!("exclusion rules: {e}"))))
        .collect()
}

pub fn load_exclusion_rules(path: &Path) -> Result<Vec<ExclusionRule>, SurveyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SurveyError::Io(format!("{}: {e}", path.display())))?;
    parse_exclusion_rules(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub kept: Questionnaire,
    pub removed: Vec<ExclusionRule>,
    /// Rule ids that matched no question.
    pub unknown: Vec<QuestionId>,
}

pub fn apply_exclusion_rules(questionnaire: &Questionnaire, rules: &[ExclusionRule]) -> Filtered {
    let by_id: BTreeMap<&QuestionId, &ExclusionRule> =
        rules.iter().map(|r| (&r.question_id, r)).collect();
    let ids = questionnaire.ids();
    let unknown: Vec<QuestionId> =
        by_id.keys().filter(|id| !ids.contains(**id)).map(|id| (*id).clone()).collect();
    for id in &unknown {
        log::warn!("exclusion rule for {id} matches no question in wave {}", questionnaire.wave);
    }
    let mut removed = Vec::new();
    let mut kept = Vec::new();
    for q in &questionnaire.questions {
        match by_id.get(&q.id) {
            Some(rule) => {
                log::debug!("excluding {} ({:?})", q.id, rule.reason);
                removed.push((*rule).clone());
            }
            None => kept.push(q.clone()),
        }
    }
    if kept.is_empty() && !questionnaire.questions.is_empty() {
        log::warn!("exclusion rules removed every question of wave {}", questionnaire.wave);
    }
    Filtered {
        kept: Questionnaire {
            language: questionnaire.language,
            wave: questionnaire.wave,
            questions: kept,
        },
        removed,
        unknown,
    }
}

/// One row of the cross-wave correspondence table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveCrossMap {
    pub canonical_id: QuestionId,
    pub ids: BTreeMap<Wave, QuestionId>,
}

pub fn parse_crossmap(text: &str) -> Result<Vec<WaveCrossMap>, SurveyError> {
    #[derive(Deserialize)]
    struct Row {
        canonical_id: String,
        wave5_id: String,
        wave6_id: String,
        wave7_id: String,
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| SurveyError::Schema(format!("crossmap: {e}")))?;
        let mut ids = BTreeMap::new();
        for (w, id) in [(5, row.wave5_id), (6, row.wave6_id), (7, row.wave7_id)] {
            let id = id.trim();
            if !id.is_empty() {
                ids.insert(Wave(w), QuestionId(id.to_string()));
            }
        }
        out.push(WaveCrossMap { canonical_id: QuestionId(row.canonical_id), ids });
    }
    Ok(out)
}

pub fn load_crossmap(path: &Path) -> Result<Vec<WaveCrossMap>, SurveyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SurveyError::Io(format!("{}: {e}", path.display())))?;
    parse_crossmap(&text)
}

/// Crossmap entries present in every given (post-exclusion) questionnaire,
/// restricted to those waves. A single wave yields identity entries for all
/// of its questions.
pub fn intersect_waves(
    questionnaires: &BTreeMap<Wave, Questionnaire>,
    crossmap: &[WaveCrossMap],
) -> Result<Vec<WaveCrossMap>, SurveyError> {
    if questionnaires.len() == 1 {
        let (&wave, q) = questionnaires.iter().next().expect("one entry");
        return Ok(q
            .questions
            .iter()
            .map(|q| WaveCrossMap {
                canonical_id: q.id.clone(),
                ids: BTreeMap::from([(wave, q.id.clone())]),
            })
            .collect());
    }
    let mut out = Vec::new();
    'entries: for entry in crossmap {
        let mut ids = BTreeMap::new();
        let mut sizes = Vec::new();
        for (&wave, qn) in questionnaires {
            let Some(id) = entry.ids.get(&wave) else { continue 'entries };
            let Some(q) = qn.get(id) else { continue 'entries };
            ids.insert(wave, id.clone());
            sizes.push((wave, q.scale_size()));
        }
        if sizes.windows(2).any(|w| w[0].1 != w[1].1) {
            return Err(SurveyError::IncompatibleScale {
                canonical: entry.canonical_id.to_string(),
                sizes: sizes
                    .iter()
                    .map(|(w, n)| format!("wave {w}: {n}"))
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
        out.push(WaveCrossMap { canonical_id: entry.canonical_id.clone(), ids });
    }
    Ok(out)
}

/// Human distributions keyed by (country, wave, question), built by joining
/// counts to the matching questionnaire. Join failures are kept, not fatal.
#[derive(Debug, Clone, Default)]
pub struct HumanTable {
    entries: BTreeMap<CountKey, OpinionDistribution>,
    pub join_errors: Vec<(CountryCode, Wave, SurveyError)>,
}

impl HumanTable {
    pub fn build<'a, I>(counts: &[ResponseCounts], questionnaires: I) -> Self
    where
        I: IntoIterator<Item = &'a Questionnaire>,
    {
        let by_wave: BTreeMap<Wave, &Questionnaire> =
            questionnaires.into_iter().map(|q| (q.wave, q)).collect();
        let mut table = HumanTable::default();
        for rc in counts {
            let Some(qn) = by_wave.get(&rc.wave) else { continue };
            let Some(question) = qn.get(&rc.question_id) else { continue };
            match human_distribution(rc, question) {
                Ok(d) => {
                    table
                        .entries
                        .insert((rc.country.clone(), rc.wave, rc.question_id.clone()), d);
                }
                Err(e) => table.join_errors.push((rc.country.clone(), rc.wave, e)),
            }
        }
        table
    }

    pub fn get(&self, country: &CountryCode, wave: Wave, q: &QuestionId) -> Option<&OpinionDistribution> {
        self.entries.get(&(country.clone(), wave, q.clone()))
    }

    pub fn insert(&mut self, country: CountryCode, wave: Wave, d: OpinionDistribution) {
        self.entries.insert((country, wave, d.question_id.clone()), d);
    }

    pub fn countries(&self, wave: Wave) -> BTreeSet<CountryCode> {
        self.entries.keys().filter(|k| k.1 == wave).map(|k| k.0.clone()).collect()
    }

    /// All countries' distributions for one question, in country order.
    pub fn for_question<'a>(
        &'a self,
        wave: Wave,
        q: &'a QuestionId,
    ) -> impl Iterator<Item = (&'a CountryCode, &'a OpinionDistribution)> + 'a {
        self.entries
            .iter()
            .filter(move |(k, _)| k.1 == wave && &k.2 == q)
            .map(|(k, d)| (&k.0, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
