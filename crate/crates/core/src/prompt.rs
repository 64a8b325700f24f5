//! Prompt assembly: instruction templates, few-shot examples, verbalized
//! distribution lines and option shuffling.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lang::{CountryCode, Language};
use crate::survey::{AnswerOption, OpinionDistribution, Question, QuestionId, Questionnaire};

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("few-shot question {0} is not in the questionnaire")]
    MissingExample(QuestionId),
    #[error("no human distribution for few-shot question {0}")]
    MissingExampleData(QuestionId),
    #[error("expected {expected} examples, got {got}")]
    ExampleCount { expected: usize, got: usize },
    #[error("missing template asset: {0}")]
    MissingTemplate(String),
    #[error("strategy: {0}")]
    Strategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringBase {
    NoSteering,
    Persona,
    /// Persona plus the target country's real answer distributions as examples.
    FewShotReal,
}

impl SteeringBase {
    pub const ALL: [SteeringBase; 3] = [SteeringBase::NoSteering, SteeringBase::Persona, SteeringBase::FewShotReal];

    pub fn as_str(self) -> &'static str {
        match self {
            SteeringBase::NoSteering => "no_steering",
            SteeringBase::Persona => "persona",
            SteeringBase::FewShotReal => "few_shot",
        }
    }
}

impl fmt::Display for SteeringBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SteeringStrategy {
    pub base: SteeringBase,
    pub language_steering: bool,
    pub target_country: Option<CountryCode>,
}

impl SteeringStrategy {
    pub fn new(
        base: SteeringBase,
        language_steering: bool,
        target_country: Option<CountryCode>,
    ) -> Result<Self, PromptError> {
        if base != SteeringBase::NoSteering && target_country.is_none() {
            return Err(PromptError::Strategy(format!("{base} needs a target country")));
        }
        Ok(SteeringStrategy { base, language_steering, target_country })
    }

    pub fn no_steering() -> Self {
        SteeringStrategy { base: SteeringBase::NoSteering, language_steering: false, target_country: None }
    }

    pub fn example_source(&self) -> ExampleSource {
        match self.base {
            SteeringBase::FewShotReal => ExampleSource::CountryReal,
            _ => ExampleSource::RandomSynthetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExampleSource {
    RandomSynthetic,
    CountryReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub question: Question,
    pub distribution: OpinionDistribution,
    pub source: ExampleSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub strategy: SteeringStrategy,
    pub language: Language,
    /// The evaluated question in presentation order.
    pub question: Question,
    pub examples: Vec<FewShotExample>,
    pub template_id: String,
    pub seed: u64,
}

/// Hex SHA-256 of the rendered text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fingerprint(String);

impl Fingerprint {
    pub fn of(text: &str) -> Self {
        Fingerprint(sha256_hex(text.as_bytes()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptText {
    pub rendered: String,
    pub fingerprint: Fingerprint,
}

impl PromptText {
    pub fn new(rendered: String) -> Self {
        let fingerprint = Fingerprint::of(&rendered);
        PromptText { rendered, fingerprint }
    }
}

/// Instruction templates and labels for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageAssets {
    pub instructions: BTreeMap<SteeringBase, String>,
    pub question_label: String,
    pub answer_label: String,
    /// Localized country names; English falls back to the country list.
    pub countries: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Labels {
    question: String,
    answer: String,
    #[serde(default)]
    countries: BTreeMap<String, String>,
}

impl LanguageAssets {
    fn from_parts(instructions: BTreeMap<SteeringBase, String>, labels: &str) -> Result<Self, PromptError> {
        let labels: Labels =
            toml::from_str(labels).map_err(|e| PromptError::Config(format!("labels: {e}")))?;
        Ok(LanguageAssets {
            instructions: instructions.into_iter().map(|(k, v)| (k, v.trim_end().to_string())).collect(),
            question_label: labels.question,
            answer_label: labels.answer,
            countries: labels.countries,
        })
    }
}

macro_rules! builtin_language {
    ($code:literal) => {
        (
            $code,
            include_str!(concat!("../assets/templates/", $code, "/no_steering.txt")),
            include_str!(concat!("../assets/templates/", $code, "/persona.txt")),
            include_str!(concat!("../assets/templates/", $code, "/few_shot.txt")),
            include_str!(concat!("../assets/templates/", $code, "/labels.toml")),
        )
    };
}

const BUILTIN: [(&str, &str, &str, &str, &str); 9] = [
    builtin_language!("En"),
    builtin_language!("De"),
    builtin_language!("Es"),
    builtin_language!("Ja"),
    builtin_language!("Ko"),
    builtin_language!("Pt"),
    builtin_language!("Ru"),
    builtin_language!("Vi"),
    builtin_language!("Zh"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    langs: BTreeMap<Language, LanguageAssets>,
    /// English country names, used when a template has no localized name.
    english_names: BTreeMap<String, String>,
}

impl Templates {
    /// The template set compiled into the library.
    pub fn builtin() -> Self {
        let langs = BUILTIN
            .iter()
            .map(|(code, none, persona, few, labels)| {
                let instructions = BTreeMap::from([
                    (SteeringBase::NoSteering, none.to_string()),
                    (SteeringBase::Persona, persona.to_string()),
                    (SteeringBase::FewShotReal, few.to_string()),
                ]);
                let lang: Language = code.parse().expect("builtin language code");
                (lang, LanguageAssets::from_parts(instructions, labels).expect("builtin labels parse"))
            })
            .collect();
        Templates { langs, english_names: BTreeMap::new() }
    }

    /// Reads `{dir}/{Lang}/{no_steering,persona,few_shot}.txt` and
    /// `labels.toml` for every language directory present. Missing files
    /// surface as errors at render time.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut langs = BTreeMap::new();
        for lang in Language::ALL {
            let d = dir.join(lang.code());
            let Ok(labels) = std::fs::read_to_string(d.join("labels.toml")) else { continue };
            let mut instructions = BTreeMap::new();
            for base in SteeringBase::ALL {
                if let Ok(t) = std::fs::read_to_string(d.join(format!("{}.txt", base.as_str()))) {
                    instructions.insert(base, t);
                }
            }
            langs.insert(lang, LanguageAssets::from_parts(instructions, &labels)?);
        }
        Ok(Templates { langs, english_names: BTreeMap::new() })
    }

    pub fn with_english_names<I: IntoIterator<Item = (CountryCode, String)>>(mut self, names: I) -> Self {
        self.english_names = names.into_iter().map(|(c, n)| (c.to_string(), n)).collect();
        self
    }

    pub fn language(&self, lang: Language) -> Result<&LanguageAssets, PromptError> {
        self.langs
            .get(&lang)
            .ok_or_else(|| PromptError::MissingTemplate(format!("{}/labels.toml", lang.code())))
    }

    pub fn instruction(&self, lang: Language, base: SteeringBase) -> Result<&str, PromptError> {
        self.language(lang)?
            .instructions
            .get(&base)
            .map(String::as_str)
            .ok_or_else(|| PromptError::MissingTemplate(format!("{}/{}.txt", lang.code(), base.as_str())))
    }

    pub fn country_name(&self, lang: Language, country: &CountryCode) -> Result<String, PromptError> {
        let assets = self.language(lang)?;
        if let Some(n) = assets.countries.get(country.as_str()) {
            return Ok(n.clone());
        }
        if lang == Language::En {
            if let Some(n) = self.english_names.get(country.as_str()) {
                return Ok(n.clone());
            }
        }
        Err(PromptError::Config(format!("no {} name for country {country}", lang.code())))
    }
}

/// Per-country few-shot question ids with a `Default` row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FewShotRegistry {
    rows: BTreeMap<String, Vec<QuestionId>>,
}

pub const DEFAULT_ROW: &str = "Default";

impl FewShotRegistry {
    pub fn new(rows: BTreeMap<String, Vec<QuestionId>>) -> Self {
        FewShotRegistry { rows }
    }

    /// `country,example_ids` with ids separated by `;`.
    pub fn parse(text: &str) -> Result<Self, PromptError> {
        #[derive(Deserialize)]
        struct Row {
            country: String,
            example_ids: String,
        }
        let mut rows = BTreeMap::new();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| PromptError::Config(format!("few-shot registry: {e}")))?;
            let ids = row
                .example_ids
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(QuestionId::from)
                .collect();
            rows.insert(row.country.trim().to_string(), ids);
        }
        Ok(FewShotRegistry { rows })
    }

    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The country's row, else the `Default` row.
    pub fn ids_for(&self, country: Option<&CountryCode>) -> Result<&[QuestionId], PromptError> {
        country
            .and_then(|c| self.rows.get(c.as_str()))
            .or_else(|| self.rows.get(DEFAULT_ROW))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                PromptError::Config(format!(
                    "few-shot registry has no row for {} and no Default row",
                    country.map_or("-".to_string(), |c| c.to_string())
                ))
            })
    }

    /// Every id listed in any row.
    pub fn all_ids(&self) -> std::collections::BTreeSet<&QuestionId> {
        self.rows.values().flatten().collect()
    }
}

/// Picks the example questions for one evaluated question. If the evaluated
/// question is itself listed, it is replaced by the first questionnaire item
/// that is not listed in any registry row and satisfies `usable`.
pub fn select_example_questions<F>(
    ids: &[QuestionId],
    registry: &FewShotRegistry,
    questionnaire: &Questionnaire,
    evaluated: &QuestionId,
    usable: F,
) -> Result<Vec<Question>, PromptError>
where
    F: Fn(&Question) -> bool,
{
    let reserved = registry.all_ids();
    ids.iter()
        .map(|id| {
            if id == evaluated {
                questionnaire
                    .questions
                    .iter()
                    .find(|q| &q.id != evaluated && !reserved.contains(&q.id) && !ids.contains(&q.id) && usable(q))
                    .cloned()
                    .ok_or_else(|| PromptError::Config(format!("no substitute example for {evaluated}")))
            } else {
                questionnaire.get(id).cloned().ok_or_else(|| PromptError::MissingExample(id.clone()))
            }
        })
        .collect()
}

/// Few-shot examples for `evaluated`, ordered as in the registry row.
/// `human` supplies the target country's distributions for `CountryReal`.
#[allow(clippy::too_many_arguments)]
pub fn select_few_shot_examples<F>(
    country: Option<&CountryCode>,
    questionnaire: &Questionnaire,
    registry: &FewShotRegistry,
    evaluated: &QuestionId,
    source: ExampleSource,
    seed: u64,
    human: F,
) -> Result<Vec<FewShotExample>, PromptError>
where
    F: Fn(&QuestionId) -> Option<OpinionDistribution>,
{
    let ids = registry.ids_for(country)?;
    let questions = match source {
        ExampleSource::RandomSynthetic => {
            select_example_questions(ids, registry, questionnaire, evaluated, |_| true)?
        }
        ExampleSource::CountryReal => {
            select_example_questions(ids, registry, questionnaire, evaluated, |q| human(&q.id).is_some())?
        }
    };
    questions
        .into_iter()
        .map(|question| {
            let distribution = match source {
                ExampleSource::RandomSynthetic => synthesize_random_example_distributions(&question, seed),
                ExampleSource::CountryReal => {
                    human(&question.id).ok_or_else(|| PromptError::MissingExampleData(question.id.clone()))?
                }
            };
            Ok(FewShotExample { question, distribution, source })
        })
        .collect()
}

fn seeded_rng(seed: u64, salt: &str, id: &QuestionId) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(salt.as_bytes());
    h.update([0]);
    h.update(id.as_str().as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

/// Flat-Dirichlet draw, quantized to hundredths of a percent so the rendered
/// example is exactly the distribution.
pub fn synthesize_random_example_distributions(question: &Question, seed: u64) -> OpinionDistribution {
    let mut rng = seeded_rng(seed, "dirichlet", &question.id);
    let draws: Vec<f64> = (0..question.scale_size()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    let probs: Vec<f64> = draws.iter().map(|d| d / total).collect();
    let probs = percent_units(&probs).into_iter().map(|u| u as f64 / 10_000.0).collect();
    OpinionDistribution::new(question.id.clone(), probs).expect("quantized draw is a distribution")
}

/// Hundredths of a percent per entry, summing to exactly 10000. Largest
/// remainder, ties to the lower index.
pub fn percent_units(probs: &[f64]) -> Vec<u32> {
    if probs.is_empty() {
        return Vec::new();
    }
    let scaled: Vec<f64> = probs.iter().map(|p| p.max(0.0) * 10_000.0).collect();
    let mut units: Vec<u32> = scaled.iter().map(|x| (x + 1e-7).floor() as u32).collect();
    let assigned: u32 = units.iter().sum();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - units[a] as f64;
        let rb = scaled[b] - units[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    if assigned <= 10_000 {
        for i in order.iter().cycle().take((10_000 - assigned) as usize) {
            units[*i] += 1;
        }
    } else {
        for i in order.iter().rev().cycle().take((assigned - 10_000) as usize) {
            units[*i] = units[*i].saturating_sub(1);
        }
    }
    units
}

fn units_str(u: u32) -> String {
    format!("{}.{:02}%", u / 100, u % 100)
}

/// `{'k': 'xx.xx%', …}` for the given keys and unit values.
pub fn format_units_line<'a, I: IntoIterator<Item = &'a str>>(keys: I, units: &[u32]) -> String {
    let body: Vec<String> =
        keys.into_iter().zip(units).map(|(k, &u)| format!("'{k}': '{}'", units_str(u))).collect();
    format!("{{{}}}", body.join(", "))
}

/// Canonical verbalized line with keys `1..N`.
pub fn format_distribution_line(probs: &[f64]) -> String {
    let keys: Vec<String> = (1..=probs.len()).map(|k| k.to_string()).collect();
    format_units_line(keys.iter().map(String::as_str), &percent_units(probs))
}

/// `perm[i]` is the canonical index of the option shown at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_vec(v: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; v.len()];
        for &i in &v {
            if i >= v.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Canonical-order values to presentation order.
    pub fn present<T: Clone>(&self, canonical: &[T]) -> Vec<T> {
        self.0.iter().map(|&j| canonical[j].clone()).collect()
    }

    /// Presentation-order values back to canonical order.
    pub fn canonicalize<T: Clone>(&self, presented: &[T]) -> Vec<T> {
        self.inverse().present(presented)
    }
}

/// Presentation-order copy of `question` with options relabelled `1..N`.
pub fn shuffle_option_order(question: &Question, seed: u64) -> (Question, Permutation) {
    let mut rng = seeded_rng(seed, "shuffle", &question.id);
    let mut order: Vec<usize> = (0..question.scale_size()).collect();
    order.shuffle(&mut rng);
    let perm = Permutation(order);
    (present_question(question, &perm), perm)
}

pub fn present_question(question: &Question, perm: &Permutation) -> Question {
    if perm.is_identity() {
        return question.clone();
    }
    let options: Vec<AnswerOption> = perm
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &j)| AnswerOption { key: (i + 1).to_string(), label: question.options[j].label.clone() })
        .collect();
    Question::new(question.id.as_str(), question.text.clone(), options).expect("relabelled keys are unique")
}

fn question_block(out: &mut String, labels: &LanguageAssets, q: &Question) {
    out.push_str(&format!("{}: {}\n", labels.question_label, q.text));
    for o in &q.options {
        out.push_str(&format!("'{}'. {}\n", o.key, o.label));
    }
}

pub const EXAMPLE_COUNT: usize = 5;

/// Instruction, one block per example, then the target question ending in
/// the answer label. Blocks are separated by a blank line.
pub fn render_prompt(spec: &PromptSpec, templates: &Templates) -> Result<PromptText, PromptError> {
    render_prompt_with_count(spec, templates, EXAMPLE_COUNT)
}

pub fn render_prompt_with_count(
    spec: &PromptSpec,
    templates: &Templates,
    expected_examples: usize,
) -> Result<PromptText, PromptError> {
    if spec.examples.len() != expected_examples {
        return Err(PromptError::ExampleCount { expected: expected_examples, got: spec.examples.len() });
    }
    let assets = templates.language(spec.language)?;
    let mut instruction = templates
        .instruction(spec.language, spec.strategy.base)?
        .replace("{n}", &spec.examples.len().to_string());
    if instruction.contains("{country}") {
        let c = spec.strategy.target_country.as_ref().ok_or_else(|| {
            PromptError::Strategy(format!("template {} needs a target country", spec.template_id))
        })?;
        instruction = instruction.replace("{country}", &templates.country_name(spec.language, c)?);
    }
    let mut out = instruction;
    out.push_str("\n\n");
    for ex in &spec.examples {
        if ex.distribution.len() != ex.question.scale_size() {
            return Err(PromptError::Config(format!(
                "example {} has {} probabilities for {} options",
                ex.question.id,
                ex.distribution.len(),
                ex.question.scale_size()
            )));
        }
        question_block(&mut out, assets, &ex.question);
        let units = percent_units(ex.distribution.probs());
        out.push_str(&format!("{}: {}\n\n", assets.answer_label, format_units_line(ex.question.keys(), &units)));
    }
    question_block(&mut out, assets, &spec.question);
    out.push_str(&format!("{}:", assets.answer_label));
    Ok(PromptText::new(out))
}

/// Template id for a (language, base) pair, e.g. `De/persona`.
pub fn template_id(language: Language, base: SteeringBase) -> String {
    format!("{}/{}", language.code(), base.as_str())
}

/// The example blocks alone, as stored in `lang-{Lang}_dist-{random|country}.txt`.
pub fn render_examples_file(examples: &[FewShotExample], language: Language, templates: &Templates) -> Result<String, PromptError> {
    let assets = templates.language(language)?;
    let mut out = String::new();
    for ex in examples {
        question_block(&mut out, assets, &ex.question);
        let units = percent_units(ex.distribution.probs());
        out.push_str(&format!("{}: {}\n\n", assets.answer_label, format_units_line(ex.question.keys(), &units)));
    }
    Ok(out)
}

/// `lang-En_dist-random.txt`, `lang-De_dist-DEU.txt`.
pub fn examples_file_name(language: Language, country: Option<&CountryCode>) -> String {
    match country {
        Some(c) => format!("lang-{}_dist-{}.txt", language.code(), c),
        None => format!("lang-{}_dist-random.txt", language.code()),
    }
}
