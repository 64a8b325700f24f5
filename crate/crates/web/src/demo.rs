//! The demo operations as plain Rust, so they can be tested off the browser.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use opinion_align::lang::{parse_countries, Country, CountryCode, LangError, Language};
use opinion_align::metrics::{alignment_per_question, wasserstein_1d, MetricsError};
use opinion_align::parser::{parse_verbalized, FailureKind, Repair, DEFAULT_TOLERANCE};
use opinion_align::prompt::{
    render_prompt, select_few_shot_examples, shuffle_option_order, template_id, FewShotRegistry, PromptError,
    PromptSpec, SteeringBase, SteeringStrategy, Templates,
};
use opinion_align::survey::{
    apply_exclusion_rules, parse_exclusion_rules, CountsBuilder, HumanTable, Question, QuestionId, Questionnaire,
    Wave,
};
use serde::Serialize;
use thiserror::Error;

const WAVE: u8 = 7;

macro_rules! questionnaire {
    ($lang:ident, $name:literal) => {
        (Language::$lang, include_str!(concat!("../../../data/questions/WV7_", $name, ".jsonl")))
    };
}

const QUESTIONNAIRES: [(Language, &str); 9] = [
    questionnaire!(En, "English"),
    questionnaire!(De, "German"),
    questionnaire!(Es, "Spanish"),
    questionnaire!(Ja, "Japanese"),
    questionnaire!(Ko, "Korean"),
    questionnaire!(Pt, "Portuguese"),
    questionnaire!(Ru, "Russian"),
    questionnaire!(Vi, "Vietnamese"),
    questionnaire!(Zh, "Chinese"),
];
const EXCLUSIONS: &str = include_str!("../../../data/rules/exclusions_WV7.csv");
const COUNTS: &str = include_str!("../../../data/counts/fixture_counts.csv");
const REGISTRY: &str = include_str!("../../../data/few_shot/registry.csv");
const COUNTRIES: &str = include_str!("../../../data/countries.csv");

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

struct Demo {
    wave: Wave,
    questionnaires: BTreeMap<Language, Questionnaire>,
    /// English questions left after the exclusion rules.
    evaluated: Vec<Question>,
    human: HumanTable,
    countries: Vec<Country>,
    registry: FewShotRegistry,
    templates: Templates,
}

impl Demo {
    fn load() -> Demo {
        let wave = Wave::new(WAVE).expect("wave 7 is valid");
        let questionnaires: BTreeMap<Language, Questionnaire> = QUESTIONNAIRES
            .iter()
            .map(|(lang, text)| {
                let q = Questionnaire::from_jsonl(text, *lang, wave, lang.name()).expect("bundled questionnaire parses");
                (*lang, q)
            })
            .collect();
        let english = &questionnaires[&Language::En];
        let rules = parse_exclusion_rules(EXCLUSIONS).expect("bundled exclusion rules parse");
        let evaluated = apply_exclusion_rules(english, &rules).kept.questions;
        let mut counts = CountsBuilder::new();
        counts.add_csv(COUNTS.as_bytes(), "fixture_counts.csv").expect("bundled counts parse");
        let human = HumanTable::build(&counts.finish(), [english]);
        let countries = parse_countries(COUNTRIES).expect("bundled country list parses");
        let templates =
            Templates::builtin().with_english_names(countries.iter().map(|c| (c.code.clone(), c.name.clone())));
        Demo {
            wave,
            evaluated,
            human,
            countries,
            registry: FewShotRegistry::parse(REGISTRY).expect("bundled registry parses"),
            templates,
            questionnaires,
        }
    }

    fn question(&self, id: &str) -> Result<&Question, DemoError> {
        self.evaluated
            .iter()
            .find(|q| q.id.as_str() == id)
            .ok_or_else(|| DemoError::Input(format!("unknown question `{id}`")))
    }
}

fn demo() -> &'static Demo {
    static DEMO: OnceLock<Demo> = OnceLock::new();
    DEMO.get_or_init(Demo::load)
}

/// Reads a list of weights separated by commas, semicolons or whitespace.
/// A trailing `%` is allowed. The result is scaled to sum to 1.
pub fn parse_weights(s: &str) -> Result<Vec<f64>, DemoError> {
    let w = s
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim_end_matches('%')
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| DemoError::Input(format!("`{t}` is not a non-negative number")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(DemoError::Input("weights must not all be zero".into()));
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

fn cdf(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct AlignmentView {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub cdf_p: Vec<f64>,
    pub cdf_q: Vec<f64>,
    pub wasserstein: f64,
    pub alignment: f64,
}

pub fn alignment(p: &str, q: &str) -> Result<AlignmentView, DemoError> {
    let (p, q) = (parse_weights(p)?, parse_weights(q)?);
    if p.len() != q.len() {
        return Err(DemoError::Input(format!("{} weights against {}", p.len(), q.len())));
    }
    let wasserstein = wasserstein_1d(&p, &q)?;
    let alignment = alignment_per_question(&p, &q, p.len())?;
    Ok(AlignmentView { cdf_p: cdf(&p), cdf_q: cdf(&q), p, q, wasserstein, alignment })
}

#[derive(Debug, Serialize)]
pub struct QuestionView {
    pub id: String,
    pub text: String,
    pub options: Vec<String>,
}

pub fn questions() -> Vec<QuestionView> {
    demo()
        .evaluated
        .iter()
        .map(|q| QuestionView {
            id: q.id.to_string(),
            text: q.text.clone(),
            options: q.options.iter().map(|o| format!("{}. {}", o.key, o.label)).collect(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CountryView {
    pub code: String,
    pub name: String,
    /// Prompt language when the country was surveyed in one shipped language.
    pub language: Option<&'static str>,
}

/// Countries with survey data in the bundled fixture.
pub fn countries() -> Vec<CountryView> {
    let d = demo();
    let surveyed = d.human.countries(d.wave);
    d.countries
        .iter()
        .filter(|c| surveyed.contains(&c.code))
        .map(|c| CountryView {
            code: c.code.to_string(),
            name: c.name.clone(),
            language: c.sole_language().map(Language::code),
        })
        .collect()
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ParseView {
    Parsed {
        probs: Vec<f64>,
        raw_sum: f64,
        repairs: Vec<Repair>,
        /// The chosen country's answers and the alignment against them.
        human: Option<Vec<f64>>,
        alignment: Option<f64>,
    },
    Failed {
        kind: FailureKind,
        excerpt: String,
    },
}

/// Parses a model answer against a question's option keys. With a country,
/// also scores it against that country's survey answers.
pub fn parse_answer(text: &str, question: &str, country: &str) -> Result<ParseView, DemoError> {
    let d = demo();
    let q = d.question(question)?;
    let parsed = match parse_verbalized(text, q, DEFAULT_TOLERANCE) {
        Ok(p) => p,
        Err(f) => return Ok(ParseView::Failed { kind: f.kind, excerpt: f.excerpt }),
    };
    let human = match country.trim() {
        "" => None,
        c => d.human.get(&CountryCode::new(c)?, d.wave, &q.id),
    };
    let probs = parsed.probs.probs().to_vec();
    let alignment = human.map(|h| alignment_per_question(&probs, h.probs(), probs.len())).transpose()?;
    Ok(ParseView::Parsed {
        human: human.map(|h| h.probs().to_vec()),
        alignment,
        raw_sum: parsed.raw_sum,
        repairs: parsed.repairs,
        probs,
    })
}

#[derive(Debug, Serialize)]
pub struct PromptView {
    pub text: String,
    pub fingerprint: String,
    pub template: String,
}

pub fn base_from_str(s: &str) -> Result<SteeringBase, DemoError> {
    SteeringBase::ALL
        .into_iter()
        .find(|b| b.to_string() == s)
        .ok_or_else(|| DemoError::Input(format!("unknown steering `{s}`")))
}

/// Renders the prompt the harness would send for one cell.
pub fn preview_prompt(
    question: &str,
    language: &str,
    base: &str,
    country: &str,
    seed: u64,
    shuffle: bool,
) -> Result<PromptView, DemoError> {
    let d = demo();
    let lang: Language = language.parse()?;
    let base = base_from_str(base)?;
    let target = match country.trim() {
        "" => None,
        c => Some(CountryCode::new(c)?),
    };
    // the baseline names no country
    let target = if base == SteeringBase::NoSteering && lang == Language::En { None } else { target };
    let strategy = SteeringStrategy::new(base, lang != Language::En, target.clone())?;
    let qn = &d.questionnaires[&lang];
    let id = QuestionId::new(d.question(question)?.id.as_str());
    let evaluated = qn
        .get(&id)
        .ok_or_else(|| DemoError::Input(format!("{id} is not in the {} questionnaire", lang.name())))?;
    let registry_country = if strategy.language_steering || base == SteeringBase::FewShotReal { target.as_ref() } else { None };
    let examples = select_few_shot_examples(
        registry_country,
        qn,
        &d.registry,
        &id,
        strategy.example_source(),
        seed,
        |ex| target.as_ref().and_then(|c| d.human.get(c, d.wave, ex).cloned()),
    )?;
    let presented = if shuffle { shuffle_option_order(evaluated, seed).0 } else { evaluated.clone() };
    let spec = PromptSpec {
        strategy,
        language: lang,
        question: presented,
        examples,
        template_id: template_id(lang, base),
        seed,
    };
    let prompt = render_prompt(&spec, &d.templates)?;
    Ok(PromptView { text: prompt.rendered, fingerprint: prompt.fingerprint.to_string(), template: spec.template_id })
}
