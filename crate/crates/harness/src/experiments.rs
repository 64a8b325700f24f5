//! Cell planning, execution and the five analysis pipelines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use futures::stream::{self, StreamExt};
use opinion_align::lang::{CountryCode, Language};
use opinion_align::metrics::{
    alignment_aggregate, build_alignment_matrix, classify_alignment_difference, filter_countries, group_answer,
    internal_consistency_rate, paired_t_test_stars, pearson_r, wave_trend, AlignmentClass, AlignmentScore,
    DistributionMap, GroupAnswer, ScoreMatrix, SignificanceResult, TrendPoint,
};
use opinion_align::parser::{parse_verbalized, FailureKind, ParseFailure, Repair};
use opinion_align::prompt::{
    render_prompt_with_count, select_few_shot_examples, shuffle_option_order, template_id, Permutation, PromptSpec,
    PromptText, SteeringBase, SteeringStrategy, EXAMPLE_COUNT,
};
use opinion_align::survey::{average_human_distribution, Question, QuestionId, Wave};
use serde::{Deserialize, Serialize};

use crate::gateway::{Gateway, GatewayError, RequestBudget};
use crate::ledger::{CellStatus, LedgerRecord, RunLedger};
use crate::manifest::{build_gateways, Dataset, RunManifest, Variant};
use crate::mock::MockQuery;
use crate::HarnessError;

/// One model answer: (model, strategy, language, target, question, variant).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub model: String,
    pub base: SteeringBase,
    pub language: Language,
    pub target: Option<CountryCode>,
    pub question: QuestionId,
    pub variant: Variant,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}|{}|{}",
            self.model,
            self.base,
            self.language,
            self.target.as_ref().map_or("-", |c| c.as_str()),
            self.question,
            self.variant.as_str()
        )
    }
}

impl CellKey {
    fn baseline(model: &str, question: &QuestionId, variant: Variant) -> Self {
        CellKey {
            model: model.to_string(),
            base: SteeringBase::NoSteering,
            language: Language::En,
            target: None,
            question: question.clone(),
            variant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Rq1,
    Rq2,
    Rq3,
    Sensitivity,
    Consistency,
}

impl Pipeline {
    pub const ALL: [Pipeline; 5] =
        [Pipeline::Rq1, Pipeline::Rq2, Pipeline::Rq3, Pipeline::Sensitivity, Pipeline::Consistency];
}

#[derive(Debug, Clone)]
pub struct PreparedCell {
    pub key: CellKey,
    pub prompt: PromptText,
    pub query: MockQuery,
    /// The question as shown, with relabelled keys when shuffled.
    pub presented: Question,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub cache_key: String,
    pub raw: String,
    pub cached: bool,
    /// Canonical-order probabilities and repairs, or the parse failure.
    pub parsed: Result<(Vec<f64>, Vec<Repair>), ParseFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub country: CountryCode,
    pub reason: String,
}

/// Countries RQ2 can steer toward, with the language to steer in.
pub fn rq2_targets(m: &RunManifest, data: &Dataset) -> (Vec<(CountryCode, Language)>, Vec<Skipped>) {
    let Some(cfg) = m.rq2() else { return (Vec::new(), Vec::new()) };
    let surveyed = data.surveyed_countries();
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for c in &cfg.countries {
        let skip = |reason: String| Skipped { country: c.clone(), reason };
        let Some(country) = data.countries.get(c) else {
            skipped.push(skip("not in the country list".into()));
            continue;
        };
        if !surveyed.contains(c) {
            skipped.push(skip(format!("no wave-{} counts", data.wave)));
            continue;
        }
        let Some(lang) = country.sole_language() else {
            skipped.push(skip(format!(
                "not surveyed in exactly one supported language ({})",
                country.survey_languages.join(", ")
            )));
            continue;
        };
        if lang == Language::En {
            skipped.push(skip("survey language is English".into()));
            continue;
        }
        if data.questionnaire(data.wave, lang).is_none() {
            skipped.push(skip(format!("no {} questionnaire for wave {}", lang.name(), data.wave)));
            continue;
        }
        let persona = cfg.strategies.iter().any(|b| *b != SteeringBase::NoSteering);
        if persona {
            if let Err(e) = data.templates.country_name(lang, c).and(data.templates.country_name(Language::En, c)) {
                skipped.push(skip(e.to_string()));
                continue;
            }
        }
        ok.push((c.clone(), lang));
    }
    (ok, skipped)
}

/// Countries scored in RQ1 and the sensitivity suite.
pub fn rq1_countries(m: &RunManifest, data: &Dataset) -> Vec<CountryCode> {
    match m.rq1() {
        Some(c) if !c.countries.is_empty() => c.countries.clone(),
        _ => data.surveyed_countries().into_iter().collect(),
    }
}

fn topic_questions(data: &Dataset) -> BTreeSet<QuestionId> {
    let evaluated: BTreeSet<&QuestionId> = data.questions.iter().collect();
    data.topics
        .iter()
        .flat_map(|t| t.items.iter().map(|i| &i.question))
        .filter(|q| evaluated.contains(q))
        .cloned()
        .collect()
}

/// Every cell the selected pipelines need, deduplicated.
pub fn plan_cells(m: &RunManifest, data: &Dataset, pipelines: &[Pipeline]) -> Result<BTreeSet<CellKey>, HarnessError> {
    let mut cells = BTreeSet::new();
    let has = |p: Pipeline| pipelines.contains(&p);
    if has(Pipeline::Rq1) {
        if let Some(cfg) = m.rq1() {
            for model in m.models_for(&cfg.models) {
                for q in &data.questions {
                    cells.insert(CellKey::baseline(&model.name, q, Variant::Default));
                }
            }
        }
    }
    if has(Pipeline::Rq2) {
        if let Some(cfg) = m.rq2() {
            let (targets, _) = rq2_targets(m, data);
            for model in m.models_for(&cfg.models) {
                for (country, lang) in &targets {
                    for &base in &cfg.strategies {
                        for language in [Language::En, *lang] {
                            // a question the target has no survey data for cannot be scored
                            for q in data.questions.iter().filter(|q| data.human.get(country, data.wave, q).is_some()) {
                                cells.insert(rq2_key(&model.name, base, language, country, q));
                            }
                        }
                    }
                }
            }
        }
    }
    if has(Pipeline::Rq3) {
        if let Some(cfg) = m.rq3() {
            let waves = rq3_waves(&cfg.waves)?;
            let canon = data.canonical_questions(&waves)?;
            for model in m.models_for(&cfg.models) {
                for e in &canon {
                    cells.insert(CellKey::baseline(&model.name, &e.ids[&data.wave], Variant::Default));
                }
            }
        }
    }
    if has(Pipeline::Sensitivity) {
        if let Some(cfg) = m.sensitivity() {
            for model in m.models_for(&cfg.models) {
                for q in &data.questions {
                    cells.insert(CellKey::baseline(&model.name, q, Variant::Default));
                    for &v in &cfg.variants {
                        cells.insert(CellKey::baseline(&model.name, q, v));
                    }
                }
            }
        }
    }
    if has(Pipeline::Consistency) {
        if let Some(cfg) = m.consistency() {
            let qs = topic_questions(data);
            for model in m.models_for(&cfg.models) {
                for q in &qs {
                    cells.insert(CellKey::baseline(&model.name, q, Variant::Default));
                }
            }
        }
    }
    Ok(cells)
}

fn rq2_key(model: &str, base: SteeringBase, language: Language, country: &CountryCode, q: &QuestionId) -> CellKey {
    // the unsteered English prompt names no country, so it is one cell for all targets
    let target = if base == SteeringBase::NoSteering && language == Language::En { None } else { Some(country.clone()) };
    CellKey { model: model.to_string(), base, language, target, question: q.clone(), variant: Variant::Default }
}

fn rq3_waves(waves: &[u8]) -> Result<Vec<Wave>, HarnessError> {
    let mut out: Vec<Wave> =
        waves.iter().map(|w| Wave::new(*w).map_err(|e| HarnessError::Config(e.to_string()))).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Renders the prompt for one cell.
pub fn prepare_cell(key: &CellKey, m: &RunManifest, data: &Dataset) -> Result<PreparedCell, HarnessError> {
    let qn = data.questionnaire(data.wave, key.language).ok_or_else(|| {
        HarnessError::Config(format!("no {} questionnaire for wave {}", key.language.name(), data.wave))
    })?;
    let question = qn
        .get(&key.question)
        .ok_or_else(|| HarnessError::Config(format!("{} not in the {} questionnaire", key.question, key.language.name())))?;
    let strategy = SteeringStrategy::new(key.base, key.language != Language::En, key.target.clone())?;
    let registry_country =
        if strategy.language_steering || key.base == SteeringBase::FewShotReal { key.target.as_ref() } else { None };
    let sens = m.sensitivity.as_ref();
    let seed = match key.variant {
        Variant::FewShotAlt => sens.map(|s| s.alt_seed).ok_or_else(|| HarnessError::Config("few_shot_alt needs [sensitivity] alt_seed".into()))?,
        _ => m.seed,
    };
    let wave = data.wave;
    let mut examples = select_few_shot_examples(
        registry_country,
        qn,
        &data.registry,
        &key.question,
        strategy.example_source(),
        seed,
        |id| key.target.as_ref().and_then(|c| data.human.get(c, wave, id).cloned()),
    )?;
    let count = if key.variant == Variant::FewShot3 { 3 } else { EXAMPLE_COUNT };
    examples.truncate(count);
    let (presented, permutation) = if key.variant == Variant::ShuffledOrder {
        let s = sens.map(|s| s.shuffle_seed).ok_or_else(|| HarnessError::Config("shuffled_order needs [sensitivity] shuffle_seed".into()))?;
        shuffle_option_order(question, s)
    } else {
        (question.clone(), Permutation::identity(question.scale_size()))
    };
    let spec = PromptSpec {
        strategy,
        language: key.language,
        question: presented.clone(),
        examples,
        template_id: template_id(key.language, key.base),
        seed,
    };
    let prompt = render_prompt_with_count(&spec, &data.templates, count)?;
    let query = MockQuery {
        question: key.question.clone(),
        n_options: question.scale_size(),
        language: key.language,
        permutation,
    };
    Ok(PreparedCell { key: key.clone(), prompt, query, presented })
}

pub fn prepare_all(cells: &BTreeSet<CellKey>, m: &RunManifest, data: &Dataset) -> Result<Vec<PreparedCell>, HarnessError> {
    cells.iter().map(|k| prepare_cell(k, m, data)).collect()
}

fn parse_cell(cell: &PreparedCell, raw: &str, tolerance: f64) -> Result<(Vec<f64>, Vec<Repair>), ParseFailure> {
    let p = parse_verbalized(raw, &cell.presented, tolerance)?;
    Ok((cell.query.permutation.canonicalize(p.probs.probs()), p.repairs))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Stop after this many uncached calls (simulates an interruption).
    pub max_requests: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Execution {
    pub cells: BTreeMap<CellKey, CellResult>,
    pub fetched: usize,
    pub cached: usize,
}

/// Fetches every cell through its model's gateway, recording progress in
/// the ledger. Models run one after another; cells of a model run
/// concurrently up to the gateway's limit.
pub async fn execute(
    prepared: &[PreparedCell],
    gateways: &BTreeMap<String, Arc<Gateway>>,
    ledger: &mut RunLedger,
    tolerance: f64,
) -> Result<Execution, HarnessError> {
    for cell in prepared {
        let id = cell.key.to_string();
        if ledger.status(&id).is_none() {
            ledger.append(LedgerRecord { cell: id, status: CellStatus::Pending, cache_key: None, elapsed_ms: None })?;
        }
    }
    ledger.flush()?;
    let mut by_model: BTreeMap<&str, Vec<&PreparedCell>> = BTreeMap::new();
    for c in prepared {
        by_model.entry(c.key.model.as_str()).or_default().push(c);
    }
    let mut out = Execution::default();
    let mut first_err: Option<GatewayError> = None;
    for (model, cells) in by_model {
        let gw = gateways.get(model).ok_or_else(|| HarnessError::Config(format!("no gateway for model {model}")))?;
        let mut results = stream::iter(cells)
            .map(|cell| {
                let gw = gw.clone();
                async move {
                    let t = Instant::now();
                    let r = gw.cached_complete(&cell.prompt, &cell.query).await;
                    (cell, r, t.elapsed().as_millis() as u64)
                }
            })
            .buffer_unordered(gw.max_concurrency());
        while let Some((cell, r, ms)) = results.next().await {
            let id = cell.key.to_string();
            match r {
                Ok((rec, hit)) => {
                    let status = if hit { CellStatus::Cached } else { CellStatus::Fetched };
                    if hit {
                        out.cached += 1;
                    } else {
                        out.fetched += 1;
                    }
                    ledger.append(LedgerRecord {
                        cell: id.clone(),
                        status,
                        cache_key: Some(rec.cache_key.clone()),
                        elapsed_ms: Some(ms),
                    })?;
                    let parsed = parse_cell(cell, &rec.raw_response, tolerance);
                    let terminal = if parsed.is_ok() { CellStatus::Scored } else { CellStatus::ParseFailed };
                    ledger.append(LedgerRecord { cell: id, status: terminal, cache_key: Some(rec.cache_key.clone()), elapsed_ms: None })?;
                    out.cells.insert(
                        cell.key.clone(),
                        CellResult { key: cell.key.clone(), cache_key: rec.cache_key, raw: rec.raw_response, cached: hit, parsed },
                    );
                }
                Err(e) => {
                    if first_err.is_none() {
                        log::error!("{id}: {e}");
                        first_err = Some(e);
                    }
                }
            }
        }
        ledger.flush()?;
        if first_err.is_some() {
            break;
        }
    }
    match first_err {
        Some(GatewayError::Interrupted) => Err(HarnessError::Interrupted { completed: out.fetched }),
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

// ----- results -----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCountry {
    pub rank: usize,
    pub country: CountryCode,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub model: String,
    /// Mean over countries of the per-country means.
    pub mean: Option<f64>,
    pub ranked: Vec<RankedCountry>,
    pub top: Vec<RankedCountry>,
    pub bottom: Vec<RankedCountry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedCell {
    pub model: String,
    pub country: CountryCode,
    pub a_model: f64,
    pub a_avg: f64,
    pub difference: f64,
    pub class: AlignmentClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub model: String,
    pub usable: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq1Result {
    /// Models × countries.
    pub matrix: ScoreMatrix,
    /// Average human distribution × countries (one row).
    pub average_human: ScoreMatrix,
    /// Per country, the mean over models.
    pub model_average: Vec<(CountryCode, Option<f64>)>,
    pub rankings: Vec<Ranking>,
    pub classifications: Vec<ClassifiedCell>,
    /// Countries × countries.
    pub heatmap: ScoreMatrix,
    pub coverage: Vec<Coverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Row {
    pub model: String,
    pub country: CountryCode,
    pub language: Language,
    pub strategy: SteeringBase,
    pub language_steering: bool,
    pub score: Option<AlignmentScore>,
    pub usable: usize,
    pub total: usize,
    /// Against the same strategy prompted in English.
    pub vs_english: Option<SignificanceResult>,
    /// Against the unsteered English prompt.
    pub vs_no_steering: Option<SignificanceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq2Result {
    pub rows: Vec<Rq2Row>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq3Model {
    pub model: String,
    pub candidates: Vec<CountryCode>,
    pub a_model: BTreeMap<CountryCode, f64>,
    pub a_avg: BTreeMap<CountryCode, f64>,
    pub filtered: Vec<CountryCode>,
    pub below_minimum: bool,
    /// Wave → country → mean alignment over the canonical questions.
    pub per_wave: BTreeMap<u8, BTreeMap<CountryCode, f64>>,
    pub trend: Vec<TrendPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq3Result {
    pub waves: Vec<u8>,
    pub canonical_questions: usize,
    pub tau: f64,
    pub min_filtered: usize,
    pub models: Vec<Rq3Model>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCell {
    pub variant: Variant,
    pub model: String,
    pub r: Option<f64>,
    pub error: Option<String>,
    pub countries: Vec<CountryCode>,
    pub default_means: Vec<f64>,
    pub variant_means: Vec<f64>,
    /// Largest per-(country, question) alignment change against the default run.
    pub max_question_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub cells: Vec<SensitivityCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemAnswer {
    pub question: QuestionId,
    /// 1-based group, `None` for a tie or a dropped item.
    pub group: Option<usize>,
    pub tie: bool,
    pub dropped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub model: String,
    pub topic: String,
    pub rate: Option<f64>,
    pub usable: usize,
    pub ties: usize,
    pub items: Vec<ItemAnswer>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub rows: Vec<ConsistencyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseFailureRow {
    pub cell: String,
    pub cache_key: String,
    pub kind: FailureKind,
    pub excerpt: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelCoverage {
    pub model: String,
    pub scored: usize,
    pub parse_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub cells: usize,
    pub scored: usize,
    pub parse_failed: usize,
    pub per_model: Vec<ModelCoverage>,
    pub repairs: BTreeMap<Repair, usize>,
    /// Scored cells that needed at least one repair.
    pub repaired_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub run_id: String,
    pub seed: u64,
    pub wave: u8,
    pub tau: f64,
    pub top_k: usize,
    pub rq1: Option<Rq1Result>,
    pub rq2: Option<Rq2Result>,
    pub rq3: Option<Rq3Result>,
    pub sensitivity: Option<SensitivityResult>,
    pub consistency: Option<ConsistencyResult>,
    pub coverage: CoverageSummary,
    pub parse_failures: Vec<ParseFailureRow>,
}

// ----- scoring -----

struct Scorer<'a> {
    m: &'a RunManifest,
    data: &'a Dataset,
    cells: &'a BTreeMap<CellKey, CellResult>,
}

impl Scorer<'_> {
    /// Parsed answers of one (model, strategy, language, target, variant) run.
    fn answers(&self, key: &CellKey, questions: &[QuestionId]) -> (DistributionMap, usize) {
        let mut out = DistributionMap::new();
        let mut total = 0;
        for q in questions {
            let k = CellKey { question: q.clone(), ..key.clone() };
            if let Some(r) = self.cells.get(&k) {
                total += 1;
                if let Ok((p, _)) = &r.parsed {
                    out.insert(q.clone(), p.clone());
                }
            }
        }
        (out, total)
    }

    fn human(&self, country: &CountryCode, wave: Wave, questions: &[QuestionId]) -> DistributionMap {
        questions
            .iter()
            .filter_map(|q| self.data.human.get(country, wave, q).map(|d| (q.clone(), d.probs().to_vec())))
            .collect()
    }

    fn average_human(&self, wave: Wave, questions: &[QuestionId]) -> DistributionMap {
        questions
            .iter()
            .filter_map(|q| {
                let ds = self.data.human.for_question(wave, q).map(|(_, d)| d);
                average_human_distribution(q, ds).ok().map(|d| (q.clone(), d.probs().to_vec()))
            })
            .collect()
    }

    fn score(a: &DistributionMap, b: &DistributionMap, questions: &[QuestionId]) -> Option<AlignmentScore> {
        alignment_aggregate(questions.iter().map(|q| (q, a.get(q).map(Vec::as_slice), b.get(q).map(Vec::as_slice)))).ok()
    }

    fn rq1(&self) -> Result<Rq1Result, HarnessError> {
        let cfg = self.m.rq1().expect("rq1 enabled");
        let qs = &self.data.questions;
        let countries = rq1_countries(self.m, self.data);
        let wave = self.data.wave;
        let human: Vec<(String, DistributionMap)> =
            countries.iter().map(|c| (c.to_string(), self.human(c, wave, qs))).collect();
        let cols: Vec<(String, &DistributionMap)> = human.iter().map(|(l, d)| (l.clone(), d)).collect();
        let mut model_rows = Vec::new();
        let mut coverage = Vec::new();
        for model in self.m.models_for(&cfg.models) {
            let (ans, total) = self.answers(&CellKey::baseline(&model.name, &qs[0], Variant::Default), qs);
            coverage.push(Coverage { model: model.name.clone(), usable: ans.len(), total });
            model_rows.push((model.name.clone(), ans));
        }
        let rows: Vec<(String, &DistributionMap)> = model_rows.iter().map(|(l, d)| (l.clone(), d)).collect();
        let matrix = build_alignment_matrix(&rows, &cols, qs);
        let avg = self.average_human(wave, qs);
        let average_human = build_alignment_matrix(&[("average-human".to_string(), &avg)], &cols, qs);
        let heatmap = build_alignment_matrix(&cols, &cols, qs);

        let model_average = countries
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let v: Vec<f64> = matrix.cells.iter().filter_map(|row| row[j].as_ref().map(|s| s.mean)).collect();
                (c.clone(), (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64))
            })
            .collect();

        let k = self.m.top_k;
        let mut rankings = Vec::new();
        let mut classifications = Vec::new();
        for (i, model) in matrix.rows.iter().enumerate() {
            let mut ranked: Vec<(CountryCode, f64)> = countries
                .iter()
                .enumerate()
                .filter_map(|(j, c)| matrix.cells[i][j].as_ref().map(|s| (c.clone(), s.mean)))
                .collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let ranked: Vec<RankedCountry> = ranked
                .into_iter()
                .enumerate()
                .map(|(r, (country, mean))| RankedCountry { rank: r + 1, country, mean })
                .collect();
            let n = ranked.len();
            let mean = (n > 0).then(|| ranked.iter().map(|r| r.mean).sum::<f64>() / n as f64);
            rankings.push(Ranking {
                model: model.clone(),
                mean,
                top: ranked[..k.min(n)].to_vec(),
                bottom: ranked[n - k.min(n)..].to_vec(),
                ranked,
            });
            for (j, c) in countries.iter().enumerate() {
                let (Some(a), Some(b)) = (&matrix.cells[i][j], &average_human.cells[0][j]) else { continue };
                classifications.push(ClassifiedCell {
                    model: model.clone(),
                    country: c.clone(),
                    a_model: a.mean,
                    a_avg: b.mean,
                    difference: a.mean - b.mean,
                    class: classify_alignment_difference(a.mean, b.mean, self.m.tau)?,
                });
            }
        }
        Ok(Rq1Result { matrix, average_human, model_average, rankings, classifications, heatmap, coverage })
    }

    fn rq2(&self) -> Result<Rq2Result, HarnessError> {
        let cfg = self.m.rq2().expect("rq2 enabled");
        let (targets, skipped) = rq2_targets(self.m, self.data);
        let qs = &self.data.questions;
        let wave = self.data.wave;
        let mut rows = Vec::new();
        for model in self.m.models_for(&cfg.models) {
            for (country, lang) in &targets {
                let human = self.human(country, wave, qs);
                let per_q = |base: SteeringBase, language: Language| {
                    let (ans, total) = self.answers(&rq2_key(&model.name, base, language, country, &qs[0]), qs);
                    (Self::score(&ans, &human, qs), ans.len(), total)
                };
                let baseline = per_q(SteeringBase::NoSteering, Language::En).0;
                for &base in &cfg.strategies {
                    let english = per_q(base, Language::En).0;
                    for (language, steered) in [(Language::En, false), (*lang, true)] {
                        let (score, usable, total) = per_q(base, language);
                        let vs_english = if steered { self.t_test(&score, &english) } else { None };
                        let vs_no_steering = if base == SteeringBase::NoSteering && !steered {
                            None
                        } else {
                            self.t_test(&score, &baseline)
                        };
                        rows.push(Rq2Row {
                            model: model.name.clone(),
                            country: country.clone(),
                            language,
                            strategy: base,
                            language_steering: steered,
                            score,
                            usable,
                            total,
                            vs_english,
                            vs_no_steering,
                        });
                    }
                }
            }
        }
        Ok(Rq2Result { rows, skipped })
    }

    /// Paired over the questions both runs scored.
    fn t_test(&self, a: &Option<AlignmentScore>, b: &Option<AlignmentScore>) -> Option<SignificanceResult> {
        let (a, b) = (a.as_ref()?, b.as_ref()?);
        let shared: BTreeMap<&QuestionId, f64> =
            a.per_question.iter().filter(|(q, _)| b.per_question.contains_key(*q)).map(|(q, v)| (q, *v)).collect();
        let other: BTreeMap<&QuestionId, f64> =
            b.per_question.iter().filter(|(q, _)| shared.contains_key(q)).map(|(q, v)| (q, *v)).collect();
        match paired_t_test_stars(&shared, &other, self.m.t_test) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("t-test skipped: {e}");
                None
            }
        }
    }

    fn rq3(&self) -> Result<Rq3Result, HarnessError> {
        let cfg = self.m.rq3().expect("rq3 enabled");
        let waves = rq3_waves(&cfg.waves)?;
        let canon = self.data.canonical_questions(&waves)?;
        let w7 = self.data.wave;
        let canonical_ids: Vec<QuestionId> = canon.iter().map(|e| e.canonical_id.clone()).collect();
        let at_wave = |w: Wave| -> Vec<QuestionId> { canon.iter().map(|e| e.ids[&w].clone()).collect() };
        // human distributions re-keyed by canonical id
        let rekey = |m: DistributionMap, w: Wave| -> DistributionMap {
            canon.iter().filter_map(|e| m.get(&e.ids[&w]).map(|d| (e.canonical_id.clone(), d.clone()))).collect()
        };
        let candidates: Vec<CountryCode> = {
            let mut sets = waves.iter().map(|w| self.data.human.countries(*w));
            let first = sets.next().unwrap_or_default();
            sets.fold(first, |acc, s| acc.intersection(&s).cloned().collect()).into_iter().collect()
        };
        let avg7 = rekey(self.average_human(w7, &at_wave(w7)), w7);
        let mut models = Vec::new();
        for model in self.m.models_for(&cfg.models) {
            let (ans, _) = self.answers(&CellKey::baseline(&model.name, &at_wave(w7)[0], Variant::Default), &at_wave(w7));
            let ans = rekey(ans, w7);
            let mut a_model = BTreeMap::new();
            let mut a_avg = BTreeMap::new();
            for c in &candidates {
                let h = rekey(self.human(c, w7, &at_wave(w7)), w7);
                if let (Some(a), Some(b)) =
                    (Self::score(&ans, &h, &canonical_ids), Self::score(&avg7, &h, &canonical_ids))
                {
                    a_model.insert(c.clone(), a.mean);
                    a_avg.insert(c.clone(), b.mean);
                }
            }
            let filtered: Vec<CountryCode> = filter_countries(&a_model, &a_avg, self.m.tau)?.into_iter().collect();
            let below_minimum = filtered.len() < self.m.min_filtered;
            if below_minimum {
                log::warn!(
                    "{}: only {} countries within tau = {} (minimum {})",
                    model.name,
                    filtered.len(),
                    self.m.tau,
                    self.m.min_filtered
                );
            }
            let mut per_wave = BTreeMap::new();
            let mut series = BTreeMap::new();
            for &w in &waves {
                let mut by_country = BTreeMap::new();
                for c in &filtered {
                    let h = rekey(self.human(c, w, &at_wave(w)), w);
                    if let Some(s) = Self::score(&ans, &h, &canonical_ids) {
                        by_country.insert(c.clone(), s.mean);
                    }
                }
                if !by_country.is_empty() {
                    series.insert(w.get(), by_country.values().copied().collect::<Vec<f64>>());
                }
                per_wave.insert(w.get(), by_country);
            }
            let trend = if series.is_empty() { Vec::new() } else { wave_trend(&series)? };
            models.push(Rq3Model {
                model: model.name.clone(),
                candidates: candidates.clone(),
                a_model,
                a_avg,
                filtered,
                below_minimum,
                per_wave,
                trend,
            });
        }
        Ok(Rq3Result {
            waves: waves.iter().map(|w| w.get()).collect(),
            canonical_questions: canon.len(),
            tau: self.m.tau,
            min_filtered: self.m.min_filtered,
            models,
        })
    }

    fn sensitivity(&self) -> Result<SensitivityResult, HarnessError> {
        let cfg = self.m.sensitivity().expect("sensitivity enabled");
        let qs = &self.data.questions;
        let countries = rq1_countries(self.m, self.data);
        let humans: Vec<DistributionMap> = countries.iter().map(|c| self.human(c, self.data.wave, qs)).collect();
        let mut cells = Vec::new();
        for &variant in &cfg.variants {
            for model in self.m.models_for(&cfg.models) {
                let (base, _) = self.answers(&CellKey::baseline(&model.name, &qs[0], Variant::Default), qs);
                let (alt, _) = self.answers(&CellKey::baseline(&model.name, &qs[0], variant), qs);
                let mut used = Vec::new();
                let mut dm = Vec::new();
                let mut vm = Vec::new();
                let mut max_diff: Option<f64> = None;
                for (c, h) in countries.iter().zip(&humans) {
                    let (Some(a), Some(b)) = (Self::score(&base, h, qs), Self::score(&alt, h, qs)) else { continue };
                    for (q, x) in &a.per_question {
                        if let Some(y) = b.per_question.get(q) {
                            let d = (x - y).abs();
                            max_diff = Some(max_diff.map_or(d, |m| m.max(d)));
                        }
                    }
                    used.push(c.clone());
                    dm.push(a.mean);
                    vm.push(b.mean);
                }
                let (r, error) = if used.len() < 2 {
                    (None, Some(format!("{} countries scored; correlation needs at least 2", used.len())))
                } else {
                    match pearson_r(&dm, &vm) {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(e.to_string())),
                    }
                };
                cells.push(SensitivityCell {
                    variant,
                    model: model.name.clone(),
                    r,
                    error,
                    countries: used,
                    default_means: dm,
                    variant_means: vm,
                    max_question_diff: max_diff,
                });
            }
        }
        Ok(SensitivityResult { cells })
    }

    fn consistency(&self) -> Result<ConsistencyResult, HarnessError> {
        let cfg = self.m.consistency().expect("consistency enabled");
        let en = self
            .data
            .questionnaire(self.data.wave, Language::En)
            .ok_or_else(|| HarnessError::Data("no English questionnaire".into()))?;
        let mut rows = Vec::new();
        for model in self.m.models_for(&cfg.models) {
            for topic in &self.data.topics {
                let mut items = Vec::new();
                let mut answers = Vec::new();
                for item in &topic.items {
                    let drop = |why: &str| ItemAnswer { question: item.question.clone(), group: None, tie: false, dropped: Some(why.into()) };
                    let Some(q) = en.get(&item.question) else {
                        items.push(drop("not among the evaluated questions"));
                        continue;
                    };
                    let key = CellKey::baseline(&model.name, &item.question, Variant::Default);
                    let probs = match self.cells.get(&key).map(|r| &r.parsed) {
                        Some(Ok((p, _))) => p,
                        Some(Err(f)) => {
                            items.push(drop(&format!("unparseable answer ({})", f.kind)));
                            continue;
                        }
                        None => {
                            items.push(drop("no answer"));
                            continue;
                        }
                    };
                    let ans = group_answer(probs, &item.group_map(q)?)?;
                    answers.push(ans);
                    items.push(match ans {
                        GroupAnswer::Group(g) => ItemAnswer { question: item.question.clone(), group: Some(g + 1), tie: false, dropped: None },
                        GroupAnswer::Tie => ItemAnswer { question: item.question.clone(), group: None, tie: true, dropped: None },
                    });
                }
                let ties = answers.iter().filter(|a| **a == GroupAnswer::Tie).count();
                let (rate, skipped) = if answers.len() < 2 {
                    (None, Some(format!("{} usable items; at least 2 needed", answers.len())))
                } else {
                    (Some(internal_consistency_rate(&answers)?), None)
                };
                rows.push(ConsistencyRow {
                    model: model.name.clone(),
                    topic: topic.name.clone(),
                    rate,
                    usable: answers.len(),
                    ties,
                    items,
                    skipped,
                });
            }
        }
        Ok(ConsistencyResult { rows })
    }
}

/// Scores the fetched cells for the selected pipelines.
pub fn score(
    m: &RunManifest,
    data: &Dataset,
    cells: &BTreeMap<CellKey, CellResult>,
    pipelines: &[Pipeline],
) -> Result<RunResults, HarnessError> {
    let s = Scorer { m, data, cells };
    let on = |p: Pipeline| pipelines.contains(&p);
    if data.questions.is_empty() {
        return Err(HarnessError::Data("no questions to evaluate".into()));
    }
    let mut coverage = CoverageSummary { cells: cells.len(), ..Default::default() };
    let mut per_model: BTreeMap<&str, ModelCoverage> = BTreeMap::new();
    let mut parse_failures = Vec::new();
    for r in cells.values() {
        let mc = per_model
            .entry(r.key.model.as_str())
            .or_insert_with(|| ModelCoverage { model: r.key.model.clone(), ..Default::default() });
        match &r.parsed {
            Ok((_, repairs)) => {
                coverage.scored += 1;
                mc.scored += 1;
                if !repairs.is_empty() {
                    coverage.repaired_cells += 1;
                }
                for rep in repairs {
                    *coverage.repairs.entry(*rep).or_insert(0) += 1;
                }
            }
            Err(f) => {
                coverage.parse_failed += 1;
                mc.parse_failed += 1;
                parse_failures.push(ParseFailureRow {
                    cell: r.key.to_string(),
                    cache_key: r.cache_key.clone(),
                    kind: f.kind,
                    excerpt: f.excerpt.clone(),
                });
            }
        }
    }
    coverage.per_model = per_model.into_values().collect();
    Ok(RunResults {
        run_id: m.run_id.clone(),
        seed: m.seed,
        wave: m.wave,
        tau: m.tau,
        top_k: m.top_k,
        rq1: if on(Pipeline::Rq1) && m.rq1().is_some() { Some(s.rq1()?) } else { None },
        rq2: if on(Pipeline::Rq2) && m.rq2().is_some() { Some(s.rq2()?) } else { None },
        rq3: if on(Pipeline::Rq3) && m.rq3().is_some() { Some(s.rq3()?) } else { None },
        sensitivity: if on(Pipeline::Sensitivity) && m.sensitivity().is_some() { Some(s.sensitivity()?) } else { None },
        consistency: if on(Pipeline::Consistency) && m.consistency().is_some() { Some(s.consistency()?) } else { None },
        coverage,
        parse_failures,
    })
}

/// A finished (or dry) run: scored results plus fetch statistics.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: RunResults,
    pub execution: Execution,
    pub prepared: Vec<PreparedCell>,
}

/// Plans, fetches and scores. Writes the ledger but not the report.
pub async fn run_pipelines(
    m: &RunManifest,
    data: &Dataset,
    pipelines: &[Pipeline],
    opts: &RunOptions,
) -> Result<RunOutput, HarnessError> {
    let cells = plan_cells(m, data, pipelines)?;
    let prepared = prepare_all(&cells, m, data)?;
    let budget = opts.max_requests.map(RequestBudget::new);
    let gateways = build_gateways(m, data, true)?
        .into_iter()
        .map(|(k, g)| {
            let g = Arc::try_unwrap(g).expect("fresh gateway");
            let g = match &budget {
                Some(b) => g.with_budget(b.clone()),
                None => g,
            };
            (k, Arc::new(g))
        })
        .collect();
    let run_dir = m.run_dir();
    std::fs::create_dir_all(&run_dir).map_err(crate::io_err(&run_dir))?;
    let mut ledger = RunLedger::open(&run_dir.join("ledger.jsonl"))?;
    let execution = execute(&prepared, &gateways, &mut ledger, m.parser_tolerance).await?;
    let results = score(m, data, &execution.cells, pipelines)?;
    Ok(RunOutput { results, execution, prepared })
}

/// Renders every planned prompt without contacting any backend.
pub fn dry_run(m: &RunManifest, data: &Dataset, pipelines: &[Pipeline]) -> Result<Vec<PreparedCell>, HarnessError> {
    let cells = plan_cells(m, data, pipelines)?;
    prepare_all(&cells, m, data)
}
