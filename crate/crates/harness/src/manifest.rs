//! Run manifest (TOML) and the data it points at.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use opinion_align::lang::{load_countries, Country, CountryCode, Language};
use opinion_align::metrics::{parse_topics, ConsistencyTopic, TTestKind};
use opinion_align::prompt::{FewShotRegistry, SteeringBase, Templates};
use opinion_align::survey::{
    apply_exclusion_rules, intersect_waves, load_crossmap, load_exclusion_rules, load_questionnaire,
    load_response_counts, questionnaire_file_name, HumanTable, QuestionId, Questionnaire, Wave, WaveCrossMap,
};
use serde::{Deserialize, Serialize};

use crate::gateway::{Backend, GenerationParams, Gateway, ProviderConfig, ResponseCache, RetryPolicy, MessageScheme};
use crate::mock::{MockBehavior, MockRespondent, MockTable};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub run_id: String,
    pub seed: u64,
    #[serde(default = "default_wave")]
    pub wave: u8,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_tolerance")]
    pub parser_tolerance: f64,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_min_filtered")]
    pub min_filtered: usize,
    #[serde(default)]
    pub t_test: TTestKind,
    /// Restricts every pipeline to these question ids (after exclusions).
    #[serde(default)]
    pub questions: Option<Vec<String>>,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub data: DataPaths,
    #[serde(default)]
    pub params: GenerationParams,
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub rq1: Option<Rq1Config>,
    #[serde(default)]
    pub rq2: Option<Rq2Config>,
    #[serde(default)]
    pub rq3: Option<Rq3Config>,
    #[serde(default)]
    pub sensitivity: Option<SensitivityConfig>,
    #[serde(default)]
    pub consistency: Option<ConsistencyConfig>,
}

fn default_wave() -> u8 {
    7
}
fn default_tau() -> f64 {
    0.02
}
fn default_tolerance() -> f64 {
    opinion_align::parser::DEFAULT_TOLERANCE
}
fn default_top_k() -> usize {
    6
}
fn default_min_filtered() -> usize {
    5
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    /// Directory of `WV{wave}_{Language}.jsonl` files.
    pub questions: PathBuf,
    pub counts: Vec<PathBuf>,
    /// Directory of `exclusions_WV{wave}.csv` files.
    pub rules: PathBuf,
    pub crossmap: PathBuf,
    pub countries: PathBuf,
    pub few_shot_registry: PathBuf,
    pub consistency_topics: PathBuf,
    /// Overrides the built-in instruction templates.
    #[serde(default)]
    pub templates: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Mock {
        #[serde(flatten)]
        behavior: MockBehavior,
    },
    Openai {
        base_url: String,
        model_id: String,
        #[serde(default)]
        auth_env: Option<String>,
        #[serde(default = "default_concurrency")]
        max_concurrency: usize,
        #[serde(default)]
        retry: RetryPolicy,
        #[serde(default)]
        requests_per_second: Option<f64>,
        #[serde(default)]
        messages: MessageScheme,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
}

fn default_concurrency() -> usize {
    4
}
fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: ModelKind,
}

impl ModelConfig {
    /// Identity used in cache keys.
    pub fn model_id(&self) -> String {
        match &self.kind {
            ModelKind::Mock { .. } => format!("mock-{}", self.name),
            ModelKind::Openai { model_id, .. } => model_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rq1Config {
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Empty: every country with counts for the manifest wave.
    #[serde(default)]
    pub countries: Vec<CountryCode>,
    /// Empty: every model.
    #[serde(default)]
    pub models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rq2Config {
    #[serde(default = "yes")]
    pub enabled: bool,
    pub countries: Vec<CountryCode>,
    #[serde(default = "all_bases")]
    pub strategies: Vec<SteeringBase>,
    #[serde(default)]
    pub models: Vec<String>,
}

fn all_bases() -> Vec<SteeringBase> {
    SteeringBase::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rq3Config {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "all_waves")]
    pub waves: Vec<u8>,
    #[serde(default)]
    pub models: Vec<String>,
}

fn all_waves() -> Vec<u8> {
    vec![5, 6, 7]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Default,
    ShuffledOrder,
    FewShot3,
    FewShotAlt,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::ShuffledOrder => "shuffled_order",
            Variant::FewShot3 => "few_shot3",
            Variant::FewShotAlt => "few_shot_alt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "all_variants")]
    pub variants: Vec<Variant>,
    pub alt_seed: u64,
    pub shuffle_seed: u64,
    #[serde(default)]
    pub models: Vec<String>,
}

fn all_variants() -> Vec<Variant> {
    vec![Variant::ShuffledOrder, Variant::FewShot3, Variant::FewShotAlt]
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub models: Vec<String>,
}

impl RunManifest {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("manifest: {e}")))
    }

    /// Loads a manifest; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let mut m = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        m.resolve_paths(base);
        Ok(m)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        fix(&mut self.cache_dir);
        let d = &mut self.data;
        for p in [&mut d.questions, &mut d.rules, &mut d.crossmap, &mut d.countries, &mut d.few_shot_registry, &mut d.consistency_topics] {
            fix(p);
        }
        d.counts.iter_mut().for_each(fix);
        if let Some(t) = d.templates.as_mut() {
            fix(t);
        }
    }

    pub fn wave(&self) -> Result<Wave, HarnessError> {
        Wave::new(self.wave).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn run_dir(&self) -> PathBuf {
        self.out_dir.join(&self.run_id)
    }

    /// Where the result bundle goes (next to the ledger, which is not part of it).
    pub fn report_dir(&self) -> PathBuf {
        self.run_dir()
    }

    pub fn rq1(&self) -> Option<&Rq1Config> {
        self.rq1.as_ref().filter(|c| c.enabled)
    }
    pub fn rq2(&self) -> Option<&Rq2Config> {
        self.rq2.as_ref().filter(|c| c.enabled)
    }
    pub fn rq3(&self) -> Option<&Rq3Config> {
        self.rq3.as_ref().filter(|c| c.enabled)
    }
    pub fn sensitivity(&self) -> Option<&SensitivityConfig> {
        self.sensitivity.as_ref().filter(|c| c.enabled)
    }
    pub fn consistency(&self) -> Option<&ConsistencyConfig> {
        self.consistency.as_ref().filter(|c| c.enabled)
    }

    /// Models named in `subset`, or all of them when it is empty.
    pub fn models_for<'a>(&'a self, subset: &'a [String]) -> impl Iterator<Item = &'a ModelConfig> + 'a {
        self.models.iter().filter(move |m| subset.is_empty() || subset.contains(&m.name))
    }

    /// Static checks that need no data files.
    pub fn check(&self) -> Result<(), HarnessError> {
        let mut names = BTreeSet::new();
        for m in &self.models {
            if !names.insert(&m.name) {
                return Err(HarnessError::Config(format!("duplicate model name {}", m.name)));
            }
            if let ModelKind::Mock { behavior: MockBehavior::Noisy { sigma, .. } } = &m.kind {
                if !(*sigma >= 0.0 && sigma.is_finite()) {
                    return Err(HarnessError::Config(format!("{}: sigma must be non-negative", m.name)));
                }
            }
        }
        let subsets: [(&str, Option<&Vec<String>>); 5] = [
            ("rq1", self.rq1().map(|c| &c.models)),
            ("rq2", self.rq2().map(|c| &c.models)),
            ("rq3", self.rq3().map(|c| &c.models)),
            ("sensitivity", self.sensitivity().map(|c| &c.models)),
            ("consistency", self.consistency().map(|c| &c.models)),
        ];
        for (section, models) in subsets {
            for name in models.into_iter().flatten() {
                if !names.contains(name) {
                    return Err(HarnessError::Config(format!("[{section}] names unknown model {name}")));
                }
            }
        }
        if self.tau.is_nan() || self.tau < 0.0 {
            return Err(HarnessError::Config(format!("tau must be non-negative, got {}", self.tau)));
        }
        if self.parser_tolerance.is_nan() || self.parser_tolerance < 0.0 {
            return Err(HarnessError::Config("parser_tolerance must be non-negative".into()));
        }
        self.wave()?;
        if let Some(r) = self.rq3() {
            for w in &r.waves {
                Wave::new(*w).map_err(|e| HarnessError::Config(format!("[rq3] {e}")))?;
            }
            if !r.waves.contains(&self.wave) {
                return Err(HarnessError::Config(format!("[rq3] waves must include the manifest wave {}", self.wave)));
            }
        }
        Ok(())
    }
}

/// Everything loaded from disk for one run.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub wave: Wave,
    /// Post-exclusion questionnaires by (wave, language).
    pub questionnaires: BTreeMap<(Wave, Language), Questionnaire>,
    /// Evaluated question ids at the manifest wave, in questionnaire order.
    pub questions: Vec<QuestionId>,
    pub crossmap: Vec<WaveCrossMap>,
    pub human: HumanTable,
    pub countries: BTreeMap<CountryCode, Country>,
    pub registry: FewShotRegistry,
    pub topics: Vec<ConsistencyTopic>,
    pub templates: Templates,
}

impl Dataset {
    pub fn load(m: &RunManifest) -> Result<Self, HarnessError> {
        m.check()?;
        let wave = m.wave()?;
        let mut waves: BTreeSet<Wave> = BTreeSet::from([wave]);
        if let Some(r) = m.rq3() {
            for w in &r.waves {
                waves.insert(Wave::new(*w).map_err(|e| HarnessError::Config(e.to_string()))?);
            }
        }
        let mut questionnaires = BTreeMap::new();
        for &w in &waves {
            let rules_path = m.data.rules.join(format!("exclusions_WV{}.csv", w.get()));
            let rules = if rules_path.exists() { load_exclusion_rules(&rules_path)? } else { Vec::new() };
            for lang in Language::ALL {
                let path = m.data.questions.join(questionnaire_file_name(w, lang));
                if !path.exists() {
                    continue;
                }
                let raw = load_questionnaire(&path, lang, w)?;
                let filtered = apply_exclusion_rules(&raw, &rules).kept;
                questionnaires.insert((w, lang), filtered);
            }
            if !questionnaires.contains_key(&(w, Language::En)) {
                return Err(HarnessError::Data(format!(
                    "no English questionnaire for wave {w} under {}",
                    m.data.questions.display()
                )));
            }
        }
        let base = &questionnaires[&(wave, Language::En)];
        let mut questions: Vec<QuestionId> = base.questions.iter().map(|q| q.id.clone()).collect();
        if let Some(only) = &m.questions {
            for id in only {
                if base.get(&QuestionId::new(id.clone())).is_none() {
                    return Err(HarnessError::Config(format!("question {id} is not among the retained wave-{wave} questions")));
                }
            }
            questions.retain(|q| only.iter().any(|o| o == q.as_str()));
        }
        let crossmap = load_crossmap(&m.data.crossmap)?;
        let paths: Vec<&Path> = m.data.counts.iter().map(PathBuf::as_path).collect();
        let counts = load_response_counts(&paths)?;
        let english: Vec<&Questionnaire> =
            questionnaires.iter().filter(|((_, l), _)| *l == Language::En).map(|(_, q)| q).collect();
        let human = HumanTable::build(&counts, english);
        for (c, w, e) in &human.join_errors {
            log::warn!("counts for {c} wave {w} not usable: {e}");
        }
        let countries = load_countries(&m.data.countries)
            .map_err(|e| HarnessError::Data(e.to_string()))?
            .into_iter()
            .map(|c| (c.code.clone(), c))
            .collect::<BTreeMap<_, _>>();
        let registry = FewShotRegistry::load(&m.data.few_shot_registry)?;
        let topics_text = std::fs::read_to_string(&m.data.consistency_topics)
            .map_err(|e| HarnessError::Data(format!("{}: {e}", m.data.consistency_topics.display())))?;
        let topics = parse_topics(&topics_text)?;
        let templates = match &m.data.templates {
            Some(dir) => Templates::from_dir(dir)?,
            None => Templates::builtin(),
        }
        .with_english_names(countries.values().map(|c| (c.code.clone(), c.name.clone())));
        Ok(Dataset { wave, questionnaires, questions, crossmap, human, countries, registry, topics, templates })
    }

    pub fn questionnaire(&self, wave: Wave, lang: Language) -> Option<&Questionnaire> {
        self.questionnaires.get(&(wave, lang))
    }

    /// Countries with counts at the manifest wave.
    pub fn surveyed_countries(&self) -> BTreeSet<CountryCode> {
        self.human.countries(self.wave)
    }

    /// Cross-wave entries for `waves`, restricted to the evaluated questions.
    pub fn canonical_questions(&self, waves: &[Wave]) -> Result<Vec<WaveCrossMap>, HarnessError> {
        let mut qs = BTreeMap::new();
        for w in waves {
            let q = self
                .questionnaire(*w, Language::En)
                .ok_or_else(|| HarnessError::Data(format!("no English questionnaire for wave {w}")))?;
            qs.insert(*w, q.clone());
        }
        let evaluated: BTreeSet<&QuestionId> = self.questions.iter().collect();
        Ok(intersect_waves(&qs, &self.crossmap)?
            .into_iter()
            .filter(|e| e.ids.get(&self.wave).is_some_and(|id| evaluated.contains(id)))
            .collect())
    }

    pub fn mock_table(&self) -> MockTable {
        MockTable::from_human(&self.human, self.wave, &self.questions)
    }
}

/// One gateway per configured model.
pub fn build_gateways(
    m: &RunManifest,
    data: &Dataset,
    use_cache: bool,
) -> Result<BTreeMap<String, Arc<Gateway>>, HarnessError> {
    let table = Arc::new(data.mock_table());
    let cache = use_cache.then(|| ResponseCache::new(&m.cache_dir));
    let mut out = BTreeMap::new();
    for model in &m.models {
        let backend = match &model.kind {
            ModelKind::Mock { behavior } => Backend::Mock(MockRespondent::new(behavior.clone(), table.clone(), m.seed)),
            ModelKind::Openai {
                base_url,
                model_id,
                auth_env,
                max_concurrency,
                retry,
                requests_per_second,
                messages,
                timeout_secs,
            } => Backend::Http(ProviderConfig {
                name: model.name.clone(),
                base_url: base_url.clone(),
                model_id: model_id.clone(),
                auth_env: auth_env.clone(),
                max_concurrency: *max_concurrency,
                retry: retry.clone(),
                requests_per_second: *requests_per_second,
                messages: *messages,
                timeout_secs: *timeout_secs,
            }),
        };
        let g = Gateway::new(model.name.clone(), model.model_id(), backend, m.params.clone(), cache.clone())?;
        out.insert(model.name.clone(), Arc::new(g));
    }
    Ok(out)
}
