//! Distances, alignment scores and the statistics built on them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::survey::{Question, QuestionId};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("scale size {0} is below 2")]
    InvalidScale(usize),
    #[error("no usable data: {0}")]
    MissingData(String),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("need at least 2 paired values, got {0}")]
    InsufficientData(usize),
    #[error("negative margin {0}")]
    NegativeMargin(f64),
    #[error("topic item {question}: {message}")]
    Topic { question: String, message: String },
}

/// Earth mover's distance between two histograms on unit-spaced ordinal bins:
/// the L1 distance between their CDFs over the first N−1 bins.
pub fn wasserstein_1d(p: &[f64], q: &[f64]) -> Result<f64, MetricsError> {
    if p.len() != q.len() {
        return Err(MetricsError::Shape(format!("lengths {} and {}", p.len(), q.len())));
    }
    let n = p.len();
    let (mut cp, mut cq, mut wd) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..n.saturating_sub(1) {
        cp += p[k];
        cq += q[k];
        wd += (cp - cq).abs();
    }
    Ok(wd)
}

/// `1 − WD/(N−1)`, clamped to [0, 1] against float drift.
pub fn alignment_per_question(p_model: &[f64], p_country: &[f64], n: usize) -> Result<f64, MetricsError> {
    if n < 2 {
        return Err(MetricsError::InvalidScale(n));
    }
    if p_model.len() != n || p_country.len() != n {
        return Err(MetricsError::Shape(format!(
            "scale size {n} but distributions of length {} and {}",
            p_model.len(),
            p_country.len()
        )));
    }
    let wd = wasserstein_1d(p_model, p_country)?;
    Ok((1.0 - wd / (n - 1) as f64).clamp(0.0, 1.0))
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentScore {
    pub per_question: BTreeMap<QuestionId, f64>,
    pub mean: f64,
    pub std: f64,
    pub n_questions: usize,
    /// Questions skipped because one side had no distribution.
    pub n_missing: usize,
}

impl AlignmentScore {
    pub fn from_values(per_question: BTreeMap<QuestionId, f64>, n_missing: usize) -> Result<Self, MetricsError> {
        let values: Vec<f64> = per_question.values().copied().collect();
        let (mean, std) = mean_std(&values)
            .ok_or_else(|| MetricsError::MissingData(format!("0 usable questions, {n_missing} missing")))?;
        Ok(AlignmentScore { n_questions: values.len(), per_question, mean, std, n_missing })
    }
}

/// Per-question pair; either side may be absent.
pub type QuestionPair<'a> = (&'a QuestionId, Option<&'a [f64]>, Option<&'a [f64]>);

/// Mean and std of per-question alignment; questions missing a side are
/// excluded and counted.
pub fn alignment_aggregate<'a, I>(pairs: I) -> Result<AlignmentScore, MetricsError>
where
    I: IntoIterator<Item = QuestionPair<'a>>,
{
    let mut per_question = BTreeMap::new();
    let mut missing = 0;
    for (id, model, country) in pairs {
        match (model, country) {
            (Some(m), Some(c)) => {
                let a = alignment_per_question(m, c, c.len())?;
                per_question.insert(id.clone(), a);
            }
            _ => missing += 1,
        }
    }
    AlignmentScore::from_values(per_question, missing)
}

/// Distributions of one source (a model run or a country) by question.
pub type DistributionMap = BTreeMap<QuestionId, Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `cells[r][c]`; `None` when the pair shares no scored question.
    pub cells: Vec<Vec<Option<AlignmentScore>>>,
}

impl ScoreMatrix {
    pub fn get(&self, row: &str, col: &str) -> Option<&AlignmentScore> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.cols.iter().position(|x| x == col)?;
        self.cells[r][c].as_ref()
    }

    pub fn mean(&self, row: &str, col: &str) -> Option<f64> {
        self.get(row, col).map(|s| s.mean)
    }
}

pub fn build_alignment_matrix(
    rows: &[(String, &DistributionMap)],
    cols: &[(String, &DistributionMap)],
    questions: &[QuestionId],
) -> ScoreMatrix {
    let cells = rows
        .iter()
        .map(|(_, r)| {
            cols.iter()
                .map(|(_, c)| {
                    let pairs = questions
                        .iter()
                        .map(|q| (q, r.get(q).map(Vec::as_slice), c.get(q).map(Vec::as_slice)));
                    alignment_aggregate(pairs).ok()
                })
                .collect()
        })
        .collect();
    ScoreMatrix {
        rows: rows.iter().map(|(l, _)| l.clone()).collect(),
        cols: cols.iter().map(|(l, _)| l.clone()).collect(),
        cells,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlignmentClass {
    Over,
    Under,
    Appropriate,
}

pub fn classify_alignment_difference(a_model: f64, a_avg: f64, tau: f64) -> Result<AlignmentClass, MetricsError> {
    if tau < 0.0 {
        return Err(MetricsError::NegativeMargin(tau));
    }
    let d = a_model - a_avg;
    Ok(if d > tau {
        AlignmentClass::Over
    } else if d < -tau {
        AlignmentClass::Under
    } else {
        AlignmentClass::Appropriate
    })
}

/// Countries whose model alignment is within `tau` of their alignment with
/// the average-human baseline (strict inequality).
pub fn filter_countries<K: Ord + Clone>(
    a_model: &BTreeMap<K, f64>,
    a_avg: &BTreeMap<K, f64>,
    tau: f64,
) -> Result<BTreeSet<K>, MetricsError> {
    if tau < 0.0 {
        return Err(MetricsError::NegativeMargin(tau));
    }
    if a_model.len() != a_avg.len() || a_model.keys().any(|k| !a_avg.contains_key(k)) {
        return Err(MetricsError::Shape("model and baseline score maps have different keys".into()));
    }
    Ok(a_model
        .iter()
        .filter(|(k, m)| (*m - a_avg[*k]).abs() < tau)
        .map(|(k, _)| k.clone())
        .collect())
}

/// An item's answer after mapping through its option groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupAnswer {
    Group(usize),
    /// Two or more groups hold the same largest mass.
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicItem {
    pub question: QuestionId,
    /// Each inner list is one opinion group of option keys.
    pub groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyTopic {
    pub name: String,
    pub items: Vec<TopicItem>,
}

#[derive(Deserialize)]
struct TopicFile {
    topic: Vec<ConsistencyTopic>,
}

pub fn parse_topics(text: &str) -> Result<Vec<ConsistencyTopic>, MetricsError> {
    toml::from_str::<TopicFile>(text)
        .map(|f| f.topic)
        .map_err(|e| MetricsError::Topic { question: "-".into(), message: e.to_string() })
}

impl TopicItem {
    /// Option index → group index; every option must be in exactly one group.
    pub fn group_map(&self, question: &Question) -> Result<Vec<usize>, MetricsError> {
        let err = |message: String| MetricsError::Topic { question: self.question.to_string(), message };
        let mut map = vec![None; question.scale_size()];
        for (g, keys) in self.groups.iter().enumerate() {
            for k in keys {
                let idx = question.key_index(k).ok_or_else(|| err(format!("unknown option `{k}`")))?;
                if map[idx].replace(g).is_some() {
                    return Err(err(format!("option `{k}` in more than one group")));
                }
            }
        }
        map.into_iter()
            .zip(question.keys())
            .map(|(g, k)| g.ok_or_else(|| err(format!("option `{k}` in no group"))))
            .collect()
    }
}

/// The group holding the larger probability mass.
pub fn group_answer(probs: &[f64], group_map: &[usize]) -> Result<GroupAnswer, MetricsError> {
    if probs.len() != group_map.len() {
        return Err(MetricsError::Shape(format!(
            "{} probabilities for {} options",
            probs.len(),
            group_map.len()
        )));
    }
    let n_groups = group_map.iter().max().map_or(0, |m| m + 1);
    let mut mass = vec![0.0; n_groups];
    for (p, &g) in probs.iter().zip(group_map) {
        mass[g] += p;
    }
    let best = mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let leaders: Vec<usize> = (0..n_groups).filter(|&g| (mass[g] - best).abs() <= 1e-12).collect();
    Ok(match leaders.as_slice() {
        [g] => GroupAnswer::Group(*g),
        _ => GroupAnswer::Tie,
    })
}

/// Percentage of answers in the modal group. Ties count toward the total
/// but never toward a group.
pub fn internal_consistency_rate(answers: &[GroupAnswer]) -> Result<f64, MetricsError> {
    if answers.is_empty() {
        return Err(MetricsError::MissingData("no answers".into()));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for a in answers {
        if let GroupAnswer::Group(g) = a {
            *counts.entry(*g).or_default() += 1;
        }
    }
    let modal = counts.values().copied().max().unwrap_or(0);
    Ok(100.0 * modal as f64 / answers.len() as f64)
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::Shape(format!("lengths {} and {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(MetricsError::InsufficientData(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::UndefinedCorrelation("constant vector".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stars {
    None,
    One,
    Two,
    Three,
}

impl Stars {
    pub fn from_p(p: f64) -> Stars {
        if p < 0.001 {
            Stars::Three
        } else if p < 0.01 {
            Stars::Two
        } else if p < 0.05 {
            Stars::One
        } else {
            Stars::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::One => "*",
            Stars::Two => "**",
            Stars::Three => "***",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestKind {
    #[default]
    Paired,
    Welch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    #[serde(with = "signed_inf")]
    pub t_statistic: f64,
    pub p_value: f64,
    pub stars: Stars,
    pub n: usize,
    /// Zero variance: t is ±∞ or 0 and p is set by convention.
    pub degenerate: bool,
}

/// JSON has no infinities; write them as the strings "inf" / "-inf".
mod signed_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *x {
            f64::INFINITY => s.serialize_str("inf"),
            f64::NEG_INFINITY => s.serialize_str("-inf"),
            x => s.serialize_f64(x),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(serde::de::Error::custom(format!("expected a number, got {t:?}"))),
            },
        }
    }
}

const ZERO_SD: f64 = 1e-12;

fn two_sided_p(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

fn degenerate(mean_diff: f64, n: usize) -> SignificanceResult {
    let (t, p) = if mean_diff == 0.0 { (0.0, 1.0) } else { (f64::INFINITY.copysign(mean_diff), 0.0) };
    SignificanceResult { t_statistic: t, p_value: p, stars: Stars::from_p(p), n, degenerate: true }
}

/// Two-sided Student t-test on paired differences `a − b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<SignificanceResult, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::Shape(format!("lengths {} and {}", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(MetricsError::InsufficientData(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    if sd <= ZERO_SD {
        return Ok(degenerate(mean, n));
    }
    let t = mean / (sd / (n as f64).sqrt());
    let p = two_sided_p(t, (n - 1) as f64);
    Ok(SignificanceResult { t_statistic: t, p_value: p, stars: Stars::from_p(p), n, degenerate: false })
}

/// Two-sided Welch t-test treating `a` and `b` as independent samples.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<SignificanceResult, MetricsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(MetricsError::InsufficientData(a.len().min(b.len())));
    }
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v, n)
    };
    let (ma, va, na) = stats(a);
    let (mb, vb, nb) = stats(b);
    let se2 = va / na + vb / nb;
    let n = a.len().min(b.len());
    if se2.sqrt() <= ZERO_SD {
        return Ok(degenerate(ma - mb, n));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2.powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let p = two_sided_p(t, df);
    Ok(SignificanceResult { t_statistic: t, p_value: p, stars: Stars::from_p(p), n, degenerate: false })
}

/// t-test over per-question scores; both maps must have the same keys.
pub fn paired_t_test_stars<K: Ord>(
    scores_a: &BTreeMap<K, f64>,
    scores_b: &BTreeMap<K, f64>,
    kind: TTestKind,
) -> Result<SignificanceResult, MetricsError> {
    if scores_a.len() != scores_b.len() || scores_a.keys().any(|k| !scores_b.contains_key(k)) {
        return Err(MetricsError::Shape("score maps have different question keys".into()));
    }
    let a: Vec<f64> = scores_a.values().copied().collect();
    let b: Vec<f64> = scores_b.values().copied().collect();
    match kind {
        TTestKind::Paired => paired_t_test(&a, &b),
        TTestKind::Welch => welch_t_test(&a, &b),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub wave: u8,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Mean and std across per-country aggregate scores, one point per wave.
pub fn wave_trend(per_wave: &BTreeMap<u8, Vec<f64>>) -> Result<Vec<TrendPoint>, MetricsError> {
    if per_wave.is_empty() {
        return Err(MetricsError::MissingData("no waves".into()));
    }
    per_wave
        .iter()
        .map(|(&wave, values)| {
            let (mean, std) =
                mean_std(values).ok_or_else(|| MetricsError::MissingData(format!("wave {wave} has no scores")))?;
            Ok(TrendPoint { wave, mean, std, n: values.len() })
        })
        .collect()
}
