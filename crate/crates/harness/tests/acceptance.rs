//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.
//! Exits non-zero when a criterion fails, except for the ones listed in
//! `KNOWN_FAILURES`, which still print FAIL with their measured numbers.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use opinion_align::lang::CountryCode;
use opinion_align::metrics::{
    alignment_per_question, filter_countries, internal_consistency_rate, wasserstein_1d, GroupAnswer, Stars,
};
use opinion_align::parser::{parse_verbalized, FailureKind, Repair, DEFAULT_TOLERANCE};
use opinion_align::prompt::{format_distribution_line, SteeringBase};
use opinion_align::survey::{human_distribution, AnswerOption, Question, QuestionId, ResponseCounts, Wave};
use opinion_align::Language;
use opinion_harness::experiments::{run_pipelines, CellKey, Pipeline, RunOptions, RunOutput};
use opinion_harness::manifest::{Dataset, RunManifest, Variant};
use opinion_harness::report::write_bundle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use serde::Deserialize;

/// Criteria that cannot hold as written; see the README.
const KNOWN_FAILURES: &[u8] = &[4];

struct Report {
    results: Vec<(u8, bool)>,
}

impl Report {
    fn line(&mut self, id: u8, ok: bool, title: &str, detail: String) {
        println!("{} {:>2}  {title}: {detail}", if ok { "PASS" } else { "FAIL" }, id);
        self.results.push((id, ok));
    }

    fn note(&self, detail: String) {
        println!("        note: {detail}");
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn random_dist(r: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

fn question(n: usize) -> Question {
    Question::new("Q1", "t", (1..=n).map(|k| AnswerOption { key: k.to_string(), label: format!("o{k}") }).collect())
        .unwrap()
}

fn c1(rep: &mut Report) {
    let start = Instant::now();
    let mut r = rng(1);
    let mut max_diff: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(2..=8);
        let (p, q) = (random_dist(&mut r, n), random_dist(&mut r, n));
        let d = (wasserstein_1d(&p, &q).unwrap() - common::transport::transport_cost(&p, &q)).abs();
        max_diff = max_diff.max(d);
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(
        1,
        max_diff < 1e-9 && secs < 10.0,
        "Wasserstein vs brute-force transport",
        format!("max |diff| = {max_diff:.2e} over 1000 pairs, N in 2..8, {secs:.2} s"),
    );
}

fn c2(rep: &mut Report) {
    let mut r = rng(2);
    let mut identical = true;
    let mut opposite = true;
    let mut bounded = true;
    for _ in 0..1000 {
        let n = r.random_range(2..=10);
        let p = random_dist(&mut r, n);
        let q = random_dist(&mut r, n);
        identical &= alignment_per_question(&p, &p, n).unwrap() == 1.0;
        let a = alignment_per_question(&p, &q, n).unwrap();
        bounded &= (0.0..=1.0).contains(&a);
        let mut lo = vec![0.0; n];
        lo[0] = 1.0;
        let mut hi = vec![0.0; n];
        hi[n - 1] = 1.0;
        opposite &= alignment_per_question(&lo, &hi, n).unwrap() == 0.0;
    }
    let hand = alignment_per_question(&[0.5, 0.5, 0.0, 0.0], &[0.0, 0.0, 0.5, 0.5], 4).unwrap();
    let hand_ok = (hand - 1.0 / 3.0).abs() < 1e-12;
    rep.line(
        2,
        identical && opposite && bounded && hand_ok,
        "alignment extremes",
        format!(
            "identical = 1.0: {identical}; opposite ends = 0.0: {opposite}; random in [0,1]: {bounded}; \
             hand pair = {hand:.15} (1/3 within 1e-12: {hand_ok})"
        ),
    );
}

fn counts(map: &[(&str, u64)]) -> ResponseCounts {
    ResponseCounts {
        country: CountryCode::new("USA").unwrap(),
        wave: Wave::new(7).unwrap(),
        question_id: QuestionId::new("Q1"),
        counts: map.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

fn c3(rep: &mut Report) {
    let q3 = question(3);
    let d = human_distribution(&counts(&[("1", 500), ("2", 300), ("3", 200)]), &q3).unwrap();
    let exact = d.probs() == [0.5, 0.3, 0.2];
    let mut r = rng(3);
    let mut invariant = 0;
    for _ in 0..100 {
        let n = r.random_range(2..=10);
        let q = question(n);
        let base: Vec<(String, u64)> = (1..=n).map(|k| (k.to_string(), r.random_range(0..5000))).collect();
        let mut base_ref: Vec<(&str, u64)> = base.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        if base_ref.iter().all(|(_, v)| *v == 0) {
            base_ref[0].1 = 1;
        }
        let m = r.random_range(2..=1000u64);
        let scaled: Vec<(&str, u64)> = base_ref.iter().map(|(k, v)| (*k, v * m)).collect();
        let a = human_distribution(&counts(&base_ref), &q).unwrap();
        let b = human_distribution(&counts(&scaled), &q).unwrap();
        if a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() < 1e-15) {
            invariant += 1;
        }
    }
    rep.line(
        3,
        exact && invariant == 100,
        "human distribution",
        format!("{{1:500,2:300,3:200}} -> {:?} (exact: {exact}); scale-invariant on {invariant}/100 tables", d.probs()),
    );
}

#[derive(Deserialize)]
struct Valid {
    text: String,
    scale: usize,
    expect: ValidExpect,
}

#[derive(Deserialize)]
struct ValidExpect {
    probs: Vec<f64>,
    repairs: Vec<Repair>,
}

#[derive(Deserialize)]
struct Invalid {
    text: String,
    scale: usize,
    expect: InvalidExpect,
}

#[derive(Deserialize)]
struct InvalidExpect {
    failure: FailureKind,
}

fn corpus<T: for<'de> Deserialize<'de>>(name: &str) -> Vec<T> {
    std::fs::read_to_string(common::repo_root().join("data/parser").join(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn c4(rep: &mut Report) {
    let appendix = "{'1': '31.01%', '2': '3.21%', '3': '30.31%', '4': '35.47%'}";
    let p = parse_verbalized(appendix, &question(4), DEFAULT_TOLERANCE).unwrap();
    let want = [0.3101, 0.0321, 0.3031, 0.3547];
    let appendix_err = p.probs.probs().iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let appendix_ok = appendix_err < 1e-12 && p.repairs.is_empty();

    let valid: Vec<Valid> = corpus("corpus_valid.jsonl");
    let good = valid
        .iter()
        .filter(|row| match parse_verbalized(&row.text, &question(row.scale), DEFAULT_TOLERANCE) {
            Ok(p) => {
                p.repairs == row.expect.repairs
                    && p.probs.probs().iter().zip(&row.expect.probs).all(|(a, b)| (a - b).abs() < 1e-9)
            }
            Err(_) => false,
        })
        .count();
    let rate = good as f64 / valid.len() as f64;

    let invalid: Vec<Invalid> = corpus("corpus_invalid.jsonl");
    let kinds_ok = invalid
        .iter()
        .filter(|row| {
            parse_verbalized(&row.text, &question(row.scale), DEFAULT_TOLERANCE)
                .err()
                .is_some_and(|f| f.kind == row.expect.failure)
        })
        .count();

    let mut r = rng(4);
    let mut max_err: f64 = 0.0;
    let mut over = 0;
    let mut bad_repairs = 0;
    for _ in 0..1000 {
        let n = r.random_range(2..=10);
        let d = random_dist(&mut r, n);
        let parsed = parse_verbalized(&format_distribution_line(&d), &question(n), DEFAULT_TOLERANCE).unwrap();
        let e = parsed.probs.probs().iter().zip(&d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_err = max_err.max(e);
        over += (e > 5e-5) as usize;
        bad_repairs += parsed.repairs.iter().any(|x| *x != Repair::Renormalized) as usize;
    }
    let round_trip_ok = over == 0 && bad_repairs == 0;
    rep.line(
        4,
        appendix_ok && rate >= 0.95 && kinds_ok == invalid.len() && invalid.len() == 10 && round_trip_ok,
        "parser",
        format!(
            "appendix string exact: {appendix_ok}; corpus {good}/{} ({:.0}%) with correct tags; \
             invalid kinds {kinds_ok}/{}; round trip: {over}/1000 distributions exceed 5e-5 (max {max_err:.2e}), \
             {bad_repairs} with unexpected repairs",
            valid.len(),
            rate * 100.0,
            invalid.len()
        ),
    );
    rep.note(
        "two-decimal largest-remainder output can move an entry by up to 1e-4 (1/3 prints as 33.34%), \
         so a 5e-5 bound on the round trip does not hold for every distribution"
            .into(),
    );
}

struct Full {
    m: RunManifest,
    data: Dataset,
    out: RunOutput,
}

fn full_run(tmp: &Path, max_requests: Option<usize>) -> Result<Full, opinion_harness::HarnessError> {
    let m = common::mock_manifest(tmp);
    let data = Dataset::load(&m)?;
    let rt = tokio::runtime::Runtime::new().unwrap();
    let out = rt.block_on(run_pipelines(&m, &data, &Pipeline::ALL, &RunOptions { max_requests }))?;
    write_bundle(&m.report_dir(), &out.results)?;
    Ok(Full { m, data, out })
}

fn baseline(model: &str, q: &QuestionId, variant: Variant) -> CellKey {
    CellKey {
        model: model.into(),
        base: SteeringBase::NoSteering,
        language: Language::En,
        target: None,
        question: q.clone(),
        variant,
    }
}

/// Uniform over `n` options as printed: 10000/n hundredths of a percent each,
/// the remainder handed to the first options one unit at a time.
fn printed_uniform(n: usize) -> Vec<f64> {
    let base = 10_000 / n;
    let extra = 10_000 % n;
    (0..n).map(|i| (base + (i < extra) as usize) as f64 / 10_000.0).collect()
}

/// Normalized Wasserstein alignment written out as a plain loop.
fn hand_alignment(p: &[f64], q: &[f64]) -> f64 {
    let (mut cp, mut cq, mut wd) = (0.0, 0.0, 0.0);
    for i in 0..p.len() - 1 {
        cp += p[i];
        cq += q[i];
        wd += f64::abs(cp - cq);
    }
    1.0 - wd / (p.len() - 1) as f64
}

fn c5(rep: &mut Report, f: &Full) {
    let rq1 = f.out.results.rq1.as_ref().unwrap();
    let echo = rq1.rankings.iter().find(|r| r.model == "echo-usa").unwrap();
    let top = &echo.ranked[0];
    let echo_ok = top.country.as_str() == "USA" && top.mean >= 0.999 && echo.ranked[1].mean < top.mean;

    let row = rq1.matrix.rows.iter().position(|r| r == "uniform").unwrap();
    let (mut max_dev, mut max_exact_dev): (f64, f64) = (0.0, 0.0);
    for (j, col) in rq1.matrix.cols.iter().enumerate() {
        let c = CountryCode::new(col).unwrap();
        let (mut printed, mut exact) = (Vec::new(), Vec::new());
        for q in &f.data.questions {
            let Some(h) = f.data.human.get(&c, f.data.wave, q) else { continue };
            let n = h.probs().len();
            printed.push(hand_alignment(&printed_uniform(n), h.probs()));
            exact.push(hand_alignment(&vec![1.0 / n as f64; n], h.probs()));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let cell = rq1.matrix.cells[row][j].as_ref().unwrap().mean;
        max_dev = max_dev.max((cell - mean(&printed)).abs());
        max_exact_dev = max_exact_dev.max((cell - mean(&exact)).abs());
    }
    rep.line(
        5,
        echo_ok && max_dev < 1e-6,
        "mock RQ1",
        format!(
            "echo-usa: USA first at {:.6}, next {} at {:.6}; uniform cells vs analytic values max |diff| = {max_dev:.2e}",
            top.mean, echo.ranked[1].country, echo.ranked[1].mean
        ),
    );
    rep.note(format!(
        "the uniform mock prints two-decimal percentages; against exact 1/N the cells differ by at most {max_exact_dev:.2e}"
    ));
}

fn c6(rep: &mut Report, f: &Full) {
    let rq2 = f.out.results.rq2.as_ref().unwrap();
    let english = |row: &opinion_harness::experiments::Rq2Row| {
        rq2.rows
            .iter()
            .find(|r| r.model == row.model && r.country == row.country && r.strategy == row.strategy && !r.language_steering)
            .and_then(|r| r.score.as_ref())
            .map(|s| s.mean)
    };
    let steered = |model: &str| -> Vec<&opinion_harness::experiments::Rq2Row> {
        rq2.rows.iter().filter(|r| r.model == model && r.language_steering).collect()
    };
    let sensitive = steered("lang-sensitive");
    let better = sensitive.iter().filter(|r| r.score.as_ref().map(|s| s.mean) > english(r)).count();
    let blind = steered("echo-usa");
    let no_stars = blind.iter().filter(|r| r.vs_english.as_ref().is_some_and(|t| t.stars == Stars::None)).count();
    rep.line(
        6,
        !sensitive.is_empty() && better == sensitive.len() && !blind.is_empty() && no_stars == blind.len(),
        "mock RQ2",
        format!(
            "language-sensitive: steered > English in {better}/{} (strategy x country) rows; \
             language-blind: no stars in {no_stars}/{} rows",
            sensitive.len(),
            blind.len()
        ),
    );
}

fn c7(rep: &mut Report, f: &Full) {
    use GroupAnswer::Group;
    let seq = internal_consistency_rate(&[Group(0), Group(0), Group(1), Group(0)]).unwrap();
    let same = internal_consistency_rate(&[Group(1); 5]).unwrap();
    let item = f
        .data
        .topics
        .iter()
        .flat_map(|t| &t.items)
        .find(|i| i.question.as_str() == "Q243")
        .unwrap();
    let q = f.data.questionnaire(f.data.wave, Language::En).unwrap().get(&item.question).unwrap();
    let map = item.group_map(q).unwrap();
    let (g3, g7) = (map[q.key_index("3").unwrap()], map[q.key_index("7").unwrap()]);
    rep.line(
        7,
        seq == 75.0 && same == 100.0 && g3 != g7 && q.scale_size() == 10,
        "consistency rate",
        format!("[1,1,2,1] -> {seq}; all-same -> {same}; 10-point item: 3 in group {}, 7 in group {}", g3 + 1, g7 + 1),
    );
}

fn c8(rep: &mut Report) {
    // name: (a_model, a_avg); hand-derived with |diff| < 0.02
    let rows = [
        ("A", 0.80, 0.81),  // 0.01: kept
        ("B", 0.02, 0.0),   // exactly 0.02: excluded
        ("C", 0.75, 0.70),  // 0.05: excluded
        ("D", 0.90, 0.90),  // 0: kept
        ("E", 0.70, 0.7195), // 0.0195: kept
        ("F", 0.60, 0.5799), // 0.0201: excluded
    ];
    let a_model: BTreeMap<&str, f64> = rows.iter().map(|(k, a, _)| (*k, *a)).collect();
    let a_avg: BTreeMap<&str, f64> = rows.iter().map(|(k, _, b)| (*k, *b)).collect();
    let got = filter_countries(&a_model, &a_avg, 0.02).unwrap();
    let want: BTreeSet<&str> = ["A", "D", "E"].into();
    let exact = got == want;

    let mut r = rng(8);
    let mut monotone = 0;
    for _ in 0..100 {
        let n = r.random_range(1..30);
        let m: BTreeMap<usize, f64> = (0..n).map(|i| (i, r.random::<f64>())).collect();
        let v: BTreeMap<usize, f64> = (0..n).map(|i| (i, r.random::<f64>())).collect();
        let (t1, t2) = {
            let (x, y) = (r.random::<f64>() * 0.5, r.random::<f64>() * 0.5);
            (x.min(y), x.max(y))
        };
        let s1 = filter_countries(&m, &v, t1).unwrap();
        let s2 = filter_countries(&m, &v, t2).unwrap();
        monotone += s1.is_subset(&s2) as usize;
    }
    rep.line(
        8,
        exact && monotone == 100,
        "tau filter",
        format!("tau = 0.02 -> {got:?} (expected {want:?}); monotone in tau on {monotone}/100 instances"),
    );
}

fn c9(rep: &mut Report, f: &Full) {
    let s = f.out.results.sensitivity.as_ref().unwrap();
    let echo: Vec<_> = s.cells.iter().filter(|c| c.model == "echo-usa").collect();
    let worst = echo.iter().map(|c| c.r.map_or(f64::INFINITY, |r| (r - 1.0).abs())).fold(0.0, f64::max);
    let mut shuffle_dev: f64 = 0.0;
    for q in &f.data.questions {
        let a = &f.out.execution.cells[&baseline("echo-usa", q, Variant::Default)].parsed;
        let b = &f.out.execution.cells[&baseline("echo-usa", q, Variant::ShuffledOrder)].parsed;
        let (Ok((a, _)), Ok((b, _))) = (a, b) else {
            shuffle_dev = f64::INFINITY;
            continue;
        };
        shuffle_dev = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(shuffle_dev, f64::max);
    }
    rep.line(
        9,
        echo.len() == 3 && worst < 1e-12 && shuffle_dev < 1e-12,
        "sensitivity",
        format!(
            "order-insensitive mock: max |r - 1| = {worst:.1e} over {} variants; \
             shuffled vs default per-question max |diff| = {shuffle_dev:.1e}",
            echo.len()
        ),
    );
}

fn c10(rep: &mut Report, first: &Full) {
    let snap = |m: &RunManifest| common::snapshot(&m.report_dir());
    let a = snap(&first.m);

    let tmp_b = tempfile::tempdir().unwrap();
    let b = full_run(tmp_b.path(), None).map(|f| snap(&f.m));
    let clean = b.as_ref().is_ok_and(|b| *b == a);

    let tmp_c = tempfile::tempdir().unwrap();
    let interrupted = matches!(
        full_run(tmp_c.path(), Some(2000)),
        Err(opinion_harness::HarnessError::Interrupted { completed: 2000 })
    );
    let resumed = full_run(tmp_c.path(), None);
    let resumed_ok = resumed.as_ref().is_ok_and(|f| snap(&f.m) == a);
    let cached = resumed.as_ref().map_or(0, |f| f.out.execution.cached);
    rep.line(
        10,
        !a.is_empty() && clean && interrupted && resumed_ok,
        "determinism and resume",
        format!(
            "{} bundle files; second clean run identical: {clean}; stopped after 2000 calls: {interrupted}; \
             resumed run ({cached} cells from cache) identical: {resumed_ok}",
            a.len()
        ),
    );
}

fn main() {
    let mut rep = Report { results: Vec::new() };
    c1(&mut rep);
    c2(&mut rep);
    c3(&mut rep);
    c4(&mut rep);
    let tmp = tempfile::tempdir().unwrap();
    let full = full_run(tmp.path(), None).expect("mock manifest runs");
    c5(&mut rep, &full);
    c6(&mut rep, &full);
    c7(&mut rep, &full);
    c8(&mut rep);
    c9(&mut rep, &full);
    c10(&mut rep, &full);
    println!(
        "   11  live replication: not run here (needs API keys and survey microdata); see scripts/live_replication.sh"
    );

    let failed: Vec<u8> = rep.results.iter().filter(|(_, ok)| !ok).map(|(id, _)| *id).collect();
    let unexpected: Vec<u8> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    let fixed: Vec<u8> = KNOWN_FAILURES.iter().copied().filter(|id| !failed.contains(id)).collect();
    println!("{} passed, {} failed {:?}", rep.results.len() - failed.len(), failed.len(), failed);
    if !fixed.is_empty() {
        println!("criteria {fixed:?} are listed as known failures but now pass; update KNOWN_FAILURES");
    }
    if !unexpected.is_empty() || !fixed.is_empty() {
        std::process::exit(1);
    }
}
