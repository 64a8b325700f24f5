use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use opinion_align::lang::{load_countries, CountryCode, Language};
use opinion_align::survey::*;
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn questionnaire(wave: u8) -> Questionnaire {
    let w = Wave::new(wave).unwrap();
    load_questionnaire(&data(&format!("questions/{}", questionnaire_file_name(w, Language::En))), Language::En, w)
        .unwrap()
}

fn filtered(wave: u8) -> Questionnaire {
    let rules = load_exclusion_rules(&data(&format!("rules/exclusions_WV{wave}.csv"))).unwrap();
    apply_exclusion_rules(&questionnaire(wave), &rules).kept
}

fn likert(n: usize) -> Question {
    Question::new("Q1", "t", (1..=n).map(|k| AnswerOption { key: k.to_string(), label: k.to_string() }).collect())
        .unwrap()
}

fn counts(pairs: &[(&str, u64)]) -> ResponseCounts {
    ResponseCounts {
        country: CountryCode::new("USA").unwrap(),
        wave: Wave::new(7).unwrap(),
        question_id: QuestionId::from("Q1"),
        counts: pairs.iter().map(|(k, c)| (k.to_string(), *c)).collect(),
    }
}

#[test]
fn human_distribution_reference_counts() {
    let d = human_distribution(&counts(&[("1", 500), ("2", 300), ("3", 200)]), &likert(3)).unwrap();
    assert_eq!(d.probs(), &[0.5, 0.3, 0.2]);
    let with_codes = counts(&[("1", 500), ("2", 300), ("3", 200), ("-1", 77), ("-2", 5)]);
    assert_eq!(human_distribution(&with_codes, &likert(3)).unwrap().probs(), &[0.5, 0.3, 0.2]);
    let unknown = counts(&[("1", 1), ("9", 1)]);
    assert!(matches!(human_distribution(&unknown, &likert(3)), Err(SurveyError::Join { .. })));
    assert!(matches!(human_distribution(&counts(&[("-1", 4)]), &likert(3)), Err(SurveyError::EmptySample(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn human_distribution_is_scale_invariant(
        table in prop::collection::vec(0u64..100_000, 2..11),
        factor in 2u64..1000,
    ) {
        prop_assume!(table.iter().sum::<u64>() > 0);
        let q = likert(table.len());
        let keys: Vec<String> = (1..=table.len()).map(|k| k.to_string()).collect();
        let base: Vec<(&str, u64)> = keys.iter().map(String::as_str).zip(table.iter().copied()).collect();
        let scaled: Vec<(&str, u64)> = base.iter().map(|(k, c)| (*k, c * factor)).collect();
        let a = human_distribution(&counts(&base), &q).unwrap();
        let b = human_distribution(&counts(&scaled), &q).unwrap();
        prop_assert_eq!(a.probs(), b.probs());
    }
}

#[test]
fn average_is_the_unweighted_mean() {
    let id = QuestionId::from("Q1");
    let a = OpinionDistribution::new(id.clone(), vec![1.0, 0.0]).unwrap();
    let b = OpinionDistribution::new(id.clone(), vec![0.0, 1.0]).unwrap();
    let c = OpinionDistribution::new(id.clone(), vec![0.5, 0.5]).unwrap();
    assert_eq!(average_human_distribution(&id, [&a, &b]).unwrap().probs(), &[0.5, 0.5]);
    assert_eq!(average_human_distribution(&id, [&a, &b, &c]).unwrap().probs(), &[0.5, 0.5]);
    assert!(average_human_distribution(&id, std::iter::empty()).is_err());
}

#[test]
fn jsonl_round_trip_is_lossless() {
    for lang in Language::ALL {
        let w = Wave::new(7).unwrap();
        let path = data(&format!("questions/{}", questionnaire_file_name(w, lang)));
        let q = load_questionnaire(&path, lang, w).unwrap();
        let again = Questionnaire::from_jsonl(&q.to_jsonl(), lang, w, "memory").unwrap();
        assert_eq!(q, again);
    }
}

#[test]
fn fixture_wave7_keeps_144_questions() {
    let raw = questionnaire(7);
    let rules = load_exclusion_rules(&data("rules/exclusions_WV7.csv")).unwrap();
    let f = apply_exclusion_rules(&raw, &rules);
    assert_eq!(f.kept.questions.len(), 144);
    assert_eq!(f.kept.questions.len() + f.removed.len(), raw.questions.len());
    assert!(f.unknown.is_empty());
    let removed: BTreeSet<_> = f.removed.iter().map(|r| &r.question_id).collect();
    assert!(f.kept.questions.iter().all(|q| !removed.contains(&q.id)));
}

#[test]
fn fixture_cross_wave_intersection_keeps_75() {
    let crossmap = load_crossmap(&data("rules/crossmap.csv")).unwrap();
    let waves: BTreeMap<Wave, Questionnaire> =
        [5u8, 6, 7].into_iter().map(|w| (Wave::new(w).unwrap(), filtered(w))).collect();
    let common = intersect_waves(&waves, &crossmap).unwrap();
    assert_eq!(common.len(), 75);
    for entry in &common {
        let sizes: BTreeSet<usize> =
            entry.ids.iter().map(|(w, id)| waves[w].get(id).unwrap().scale_size()).collect();
        assert_eq!(sizes.len(), 1, "{}", entry.canonical_id);
    }
    let one: BTreeMap<Wave, Questionnaire> = BTreeMap::from([(Wave::new(7).unwrap(), filtered(7))]);
    assert_eq!(intersect_waves(&one, &crossmap).unwrap().len(), 144);
}

#[test]
fn mismatched_scales_are_reported() {
    let crossmap = parse_crossmap("canonical_id,wave5_id,wave6_id,wave7_id\nQ1,V1,V1,Q1\n").unwrap();
    let mk = |wave: u8, id: &str, n: usize| Questionnaire {
        language: Language::En,
        wave: Wave::new(wave).unwrap(),
        questions: vec![Question::new(
            id,
            "t",
            (1..=n).map(|k| AnswerOption { key: k.to_string(), label: k.to_string() }).collect(),
        )
        .unwrap()],
    };
    let waves = BTreeMap::from([
        (Wave::new(5).unwrap(), mk(5, "V1", 4)),
        (Wave::new(7).unwrap(), mk(7, "Q1", 5)),
    ]);
    assert!(matches!(intersect_waves(&waves, &crossmap), Err(SurveyError::IncompatibleScale { .. })));
}

#[test]
fn counts_from_two_files_are_summed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let header = "country,wave,question_id,option_key,count\n";
    std::fs::write(&a, format!("{header}USA,7,Q1,1,10\nUSA,7,Q1,2,5\nDEU,7,Q1,1,3\n")).unwrap();
    std::fs::write(&b, format!("{header}USA,7,Q1,1,7\nUSA,7,Q1,-1,2\n")).unwrap();
    let all = load_response_counts(&[a.as_path(), b.as_path()]).unwrap();

    // independent aggregation of the same rows
    let mut expect: BTreeMap<(String, String), u64> = BTreeMap::new();
    for path in [&a, &b] {
        for line in std::fs::read_to_string(path).unwrap().lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            *expect.entry((f[0].to_string(), f[3].to_string())).or_default() += f[4].parse::<u64>().unwrap();
        }
    }
    let got: BTreeMap<(String, String), u64> = all
        .iter()
        .flat_map(|rc| rc.counts.iter().map(|(k, c)| ((rc.country.to_string(), k.clone()), *c)))
        .collect();
    assert_eq!(got, expect);
}

#[test]
fn fixture_tables_join_cleanly() {
    let counts = load_response_counts(&[data("counts/fixture_counts.csv").as_path()]).unwrap();
    let qs: Vec<Questionnaire> = [5u8, 6, 7].into_iter().map(questionnaire).collect();
    let table = HumanTable::build(&counts, &qs);
    assert!(table.join_errors.is_empty(), "{:?}", table.join_errors.first());
    let w7 = Wave::new(7).unwrap();
    assert_eq!(table.countries(w7).len(), 14);
    assert!(!table.countries(Wave::new(5).unwrap()).contains(&CountryCode::new("EGY").unwrap()));
    let countries = load_countries(&data("countries.csv")).unwrap();
    assert_eq!(countries.len(), 66);
    let known: BTreeSet<_> = countries.iter().map(|c| c.code.clone()).collect();
    assert!(table.countries(w7).is_subset(&known));
}
