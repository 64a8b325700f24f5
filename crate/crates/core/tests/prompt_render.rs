use std::collections::BTreeSet;
use std::path::PathBuf;

use opinion_align::lang::{load_countries, CountryCode, Language};
use opinion_align::prompt::*;
use opinion_align::survey::*;
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn questionnaire(lang: Language) -> Questionnaire {
    let w = Wave::new(7).unwrap();
    load_questionnaire(&data(&format!("questions/{}", questionnaire_file_name(w, lang))), lang, w).unwrap()
}

fn registry() -> FewShotRegistry {
    FewShotRegistry::load(&data("few_shot/registry.csv")).unwrap()
}

fn templates() -> Templates {
    let names = load_countries(&data("countries.csv")).unwrap().into_iter().map(|c| (c.code, c.name));
    Templates::builtin().with_english_names(names)
}

fn human_table() -> HumanTable {
    let counts = load_response_counts(&[data("counts/fixture_counts.csv").as_path()]).unwrap();
    HumanTable::build(&counts, &[questionnaire(Language::En)])
}

fn ids(list: &[&str]) -> Vec<QuestionId> {
    list.iter().map(|s| QuestionId::from(*s)).collect()
}

fn spec(
    strategy: SteeringStrategy,
    lang: Language,
    target: &str,
    seed: u64,
    human: &HumanTable,
) -> PromptSpec {
    let qn = questionnaire(lang);
    let target = QuestionId::from(target);
    let country = strategy.target_country.clone();
    let registry_country = if strategy.language_steering || strategy.base == SteeringBase::FewShotReal {
        country.as_ref()
    } else {
        None
    };
    let w = Wave::new(7).unwrap();
    let examples = select_few_shot_examples(
        registry_country,
        &qn,
        &registry(),
        &target,
        strategy.example_source(),
        seed,
        |id| country.as_ref().and_then(|c| human.get(c, w, id).cloned()),
    )
    .unwrap();
    let base = strategy.base;
    PromptSpec {
        strategy,
        language: lang,
        question: qn.get(&target).unwrap().clone(),
        examples,
        template_id: template_id(lang, base),
        seed,
    }
}

#[test]
fn registry_rows_follow_the_published_lists() {
    let r = registry();
    assert_eq!(r.ids_for(None).unwrap(), ids(&["Q60", "Q70", "Q90", "Q110", "Q130"]).as_slice());
    let deu = CountryCode::new("DEU").unwrap();
    assert_eq!(r.ids_for(Some(&deu)).unwrap(), ids(&["Q40", "Q80", "Q150", "Q160", "Q170"]).as_slice());
    let usa = CountryCode::new("USA").unwrap();
    assert_eq!(r.ids_for(Some(&usa)).unwrap(), r.ids_for(None).unwrap());
    let no_default = FewShotRegistry::parse("country,example_ids\nDEU,Q40\n").unwrap();
    assert!(matches!(no_default.ids_for(Some(&usa)), Err(PromptError::Config(_))));
}

#[test]
fn missing_example_id_is_named() {
    let r = FewShotRegistry::parse("country,example_ids\nDefault,Q60;Q999\n").unwrap();
    let err = select_few_shot_examples(
        None,
        &questionnaire(Language::En),
        &r,
        &QuestionId::from("Q1"),
        ExampleSource::RandomSynthetic,
        1,
        |_| None,
    )
    .unwrap_err();
    assert!(err.to_string().contains("Q999"));
}

#[test]
fn default_english_prompt_shape() {
    let human = human_table();
    let p = render_prompt(&spec(SteeringStrategy::no_steering(), Language::En, "Q1", 7, &human), &templates()).unwrap();
    assert!(p.rendered.contains("express the distribution of answers for the question asked"));
    assert_eq!(p.rendered.matches("Question:").count(), 6);
    assert_eq!(p.rendered.matches("Answer:").count(), 6);
    assert!(p.rendered.ends_with("Answer:"));
    assert!(p.rendered.contains("After the 5 examples"));
    let blocks: Vec<&str> = p.rendered.split("\n\n").collect();
    assert_eq!(blocks.len(), 7);
    assert!(!blocks[0].contains("Question:"));
    for b in &blocks[1..6] {
        assert!(b.starts_with("Question: "));
        let line = b.lines().last().unwrap();
        assert!(line.starts_with("Answer: {'1': '"), "{line}");
    }
    assert!(blocks[6].starts_with("Question: How important is family in your life?\n'1'. Very important\n"));
    assert_eq!(p.fingerprint, Fingerprint::of(&p.rendered));
}

#[test]
fn persona_prompt_names_the_country() {
    let human = human_table();
    let chn = CountryCode::new("CHN").unwrap();
    let s = SteeringStrategy::new(SteeringBase::Persona, false, Some(chn)).unwrap();
    let p = render_prompt(&spec(s, Language::En, "Q1", 7, &human), &templates()).unwrap();
    assert!(p.rendered.contains("pretend to be a member"));
    assert!(p.rendered.contains("population of China"));
    assert!(SteeringStrategy::new(SteeringBase::Persona, false, None).is_err());
}

fn english_phrases() -> BTreeSet<String> {
    let en = questionnaire(Language::En);
    let t = Templates::builtin();
    let mut phrases = BTreeSet::new();
    let mut add = |text: &str| {
        let words: Vec<&str> = text.split_whitespace().collect();
        for w in words.windows(3) {
            phrases.insert(w.join(" "));
        }
    };
    for base in SteeringBase::ALL {
        add(t.instruction(Language::En, base).unwrap());
    }
    for q in &en.questions {
        add(&q.text);
    }
    phrases
}

#[test]
fn language_steered_prompt_has_no_english_text() {
    let human = human_table();
    let phrases = english_phrases();
    let deu = CountryCode::new("DEU").unwrap();
    for base in SteeringBase::ALL {
        let target = if base == SteeringBase::NoSteering { None } else { Some(deu.clone()) };
        let s = SteeringStrategy::new(base, true, target).unwrap();
        let p = render_prompt(&spec(s, Language::De, "Q1", 7, &human), &templates()).unwrap();
        let leaked: Vec<&String> = phrases.iter().filter(|ph| p.rendered.contains(ph.as_str())).collect();
        assert!(leaked.is_empty(), "{base}: {leaked:?}");
        assert!(!p.rendered.contains("Question:") && !p.rendered.contains("Answer:"));
        assert!(p.rendered.ends_with("Antwort:"));
    }
}

#[test]
fn every_language_decomposes_into_instruction_examples_question() {
    let human = human_table();
    let t = templates();
    for lang in Language::ALL {
        let p = render_prompt(&spec(SteeringStrategy::no_steering(), lang, "Q1", 3, &human), &t).unwrap();
        let assets = t.language(lang).unwrap();
        let blocks: Vec<&str> = p.rendered.split("\n\n").collect();
        assert_eq!(blocks.len(), 7, "{lang:?}");
        let q_label = format!("{}: ", assets.question_label);
        assert!(!blocks[0].contains(&q_label));
        assert!(blocks[1..].iter().all(|b| b.starts_with(&q_label)), "{lang:?}");
    }
}

#[test]
fn few_shot_real_uses_the_country_distributions() {
    let human = human_table();
    let w = Wave::new(7).unwrap();
    let counts = load_response_counts(&[data("counts/fixture_counts.csv").as_path()]).unwrap();
    let en = questionnaire(Language::En);
    for code in ["ARG", "CHN", "DEU", "JPN"] {
        let c = CountryCode::new(code).unwrap();
        let s = SteeringStrategy::new(SteeringBase::FewShotReal, false, Some(c.clone())).unwrap();
        let sp = spec(s, Language::En, "Q1", 11, &human);
        assert_eq!(sp.examples.len(), 5);
        for ex in &sp.examples {
            assert_eq!(ex.source, ExampleSource::CountryReal);
            let rc = counts
                .iter()
                .find(|rc| rc.country == c && rc.wave == w && rc.question_id == ex.question.id)
                .unwrap();
            let direct = human_distribution(rc, en.get(&ex.question.id).unwrap()).unwrap();
            assert_eq!(ex.distribution, direct);
        }
    }
}

#[test]
fn evaluated_question_never_appears_as_example() {
    let human = human_table();
    let reg = registry();
    let all: Vec<&QuestionId> = reg.all_ids().into_iter().collect();
    let chn = CountryCode::new("CHN").unwrap();
    for target in all {
        for s in [
            SteeringStrategy::no_steering(),
            SteeringStrategy::new(SteeringBase::FewShotReal, false, Some(chn.clone())).unwrap(),
        ] {
            let sp = spec(s, Language::En, target.as_str(), 5, &human);
            assert_eq!(sp.examples.len(), 5);
            assert!(sp.examples.iter().all(|e| &e.question.id != target), "{target}");
            let distinct: BTreeSet<_> = sp.examples.iter().map(|e| &e.question.id).collect();
            assert_eq!(distinct.len(), 5);
        }
    }
}

#[test]
fn rendering_is_deterministic_and_seed_sensitive() {
    let human = human_table();
    let t = templates();
    let a = render_prompt(&spec(SteeringStrategy::no_steering(), Language::En, "Q1", 42, &human), &t).unwrap();
    let b = render_prompt(&spec(SteeringStrategy::no_steering(), Language::En, "Q1", 42, &human), &t).unwrap();
    let c = render_prompt(&spec(SteeringStrategy::no_steering(), Language::En, "Q1", 43, &human), &t).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.fingerprint, c.fingerprint);
}

#[test]
fn wrong_example_count_is_a_contract_error() {
    let human = human_table();
    let mut sp = spec(SteeringStrategy::no_steering(), Language::En, "Q1", 1, &human);
    sp.examples.pop();
    assert!(matches!(render_prompt(&sp, &templates()), Err(PromptError::ExampleCount { expected: 5, got: 4 })));
    assert!(render_prompt_with_count(&sp, &templates(), 4).is_ok());
}

#[test]
fn missing_template_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("En")).unwrap();
    std::fs::write(dir.path().join("En/labels.toml"), "question = \"Question\"\nanswer = \"Answer\"\n").unwrap();
    let t = Templates::from_dir(dir.path()).unwrap();
    let human = human_table();
    let sp = spec(SteeringStrategy::no_steering(), Language::En, "Q1", 1, &human);
    assert!(matches!(render_prompt(&sp, &t), Err(PromptError::MissingTemplate(_))));
    let sp = spec(SteeringStrategy::no_steering(), Language::De, "Q1", 1, &human);
    assert!(matches!(render_prompt(&sp, &t), Err(PromptError::MissingTemplate(_))));
}

#[test]
fn rendering_reference_lines() {
    assert_eq!(
        format_distribution_line(&[0.3101, 0.0321, 0.3031, 0.3547]),
        "{'1': '31.01%', '2': '3.21%', '3': '30.31%', '4': '35.47%'}"
    );
    assert_eq!(format_distribution_line(&[1.0, 0.0]), "{'1': '100.00%', '2': '0.00%'}");
    let third = 1.0 / 3.0;
    assert_eq!(
        format_distribution_line(&[third, third, third]),
        "{'1': '33.34%', '2': '33.33%', '3': '33.33%'}"
    );
}

#[test]
fn hand_permutation_maps_back() {
    // presentation (3,1,2) in 1-based canonical positions
    let perm = Permutation::from_vec(vec![2, 0, 1]).unwrap();
    let shown = perm.present(&[0.5, 0.3, 0.2]);
    assert_eq!(shown, vec![0.2, 0.5, 0.3]);
    assert_eq!(perm.canonicalize(&shown), vec![0.5, 0.3, 0.2]);
    assert!(Permutation::from_vec(vec![0, 0, 1]).is_none());
    let q = questionnaire(Language::En).get(&QuestionId::from("Q1")).unwrap().clone();
    assert_eq!(present_question(&q, &Permutation::identity(4)), q);
}

fn question(n: usize) -> Question {
    Question::new(
        "Q7",
        "t",
        (1..=n).map(|k| AnswerOption { key: k.to_string(), label: format!("label {k}") }).collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn shuffle_is_a_deterministic_permutation(n in 2usize..11, seed in any::<u64>()) {
        let q = question(n);
        let (shown, perm) = shuffle_option_order(&q, seed);
        prop_assert_eq!(&shuffle_option_order(&q, seed), &(shown.clone(), perm.clone()));
        let mut sorted = perm.as_slice().to_vec();
        sorted.sort();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let keys: Vec<&str> = shown.keys().collect();
        let expect: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
        prop_assert_eq!(keys, expect.iter().map(String::as_str).collect::<Vec<_>>());
        let back = Permutation::from_vec(perm.inverse().present(perm.as_slice())).unwrap();
        prop_assert!(back.is_identity());
        for (i, &j) in perm.as_slice().iter().enumerate() {
            prop_assert_eq!(&shown.options[i].label, &q.options[j].label);
        }
    }

    #[test]
    fn canonicalize_inverts_present(v in prop::collection::vec(0.0f64..1.0, 2..11), seed in any::<u64>()) {
        let (_, perm) = shuffle_option_order(&question(v.len()), seed);
        prop_assert_eq!(perm.canonicalize(&perm.present(&v)), v);
    }

    #[test]
    fn random_examples_are_quantized_distributions(n in 2usize..11, seed in any::<u64>()) {
        let q = question(n);
        let d = synthesize_random_example_distributions(&q, seed);
        prop_assert_eq!(&d, &synthesize_random_example_distributions(&q, seed));
        prop_assert_eq!(d.len(), n);
        let units: Vec<u32> = d.probs().iter().map(|p| (p * 10_000.0).round() as u32).collect();
        prop_assert_eq!(units.iter().sum::<u32>(), 10_000);
        prop_assert_eq!(percent_units(d.probs()), units);
    }
}
