use opinion_align::parser::{parse_verbalized, FailureKind, Repair, DEFAULT_TOLERANCE};
use opinion_align::prompt::{format_units_line, percent_units};
use opinion_align::survey::{AnswerOption, Question};
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct ValidRow {
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
struct InvalidRow {
    text: String,
    scale: usize,
    expect: InvalidExpect,
}

#[derive(Deserialize)]
struct InvalidExpect {
    failure: FailureKind,
}

fn question(n: usize) -> Question {
    Question::new(
        "Q1",
        "t",
        (1..=n).map(|k| AnswerOption { key: k.to_string(), label: format!("option {k}") }).collect(),
    )
    .unwrap()
}

fn corpus<T: for<'de> Deserialize<'de>>(name: &str) -> Vec<T> {
    let path = format!("{}/../../data/parser/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{name}: {e}: {l}")))
        .collect()
}

#[test]
fn valid_corpus_parses_with_expected_repairs() {
    let rows: Vec<ValidRow> = corpus("corpus_valid.jsonl");
    assert!(rows.len() >= 50);
    let mut mismatches = Vec::new();
    for row in &rows {
        match parse_verbalized(&row.text, &question(row.scale), DEFAULT_TOLERANCE) {
            Ok(p) => {
                let close = p.probs.probs().len() == row.expect.probs.len()
                    && p.probs.probs().iter().zip(&row.expect.probs).all(|(a, b)| (a - b).abs() < 1e-9);
                if !close || p.repairs != row.expect.repairs {
                    mismatches.push(format!("{:?}: got {:?} {:?}", row.text, p.probs.probs(), p.repairs));
                }
            }
            Err(e) => mismatches.push(format!("{:?}: failed {e}", row.text)),
        }
    }
    assert!(mismatches.is_empty(), "{} of {} rows differ:\n{}", mismatches.len(), rows.len(), mismatches.join("\n"));
}

#[test]
fn invalid_corpus_fails_with_expected_kind() {
    let rows: Vec<InvalidRow> = corpus("corpus_invalid.jsonl");
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let err = parse_verbalized(&row.text, &question(row.scale), DEFAULT_TOLERANCE)
            .expect_err(&row.text);
        assert_eq!(err.kind, row.expect.failure, "{:?}", row.text);
        assert!(err.excerpt.chars().count() <= 200);
    }
}

#[test]
fn sum_just_outside_tolerance_is_rejected() {
    let q = question(2);
    assert!(parse_verbalized("{'1': '55%', '2': '55%'}", &q, DEFAULT_TOLERANCE).is_ok());
    let e = parse_verbalized("{'1': '55.01%', '2': '55%'}", &q, DEFAULT_TOLERANCE).unwrap_err();
    assert_eq!(e.kind, FailureKind::SumOutOfTolerance);
}

fn probs_strategy() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=11).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            if s == 0.0 {
                let mut u = vec![0.0; v.len()];
                u[0] = 1.0;
                u
            } else {
                v.iter().map(|x| x / s).collect()
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn format_then_parse_round_trips(probs in probs_strategy()) {
        let n = probs.len();
        let keys: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
        let line = format_units_line(keys.iter().map(String::as_str), &percent_units(&probs));
        let parsed = parse_verbalized(&line, &question(n), DEFAULT_TOLERANCE).unwrap();
        // largest remainder moves an entry by at most one hundredth of a
        // percent; entries rounded the ordinary way stay within half of that
        let mut max_err: f64 = 0.0;
        for (a, b) in parsed.probs.probs().iter().zip(&probs) {
            prop_assert!((a - b).abs() <= 1e-4 + 1e-12, "{line}: {a} vs {b}");
            max_err = max_err.max((a - b).abs());
        }
        let nearest: u64 = probs.iter().map(|p| (p * 10_000.0).round() as u64).sum();
        if nearest == 10_000 {
            prop_assert!(max_err <= 5e-5 + 1e-12, "{line}");
        }
        prop_assert!(parsed.repairs.iter().all(|r| *r == Repair::Renormalized));
    }

    #[test]
    fn dropping_a_key_only_zero_fills(probs in probs_strategy(), drop in 0usize..11) {
        let n = probs.len();
        let drop = drop % n;
        let units = percent_units(&probs);
        let keys: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
        let full = parse_verbalized(
            &format_units_line(keys.iter().map(String::as_str), &units),
            &question(n),
            100.0,
        )
        .unwrap();
        let kept: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let line = format_units_line(kept.iter().map(|&i| keys[i].as_str()), &kept.iter().map(|&i| units[i]).collect::<Vec<_>>());
        match parse_verbalized(&line, &question(n), 100.0) {
            Ok(partial) => {
                prop_assert_eq!(partial.probs.probs()[drop], 0.0);
                prop_assert!(partial.repairs.contains(&Repair::MissingKeyZeroFilled));
                // the others keep their order and only scale up
                for &i in &kept {
                    prop_assert!(partial.probs.probs()[i] + 1e-15 >= full.probs.probs()[i]);
                }
            }
            Err(e) => {
                // everything sat on the dropped key
                prop_assert_eq!(e.kind, FailureKind::SumOutOfTolerance);
                prop_assert_eq!(units[drop], 10_000);
            }
        }
    }
}
