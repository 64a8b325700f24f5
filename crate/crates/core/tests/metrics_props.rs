use std::collections::{BTreeMap, BTreeSet};

use opinion_align::metrics::*;
use opinion_align::survey::QuestionId;
use proptest::prelude::*;

/// Minimum-cost transport between two histograms with cost |i − j|, solved
/// as a min-cost flow by successive shortest paths (Bellman-Ford).
fn transport_cost(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    // nodes: 0 = source, 1..=n supply, n+1..=2n demand, 2n+1 = sink
    let (src, sink, nodes) = (0, 2 * n + 1, 2 * n + 2);
    struct Edge {
        to: usize,
        cap: f64,
        cost: f64,
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add = |edges: &mut Vec<Edge>, adj: &mut Vec<Vec<usize>>, a: usize, b: usize, cap: f64, cost: f64| {
        adj[a].push(edges.len());
        edges.push(Edge { to: b, cap, cost });
        adj[b].push(edges.len());
        edges.push(Edge { to: a, cap: 0.0, cost: -cost });
    };
    for i in 0..n {
        add(&mut edges, &mut adj, src, 1 + i, p[i], 0.0);
        add(&mut edges, &mut adj, n + 1 + i, sink, q[i], 0.0);
        for j in 0..n {
            add(&mut edges, &mut adj, 1 + i, n + 1 + j, f64::INFINITY, (i as f64 - j as f64).abs());
        }
    }
    let eps = 1e-15;
    let mut total = 0.0;
    loop {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev: Vec<Option<usize>> = vec![None; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    let ed = &edges[e];
                    if ed.cap > eps && dist[u] + ed.cost < dist[ed.to] - 1e-12 {
                        dist[ed.to] = dist[u] + ed.cost;
                        prev[ed.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            break;
        }
        let mut push = f64::INFINITY;
        let mut v = sink;
        while let Some(e) = prev[v] {
            push = push.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = sink;
        while let Some(e) = prev[v] {
            edges[e].cap -= push;
            edges[e ^ 1].cap += push;
            v = edges[e ^ 1].to;
        }
        total += push * dist[sink];
    }
    total
}

fn dist_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
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
}

fn pair_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| (dist_strategy(n), dist_strategy(n)))
}

fn triple_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| (dist_strategy(n), dist_strategy(n), dist_strategy(n)))
}

#[test]
fn transport_oracle_agrees_on_the_worked_pair() {
    let p = [0.5, 0.5, 0.0, 0.0];
    let q = [0.0, 0.0, 0.5, 0.5];
    assert!((transport_cost(&p, &q) - 2.0).abs() < 1e-12);
    assert_eq!(wasserstein_1d(&p, &q).unwrap(), 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn wd_matches_transport((p, q) in pair_strategy()) {
        let wd = wasserstein_1d(&p, &q).unwrap();
        prop_assert!((wd - transport_cost(&p, &q)).abs() < 1e-9);
    }

    #[test]
    fn wd_is_symmetric_and_bounded((p, q) in pair_strategy()) {
        let a = wasserstein_1d(&p, &q).unwrap();
        prop_assert_eq!(a, wasserstein_1d(&q, &p).unwrap());
        prop_assert!(a >= 0.0 && a <= (p.len() - 1) as f64 + 1e-12);
        prop_assert!(wasserstein_1d(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn wd_triangle_inequality((p, q, r) in triple_strategy()) {
        let pq = wasserstein_1d(&p, &q).unwrap();
        let qr = wasserstein_1d(&q, &r).unwrap();
        let pr = wasserstein_1d(&p, &r).unwrap();
        prop_assert!(pr <= pq + qr + 1e-12);
    }

    #[test]
    fn alignment_in_unit_interval((p, q) in pair_strategy()) {
        let n = p.len();
        let a = alignment_per_question(&p, &q, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(alignment_per_question(&p, &p, n).unwrap(), 1.0);
        let max_diff = p.iter().zip(&q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if max_diff > 1e-6 {
            prop_assert!(a < 1.0);
        }
    }

    #[test]
    fn filter_is_monotone_in_tau(
        scores in prop::collection::vec((0.5f64..1.0, 0.5f64..1.0), 1..12),
        t1 in 0.0f64..0.2,
        t2 in 0.0f64..0.2,
    ) {
        let m: BTreeMap<usize, f64> = scores.iter().enumerate().map(|(i, s)| (i, s.0)).collect();
        let a: BTreeMap<usize, f64> = scores.iter().enumerate().map(|(i, s)| (i, s.1)).collect();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let small = filter_countries(&m, &a, lo).unwrap();
        let large = filter_countries(&m, &a, hi).unwrap();
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn consistency_rate_floor(answers in prop::collection::vec(0usize..4, 1..30), groups in 1usize..5) {
        let answers: Vec<GroupAnswer> = answers.into_iter().map(|g| GroupAnswer::Group(g % groups)).collect();
        let rate = internal_consistency_rate(&answers).unwrap();
        prop_assert!(rate >= 100.0 / groups as f64 - 1e-9 && rate <= 100.0);
    }

    #[test]
    fn t_statistic_is_antisymmetric(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..20),
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let ab = paired_t_test(&a, &b).unwrap();
        let ba = paired_t_test(&b, &a).unwrap();
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        if !ab.degenerate {
            prop_assert!((ab.t_statistic + ba.t_statistic).abs() < 1e-9 * ab.t_statistic.abs().max(1.0));
        }
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
        prop_assert_eq!(ab.stars, Stars::from_p(ab.p_value));
    }

    #[test]
    fn country_matrix_is_symmetric_with_unit_diagonal(
        dists in prop::collection::vec(prop::collection::vec(dist_strategy(4), 6), 2..5),
    ) {
        let ids: Vec<QuestionId> = (0..6).map(|i| QuestionId::new(format!("Q{i}"))).collect();
        let maps: Vec<DistributionMap> = dists
            .iter()
            .map(|c| ids.iter().cloned().zip(c.iter().cloned()).collect())
            .collect();
        let labelled: Vec<(String, &DistributionMap)> =
            maps.iter().enumerate().map(|(i, m)| (format!("C{i}"), m)).collect();
        let mx = build_alignment_matrix(&labelled, &labelled, &ids);
        for i in 0..maps.len() {
            prop_assert_eq!(mx.cells[i][i].as_ref().unwrap().mean, 1.0);
            for j in 0..maps.len() {
                let a = mx.cells[i][j].as_ref().unwrap().mean;
                let b = mx.cells[j][i].as_ref().unwrap().mean;
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn aggregate_matches_hand_computation() {
    let ids = [QuestionId::from("Q1"), QuestionId::from("Q2"), QuestionId::from("Q3")];
    let values = BTreeMap::from([(ids[0].clone(), 1.0 / 3.0), (ids[1].clone(), 1.0), (ids[2].clone(), 0.0)]);
    let s = AlignmentScore::from_values(values, 0).unwrap();
    // mean 4/9; population variance ((1/9)^2 + (5/9)^2 + (4/9)^2)/3 = 42/243
    assert!((s.mean - 4.0 / 9.0).abs() < 1e-15);
    assert!((s.std - (42.0f64 / 243.0).sqrt()).abs() < 1e-15);
    assert!((s.std - 0.41573970964154905).abs() < 1e-12);

    let two = BTreeMap::from([(ids[0].clone(), 0.8), (ids[1].clone(), 1.0)]);
    assert!((AlignmentScore::from_values(two, 0).unwrap().mean - 0.9).abs() < 1e-15);
}

#[test]
fn matrix_cells_match_independent_recomputation() {
    let ids: Vec<QuestionId> = ["Q1", "Q2"].into_iter().map(QuestionId::from).collect();
    let a: DistributionMap = BTreeMap::from([(ids[0].clone(), vec![1.0, 0.0, 0.0]), (ids[1].clone(), vec![0.5, 0.5])]);
    let b: DistributionMap = BTreeMap::from([(ids[0].clone(), vec![0.0, 0.0, 1.0]), (ids[1].clone(), vec![0.5, 0.5])]);
    let c: DistributionMap = BTreeMap::from([(ids[0].clone(), vec![0.0, 1.0, 0.0])]);
    let labelled = vec![("A".to_string(), &a), ("B".to_string(), &b), ("C".to_string(), &c)];
    let mx = build_alignment_matrix(&labelled, &labelled, &ids);
    // A vs B: Q1 opposite extremes (0), Q2 identical (1)
    assert_eq!(mx.mean("A", "B"), Some(0.5));
    // A vs C: Q1 WD = 1 over N−1 = 2, Q2 missing on C
    let ac = mx.get("A", "C").unwrap();
    assert_eq!((ac.mean, ac.n_questions, ac.n_missing), (0.5, 1, 1));
    assert_eq!(mx.mean("C", "C"), Some(1.0));
    assert_eq!(mx.mean("B", "C"), Some(0.5));

    // a pair with no shared question is missing, not zero
    let empty: DistributionMap = BTreeMap::new();
    let with_empty = vec![("A".to_string(), &a), ("E".to_string(), &empty)];
    let mx = build_alignment_matrix(&with_empty, &with_empty, &ids);
    assert!(mx.get("A", "E").is_none());
}

#[test]
fn pearson_reference_value() {
    let r = pearson_r(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 9.0]).unwrap();
    assert!((r - 0.9943767126843688).abs() < 1e-6);
}

#[test]
fn paired_t_test_reference_values() {
    let a = [0.80, 0.82, 0.78, 0.85, 0.79];
    let b = [0.83, 0.86, 0.80, 0.88, 0.84];
    let r = paired_t_test(&a, &b).unwrap();
    // reference routine, computed before the build
    assert!((r.t_statistic - (-6.667948594698266)).abs() < 1e-9);
    assert!((r.p_value - 0.0026285451076807406).abs() < 1e-9);
    assert!(r.p_value < 0.01);
    assert_eq!(r.stars, Stars::Two);
    assert_eq!(r.n, 5);

    let sa: BTreeMap<&str, f64> = ["a", "b", "c", "d", "e"].into_iter().zip(a).collect();
    let sb: BTreeMap<&str, f64> = ["a", "b", "c", "d", "e"].into_iter().zip(b).collect();
    assert_eq!(paired_t_test_stars(&sa, &sb, TTestKind::Paired).unwrap(), r);
    let mut short = sb.clone();
    short.remove("e");
    assert!(paired_t_test_stars(&sa, &short, TTestKind::Paired).is_err());
}

#[test]
fn welch_reference_values() {
    // scipy.stats.ttest_ind(a, b, equal_var=False)
    let a = [0.80, 0.82, 0.78, 0.85, 0.79];
    let b = [0.83, 0.86, 0.80, 0.88, 0.84];
    let r = welch_t_test(&a, &b).unwrap();
    assert!((r.t_statistic - (-1.8493561969494228)).abs() < 1e-9);
    assert!((r.p_value - 0.10186917297538928).abs() < 1e-6);
}

#[test]
fn wave_trend_matches_hand_series() {
    let per_wave = BTreeMap::from([(5u8, vec![0.70, 0.80, 0.90]), (6, vec![0.75, 0.85]), (7, vec![0.9, 0.9, 0.9, 0.9])]);
    let t = wave_trend(&per_wave).unwrap();
    let waves: Vec<u8> = t.iter().map(|p| p.wave).collect();
    assert_eq!(waves, vec![5, 6, 7]);
    assert!((t[0].mean - 0.8).abs() < 1e-12 && (t[0].std - (0.02f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((t[1].mean - 0.8).abs() < 1e-12 && (t[1].std - 0.05).abs() < 1e-12);
    assert!((t[2].mean - 0.9).abs() < 1e-12 && t[2].std.abs() < 1e-12);
    assert_eq!(t[2].n, 4);
}

#[test]
fn topic_group_maps_cover_every_option() {
    use opinion_align::survey::{AnswerOption, Question};
    let q = Question::new(
        "Q33",
        "t",
        (1..=5).map(|k| AnswerOption { key: k.to_string(), label: k.to_string() }).collect(),
    )
    .unwrap();
    let item = TopicItem { question: "Q33".into(), groups: vec![vec!["1".into(), "2".into()], vec!["3".into()], vec!["4".into(), "5".into()]] };
    assert_eq!(item.group_map(&q).unwrap(), vec![0, 0, 1, 2, 2]);
    let gap = TopicItem { question: "Q33".into(), groups: vec![vec!["1".into()], vec!["2".into()]] };
    assert!(gap.group_map(&q).is_err());
    let overlap = TopicItem { question: "Q33".into(), groups: vec![vec!["1".into(), "2".into(), "3".into()], vec!["3".into(), "4".into(), "5".into()]] };
    assert!(overlap.group_map(&q).is_err());
    let topics = parse_topics(include_str!("../../../data/consistency_topics.toml")).unwrap();
    let names: BTreeSet<&str> = topics.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(names, BTreeSet::from(["atheism", "democracy", "gender-fairness"]));
}
