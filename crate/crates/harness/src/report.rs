//! Writes the result bundle: CSV/JSON tables, failures and a markdown summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use opinion_align::metrics::{ScoreMatrix, SignificanceResult};
use serde::Serialize;

use crate::experiments::{RunResults, Rq1Result, Rq2Result, Rq3Result, ConsistencyResult, SensitivityResult};
use crate::{io_err, HarnessError};

pub const RESULTS_FILE: &str = "results.json";
pub const SUMMARY_FILE: &str = "summary.md";

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

fn opt4(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), f4)
}

fn sig(s: &Option<SignificanceResult>) -> String {
    s.as_ref().map_or_else(String::new, |s| s.stars.as_str().to_string())
}

struct Bundle {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Bundle {
    fn text(&mut self, name: &str, body: &str) -> Result<(), HarnessError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), HarnessError> {
        let body = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Io(e.to_string()))?;
        self.text(name, &(body + "\n"))
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| HarnessError::Io(format!("{name}: {e}"));
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(&r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(format!("{name}: {e}")))?;
        self.text(name, &String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn matrix_rows(m: &ScoreMatrix) -> Vec<Vec<String>> {
    m.rows
        .iter()
        .zip(&m.cells)
        .map(|(r, cells)| {
            std::iter::once(r.clone())
                .chain(cells.iter().map(|c| c.as_ref().map_or_else(|| "NA".into(), |s| f4(s.mean))))
                .collect()
        })
        .collect()
}

fn matrix_header(first: &str, m: &ScoreMatrix) -> Vec<String> {
    std::iter::once(first.to_string()).chain(m.cols.iter().cloned()).collect()
}

fn write_rq1(b: &mut Bundle, r: &Rq1Result) -> Result<(), HarnessError> {
    let header = matrix_header("model", &r.matrix);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = matrix_rows(&r.matrix);
    rows.extend(matrix_rows(&r.average_human));
    b.csv("rq1_matrix.csv", &h, rows)?;
    b.json("rq1_matrix.json", r)?;

    let mut rows = Vec::new();
    for rk in &r.rankings {
        for c in &rk.ranked {
            rows.push(vec![rk.model.clone(), c.rank.to_string(), c.country.to_string(), f4(c.mean)]);
        }
    }
    b.csv("rq1_rankings.csv", &["model", "rank", "country", "alignment"], rows)?;

    let rows = r.model_average.iter().map(|(c, v)| vec![c.to_string(), opt4(*v)]).collect();
    b.csv("rq1_model_average.csv", &["country", "mean_over_models"], rows)?;

    let rows = r
        .classifications
        .iter()
        .map(|c| {
            vec![
                c.model.clone(),
                c.country.to_string(),
                f4(c.a_model),
                f4(c.a_avg),
                f4(c.difference),
                format!("{:?}", c.class),
            ]
        })
        .collect();
    b.csv("rq1_alignment_difference.csv", &["model", "country", "a_model", "a_avg", "difference", "class"], rows)?;

    let header = matrix_header("country", &r.heatmap);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    b.csv("country_heatmap.csv", &h, matrix_rows(&r.heatmap))
}

fn write_rq2(b: &mut Bundle, r: &Rq2Result) -> Result<(), HarnessError> {
    let rows = r
        .rows
        .iter()
        .map(|row| {
            let (mean, std) = row.score.as_ref().map_or((None, None), |s| (Some(s.mean), Some(s.std)));
            let p = |s: &Option<SignificanceResult>| s.as_ref().map_or_else(String::new, |s| format!("{:.3e}", s.p_value));
            vec![
                row.model.clone(),
                row.country.to_string(),
                row.strategy.to_string(),
                row.language.code().to_string(),
                row.language_steering.to_string(),
                opt4(mean),
                opt4(std),
                format!("{}/{}", row.usable, row.total),
                p(&row.vs_english),
                sig(&row.vs_english),
                p(&row.vs_no_steering),
                sig(&row.vs_no_steering),
            ]
        })
        .collect();
    b.csv(
        "rq2_steering.csv",
        &[
            "model",
            "country",
            "strategy",
            "language",
            "language_steering",
            "mean",
            "std",
            "coverage",
            "p_vs_english",
            "stars_vs_english",
            "p_vs_no_steering",
            "stars_vs_no_steering",
        ],
        rows,
    )?;
    b.json("rq2_steering.json", r)
}

fn write_rq3(b: &mut Bundle, r: &Rq3Result) -> Result<(), HarnessError> {
    let mut trend = Vec::new();
    let mut filtered = Vec::new();
    for m in &r.models {
        for t in &m.trend {
            trend.push(vec![m.model.clone(), t.wave.to_string(), f4(t.mean), f4(t.std), t.n.to_string()]);
        }
        for c in &m.candidates {
            let (Some(a), Some(v)) = (m.a_model.get(c), m.a_avg.get(c)) else { continue };
            filtered.push(vec![
                m.model.clone(),
                c.to_string(),
                f4(*a),
                f4(*v),
                f4((a - v).abs()),
                m.filtered.contains(c).to_string(),
            ]);
        }
    }
    b.csv("rq3_trend.csv", &["model", "wave", "mean", "std", "countries"], trend)?;
    b.csv("rq3_filtered.csv", &["model", "country", "a_model", "a_avg", "abs_difference", "kept"], filtered)?;
    b.json("rq3_filtered.json", r)
}

fn write_sensitivity(b: &mut Bundle, r: &SensitivityResult) -> Result<(), HarnessError> {
    let rows = r
        .cells
        .iter()
        .map(|c| {
            vec![
                c.variant.as_str().to_string(),
                c.model.clone(),
                c.r.map_or_else(|| "NA".into(), f4),
                c.countries.len().to_string(),
                opt4(c.max_question_diff),
                c.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    b.csv("sensitivity.csv", &["variant", "model", "pearson_r", "countries", "max_question_diff", "note"], rows)?;
    b.json("sensitivity.json", r)
}

fn write_consistency(b: &mut Bundle, r: &ConsistencyResult) -> Result<(), HarnessError> {
    let rows = r
        .rows
        .iter()
        .map(|c| {
            vec![
                c.model.clone(),
                c.topic.clone(),
                c.rate.map_or_else(|| "NA".into(), |x| format!("{x:.2}")),
                c.usable.to_string(),
                c.ties.to_string(),
                c.skipped.clone().unwrap_or_default(),
            ]
        })
        .collect();
    b.csv("consistency.csv", &["model", "topic", "rate", "usable_items", "ties", "note"], rows)?;
    b.json("consistency.json", r)
}

fn links(s: &mut String, files: &[&str]) {
    let l: Vec<String> = files.iter().map(|f| format!("[{f}]({f})")).collect();
    let _ = writeln!(s, "Data: {}\n", l.join(", "));
}

fn summary(r: &RunResults) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Run {}\n", r.run_id);
    let _ = writeln!(s, "seed {}, wave {}, tau {}\n", r.seed, r.wave, r.tau);
    let _ = writeln!(
        s,
        "Survey answers with negative codes (don't know, no answer, not asked) are dropped before \
         normalizing. The average human distribution uses the countries with data for each question.\n"
    );

    let _ = writeln!(s, "## RQ1: alignment by country\n");
    match &r.rq1 {
        None => s.push_str("Not run.\n\n"),
        Some(q) => {
            links(
                &mut s,
                &[
                    "rq1_matrix.csv",
                    "rq1_matrix.json",
                    "rq1_rankings.csv",
                    "rq1_model_average.csv",
                    "rq1_alignment_difference.csv",
                    "country_heatmap.csv",
                ],
            );
            let _ = writeln!(s, "| model | mean | top {k} | bottom {k} |", k = r.top_k);
            s.push_str("|---|---|---|---|\n");
            for rk in &q.rankings {
                let list = |v: &[crate::experiments::RankedCountry]| {
                    v.iter().map(|c| format!("{} {}", c.country, f4(c.mean))).collect::<Vec<_>>().join(", ")
                };
                let _ = writeln!(s, "| {} | {} | {} | {} |", rk.model, opt4(rk.mean), list(&rk.top), list(&rk.bottom));
            }
            let avg: Vec<f64> = q.average_human.cells[0].iter().flatten().map(|c| c.mean).collect();
            if !avg.is_empty() {
                let _ = writeln!(
                    s,
                    "\nAverage human distribution: mean alignment {} over {} countries.",
                    f4(avg.iter().sum::<f64>() / avg.len() as f64),
                    avg.len()
                );
            }
            s.push('\n');
        }
    }

    let _ = writeln!(s, "## RQ2: steering\n");
    match &r.rq2 {
        None => s.push_str("Not run.\n\n"),
        Some(q) => {
            links(&mut s, &["rq2_steering.csv", "rq2_steering.json"]);
            s.push_str("Stars after a score: paired test against the same strategy in English. ");
            s.push_str("Last column: against the unsteered English prompt.\n\n");
            s.push_str("| model | country | strategy | language | mean | vs no steering |\n");
            s.push_str("|---|---|---|---|---|---|\n");
            for row in &q.rows {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {}{} | {} |",
                    row.model,
                    row.country,
                    row.strategy,
                    row.language.code(),
                    opt4(row.score.as_ref().map(|x| x.mean)),
                    sig(&row.vs_english),
                    sig(&row.vs_no_steering)
                );
            }
            for sk in &q.skipped {
                let _ = writeln!(s, "\nSkipped {}: {}", sk.country, sk.reason);
            }
            s.push('\n');
        }
    }

    let _ = writeln!(s, "## RQ3: waves\n");
    match &r.rq3 {
        None => s.push_str("Not run.\n\n"),
        Some(q) => {
            links(&mut s, &["rq3_trend.csv", "rq3_filtered.csv", "rq3_filtered.json"]);
            let _ = writeln!(s, "{} canonical questions, waves {:?}.\n", q.canonical_questions, q.waves);
            for m in &q.models {
                let _ = writeln!(s, "- {}: {} of {} countries kept", m.model, m.filtered.len(), m.candidates.len());
                if m.below_minimum {
                    let _ = writeln!(s, "  - warning: fewer than {} countries passed the filter", q.min_filtered);
                }
                for t in &m.trend {
                    let _ = writeln!(s, "  - wave {}: {} ± {} (n = {})", t.wave, f4(t.mean), f4(t.std), t.n);
                }
            }
            s.push('\n');
        }
    }

    let _ = writeln!(s, "## Sensitivity\n");
    match &r.sensitivity {
        None => s.push_str("Not run.\n\n"),
        Some(q) => {
            links(&mut s, &["sensitivity.csv", "sensitivity.json"]);
            for c in &q.cells {
                let v = match (&c.r, &c.error) {
                    (Some(r), _) => format!("r = {}", f4(*r)),
                    (None, Some(e)) => format!("no correlation: {e}"),
                    (None, None) => "no correlation".into(),
                };
                let _ = writeln!(s, "- {} / {}: {}", c.variant.as_str(), c.model, v);
            }
            s.push('\n');
        }
    }

    let _ = writeln!(s, "## Consistency\n");
    match &r.consistency {
        None => s.push_str("Not run.\n\n"),
        Some(q) => {
            links(&mut s, &["consistency.csv", "consistency.json"]);
            for c in &q.rows {
                let v = c.rate.map_or_else(|| c.skipped.clone().unwrap_or_default(), |x| format!("{x:.2}%"));
                let _ = writeln!(s, "- {} / {}: {} ({} items, {} ties)", c.model, c.topic, v, c.usable, c.ties);
            }
            s.push('\n');
        }
    }

    let _ = writeln!(s, "## Coverage\n");
    links(&mut s, &["parse_failures.jsonl", RESULTS_FILE]);
    let c = &r.coverage;
    let _ = writeln!(s, "{} cells: {} scored, {} parse failures.", c.cells, c.scored, c.parse_failed);
    for m in &c.per_model {
        let _ = writeln!(s, "- {}: {} scored, {} failed", m.model, m.scored, m.parse_failed);
    }
    if !c.repairs.is_empty() {
        let list: Vec<String> = c.repairs.iter().map(|(k, v)| format!("{k:?} {v}")).collect();
        let _ = writeln!(s, "\nRepairs ({} cells): {}", c.repaired_cells, list.join(", "));
    }
    s
}

/// Writes the full bundle into `dir` and returns the files written.
pub fn write_bundle(dir: &Path, r: &RunResults) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut b = Bundle { dir: dir.to_path_buf(), written: Vec::new() };
    b.json(RESULTS_FILE, r)?;
    if let Some(q) = &r.rq1 {
        write_rq1(&mut b, q)?;
    }
    if let Some(q) = &r.rq2 {
        write_rq2(&mut b, q)?;
    }
    if let Some(q) = &r.rq3 {
        write_rq3(&mut b, q)?;
    }
    if let Some(q) = &r.sensitivity {
        write_sensitivity(&mut b, q)?;
    }
    if let Some(q) = &r.consistency {
        write_consistency(&mut b, q)?;
    }
    let failures: String = r
        .parse_failures
        .iter()
        .map(|f| serde_json::to_string(f).expect("serializable") + "\n")
        .collect();
    b.text("parse_failures.jsonl", &failures)?;
    b.text(SUMMARY_FILE, &summary(r))?;
    Ok(b.written)
}

/// Reads a previously written `results.json`.
pub fn load_results(dir: &Path) -> Result<RunResults, HarnessError> {
    let path = dir.join(RESULTS_FILE);
    if !path.exists() {
        return Err(HarnessError::NoResults(dir.display().to_string()));
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
}

/// Re-renders the bundle from `results.json` alone.
pub fn regenerate(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let r = load_results(dir)?;
    write_bundle(dir, &r)
}
