use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opinion_harness::experiments::{dry_run, run_pipelines, Pipeline, RunOptions};
use opinion_harness::gateway::ResponseCache;
use opinion_harness::manifest::{Dataset, RunManifest};
use opinion_harness::report::{regenerate, write_bundle};
use opinion_harness::HarnessError;

#[derive(Parser)]
#[command(name = "oalign", version, about = "Measure how closely model opinions match national survey responses")]
struct Cli {
    /// Run manifest (TOML).
    #[arg(long, global = true, default_value = "manifest.toml")]
    manifest: PathBuf,
    /// Overrides the manifest's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the manifest seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Render prompts and print fingerprints without calling any model.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Stop after this many uncached model calls.
    #[arg(long, global = true, hide = true)]
    max_requests: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the survey data and print what was kept.
    Ingest,
    /// Check the manifest, the data and every planned prompt.
    Validate,
    /// Run every enabled experiment and write the report.
    Run,
    /// Country alignment matrix and rankings.
    Rq1,
    /// Language steering against the English baseline.
    Rq2,
    /// Alignment across survey waves.
    Rq3,
    /// Prompt-variant correlation with the default prompt.
    Sensitivity,
    /// Agreement across related questions.
    Consistency,
    /// Rebuild the report files from a run's results.json.
    Report {
        /// Report directory; defaults to the manifest's.
        dir: Option<PathBuf>,
    },
    /// Inspect the response cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Count entries per model.
    Stats,
    /// Remove every cached response.
    Clear,
}

fn load_manifest(cli: &Cli) -> Result<RunManifest, HarnessError> {
    let mut m = RunManifest::load(&cli.manifest)?;
    if let Some(out) = &cli.out {
        m.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        m.seed = seed;
    }
    m.check()?;
    Ok(m)
}

fn run(cli: &Cli, pipelines: &[Pipeline]) -> Result<(), HarnessError> {
    let m = load_manifest(cli)?;
    let data = Dataset::load(&m)?;
    if cli.dry_run {
        let cells = dry_run(&m, &data, pipelines)?;
        for c in &cells {
            println!("{}  {}", c.prompt.fingerprint.as_str(), c.key);
        }
        println!("{} prompts; no model calls made", cells.len());
        return Ok(());
    }
    let rt = tokio::runtime::Runtime::new().map_err(|e| HarnessError::Io(e.to_string()))?;
    let opts = RunOptions { max_requests: cli.max_requests };
    let out = rt.block_on(run_pipelines(&m, &data, pipelines, &opts))?;
    let files = write_bundle(&m.report_dir(), &out.results)?;
    println!(
        "{} cells: {} fetched, {} from cache; {} scored, {} parse failures",
        out.execution.cells.len(),
        out.execution.fetched,
        out.execution.cached,
        out.results.coverage.scored,
        out.results.coverage.parse_failed
    );
    println!("wrote {} files to {}", files.len(), m.report_dir().display());
    Ok(())
}

fn ingest(cli: &Cli) -> Result<(), HarnessError> {
    let m = load_manifest(cli)?;
    let data = Dataset::load(&m)?;
    println!("wave {}: {} questions evaluated", data.wave, data.questions.len());
    for ((w, lang), q) in &data.questionnaires {
        println!("  wave {w} {}: {} questions", lang.name(), q.questions.len());
    }
    println!("{} countries with counts at wave {}", data.surveyed_countries().len(), data.wave);
    for (c, w, e) in &data.human.join_errors {
        println!("  join error {c} wave {w}: {e}");
    }
    Ok(())
}

fn validate(cli: &Cli) -> Result<(), HarnessError> {
    let m = load_manifest(cli)?;
    let data = Dataset::load(&m)?;
    let cells = dry_run(&m, &data, &Pipeline::ALL)?;
    println!("manifest ok: {} models, {} prompts planned", m.models.len(), cells.len());
    Ok(())
}

fn cache(cli: &Cli, action: &CacheAction) -> Result<(), HarnessError> {
    let m = load_manifest(cli)?;
    let cache = ResponseCache::new(&m.cache_dir);
    match action {
        CacheAction::Stats => {
            let mut per_model = std::collections::BTreeMap::<String, usize>::new();
            for p in cache.entries() {
                let model = p
                    .strip_prefix(cache.dir())
                    .ok()
                    .and_then(|r| r.components().next())
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .unwrap_or_default();
                *per_model.entry(model).or_default() += 1;
            }
            for (model, n) in &per_model {
                println!("{model}: {n}");
            }
            println!("{} entries in {}", per_model.values().sum::<usize>(), cache.dir().display());
        }
        CacheAction::Clear => {
            if cache.dir().exists() {
                std::fs::remove_dir_all(cache.dir()).map_err(|e| HarnessError::Io(format!("{}: {e}", cache.dir().display())))?;
            }
            println!("cleared {}", cache.dir().display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest => ingest(&cli),
        Command::Validate => validate(&cli),
        Command::Run => run(&cli, &Pipeline::ALL),
        Command::Rq1 => run(&cli, &[Pipeline::Rq1]),
        Command::Rq2 => run(&cli, &[Pipeline::Rq2]),
        Command::Rq3 => run(&cli, &[Pipeline::Rq3]),
        Command::Sensitivity => run(&cli, &[Pipeline::Sensitivity]),
        Command::Consistency => run(&cli, &[Pipeline::Consistency]),
        Command::Report { dir } => {
            let dir = match dir {
                Some(d) => Ok(d.clone()),
                None => load_manifest(&cli).map(|m| m.report_dir()),
            };
            dir.and_then(|d| {
                let files = regenerate(&d)?;
                println!("wrote {} files to {}", files.len(), d.display());
                Ok(())
            })
        }
        Command::Cache { action } => cache(&cli, action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(1)
        }
    }
}
