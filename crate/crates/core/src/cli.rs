//! Command-line surface: `synth`, `landscape`, `scenario`, `transform`,
//! `evaluate`, `report`.
//!
//! Exit codes: 0 ok, 2 config, 3 I/O, 4 degenerate data, 5 empty cohort,
//! 6 prediction coverage.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{load_dataset, save_dataset, write_json_pretty, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    baseline_predictions, evaluate, export_predictions, import_predictions, summarize_runs, unknown_ids, upsert_run,
    BaselineConfig,
};
use crate::infotheory::DiscreteMatrix;
use crate::scenarios::{build_control, build_scenario, load_pair, save_pair, ScenarioSpec};
use crate::sieve::{export_landscape, fit_landscape, ExportFormat, SieveConfig};
use crate::synth::{generate, SynthConfig};
use crate::transforms::{apply_transforms, TransformSpec};

pub const SYNTH_MANIFEST_FILE: &str = "synth_manifest.json";

const SYNTH_HELP: &str = "\
CONFIG (JSON, every field optional):
  {\"n_records\": 5000, \"seed\": 0, \"baseline_rate\": 0.02,
   \"groups\": [{\"name\": \"g0\", \"diseases\": [\"a\", \"b\"], \"activation\": 0.3,
                \"coupling\": 0.9, \"age_shift\": 0}],
   \"demographics\": {\"age_mean\": 58, \"age_sd\": 16, \"age_min\": 18, \"age_max\": 95,
                    \"male_fraction\": 0.55, \"unknown_gender_fraction\": 0,
                    \"races\": [[\"white\", 0.55], [\"asian\", 0.45]]},
   \"comorbidities\": [{\"if_group\": 1, \"max_age\": 60, \"disease\": \"a\", \"probability\": 0.8}],
   \"interactions\": [{\"groups\": [0, 1], \"signal_scale\": 0.0}],
   \"channel_layout\": \"generic\" | \"mimic76\", \"n_channels\": 20,
   \"signal_strength\": 1.0, \"event_rate\": 0.05, \"horizon\": 96, \"decimals\": 3}

OUTPUT: <out>/manifest.json, <out>/records.jsonl, <out>/synth_manifest.json";

const LANDSCAPE_HELP: &str = "\
Fits a sieve on the dataset's label matrix. Constant label columns are dropped
with a warning; exit 4 if every column is constant.

OUTPUT: the landscape at --out (json or dot; `both` writes <stem>.json and
<stem>.dot) plus the fitted model at <stem>.sieve.json.";

const SCENARIO_HELP: &str = "\
SPEC (JSON): {\"kind\": ..., \"params\": {...}, \"seed\": 0, \"balance_ratio\": 0.6,
              \"tolerance\": 0.02, \"tau\": 0.2, \"n_factors\": 3,
              \"sieve\": {\"cardinality\": 2, \"restarts\": 10, \"max_iters\": 200, \"epsilon\": 0.001},
              \"transforms\": [TRANSFORM, ...]}
Clusters are a factor id or {\"containing\": \"<disease>\"}.
  age_split       {\"threshold\": 60, \"direction\": \"older_to_younger\" | \"younger_to_older\", \"source_cluster\": 1}
  gender_split    {\"direction\": \"male_to_female\" | \"female_to_male\", \"source_cluster\": 1}
  race_split      {\"direction\": \"majority_to_minority\" | \"minority_to_majority\", \"source_cluster\": 1,
                   \"majority\": [\"white\", ...], \"minority\": [\"hispanic\", ...]}
  novel_disease   {\"source_cluster\": 1, \"novel_cluster\": 0}
  dual_to_single  {\"set_a\": [\"...\"], \"set_b\": [\"...\"]}
  single_to_dual  {\"set_a\": [\"...\"], \"set_b\": [\"...\"]}

OUTPUT: <out>/source/, <out>/target/ (dataset + task_labels.csv) and <out>/provenance.json";

const TRANSFORM_HELP: &str = "\
TRANSFORM (JSON object, or an array applied in order):
  {\"kind\": \"label_flip\", \"params\": {\"p\": 0.1}, \"side\": \"source\", \"seed\": 1}
  {\"kind\": \"resample\", \"params\": {\"source_step\": 96, \"target_step\": 48, \"horizon\": 96}}
  {\"kind\": \"mask_channels\", \"params\": {\"channels\": [\"pH\"]}, \"side\": \"target\"}
side: source | target | both (defaults: flips source, masks target).";

const EVALUATE_HELP: &str = "\
PREDICTIONS (CSV, header required): record_id,score
Every target record needs a score; missing ids exit 6 and are listed.

OUTPUT: the JSON report at --report, a one-row CSV next to it (<stem>.csv) and,
with --runs-csv, an upserted row keyed by --run-name.";

#[derive(Debug, Parser)]
#[command(
    name = "clinshift",
    version,
    about = "Domain-shift scenarios for multi-label clinical time series"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with planted disease groups.
    #[command(after_long_help = SYNTH_HELP)]
    Synth(SynthArgs),
    /// Fit a disease landscape on a dataset's labels.
    #[command(after_long_help = LANDSCAPE_HELP)]
    Landscape(LandscapeArgs),
    /// Build a source/target pair from a scenario spec.
    #[command(after_long_help = SCENARIO_HELP)]
    Scenario(ScenarioArgs),
    /// Apply transforms to an existing pair.
    #[command(after_long_help = TRANSFORM_HELP)]
    Transform(TransformArgs),
    /// Evaluate baseline or imported predictions on a pair's target.
    #[command(after_long_help = EVALUATE_HELP)]
    Evaluate(EvaluateArgs),
    /// Summarize a runs CSV by scenario and transforms.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator config (JSON); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the config record count.
    #[arg(long)]
    pub records: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Dot,
    Both,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Number of factors (sieve layers).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub cardinality: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::sieve::DEFAULT_RESTARTS)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Build the in-distribution control pair for the spec instead.
    #[arg(long)]
    pub control: bool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub pair: PathBuf,
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("predictor").required(true).args(["predictions", "baseline"])))]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pair: PathBuf,
    /// External predictions CSV (`record_id,score`).
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Train the built-in logistic baseline on the source side.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long)]
    pub report: PathBuf,
    /// Aggregation CSV to upsert this run into.
    #[arg(long)]
    pub runs_csv: Option<PathBuf>,
    /// Row key in the runs CSV; defaults to the pair directory name.
    #[arg(long)]
    pub run_name: Option<String>,
    /// Also write the scored predictions here.
    #[arg(long)]
    pub save_predictions: Option<PathBuf>,
    #[arg(long, default_value_t = crate::eval::DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long, default_value_t = crate::eval::DEFAULT_LEARNING_RATE)]
    pub learning_rate: f64,
    /// Grid step (hours) when the pair does not set one.
    #[arg(long, default_value_t = crate::eval::DEFAULT_STEP)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub runs: PathBuf,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut config: SynthConfig = match &args.config {
        Some(p) => read_config(p)?,
        None => SynthConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.records {
        config.n_records = n;
    }
    let (dataset, manifest) = generate(&config)?;
    save_dataset(&dataset, &args.out)?;
    write_json_pretty(&args.out.join(SYNTH_MANIFEST_FILE), &manifest)?;
    log::info!(
        "wrote {} records, {} channels, {} diseases to {}",
        dataset.len(),
        dataset.n_channels(),
        dataset.n_diseases(),
        args.out.display()
    );
    Ok(())
}

/// Label matrix without constant columns; errors when nothing varies.
pub fn informative_labels(dataset: &Dataset) -> Result<DiscreteMatrix> {
    let full = dataset.label_matrix();
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for (name, col) in full.names().iter().zip(full.columns()) {
        if col.counts().iter().filter(|&&c| c > 0).count() > 1 {
            names.push(name.clone());
            columns.push(col.clone());
        } else {
            log::warn!("dropping constant label column `{name}`");
        }
    }
    if columns.is_empty() {
        return Err(Error::Degenerate("every label column is constant".into()));
    }
    Ok(DiscreteMatrix::new(names, columns)?)
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn model_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.sieve.json"))
}

pub fn cmd_landscape(args: &LandscapeArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let labels = informative_labels(&dataset)?;
    let config = SieveConfig {
        cardinality: args.cardinality,
        restarts: args.restarts,
        seed: args.seed,
        ..SieveConfig::default()
    };
    let (model, landscape) = fit_landscape(&labels, args.k, &config)?;
    match args.format {
        FormatArg::Json => export_landscape(&landscape, ExportFormat::Json, &args.out)?,
        FormatArg::Dot => export_landscape(&landscape, ExportFormat::Dot, &args.out)?,
        FormatArg::Both => {
            export_landscape(&landscape, ExportFormat::Json, &with_extension(&args.out, "json"))?;
            export_landscape(&landscape, ExportFormat::Dot, &with_extension(&args.out, "dot"))?;
        }
    }
    model.save(&model_path(&args.out))?;
    log::info!(
        "{} factors over {} diseases; TC per layer {:?}",
        landscape.factors.len(),
        landscape.diseases.len(),
        model.per_layer_tc
    );
    Ok(())
}

pub fn cmd_scenario(args: &ScenarioArgs) -> Result<()> {
    let spec = ScenarioSpec::load(&args.spec)?;
    let dataset = load_dataset(&args.dataset)?;
    let mut pair = if args.control {
        build_control(&dataset, &spec)?
    } else {
        build_scenario(&dataset, &spec)?
    };
    apply_transforms(&mut pair, &spec.transforms)?;
    save_pair(&pair, &args.out)?;
    log::info!(
        "{}: source {} ({} positive), target {} ({} positive)",
        spec.kind.name(),
        pair.source.len(),
        pair.source.positives(),
        pair.target.len(),
        pair.target.positives()
    );
    Ok(())
}

pub fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let value: serde_json::Value = read_config(&args.spec)?;
    let specs: Vec<TransformSpec> = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|s| vec![s])
    }
    .map_err(|e| Error::Config(format!("{}: {e}", args.spec.display())))?;
    let mut pair = load_pair(&args.pair)?;
    apply_transforms(&mut pair, &specs)?;
    save_pair(&pair, &args.out)?;
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let pair = load_pair(&args.pair)?;
    let baseline = BaselineConfig {
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        seed: pair.provenance.seed,
        step: args.step,
        ..BaselineConfig::default()
    };
    let (predictions, used) = match &args.predictions {
        Some(path) => {
            let p = import_predictions(path)?;
            let extra = unknown_ids(&pair, &p);
            if !extra.is_empty() {
                log::warn!("{} prediction id(s) are not target records", extra.len());
            }
            (p, None)
        }
        None => (baseline_predictions(&pair, &baseline)?.1, Some(baseline)),
    };
    if let Some(path) = &args.save_predictions {
        export_predictions(&predictions, path)?;
    }
    let report = evaluate(&pair, &predictions, used.as_ref())?;
    report.save(&args.report)?;
    let run = args.run_name.clone().unwrap_or_else(|| {
        args.pair
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    });
    report.save_csv(&with_extension(&args.report, "csv"), &run)?;
    if let Some(runs) = &args.runs_csv {
        upsert_run(runs, &report, &run)?;
    }
    println!(
        "{} weighted AUPRC {:.4} (prevalence {:.4}, n_target {})",
        report.scenario, report.weighted_auprc, report.per_task[0].prevalence, report.n_target
    );
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let summary = summarize_runs(&args.runs)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?
        );
        return Ok(());
    }
    println!(
        "{:<24} {:<28} {:>4} {:>8} {:>8} {:>8} {:>10}",
        "scenario", "transforms", "runs", "mean", "min", "max", "prevalence"
    );
    for s in summary {
        println!(
            "{:<24} {:<28} {:>4} {:>8.4} {:>8.4} {:>8.4} {:>10.4}",
            s.scenario,
            if s.transforms.is_empty() { "-" } else { &s.transforms },
            s.runs,
            s.mean_auprc,
            s.min_auprc,
            s.max_auprc,
            s.mean_prevalence
        );
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Landscape(a) => cmd_landscape(a),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Runs a parsed command line and returns its exit code, reporting errors on stderr.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(()) => crate::error::EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
