//! Weighted-AUPRC evaluation of source-trained predictors on target data.
//!
//! Average precision uses step interpolation over tie groups:
//! `AP = Σ_g (R_g − R_{g−1}) · P_g`, where each group is one distinct score.
//! "Weighted" means a positive-support-weighted mean across tasks; a pair has a
//! single binary task, so it reduces to that task's AP.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{summarize_features, DataError, Dataset, RegularGrid, FEATURES_PER_CHANNEL};
use crate::error::{EXIT_CONFIG, EXIT_COVERAGE, EXIT_DEGENERATE, EXIT_IO};
use crate::scenarios::{PositiveClassDef, Provenance, SourceTargetPair};
use crate::transforms::{regularize_all, GridSpec, TransformError};

pub const DEFAULT_EPOCHS: usize = 500;
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_STEP: f64 = 4.0;
pub const DEFAULT_HORIZON: f64 = 96.0;
pub const WEIGHTING: &str = "positive-support";

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {scores} scores, {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("no positive labels")]
    NoPositives,
    #[error("no tasks to aggregate")]
    Empty,
    #[error("task support must be positive, got {0}")]
    NonPositiveSupport(f64),
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("feature arity mismatch: model expects {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("duplicate prediction id `{0}`")]
    DuplicateId(String),
    #[error("{} target record(s) without a prediction: {}", .0.len(), .0.join(", "))]
    MissingIds(Vec<String>),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl EvalError {
    pub fn exit_code(&self) -> i32 {
        match self {
            EvalError::MissingIds(_) => EXIT_COVERAGE,
            EvalError::NoPositives | EvalError::SingleClass | EvalError::NonFinite(_) => EXIT_DEGENERATE,
            EvalError::Data(e) if e.is_io() => EXIT_IO,
            EvalError::Transform(e) => e.exit_code(),
            _ => EXIT_CONFIG,
        }
    }
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<usize, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(EvalError::NonFinite("score".into()));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 {
        return Err(EvalError::NoPositives);
    }
    Ok(positives)
}

/// `(recall, precision)` at each tie-group boundary, scores descending.
pub fn precision_recall_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<(f64, f64)>, EvalError> {
    let positives = check_inputs(scores, labels)? as f64;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = Vec::new();
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            tp += usize::from(labels[order[k]] == 1);
            seen += 1;
            k += 1;
        }
        points.push((tp as f64 / positives, tp as f64 / seen as f64));
    }
    Ok(points)
}

pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64, EvalError> {
    let curve = precision_recall_curve(scores, labels)?;
    let mut prev = 0.0;
    let mut ap = 0.0;
    for (r, p) in curve {
        ap += (r - prev) * p;
        prev = r;
    }
    Ok(ap.clamp(0.0, 1.0))
}

/// `Σ AP_t · s_t / Σ s_t` over `(AP, positive support)` pairs.
pub fn weighted_auprc(per_task: &[(f64, f64)]) -> Result<f64, EvalError> {
    if per_task.is_empty() {
        return Err(EvalError::Empty);
    }
    if per_task.len() == 1 {
        let (ap, s) = per_task[0];
        if s <= 0.0 {
            return Err(EvalError::NonPositiveSupport(s));
        }
        return Ok(ap);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(ap, s) in per_task {
        if s.is_nan() || s <= 0.0 {
            return Err(EvalError::NonPositiveSupport(s));
        }
        num += ap * s;
        den += s;
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Baseline,
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub scores: BTreeMap<String, f64>,
    pub origin: Origin,
}

impl PredictionSet {
    pub fn new(scores: BTreeMap<String, f64>, origin: Origin) -> Result<Self, EvalError> {
        if let Some((id, _)) = scores.iter().find(|(_, s)| !s.is_finite()) {
            return Err(EvalError::NonFinite(format!("score for `{id}`")));
        }
        Ok(PredictionSet { scores, origin })
    }

    /// Scores in the order of `dataset`'s records; lists every missing id.
    pub fn aligned(&self, dataset: &Dataset) -> Result<Vec<f64>, EvalError> {
        let mut missing = Vec::new();
        let mut out = Vec::with_capacity(dataset.len());
        for r in &dataset.records {
            match self.scores.get(&r.id) {
                Some(&s) => out.push(s),
                None => missing.push(r.id.clone()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(EvalError::MissingIds(missing))
        }
    }
}

/// Reads a `record_id,score` CSV (header required).
pub fn import_predictions(path: &Path) -> Result<PredictionSet, EvalError> {
    let parse_err = |message: String| EvalError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => EvalError::Data(DataError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        }),
        _ => parse_err(e.to_string()),
    })?;
    let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "record_id" || &headers[1] != "score" {
        return Err(parse_err(format!(
            "expected header `record_id,score`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut scores = BTreeMap::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let id = row[0].to_string();
        let score: f64 = row[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("row {}: bad score `{}`", k + 2, &row[1])))?;
        if !score.is_finite() {
            return Err(EvalError::NonFinite(format!("score for `{id}`")));
        }
        if scores.insert(id.clone(), score).is_some() {
            return Err(EvalError::DuplicateId(id));
        }
    }
    PredictionSet::new(scores, Origin::Imported)
}

pub fn export_predictions(predictions: &PredictionSet, path: &Path) -> Result<(), EvalError> {
    let io = |e: std::io::Error| {
        EvalError::Data(DataError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    };
    let mut text = String::from("record_id,score\n");
    for (id, s) in &predictions.scores {
        text.push_str(&format!("{id},{s}\n"));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub step: f64,
    pub horizon: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            epochs: DEFAULT_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed: 0,
            step: DEFAULT_STEP,
            horizon: DEFAULT_HORIZON,
        }
    }
}

/// Logistic regression on standardized per-channel summary features.
///
/// `weights` has one entry per feature followed by the bias. Standardization
/// statistics come from the training data only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub weights: Vec<f64>,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    pub n_channels: usize,
    pub step: f64,
    pub horizon: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Mean log-loss before each update.
    pub loss_trace: Vec<f64>,
}

impl BaselineModel {
    pub fn n_features(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn bias(&self) -> f64 {
        *self.weights.last().expect("bias present")
    }

    /// Logit of one raw (unstandardized) feature vector.
    pub fn score(&self, features: &[f64]) -> Result<f64, EvalError> {
        if features.len() != self.n_features() {
            return Err(EvalError::ArityMismatch {
                expected: self.n_features(),
                found: features.len(),
            });
        }
        let mut z = self.bias();
        for (j, &x) in features.iter().enumerate() {
            z += self.weights[j] * (x - self.feature_mean[j]) / self.feature_scale[j];
        }
        Ok(z)
    }
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Full-batch gradient descent from zero weights on raw feature rows.
pub fn train_logistic(
    features: &[Vec<f64>],
    labels: &[u8],
    n_channels: usize,
    config: &BaselineConfig,
) -> Result<BaselineModel, EvalError> {
    if features.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: features.len(),
            labels: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(EvalError::SingleClass);
    }
    let m = features[0].len();
    if let Some(row) = features.iter().find(|r| r.len() != m) {
        return Err(EvalError::ArityMismatch {
            expected: m,
            found: row.len(),
        });
    }
    if features.iter().flatten().any(|x| !x.is_finite()) {
        return Err(EvalError::NonFinite("feature".into()));
    }
    let n = features.len() as f64;
    let mut mean = vec![0.0; m];
    for row in features {
        for (j, &x) in row.iter().enumerate() {
            mean[j] += x;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut scale = vec![0.0; m];
    for row in features {
        for (j, &x) in row.iter().enumerate() {
            scale[j] += (x - mean[j]).powi(2);
        }
    }
    for s in &mut scale {
        *s = (*s / n).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let x: Vec<Vec<f64>> = features
        .iter()
        .map(|row| row.iter().enumerate().map(|(j, &v)| (v - mean[j]) / scale[j]).collect())
        .collect();
    let y: Vec<f64> = labels.iter().map(|&v| f64::from(v)).collect();

    let mut w = vec![0.0; m + 1];
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut grad = vec![0.0; m + 1];
    for _ in 0..config.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for (row, &yi) in x.iter().zip(&y) {
            let mut z = w[m];
            for (wj, xj) in w.iter().zip(row) {
                z += wj * xj;
            }
            loss += log1p_exp(z) - yi * z;
            let r = sigmoid(z) - yi;
            for (gj, xj) in grad.iter_mut().zip(row) {
                *gj += r * xj;
            }
            grad[m] += r;
        }
        loss_trace.push(loss / n);
        for (wj, gj) in w.iter_mut().zip(&grad) {
            *wj -= config.learning_rate * gj / n;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("weight".into()));
    }
    Ok(BaselineModel {
        weights: w,
        feature_mean: mean,
        feature_scale: scale,
        n_channels,
        step: config.step,
        horizon: config.horizon,
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        seed: config.seed,
        loss_trace,
    })
}

pub fn grid_features(grids: &[RegularGrid]) -> Vec<Vec<f64>> {
    grids.par_iter().map(summarize_features).collect()
}

pub fn train_baseline_on_grids(
    grids: &[RegularGrid],
    labels: &[u8],
    config: &BaselineConfig,
) -> Result<BaselineModel, EvalError> {
    let n_channels = grids.first().map_or(0, |g| g.n_channels);
    if let Some(g) = grids
        .iter()
        .find(|g| g.horizon != config.horizon || g.step != config.step)
    {
        return Err(EvalError::GridMismatch(format!(
            "grid step {} / horizon {} differs from config {} / {}",
            g.step, g.horizon, config.step, config.horizon
        )));
    }
    train_logistic(&grid_features(grids), labels, n_channels, config)
}

/// Regularizes `dataset` at the config's step and horizon, then trains.
pub fn train_baseline(dataset: &Dataset, labels: &[u8], config: &BaselineConfig) -> Result<BaselineModel, EvalError> {
    let grids = regularize_all(dataset, config.step, config.horizon)?;
    train_baseline_on_grids(&grids, labels, config)
}

/// Scores grids sampled over the model's horizon. The step may differ from
/// training, which is how sampling-rate shifts are evaluated.
pub fn predict_grids(model: &BaselineModel, ids: &[String], grids: &[RegularGrid]) -> Result<PredictionSet, EvalError> {
    if ids.len() != grids.len() {
        return Err(EvalError::LengthMismatch {
            scores: grids.len(),
            labels: ids.len(),
        });
    }
    for g in grids {
        if g.n_channels * FEATURES_PER_CHANNEL != model.n_features() {
            return Err(EvalError::ArityMismatch {
                expected: model.n_features(),
                found: g.n_channels * FEATURES_PER_CHANNEL,
            });
        }
        if g.horizon != model.horizon {
            return Err(EvalError::GridMismatch(format!(
                "horizon {} differs from training horizon {}",
                g.horizon, model.horizon
            )));
        }
    }
    let features = grid_features(grids);
    let mut scores = BTreeMap::new();
    for (id, f) in ids.iter().zip(&features) {
        if scores.insert(id.clone(), model.score(f)?).is_some() {
            return Err(EvalError::DuplicateId(id.clone()));
        }
    }
    PredictionSet::new(scores, Origin::Baseline)
}

/// Scores records regularized with the model's own step and horizon.
pub fn predict(model: &BaselineModel, dataset: &Dataset) -> Result<PredictionSet, EvalError> {
    let grids = regularize_all(dataset, model.step, model.horizon)?;
    let ids: Vec<String> = dataset.records.iter().map(|r| r.id.clone()).collect();
    predict_grids(model, &ids, &grids)
}

/// Trains on the pair's source and scores its target, honoring the pair's grid.
pub fn baseline_predictions(
    pair: &SourceTargetPair,
    config: &BaselineConfig,
) -> Result<(BaselineModel, PredictionSet), EvalError> {
    let grid = pair
        .provenance
        .grid
        .unwrap_or(GridSpec::uniform(config.step, config.horizon));
    let train_cfg = BaselineConfig {
        step: grid.source_step,
        horizon: grid.horizon,
        ..*config
    };
    let model = train_baseline(&pair.source.dataset, &pair.source.labels, &train_cfg)?;
    let target_grids = regularize_all(&pair.target.dataset, grid.target_step, grid.horizon)?;
    let ids: Vec<String> = pair.target.ids().map(String::from).collect();
    let predictions = predict_grids(&model, &ids, &target_grids)?;
    Ok((model, predictions))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: String,
    pub ap: f64,
    pub support: usize,
    pub prevalence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineConfig>,
    pub source_positive: PositiveClassDef,
    pub target_positive: PositiveClassDef,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scenario: String,
    pub per_task: Vec<TaskScore>,
    pub weighted_auprc: f64,
    pub weighting: String,
    pub n_source: usize,
    pub n_target: usize,
    pub config_echo: ConfigEcho,
}

pub fn task_name(def: &PositiveClassDef) -> String {
    format!("any-of({})", def.diseases.join("|"))
}

/// Target AP and weighted AUPRC of `predictions`.
pub fn evaluate(
    pair: &SourceTargetPair,
    predictions: &PredictionSet,
    baseline: Option<&BaselineConfig>,
) -> Result<EvalReport, EvalError> {
    let scores = predictions.aligned(&pair.target.dataset)?;
    let labels = &pair.target.labels;
    let ap = average_precision(&scores, labels)?;
    let support = labels.iter().filter(|&&y| y == 1).count();
    let task = TaskScore {
        task: task_name(&pair.target_positive),
        ap,
        support,
        prevalence: support as f64 / labels.len() as f64,
    };
    let weighted = weighted_auprc(&[(task.ap, task.support as f64)])?;
    let mut scenario = pair.provenance.spec.kind.name().to_string();
    if pair.provenance.control {
        scenario.push_str("_control");
    }
    Ok(EvalReport {
        scenario,
        per_task: vec![task],
        weighted_auprc: weighted,
        weighting: WEIGHTING.into(),
        n_source: pair.source.len(),
        n_target: pair.target.len(),
        config_echo: ConfigEcho {
            origin: predictions.origin,
            baseline: baseline.copied(),
            source_positive: pair.source_positive.clone(),
            target_positive: pair.target_positive.clone(),
            provenance: pair.provenance.clone(),
        },
    })
}

/// Trains the baseline on source, scores target and evaluates.
pub fn evaluate_baseline(pair: &SourceTargetPair, config: &BaselineConfig) -> Result<EvalReport, EvalError> {
    let (_, predictions) = baseline_predictions(pair, config)?;
    evaluate(pair, &predictions, Some(config))
}

pub const RUNS_HEADER: [&str; 10] = [
    "run",
    "scenario",
    "seed",
    "transforms",
    "origin",
    "n_source",
    "n_target",
    "support",
    "prevalence",
    "weighted_auprc",
];

impl EvalReport {
    fn transform_summary(&self) -> String {
        self.config_echo
            .provenance
            .transforms
            .iter()
            .map(|t| match &t.spec.op {
                crate::transforms::TransformOp::LabelFlip(f) => format!("label_flip:{}", f.p),
                crate::transforms::TransformOp::Resample(r) => format!("resample:{}/{}", r.source_step, r.target_step),
                crate::transforms::TransformOp::MaskChannels(m) => format!("mask_channels:{}", m.channels.len()),
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Flat summary row matching [`RUNS_HEADER`].
    pub fn csv_row(&self, run: &str) -> Vec<String> {
        let task = &self.per_task[0];
        vec![
            run.to_string(),
            self.scenario.clone(),
            self.config_echo.provenance.seed.to_string(),
            self.transform_summary(),
            match self.config_echo.origin {
                Origin::Baseline => "baseline".into(),
                Origin::Imported => "imported".into(),
            },
            self.n_source.to_string(),
            self.n_target.to_string(),
            task.support.to_string(),
            task.prevalence.to_string(),
            self.weighted_auprc.to_string(),
        ]
    }

    pub fn save(&self, path: &Path) -> Result<(), EvalError> {
        crate::data::write_json_pretty(path, self)?;
        Ok(())
    }

    /// Writes the one-row CSV summary next to a JSON report.
    pub fn save_csv(&self, path: &Path, run: &str) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| EvalError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        w.write_record(RUNS_HEADER).map_err(err)?;
        w.write_record(self.csv_row(run)).map_err(err)?;
        let bytes = w.into_inner().map_err(|e| EvalError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        fs::write(path, bytes).map_err(|e| {
            EvalError::Data(DataError::Io {
                path: path.to_path_buf(),
                source: e,
            })
        })
    }
}

fn read_runs(path: &Path) -> Result<Vec<Vec<String>>, EvalError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let err = |e: csv::Error| EvalError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut rdr = csv::Reader::from_path(path).map_err(err)?;
    let headers = rdr.headers().map_err(err)?.clone();
    if headers.iter().ne(RUNS_HEADER) {
        return Err(EvalError::Parse {
            path: path.to_path_buf(),
            message: "unexpected runs header".into(),
        });
    }
    rdr.records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(err))
        .collect()
}

/// Adds or replaces the row for `run` in an aggregation CSV. Rows stay sorted by run.
pub fn upsert_run(path: &Path, report: &EvalReport, run: &str) -> Result<(), EvalError> {
    let mut rows: BTreeMap<String, Vec<String>> = read_runs(path)?.into_iter().map(|r| (r[0].clone(), r)).collect();
    rows.insert(run.to_string(), report.csv_row(run));
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| EvalError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    w.write_record(RUNS_HEADER).map_err(err)?;
    for row in rows.values() {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| {
            EvalError::Data(DataError::Io {
                path: parent.to_path_buf(),
                source: e,
            })
        })?;
    }
    fs::write(path, bytes).map_err(|e| {
        EvalError::Data(DataError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub transforms: String,
    pub runs: usize,
    pub mean_auprc: f64,
    pub min_auprc: f64,
    pub max_auprc: f64,
    pub mean_prevalence: f64,
}

/// Groups a runs CSV by (scenario, transforms).
pub fn summarize_runs(path: &Path) -> Result<Vec<ScenarioSummary>, EvalError> {
    if !path.exists() {
        return Err(EvalError::Data(DataError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::from(std::io::ErrorKind::NotFound),
        }));
    }
    let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for row in read_runs(path)? {
        let parse = |s: &str| -> Result<f64, EvalError> {
            s.parse().map_err(|_| EvalError::Parse {
                path: path.to_path_buf(),
                message: format!("bad number `{s}`"),
            })
        };
        groups
            .entry((row[1].clone(), row[3].clone()))
            .or_default()
            .push((parse(&row[9])?, parse(&row[8])?));
    }
    Ok(groups
        .into_iter()
        .map(|((scenario, transforms), v)| {
            let n = v.len() as f64;
            ScenarioSummary {
                scenario,
                transforms,
                runs: v.len(),
                mean_auprc: v.iter().map(|x| x.0).sum::<f64>() / n,
                min_auprc: v.iter().map(|x| x.0).fold(f64::INFINITY, f64::min),
                max_auprc: v.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max),
                mean_prevalence: v.iter().map(|x| x.1).sum::<f64>() / n,
            }
        })
        .collect())
}

/// Ids in `predictions` that are not target records.
pub fn unknown_ids(pair: &SourceTargetPair, predictions: &PredictionSet) -> Vec<String> {
    let target: BTreeSet<&str> = pair.target.ids().collect();
    predictions
        .scores
        .keys()
        .filter(|id| !target.contains(id.as_str()))
        .cloned()
        .collect()
}
