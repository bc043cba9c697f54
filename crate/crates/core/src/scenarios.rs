//! Source/target domain-shift scenarios.
//!
//! A [`ScenarioSpec`] names one shift kind and its parameters. [`build_scenario`]
//! turns it into a [`SourceTargetPair`]: two disjoint record sets, each with a
//! binary task label ("any of these diseases"), balanced by downsampling to
//! the requested positive fraction.
//!
//! Population kinds (age, gender, race) split records by a demographic
//! criterion, fit a landscape on the source pool to pick the positive cluster,
//! then refit on the target pool and widen the positive set with strongly
//! correlated diseases. Label-shift kinds (novel disease, dual/single) keep one
//! population and change which disease combinations count as positive.
//!
//! All randomness derives from `spec.seed`; see [`crate::rng`].

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    load_dataset, read_json, save_dataset, write_json_pretty, DataError, Dataset, EpisodeRecord, Gender,
};
use crate::error::{EXIT_CONFIG, EXIT_DEGENERATE, EXIT_EMPTY_COHORT, EXIT_IO};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sieve::{correlated_diseases, fit_landscape, DiseaseLandscape, SieveConfig, SieveError, DEFAULT_TAU};
use crate::transforms::{GridSpec, TransformRecord, TransformSpec};

pub const DEFAULT_BALANCE_RATIO: f64 = 0.6;
pub const DEFAULT_BALANCE_TOLERANCE: f64 = 0.02;
pub const DEFAULT_AGE_THRESHOLD: u32 = 60;
pub const DEFAULT_N_FACTORS: usize = 3;
pub const TASK_LABELS_FILE: &str = "task_labels.csv";
pub const PROVENANCE_FILE: &str = "provenance.json";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario spec: {0}")]
    Spec(String),
    #[error("empty {side} pool for {criterion} (source {source_count}, target {target_count})")]
    EmptyPool {
        side: String,
        criterion: String,
        source_count: usize,
        target_count: usize,
    },
    #[error("{side}: no {class} records to balance")]
    EmptyClass { side: String, class: String },
    #[error("cluster {0} has no member diseases")]
    EmptyCluster(String),
    #[error("unknown disease `{0}`")]
    UnknownDisease(String),
    #[error("disease sets overlap on {0:?}")]
    OverlappingSets(Vec<String>),
    #[error(
        "positive fraction {ratio} unattainable within ±{tolerance} from {n_pos} positives and {n_neg} negatives (best {best:.4})"
    )]
    Unattainable {
        ratio: f64,
        tolerance: f64,
        n_pos: usize,
        n_neg: usize,
        best: f64,
    },
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{kind}: {source}")]
    InKind {
        kind: String,
        #[source]
        source: Box<ScenarioError>,
    },
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Spec(_)
            | ScenarioError::EmptyCluster(_)
            | ScenarioError::UnknownDisease(_)
            | ScenarioError::OverlappingSets(_) => EXIT_CONFIG,
            ScenarioError::EmptyPool { .. } | ScenarioError::EmptyClass { .. } => EXIT_EMPTY_COHORT,
            ScenarioError::Unattainable { .. } => EXIT_DEGENERATE,
            ScenarioError::Sieve(SieveError::Io { .. }) => EXIT_IO,
            ScenarioError::Sieve(_) => EXIT_DEGENERATE,
            ScenarioError::Data(e) if e.is_io() => EXIT_IO,
            ScenarioError::Data(_) => EXIT_CONFIG,
            ScenarioError::InKind { source, .. } => source.exit_code(),
        }
    }

    fn in_kind(self, kind: &str) -> Self {
        match self {
            e @ ScenarioError::InKind { .. } => e,
            e => ScenarioError::InKind {
                kind: kind.to_string(),
                source: Box::new(e),
            },
        }
    }
}

/// A landscape cluster, by factor id or as "the cluster containing this disease".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClusterRef {
    Id(usize),
    Containing { containing: String },
}

impl std::fmt::Display for ClusterRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClusterRef::Id(k) => write!(f, "{k}"),
            ClusterRef::Containing { containing } => write!(f, "containing `{containing}`"),
        }
    }
}

impl ClusterRef {
    pub fn resolve(&self, landscape: &DiseaseLandscape) -> Result<usize, ScenarioError> {
        match self {
            ClusterRef::Id(k) => Ok(*k),
            ClusterRef::Containing { containing } => landscape
                .clusters
                .get(containing)
                .copied()
                .ok_or_else(|| ScenarioError::UnknownDisease(containing.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeDirection {
    OlderToYounger,
    YoungerToOlder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderDirection {
    MaleToFemale,
    FemaleToMale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaceDirection {
    MajorityToMinority,
    MinorityToMajority,
}

fn default_age_threshold() -> u32 {
    DEFAULT_AGE_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeParams {
    #[serde(default = "default_age_threshold")]
    pub threshold: u32,
    pub direction: AgeDirection,
    pub source_cluster: ClusterRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenderParams {
    pub direction: GenderDirection,
    pub source_cluster: ClusterRef,
}

pub fn default_majority_races() -> Vec<String> {
    ["white", "russian", "european"].map(String::from).to_vec()
}

pub fn default_minority_races() -> Vec<String> {
    [
        "hispanic",
        "south_american",
        "african",
        "asian",
        "portuguese",
        "unknown",
    ]
    .map(String::from)
    .to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaceParams {
    pub direction: RaceDirection,
    #[serde(default = "default_majority_races")]
    pub majority: Vec<String>,
    #[serde(default = "default_minority_races")]
    pub minority: Vec<String>,
    pub source_cluster: ClusterRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NovelParams {
    pub source_cluster: ClusterRef,
    pub novel_cluster: ClusterRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiseaseSetParams {
    pub set_a: Vec<String>,
    pub set_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ScenarioKind {
    AgeSplit(AgeParams),
    GenderSplit(GenderParams),
    RaceSplit(RaceParams),
    NovelDisease(NovelParams),
    DualToSingle(DiseaseSetParams),
    SingleToDual(DiseaseSetParams),
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::AgeSplit(_) => "age_split",
            ScenarioKind::GenderSplit(_) => "gender_split",
            ScenarioKind::RaceSplit(_) => "race_split",
            ScenarioKind::NovelDisease(_) => "novel_disease",
            ScenarioKind::DualToSingle(_) => "dual_to_single",
            ScenarioKind::SingleToDual(_) => "single_to_dual",
        }
    }
}

fn default_ratio() -> f64 {
    DEFAULT_BALANCE_RATIO
}
fn default_tolerance() -> f64 {
    DEFAULT_BALANCE_TOLERANCE
}
fn default_tau() -> f64 {
    DEFAULT_TAU
}
fn default_n_factors() -> usize {
    DEFAULT_N_FACTORS
}

/// Declarative shift description.
///
/// ```json
/// {"kind": "age_split",
///  "params": {"threshold": 60, "direction": "older_to_younger", "source_cluster": 1},
///  "seed": 7, "balance_ratio": 0.6, "tau": 0.2}
/// ```
///
/// `source_cluster` / `novel_cluster` take a factor id or
/// `{"containing": "<disease>"}`. The sieve block's own seed is ignored; landscape
/// seeds derive from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ratio")]
    pub balance_ratio: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Sieve layers fit for each landscape.
    #[serde(default = "default_n_factors")]
    pub n_factors: usize,
    #[serde(default)]
    pub sieve: SieveConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformSpec>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        ScenarioSpec {
            kind,
            seed,
            balance_ratio: DEFAULT_BALANCE_RATIO,
            tolerance: DEFAULT_BALANCE_TOLERANCE,
            tau: DEFAULT_TAU,
            n_factors: DEFAULT_N_FACTORS,
            sieve: SieveConfig::default(),
            transforms: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| ScenarioError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| {
            ScenarioError::Data(DataError::Io {
                path: path.to_path_buf(),
                source: e,
            })
        })?;
        Self::from_json(&text).map_err(|e| match e {
            ScenarioError::Spec(m) => ScenarioError::Spec(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.balance_ratio > 0.0 && self.balance_ratio < 1.0) {
            return Err(ScenarioError::Spec(format!(
                "balance_ratio must lie in (0, 1), got {}",
                self.balance_ratio
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(ScenarioError::Spec(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        if !self.tau.is_finite() {
            return Err(ScenarioError::Spec("tau must be finite".into()));
        }
        if self.n_factors == 0 {
            return Err(ScenarioError::Spec("n_factors must be at least 1".into()));
        }
        if let ScenarioKind::DualToSingle(p) | ScenarioKind::SingleToDual(p) = &self.kind {
            if p.set_a.is_empty() || p.set_b.is_empty() {
                return Err(ScenarioError::Spec("set_a and set_b must be non-empty".into()));
            }
            let overlap: Vec<String> = p.set_a.iter().filter(|d| p.set_b.contains(d)).cloned().collect();
            if !overlap.is_empty() {
                return Err(ScenarioError::OverlappingSets(overlap));
            }
        }
        if let ScenarioKind::RaceSplit(p) = &self.kind {
            if p.majority.is_empty() || p.minority.is_empty() {
                return Err(ScenarioError::Spec("race lists must be non-empty".into()));
            }
        }
        for t in &self.transforms {
            t.validate().map_err(|e| ScenarioError::Spec(e.to_string()))?;
        }
        Ok(())
    }

    fn sieve_config(&self, label: &str) -> SieveConfig {
        SieveConfig {
            seed: derive_seed(self.seed, label),
            ..self.sieve
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositiveRule {
    #[serde(rename = "any-of")]
    AnyOf,
}

/// Binary task: positive iff any listed disease is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveClassDef {
    pub diseases: Vec<String>,
    pub rule: PositiveRule,
}

impl PositiveClassDef {
    pub fn any_of(diseases: Vec<String>) -> Self {
        PositiveClassDef {
            diseases,
            rule: PositiveRule::AnyOf,
        }
    }

    pub fn indices(&self, dataset: &Dataset) -> Result<Vec<usize>, ScenarioError> {
        if self.diseases.is_empty() {
            return Err(ScenarioError::Spec("positive class has no diseases".into()));
        }
        self.diseases
            .iter()
            .map(|d| {
                dataset
                    .disease_index(d)
                    .ok_or_else(|| ScenarioError::UnknownDisease(d.clone()))
            })
            .collect()
    }
}

/// Record indices of the two population pools and how many fit neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationSplit {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub excluded: usize,
    pub criterion: String,
}

fn race_in(list: &[String], race: &str) -> bool {
    let race = race.trim().to_lowercase();
    list.iter().any(|r| r.trim().to_lowercase() == race)
}

type SideOf = Box<dyn Fn(&EpisodeRecord) -> Option<bool>>;

/// Partitions records by the spec's demographic criterion.
///
/// Age: 60 and above is "older". Gender splits exclude unknown gender; race
/// splits exclude tokens on neither list. Errors on an empty pool.
pub fn split_population(dataset: &Dataset, kind: &ScenarioKind) -> Result<PopulationSplit, ScenarioError> {
    let (criterion, side): (String, SideOf) = match kind {
        ScenarioKind::AgeSplit(p) => {
            let t = p.threshold;
            let older_is_source = p.direction == AgeDirection::OlderToYounger;
            (
                format!("age {:?} at {t}", p.direction),
                Box::new(move |r| Some((r.demographics.age >= t) == older_is_source)),
            )
        }
        ScenarioKind::GenderSplit(p) => {
            let source = match p.direction {
                GenderDirection::MaleToFemale => Gender::Male,
                GenderDirection::FemaleToMale => Gender::Female,
            };
            (
                format!("gender {:?}", p.direction),
                Box::new(move |r| match r.demographics.gender {
                    Gender::Unknown => None,
                    g => Some(g == source),
                }),
            )
        }
        ScenarioKind::RaceSplit(p) => {
            let (src, tgt) = match p.direction {
                RaceDirection::MajorityToMinority => (p.majority.clone(), p.minority.clone()),
                RaceDirection::MinorityToMajority => (p.minority.clone(), p.majority.clone()),
            };
            (
                format!("race {:?}", p.direction),
                Box::new(move |r| {
                    if race_in(&src, &r.demographics.race) {
                        Some(true)
                    } else if race_in(&tgt, &r.demographics.race) {
                        Some(false)
                    } else {
                        None
                    }
                }),
            )
        }
        other => {
            return Err(ScenarioError::Spec(format!(
                "{} is not a population split",
                other.name()
            )));
        }
    };
    let mut split = PopulationSplit {
        source: Vec::new(),
        target: Vec::new(),
        excluded: 0,
        criterion,
    };
    for (i, r) in dataset.records.iter().enumerate() {
        match side(r) {
            Some(true) => split.source.push(i),
            Some(false) => split.target.push(i),
            None => split.excluded += 1,
        }
    }
    for (name, pool) in [("source", &split.source), ("target", &split.target)] {
        if pool.is_empty() {
            return Err(ScenarioError::EmptyPool {
                side: name.into(),
                criterion: split.criterion.clone(),
                source_count: split.source.len(),
                target_count: split.target.len(),
            });
        }
    }
    Ok(split)
}

fn subset(dataset: &Dataset, indices: &[usize]) -> Dataset {
    dataset.with_records(indices.iter().map(|&i| dataset.records[i].clone()).collect())
}

/// Fits a landscape on the labels of `pool`.
pub fn pool_landscape(
    pool: &Dataset,
    n_factors: usize,
    config: &SieveConfig,
) -> Result<DiseaseLandscape, ScenarioError> {
    Ok(fit_landscape(&pool.label_matrix(), n_factors, config)?.1)
}

/// All diseases whose cluster is `cluster`.
pub fn define_positive_source(
    landscape: &DiseaseLandscape,
    cluster: &ClusterRef,
) -> Result<PositiveClassDef, ScenarioError> {
    let k = cluster.resolve(landscape)?;
    let members = landscape.cluster_members(k);
    if members.is_empty() {
        return Err(ScenarioError::EmptyCluster(cluster.to_string()));
    }
    Ok(PositiveClassDef::any_of(members))
}

/// Source diseases plus those strongly correlated with them in the target landscape.
pub fn define_positive_target(
    target_landscape: &DiseaseLandscape,
    source_def: &PositiveClassDef,
    tau: f64,
) -> Result<PositiveClassDef, ScenarioError> {
    for d in &source_def.diseases {
        if !target_landscape.diseases.contains(d) {
            return Err(ScenarioError::UnknownDisease(d.clone()));
        }
    }
    Ok(PositiveClassDef::any_of(correlated_diseases(
        target_landscape,
        &source_def.diseases,
        tau,
    )?))
}

pub fn binarize_labels(dataset: &Dataset, def: &PositiveClassDef) -> Result<Vec<u8>, ScenarioError> {
    let idx = def.indices(dataset)?;
    Ok(dataset.records.iter().map(|r| u8::from(r.has_any(&idx))).collect())
}

/// Class sizes after balancing by the rounding rule.
///
/// With too many negatives all positives stay and
/// `n_neg = round(n_pos·(1−r)/r)`; with too many positives all negatives stay
/// and `n_pos = round(n_neg·r/(1−r))`. Already-balanced inputs are unchanged.
pub fn balance_counts(n_pos: usize, n_neg: usize, ratio: f64, tolerance: f64) -> (usize, usize) {
    let total = n_pos + n_neg;
    if total == 0 {
        return (0, 0);
    }
    let frac = n_pos as f64 / total as f64;
    if (frac - ratio).abs() <= tolerance {
        (n_pos, n_neg)
    } else if frac < ratio {
        let keep = (n_pos as f64 * (1.0 - ratio) / ratio).round() as usize;
        (n_pos, keep.min(n_neg))
    } else {
        let keep = (n_neg as f64 * ratio / (1.0 - ratio)).round() as usize;
        (keep.min(n_pos), n_neg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceSummary {
    pub positives_before: usize,
    pub negatives_before: usize,
    pub positives_after: usize,
    pub negatives_after: usize,
    pub positive_fraction: f64,
    pub ratio: f64,
    pub tolerance: f64,
}

/// Downsamples the non-limiting class so the positive fraction is within
/// `tolerance` of `ratio`. Returns kept positions in input order.
pub fn balance(
    labels: &[u8],
    ratio: f64,
    tolerance: f64,
    seed: u64,
) -> Result<(Vec<usize>, BalanceSummary), ScenarioError> {
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != 1).collect();
    for (class, v) in [("positive", &pos), ("negative", &neg)] {
        if v.is_empty() {
            return Err(ScenarioError::EmptyClass {
                side: "pool".into(),
                class: class.into(),
            });
        }
    }
    let (n_pos, n_neg) = balance_counts(pos.len(), neg.len(), ratio, tolerance);
    let frac = n_pos as f64 / (n_pos + n_neg) as f64;
    if n_pos == 0 || n_neg == 0 || (frac - ratio).abs() > tolerance + 1e-12 {
        return Err(ScenarioError::Unattainable {
            ratio,
            tolerance,
            n_pos: pos.len(),
            n_neg: neg.len(),
            best: frac,
        });
    }
    let mut rng = rng_from_seed(seed);
    let pick = |from: &[usize], n: usize, rng: &mut crate::rng::SeededRng| -> Vec<usize> {
        if n == from.len() {
            return from.to_vec();
        }
        let mut chosen: Vec<usize> = sample(rng, from.len(), n).into_iter().map(|j| from[j]).collect();
        chosen.sort_unstable();
        chosen
    };
    let kept_pos = pick(&pos, n_pos, &mut rng);
    let kept_neg = pick(&neg, n_neg, &mut rng);
    let mut kept: Vec<usize> = kept_pos.into_iter().chain(kept_neg).collect();
    kept.sort_unstable();
    Ok((
        kept,
        BalanceSummary {
            positives_before: pos.len(),
            negatives_before: neg.len(),
            positives_after: n_pos,
            negatives_after: n_neg,
            positive_fraction: frac,
            ratio,
            tolerance,
        },
    ))
}

/// Record indices grouped by presence of any disease in set A and in set B.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiseaseGroups {
    pub a_only: Vec<usize>,
    pub b_only: Vec<usize>,
    pub neither: Vec<usize>,
    pub both: Vec<usize>,
}

pub fn group_by_disease_sets(
    dataset: &Dataset,
    set_a: &[String],
    set_b: &[String],
) -> Result<DiseaseGroups, ScenarioError> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(ScenarioError::Spec("disease sets must be non-empty".into()));
    }
    let overlap: Vec<String> = set_a.iter().filter(|d| set_b.contains(d)).cloned().collect();
    if !overlap.is_empty() {
        return Err(ScenarioError::OverlappingSets(overlap));
    }
    let a = PositiveClassDef::any_of(set_a.to_vec()).indices(dataset)?;
    let b = PositiveClassDef::any_of(set_b.to_vec()).indices(dataset)?;
    let mut g = DiseaseGroups::default();
    for (i, r) in dataset.records.iter().enumerate() {
        match (r.has_any(&a), r.has_any(&b)) {
            (true, true) => g.both.push(i),
            (true, false) => g.a_only.push(i),
            (false, true) => g.b_only.push(i),
            (false, false) => g.neither.push(i),
        }
    }
    Ok(g)
}

/// Seeded split into two disjoint halves (first gets the extra element), each in input order.
pub fn seeded_halves(indices: &[usize], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut shuffled = indices.to_vec();
    shuffled.shuffle(&mut rng_from_seed(seed));
    let cut = indices.len().div_ceil(2);
    let mut first = shuffled[..cut].to_vec();
    let mut second = shuffled[cut..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}

/// One side of a pair: records plus their binary task labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSplit {
    pub dataset: Dataset,
    pub labels: Vec<u8>,
}

impl TaskSplit {
    fn new(dataset: &Dataset, indices: &[usize], labels: &[u8]) -> Self {
        let mut order: Vec<usize> = (0..indices.len()).collect();
        order.sort_by(|&a, &b| dataset.records[indices[a]].id.cmp(&dataset.records[indices[b]].id));
        let mut records = Vec::with_capacity(order.len());
        let mut out = Vec::with_capacity(order.len());
        for k in order {
            let mut r = dataset.records[indices[k]].clone();
            r.sort_events();
            records.push(r);
            out.push(labels[k]);
        }
        TaskSplit {
            dataset: dataset.with_records(records),
            labels: out,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn prevalence(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.labels.len() as f64
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.dataset.records.iter().map(|r| r.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolCounts {
    pub source: usize,
    pub target: usize,
    /// Records matching neither side's criterion (or dropped by kind rules).
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: ScenarioSpec,
    pub seed: u64,
    /// True for an in-distribution control built from the same spec.
    #[serde(default)]
    pub control: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_landscape: Option<DiseaseLandscape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_landscape: Option<DiseaseLandscape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<GroupCounts>,
    pub pools: PoolCounts,
    pub source_balance: BalanceSummary,
    pub target_balance: BalanceSummary,
    /// Grid settings for models that consume regularized series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub transforms: Vec<TransformRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub a_only: usize,
    pub b_only: usize,
    pub neither: usize,
    pub both: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceTargetPair {
    pub source: TaskSplit,
    pub target: TaskSplit,
    pub source_positive: PositiveClassDef,
    pub target_positive: PositiveClassDef,
    pub provenance: Provenance,
}

struct Assembly {
    source_pool: Vec<usize>,
    target_pool: Vec<usize>,
    source_labels: Vec<u8>,
    target_labels: Vec<u8>,
    source_positive: PositiveClassDef,
    target_positive: PositiveClassDef,
    excluded: usize,
    source_landscape: Option<DiseaseLandscape>,
    target_landscape: Option<DiseaseLandscape>,
    groups: Option<GroupCounts>,
}

fn labels_for(dataset: &Dataset, pool: &[usize], def: &PositiveClassDef) -> Result<Vec<u8>, ScenarioError> {
    let idx = def.indices(dataset)?;
    Ok(pool
        .iter()
        .map(|&i| u8::from(dataset.records[i].has_any(&idx)))
        .collect())
}

fn assemble_population(dataset: &Dataset, spec: &ScenarioSpec, control: bool) -> Result<Assembly, ScenarioError> {
    let cluster = match &spec.kind {
        ScenarioKind::AgeSplit(p) => &p.source_cluster,
        ScenarioKind::GenderSplit(p) => &p.source_cluster,
        ScenarioKind::RaceSplit(p) => &p.source_cluster,
        _ => unreachable!("population kinds only"),
    };
    let mut split = split_population(dataset, &spec.kind)?;
    if control {
        // Both sides drawn from the source population.
        let (a, b) = seeded_halves(&split.source, derive_seed(spec.seed, "control-halves"));
        split.excluded += split.target.len();
        split.source = a;
        split.target = b;
    }
    let source_ds = subset(dataset, &split.source);
    let target_ds = subset(dataset, &split.target);
    let source_landscape = pool_landscape(&source_ds, spec.n_factors, &spec.sieve_config("source-landscape"))?;
    let source_positive = define_positive_source(&source_landscape, cluster)?;
    let target_landscape = pool_landscape(&target_ds, spec.n_factors, &spec.sieve_config("target-landscape"))?;
    let target_positive = define_positive_target(&target_landscape, &source_positive, spec.tau)?;
    Ok(Assembly {
        source_labels: labels_for(dataset, &split.source, &source_positive)?,
        target_labels: labels_for(dataset, &split.target, &target_positive)?,
        source_pool: split.source,
        target_pool: split.target,
        source_positive,
        target_positive,
        excluded: split.excluded,
        source_landscape: Some(source_landscape),
        target_landscape: Some(target_landscape),
        groups: None,
    })
}

fn assemble_novel(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    p: &NovelParams,
    control: bool,
) -> Result<Assembly, ScenarioError> {
    let landscape = pool_landscape(dataset, spec.n_factors, &spec.sieve_config("landscape"))?;
    let source_positive = define_positive_source(&landscape, &p.source_cluster)?;
    let novel = if control {
        source_positive.clone()
    } else {
        define_positive_source(&landscape, &p.novel_cluster)?
    };
    let target_positive = PositiveClassDef::any_of(
        landscape
            .diseases
            .iter()
            .filter(|d| source_positive.diseases.contains(d) || novel.diseases.contains(d))
            .cloned()
            .collect(),
    );
    // Diseases that only the target treats as positive stay unseen in the source.
    let unseen: Vec<String> = novel
        .diseases
        .iter()
        .filter(|d| !source_positive.diseases.contains(d))
        .cloned()
        .collect();
    let all: Vec<usize> = (0..dataset.len()).collect();
    let (half_a, half_b) = seeded_halves(&all, derive_seed(spec.seed, "novel-halves"));
    let mut excluded = 0;
    let source_pool: Vec<usize> = if unseen.is_empty() {
        half_a
    } else {
        let idx = PositiveClassDef::any_of(unseen).indices(dataset)?;
        half_a
            .into_iter()
            .filter(|&i| {
                let keep = !dataset.records[i].has_any(&idx);
                excluded += usize::from(!keep);
                keep
            })
            .collect()
    };
    let target_pool = half_b;
    for (side, pool) in [("source", &source_pool), ("target", &target_pool)] {
        if pool.is_empty() {
            return Err(ScenarioError::EmptyPool {
                side: side.into(),
                criterion: "novel disease halves".into(),
                source_count: source_pool.len(),
                target_count: target_pool.len(),
            });
        }
    }
    Ok(Assembly {
        source_labels: labels_for(dataset, &source_pool, &source_positive)?,
        target_labels: labels_for(dataset, &target_pool, &target_positive)?,
        source_pool,
        target_pool,
        source_positive,
        target_positive,
        excluded,
        source_landscape: Some(landscape),
        target_landscape: None,
        groups: None,
    })
}

fn assemble_label_groups(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    p: &DiseaseSetParams,
    dual_source: bool,
    control: bool,
) -> Result<Assembly, ScenarioError> {
    let g = group_by_disease_sets(dataset, &p.set_a, &p.set_b)?;
    let (neg_source, neg_target) = seeded_halves(&g.neither, derive_seed(spec.seed, "neither-halves"));
    let mut single: Vec<usize> = g.a_only.iter().chain(&g.b_only).copied().collect();
    single.sort_unstable();
    let (mut pos_source, mut pos_target) = if dual_source {
        (g.both.clone(), single.clone())
    } else {
        (single.clone(), g.both.clone())
    };
    if control {
        let (a, b) = seeded_halves(&pos_source, derive_seed(spec.seed, "control-halves"));
        pos_source = a;
        pos_target = b;
    }
    let excluded = g.a_only.len() + g.b_only.len() + g.both.len() - pos_source.len() - pos_target.len();
    let merge = |pos: &[usize], neg: &[usize]| -> (Vec<usize>, Vec<u8>) {
        let mut rows: Vec<(usize, u8)> = pos.iter().map(|&i| (i, 1)).chain(neg.iter().map(|&i| (i, 0))).collect();
        rows.sort_unstable();
        rows.into_iter().unzip()
    };
    let (source_pool, source_labels) = merge(&pos_source, &neg_source);
    let (target_pool, target_labels) = merge(&pos_target, &neg_target);
    let def = PositiveClassDef::any_of(
        dataset
            .diseases
            .iter()
            .filter(|d| p.set_a.contains(d) || p.set_b.contains(d))
            .cloned()
            .collect(),
    );
    for (side, pool) in [("source", &source_pool), ("target", &target_pool)] {
        if pool.is_empty() {
            return Err(ScenarioError::EmptyPool {
                side: side.into(),
                criterion: "disease-set groups".into(),
                source_count: source_pool.len(),
                target_count: target_pool.len(),
            });
        }
    }
    Ok(Assembly {
        source_pool,
        target_pool,
        source_labels,
        target_labels,
        source_positive: def.clone(),
        target_positive: def,
        excluded,
        source_landscape: None,
        target_landscape: None,
        groups: Some(GroupCounts {
            a_only: g.a_only.len(),
            b_only: g.b_only.len(),
            neither: g.neither.len(),
            both: g.both.len(),
        }),
    })
}

fn finish(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    a: Assembly,
    control: bool,
) -> Result<SourceTargetPair, ScenarioError> {
    let side_err = |side: &str| {
        let side = side.to_string();
        move |e: ScenarioError| match e {
            ScenarioError::EmptyClass { class, .. } => ScenarioError::EmptyClass {
                side: side.clone(),
                class,
            },
            e => e,
        }
    };
    let (keep_s, source_balance) = balance(
        &a.source_labels,
        spec.balance_ratio,
        spec.tolerance,
        derive_seed(spec.seed, "balance-source"),
    )
    .map_err(side_err("source"))?;
    let (keep_t, target_balance) = balance(
        &a.target_labels,
        spec.balance_ratio,
        spec.tolerance,
        derive_seed(spec.seed, "balance-target"),
    )
    .map_err(side_err("target"))?;
    let source_idx: Vec<usize> = keep_s.iter().map(|&k| a.source_pool[k]).collect();
    let source_lab: Vec<u8> = keep_s.iter().map(|&k| a.source_labels[k]).collect();
    let target_idx: Vec<usize> = keep_t.iter().map(|&k| a.target_pool[k]).collect();
    let target_lab: Vec<u8> = keep_t.iter().map(|&k| a.target_labels[k]).collect();
    Ok(SourceTargetPair {
        source: TaskSplit::new(dataset, &source_idx, &source_lab),
        target: TaskSplit::new(dataset, &target_idx, &target_lab),
        source_positive: a.source_positive,
        target_positive: a.target_positive,
        provenance: Provenance {
            spec: spec.clone(),
            seed: spec.seed,
            control,
            source_landscape: a.source_landscape,
            target_landscape: a.target_landscape,
            groups: a.groups,
            pools: PoolCounts {
                source: a.source_pool.len(),
                target: a.target_pool.len(),
                excluded: a.excluded,
            },
            source_balance,
            target_balance,
            grid: None,
            transforms: Vec::new(),
        },
    })
}

fn build(dataset: &Dataset, spec: &ScenarioSpec, control: bool) -> Result<SourceTargetPair, ScenarioError> {
    spec.validate()?;
    let assembly = match &spec.kind {
        ScenarioKind::AgeSplit(_) | ScenarioKind::GenderSplit(_) | ScenarioKind::RaceSplit(_) => {
            assemble_population(dataset, spec, control)?
        }
        ScenarioKind::NovelDisease(p) => assemble_novel(dataset, spec, p, control)?,
        ScenarioKind::DualToSingle(p) => assemble_label_groups(dataset, spec, p, true, control)?,
        ScenarioKind::SingleToDual(p) => assemble_label_groups(dataset, spec, p, false, control)?,
    };
    finish(dataset, spec, assembly, control)
}

/// Builds the balanced source/target pair described by `spec`.
///
/// Transforms listed in the spec are not applied here; see
/// [`crate::transforms::apply_transforms`].
pub fn build_scenario(dataset: &Dataset, spec: &ScenarioSpec) -> Result<SourceTargetPair, ScenarioError> {
    build(dataset, spec, false).map_err(|e| e.in_kind(spec.kind.name()))
}

/// In-distribution counterpart of `spec`: the target is drawn the same way as
/// the source, from disjoint records.
///
/// Population kinds split the source pool in two; novel disease uses the
/// source cluster on both sides; dual/single kinds split the source positive
/// group in two.
pub fn build_control(dataset: &Dataset, spec: &ScenarioSpec) -> Result<SourceTargetPair, ScenarioError> {
    build(dataset, spec, true).map_err(|e| e.in_kind(spec.kind.name()))
}

#[derive(Debug, Serialize, Deserialize)]
struct PairFile {
    source_positive: PositiveClassDef,
    target_positive: PositiveClassDef,
    provenance: Provenance,
}

fn write_task_labels(split: &TaskSplit, path: &Path) -> Result<(), DataError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| DataError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let csv_err = |e| DataError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    w.write_record(["record_id", "label"]).map_err(csv_err)?;
    for (r, y) in split.dataset.records.iter().zip(&split.labels) {
        w.write_record([r.id.as_str(), if *y == 1 { "1" } else { "0" }])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| DataError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_task_labels(dataset: &Dataset, path: &Path) -> Result<Vec<u8>, ScenarioError> {
    let csv_err = |e| DataError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut labels = Vec::with_capacity(dataset.len());
    for (k, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let id = row.get(0).unwrap_or_default();
        let expected = dataset.records.get(k).map(|r| r.id.as_str());
        if expected != Some(id) {
            return Err(ScenarioError::Data(DataError::Schema {
                record: id.to_string(),
                field: "record_id".into(),
                message: format!("{} row {} does not match the dataset order", path.display(), k + 1),
            }));
        }
        labels.push(match row.get(1) {
            Some("1") => 1,
            Some("0") => 0,
            other => {
                return Err(ScenarioError::Data(DataError::Schema {
                    record: id.to_string(),
                    field: "label".into(),
                    message: format!("expected 0 or 1, got {other:?}"),
                }))
            }
        });
    }
    if labels.len() != dataset.len() {
        return Err(ScenarioError::Data(DataError::Schema {
            record: String::new(),
            field: "label".into(),
            message: format!(
                "{} has {} rows for {} records",
                path.display(),
                labels.len(),
                dataset.len()
            ),
        }));
    }
    Ok(labels)
}

/// Writes `source/` and `target/` dataset directories, each with task labels,
/// plus `provenance.json`.
pub fn save_pair(pair: &SourceTargetPair, dir: &Path) -> Result<(), ScenarioError> {
    for (name, split) in [("source", &pair.source), ("target", &pair.target)] {
        let sub = dir.join(name);
        save_dataset(&split.dataset, &sub)?;
        write_task_labels(split, &sub.join(TASK_LABELS_FILE))?;
    }
    write_json_pretty(
        &dir.join(PROVENANCE_FILE),
        &PairFile {
            source_positive: pair.source_positive.clone(),
            target_positive: pair.target_positive.clone(),
            provenance: pair.provenance.clone(),
        },
    )?;
    Ok(())
}

pub fn load_pair(dir: &Path) -> Result<SourceTargetPair, ScenarioError> {
    let file: PairFile = read_json(&dir.join(PROVENANCE_FILE))?;
    let mut splits = Vec::with_capacity(2);
    for name in ["source", "target"] {
        let sub = dir.join(name);
        let dataset = load_dataset(&sub)?;
        let labels = read_task_labels(&dataset, &sub.join(TASK_LABELS_FILE))?;
        splits.push(TaskSplit { dataset, labels });
    }
    let target = splits.pop().expect("two splits");
    let source = splits.pop().expect("two splits");
    Ok(SourceTargetPair {
        source,
        target,
        source_positive: file.source_positive,
        target_positive: file.target_positive,
        provenance: file.provenance,
    })
}

/// Ids present on both sides; empty for every well-formed pair.
pub fn shared_ids(pair: &SourceTargetPair) -> Vec<String> {
    let source: BTreeSet<&str> = pair.source.ids().collect();
    pair.target
        .ids()
        .filter(|id| source.contains(id))
        .map(String::from)
        .collect()
}
