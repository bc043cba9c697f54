//! Seeded synthetic EHR-like data with a planted disease-factor structure.
//!
//! Label model, per record:
//!
//! 1. every group is active independently with its `activation` probability;
//! 2. age is drawn from `N(age_mean + Σ active age_shift, age_sd)`, clipped;
//!    gender and race from their configured proportions;
//! 3. a member disease of an active group is present with probability
//!    `coupling`, otherwise with `baseline_rate`;
//! 4. co-morbidity rules, in listed order, switch a disease on with their
//!    probability when their condition holds.
//!
//! Each disease has one signal channel whose value is shifted by
//! `signal_strength` while the disease is present (scaled by any matching
//! interaction rule). Events arrive on every channel as a Poisson process of
//! `event_rate` per hour over `[0, horizon]`, with value
//! `baseline + shifts + N(0, 1)`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ChannelDescriptor, Dataset, Demographics, EpisodeRecord, Event, Gender};
use crate::rng::{derive_indexed, derive_seed, rng_from_seed};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{field}: probability {value} outside [0, 1]")]
    InvalidProbability { field: String, value: f64 },
    #[error("group {0} has no diseases")]
    EmptyGroup(usize),
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> SynthError {
    SynthError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub diseases: Vec<String>,
    pub activation: f64,
    pub coupling: f64,
    /// Added to the mean age of records where the group is active.
    #[serde(default)]
    pub age_shift: f64,
}

/// Switches `disease` on with `probability` when group `if_group` is active and
/// the demographic condition holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComorbidityRule {
    pub if_group: usize,
    /// Condition `age < max_age`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_age: Option<u32>,
    /// Condition `age >= min_age`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_age: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub races: Option<Vec<String>>,
    pub disease: String,
    pub probability: f64,
}

impl ComorbidityRule {
    fn applies(&self, active: &[bool], demo: &Demographics) -> bool {
        active[self.if_group]
            && self.max_age.is_none_or(|m| demo.age < m)
            && self.min_age.is_none_or(|m| demo.age >= m)
            && self.gender.is_none_or(|g| demo.gender == g)
            && self.races.as_ref().is_none_or(|rs| rs.contains(&demo.race))
    }
}

/// When every listed group is active, the signal shifts of their member
/// diseases are multiplied by `signal_scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalInteraction {
    pub groups: Vec<usize>,
    pub signal_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemographicConfig {
    pub age_mean: f64,
    pub age_sd: f64,
    pub age_min: u32,
    pub age_max: u32,
    pub male_fraction: f64,
    pub unknown_gender_fraction: f64,
    /// Race tokens and their proportions (normalized at generation time).
    pub races: Vec<(String, f64)>,
}

impl Default for DemographicConfig {
    fn default() -> Self {
        DemographicConfig {
            age_mean: 58.0,
            age_sd: 16.0,
            age_min: 18,
            age_max: 95,
            male_fraction: 0.55,
            unknown_gender_fraction: 0.0,
            races: vec![
                ("white".into(), 0.55),
                ("russian".into(), 0.05),
                ("european".into(), 0.05),
                ("hispanic".into(), 0.08),
                ("south_american".into(), 0.04),
                ("african".into(), 0.12),
                ("asian".into(), 0.06),
                ("portuguese".into(), 0.02),
                ("unknown".into(), 0.03),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelLayout {
    /// `n_channels` generic channels; disease `j` signals on channel `j`.
    Generic,
    /// A 76-column layout whose missing-measurement set spans 35 columns.
    Mimic76,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_records: usize,
    pub seed: u64,
    pub groups: Vec<GroupSpec>,
    pub baseline_rate: f64,
    pub demographics: DemographicConfig,
    pub comorbidities: Vec<ComorbidityRule>,
    pub interactions: Vec<SignalInteraction>,
    pub channel_layout: ChannelLayout,
    pub n_channels: usize,
    pub signal_strength: f64,
    /// Events per channel per hour.
    pub event_rate: f64,
    pub horizon: f64,
    /// Decimal places kept in event times and values.
    pub decimals: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let group = |name: &str, diseases: &[&str], activation: f64, age_shift: f64| GroupSpec {
            name: name.into(),
            diseases: diseases.iter().map(|s| s.to_string()).collect(),
            activation,
            coupling: 0.9,
            age_shift,
        };
        SynthConfig {
            n_records: 5000,
            seed: 0,
            groups: vec![
                group(
                    "cardiac_renal",
                    &[
                        "coronary_atherosclerosis",
                        "congestive_heart_failure",
                        "cardiac_dysrhythmia",
                        "chronic_kidney_disease",
                    ],
                    0.3,
                    6.0,
                ),
                group(
                    "respiratory",
                    &["respiratory_failure", "pneumonia", "copd", "pleural_disorder"],
                    0.3,
                    0.0,
                ),
                group(
                    "cerebrovascular",
                    &["stroke", "altered_consciousness", "seizure", "brain_injury"],
                    0.25,
                    -4.0,
                ),
            ],
            baseline_rate: 0.02,
            demographics: DemographicConfig::default(),
            comorbidities: Vec::new(),
            interactions: Vec::new(),
            channel_layout: ChannelLayout::Generic,
            n_channels: 20,
            signal_strength: 1.0,
            event_rate: 0.05,
            horizon: 96.0,
            decimals: 3,
        }
    }
}

fn check_probability(field: &str, value: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SynthError::InvalidProbability {
            field: field.to_string(),
            value,
        })
    }
}

impl SynthConfig {
    pub fn diseases(&self) -> Vec<String> {
        self.groups.iter().flat_map(|g| g.diseases.iter().cloned()).collect()
    }

    /// Group of each disease, in disease order.
    pub fn disease_groups(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(k, g)| std::iter::repeat_n(k, g.diseases.len()))
            .collect()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.groups.is_empty() {
            return Err(invalid("groups", "at least one group is required"));
        }
        for (k, g) in self.groups.iter().enumerate() {
            if g.diseases.is_empty() {
                return Err(SynthError::EmptyGroup(k));
            }
            check_probability(&format!("groups[{k}].activation"), g.activation)?;
            check_probability(&format!("groups[{k}].coupling"), g.coupling)?;
        }
        let diseases = self.diseases();
        let mut seen = std::collections::HashSet::new();
        for d in &diseases {
            if !seen.insert(d) {
                return Err(invalid("groups", format!("disease `{d}` appears twice")));
            }
        }
        check_probability("baseline_rate", self.baseline_rate)?;
        let demo = &self.demographics;
        check_probability("demographics.male_fraction", demo.male_fraction)?;
        check_probability("demographics.unknown_gender_fraction", demo.unknown_gender_fraction)?;
        if demo.male_fraction + demo.unknown_gender_fraction > 1.0 {
            return Err(invalid("demographics", "male + unknown gender fractions exceed 1"));
        }
        if demo.races.is_empty() || demo.races.iter().any(|(r, w)| r.trim().is_empty() || *w < 0.0) {
            return Err(invalid(
                "demographics.races",
                "need non-empty tokens with non-negative weights",
            ));
        }
        if demo.races.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err(invalid("demographics.races", "weights sum to zero"));
        }
        if demo.age_min > demo.age_max || demo.age_max > crate::data::MAX_AGE || demo.age_sd < 0.0 {
            return Err(invalid("demographics", "bad age range"));
        }
        for (k, r) in self.comorbidities.iter().enumerate() {
            check_probability(&format!("comorbidities[{k}].probability"), r.probability)?;
            if r.if_group >= self.groups.len() {
                return Err(invalid(format!("comorbidities[{k}].if_group"), "no such group"));
            }
            if !diseases.contains(&r.disease) {
                return Err(invalid(format!("comorbidities[{k}].disease"), "unknown disease"));
            }
        }
        for (k, it) in self.interactions.iter().enumerate() {
            if it.groups.is_empty() || it.groups.iter().any(|&g| g >= self.groups.len()) {
                return Err(invalid(format!("interactions[{k}].groups"), "bad group index"));
            }
        }
        let d = diseases.len();
        match self.channel_layout {
            ChannelLayout::Generic if self.n_channels < d => {
                return Err(invalid(
                    "n_channels",
                    format!("need at least {d} channels, one per disease"),
                ));
            }
            ChannelLayout::Mimic76 if d > MIMIC76_OTHER => {
                return Err(invalid(
                    "groups",
                    format!("the 76-channel layout carries at most {MIMIC76_OTHER} signals"),
                ));
            }
            _ => {}
        }
        if !(self.event_rate > 0.0 && self.event_rate.is_finite()) {
            return Err(invalid("event_rate", "must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", "must be positive"));
        }
        if self.n_records == 0 {
            return Err(invalid("n_records", "must be positive"));
        }
        Ok(())
    }
}

const MIMIC76_OTHER: usize = 41;

/// Names of the measurements unavailable in the missing-measurement scenario.
pub const MISSING_MEASUREMENT_NAMES: [&str; 4] = ["pH", "Temperature", "Height", "Weight"];
/// Prefix shared by every verbal-response GCS column.
pub const GCS_VERBAL_PREFIX: &str = "Glascow coma scale verbal response";

/// A 76-column channel layout: 35 columns for pH, temperature, height, weight
/// and 31 verbal-response GCS encodings, plus 41 others.
pub fn mimic76_channels() -> Vec<ChannelDescriptor> {
    let mut ch = Vec::with_capacity(76);
    for (name, unit) in [
        ("Diastolic blood pressure", "mmHg"),
        ("Fraction inspired oxygen", ""),
        ("Glucose", "mg/dL"),
        ("Heart Rate", "bpm"),
        ("Mean blood pressure", "mmHg"),
        ("Oxygen saturation", "%"),
        ("Respiratory rate", "/min"),
        ("Systolic blood pressure", "mmHg"),
    ] {
        ch.push(ChannelDescriptor::continuous(name, unit));
    }
    for k in 1..=8 {
        ch.push(ChannelDescriptor::categorical(format!(
            "Glascow coma scale eye opening->{k}"
        )));
    }
    for k in 1..=12 {
        ch.push(ChannelDescriptor::categorical(format!(
            "Glascow coma scale motor response->{k}"
        )));
    }
    for k in 3..=15 {
        ch.push(ChannelDescriptor::categorical(format!("Glascow coma scale total->{k}")));
    }
    for (name, unit) in [("Height", "cm"), ("Temperature", "C"), ("Weight", "kg"), ("pH", "")] {
        ch.push(ChannelDescriptor::continuous(name, unit));
    }
    for k in 1..=31 {
        ch.push(ChannelDescriptor::categorical(format!("{GCS_VERBAL_PREFIX}->{k}")));
    }
    ch
}

/// Realized ground truth of one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    /// Disease → planted group.
    pub planted_clusters: BTreeMap<String, usize>,
    /// Signal channel per disease, in disease order.
    pub signal_channels: Vec<usize>,
    pub noise_channels: Vec<usize>,
    pub channel_baselines: Vec<f64>,
    /// `[record][group]` activation flags, in record order.
    pub group_activations: Vec<Vec<u8>>,
    pub group_active_counts: Vec<usize>,
    pub label_counts: Vec<usize>,
    /// Expected label counts given realized activations and demographics.
    pub expected_label_counts: Vec<f64>,
    pub label_count_variance: Vec<f64>,
    pub gender_counts: BTreeMap<String, usize>,
    pub race_counts: BTreeMap<String, usize>,
    pub older_count: usize,
}

impl SynthManifest {
    pub fn planted_groups(&self) -> Vec<Vec<String>> {
        self.config.groups.iter().map(|g| g.diseases.clone()).collect()
    }
}

fn round_to(x: f64, decimals: u32) -> f64 {
    let s = 10f64.powi(decimals as i32);
    (x * s).round() / s
}

fn gender_key(g: Gender) -> &'static str {
    match g {
        Gender::Male => "male",
        Gender::Female => "female",
        Gender::Unknown => "unknown",
    }
}

/// Per-disease probability of being present, given activations and demographics.
fn label_probabilities(config: &SynthConfig, active: &[bool], demo: &Demographics) -> Vec<f64> {
    let groups = config.disease_groups();
    let diseases = config.diseases();
    let mut p: Vec<f64> = groups
        .iter()
        .map(|&g| {
            if active[g] {
                config.groups[g].coupling
            } else {
                config.baseline_rate
            }
        })
        .collect();
    for rule in &config.comorbidities {
        if rule.applies(active, demo) {
            let j = diseases.iter().position(|d| *d == rule.disease).expect("validated");
            p[j] = 1.0 - (1.0 - p[j]) * (1.0 - rule.probability);
        }
    }
    p
}

struct GeneratedRecord {
    record: EpisodeRecord,
    active: Vec<bool>,
}

fn generate_record(
    config: &SynthConfig,
    index: usize,
    n_channels: usize,
    signal_channels: &[usize],
    baselines: &[f64],
    race_cdf: &[(String, f64)],
) -> GeneratedRecord {
    let mut rng = rng_from_seed(derive_indexed(config.seed, "synth-record", index as u64));
    let demo_cfg = &config.demographics;
    let active: Vec<bool> = config
        .groups
        .iter()
        .map(|g| rng.random::<f64>() < g.activation)
        .collect();

    let age_mean = demo_cfg.age_mean
        + config
            .groups
            .iter()
            .zip(&active)
            .filter(|(_, &a)| a)
            .map(|(g, _)| g.age_shift)
            .sum::<f64>();
    let age_draw = Normal::new(age_mean, demo_cfg.age_sd.max(1e-9))
        .expect("finite normal")
        .sample(&mut rng);
    let age = age_draw
        .round()
        .clamp(f64::from(demo_cfg.age_min), f64::from(demo_cfg.age_max)) as u32;
    let u: f64 = rng.random();
    let gender = if u < demo_cfg.male_fraction {
        Gender::Male
    } else if u < demo_cfg.male_fraction + demo_cfg.unknown_gender_fraction {
        Gender::Unknown
    } else {
        Gender::Female
    };
    let u: f64 = rng.random();
    let race = race_cdf
        .iter()
        .find(|(_, c)| u < *c)
        .unwrap_or_else(|| race_cdf.last().expect("non-empty"))
        .0
        .clone();
    let demographics = Demographics { age, gender, race };

    let groups = config.disease_groups();
    let mut labels: Vec<u8> = groups
        .iter()
        .map(|&g| {
            let p = if active[g] {
                config.groups[g].coupling
            } else {
                config.baseline_rate
            };
            u8::from(rng.random::<f64>() < p)
        })
        .collect();
    let diseases = config.diseases();
    for rule in &config.comorbidities {
        // Draw unconditionally so the stream layout does not depend on the condition.
        let u: f64 = rng.random();
        if rule.applies(&active, &demographics) && u < rule.probability {
            let j = diseases.iter().position(|d| *d == rule.disease).expect("validated");
            labels[j] = 1;
        }
    }

    let mut shift = vec![0.0; n_channels];
    for (j, &present) in labels.iter().enumerate() {
        if present == 1 {
            let mut s = config.signal_strength;
            for it in &config.interactions {
                if it.groups.contains(&groups[j]) && it.groups.iter().all(|&g| active[g]) {
                    s *= it.signal_scale;
                }
            }
            shift[signal_channels[j]] += s;
        }
    }

    let gap = Exp::new(config.event_rate).expect("positive rate");
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut events = Vec::new();
    for c in 0..n_channels {
        let mut t = gap.sample(&mut rng);
        while t <= config.horizon {
            let v = baselines[c] + shift[c] + noise.sample(&mut rng);
            events.push(Event::new(
                round_to(t, 2).min(config.horizon),
                c,
                round_to(v, config.decimals),
            ));
            t += gap.sample(&mut rng);
        }
    }
    let mut record = EpisodeRecord {
        id: format!("p{index:06}"),
        demographics,
        events,
        labels,
    };
    record.sort_events();
    GeneratedRecord { record, active }
}

/// Generates a dataset and its ground-truth manifest. Fully determined by the config.
pub fn generate(config: &SynthConfig) -> Result<(Dataset, SynthManifest), SynthError> {
    config.validate()?;
    let diseases = config.diseases();
    let d = diseases.len();
    let channels = match config.channel_layout {
        ChannelLayout::Generic => (0..config.n_channels)
            .map(|c| {
                if c < d {
                    ChannelDescriptor::continuous(format!("signal_{c:02}"), "au")
                } else {
                    ChannelDescriptor::continuous(format!("noise_{c:02}"), "au")
                }
            })
            .collect::<Vec<_>>(),
        ChannelLayout::Mimic76 => mimic76_channels(),
    };
    let n_channels = channels.len();
    let signal_channels: Vec<usize> = (0..d).collect();
    let noise_channels: Vec<usize> = (d..n_channels).collect();

    let mut base_rng = rng_from_seed(derive_seed(config.seed, "synth-channel-baselines"));
    let baselines: Vec<f64> = (0..n_channels)
        .map(|_| round_to(base_rng.random_range(-1.0..1.0), 3))
        .collect();

    let total: f64 = config.demographics.races.iter().map(|(_, w)| w).sum();
    let mut acc = 0.0;
    let race_cdf: Vec<(String, f64)> = config
        .demographics
        .races
        .iter()
        .map(|(r, w)| {
            acc += w / total;
            (r.clone(), acc)
        })
        .collect();

    let generated: Vec<GeneratedRecord> = (0..config.n_records)
        .into_par_iter()
        .map(|i| generate_record(config, i, n_channels, &signal_channels, &baselines, &race_cdf))
        .collect();

    let g = config.groups.len();
    let mut group_active_counts = vec![0usize; g];
    let mut label_counts = vec![0usize; d];
    let mut expected = vec![0.0; d];
    let mut variance = vec![0.0; d];
    let mut gender_counts = BTreeMap::new();
    let mut race_counts = BTreeMap::new();
    let mut older_count = 0;
    let mut group_activations = Vec::with_capacity(config.n_records);
    for gen in &generated {
        let r = &gen.record;
        for (k, &a) in gen.active.iter().enumerate() {
            group_active_counts[k] += usize::from(a);
        }
        for (j, &y) in r.labels.iter().enumerate() {
            label_counts[j] += usize::from(y);
        }
        for (j, p) in label_probabilities(config, &gen.active, &r.demographics)
            .into_iter()
            .enumerate()
        {
            expected[j] += p;
            variance[j] += p * (1.0 - p);
        }
        *gender_counts
            .entry(gender_key(r.demographics.gender).to_string())
            .or_insert(0) += 1;
        *race_counts.entry(r.demographics.race.clone()).or_insert(0) += 1;
        older_count += usize::from(r.demographics.age >= 60);
        group_activations.push(gen.active.iter().map(|&a| u8::from(a)).collect());
    }

    let dataset = Dataset {
        channels,
        diseases: diseases.clone(),
        records: generated.into_iter().map(|g| g.record).collect(),
    };
    let manifest = SynthManifest {
        config: config.clone(),
        planted_clusters: diseases.iter().cloned().zip(config.disease_groups()).collect(),
        signal_channels,
        noise_channels,
        channel_baselines: baselines,
        group_activations,
        group_active_counts,
        label_counts,
        expected_label_counts: expected,
        label_count_variance: variance,
        gender_counts,
        race_counts,
        older_count,
    };
    Ok((dataset, manifest))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCheck {
    pub statistic: String,
    pub observed: f64,
    pub expected: f64,
    /// Allowed absolute deviation; zero for exact recounts.
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestReport {
    pub checks: Vec<ManifestCheck>,
}

impl ManifestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ManifestCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Recounts the dataset against the manifest.
///
/// Realized counts (labels, genders, races, age ≥ 60) must match exactly.
/// Label counts must lie within 3σ of their expectation given the recorded
/// activations and recounted demographics; group activation, gender and race
/// counts within 3σ binomial bounds of the configured proportions.
pub fn verify_manifest(dataset: &Dataset, manifest: &SynthManifest) -> ManifestReport {
    let cfg = &manifest.config;
    let n = dataset.records.len();
    let mut checks = Vec::new();
    let mut exact = |statistic: String, observed: f64, expected: f64| {
        checks.push(ManifestCheck {
            statistic,
            observed,
            expected,
            bound: 0.0,
            passed: observed == expected,
        });
    };
    exact("n_records".into(), n as f64, manifest.group_activations.len() as f64);
    if n != manifest.group_activations.len() || dataset.diseases != cfg.diseases() {
        exact("schema".into(), 0.0, 1.0);
        return ManifestReport { checks };
    }

    let d = dataset.diseases.len();
    let mut label_counts = vec![0usize; d];
    let mut expected = vec![0.0; d];
    let mut variance = vec![0.0; d];
    let mut gender_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut race_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut older = 0usize;
    for (r, act) in dataset.records.iter().zip(&manifest.group_activations) {
        let active: Vec<bool> = act.iter().map(|&a| a == 1).collect();
        for (j, &y) in r.labels.iter().enumerate() {
            label_counts[j] += usize::from(y);
        }
        for (j, p) in label_probabilities(cfg, &active, &r.demographics)
            .into_iter()
            .enumerate()
        {
            expected[j] += p;
            variance[j] += p * (1.0 - p);
        }
        *gender_counts
            .entry(gender_key(r.demographics.gender).to_string())
            .or_insert(0) += 1;
        *race_counts.entry(r.demographics.race.clone()).or_insert(0) += 1;
        older += usize::from(r.demographics.age >= 60);
    }
    for (j, name) in dataset.diseases.iter().enumerate() {
        exact(
            format!("label_count[{name}]"),
            label_counts[j] as f64,
            manifest.label_counts[j] as f64,
        );
    }
    for (k, v) in &gender_counts {
        exact(
            format!("gender_count[{k}]"),
            *v as f64,
            manifest.gender_counts.get(k).copied().unwrap_or(0) as f64,
        );
    }
    for (k, v) in &race_counts {
        exact(
            format!("race_count[{k}]"),
            *v as f64,
            manifest.race_counts.get(k).copied().unwrap_or(0) as f64,
        );
    }
    exact("older_count".into(), older as f64, manifest.older_count as f64);

    let mut within = |statistic: String, observed: f64, expected: f64, var: f64| {
        let bound = 3.0 * var.max(0.0).sqrt();
        checks.push(ManifestCheck {
            statistic,
            observed,
            expected,
            bound,
            passed: (observed - expected).abs() <= bound + 1e-9,
        });
    };
    for (j, name) in dataset.diseases.iter().enumerate() {
        within(
            format!("prevalence[{name}]"),
            label_counts[j] as f64,
            expected[j],
            variance[j],
        );
    }
    let nf = n as f64;
    for (k, g) in cfg.groups.iter().enumerate() {
        let count = manifest.group_activations.iter().filter(|a| a[k] == 1).count() as f64;
        within(
            format!("group_activation[{}]", g.name),
            count,
            nf * g.activation,
            nf * g.activation * (1.0 - g.activation),
        );
    }
    let demo = &cfg.demographics;
    let female = 1.0 - demo.male_fraction - demo.unknown_gender_fraction;
    for (key, p) in [
        ("male", demo.male_fraction),
        ("female", female),
        ("unknown", demo.unknown_gender_fraction),
    ] {
        let c = gender_counts.get(key).copied().unwrap_or(0) as f64;
        within(format!("gender_proportion[{key}]"), c, nf * p, nf * p * (1.0 - p));
    }
    let total: f64 = demo.races.iter().map(|(_, w)| w).sum();
    for (race, w) in &demo.races {
        let p = w / total;
        let c = race_counts.get(race).copied().unwrap_or(0) as f64;
        within(format!("race_proportion[{race}]"), c, nf * p, nf * p * (1.0 - p));
    }
    ManifestReport { checks }
}
