//! Dataset model, on-disk formats and time-series regularization.
//!
//! A dataset directory holds a `manifest.json` (channels, disease names,
//! counts) and a JSON Lines records file with one [`EpisodeRecord`] per line.
//! Saving is canonical: records sorted by id, events sorted by
//! `(time, channel)`, fixed field order and shortest round-trip floats, so
//! save → load → save is byte-stable.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infotheory::{DiscreteColumn, DiscreteMatrix};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const DATASET_FORMAT: &str = "clinshift-dataset";
pub const MAX_AGE: u32 = 130;
/// Value written into grid cells with no observation at or before their time.
pub const IMPUTATION_VALUE: f64 = 0.0;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("record {record}: field `{field}`: {message}")]
    Schema {
        record: String,
        field: String,
        message: String,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl DataError {
    pub fn is_io(&self) -> bool {
        matches!(self, DataError::Io { .. })
    }

    fn schema(record: impl Into<String>, field: &str, message: impl Into<String>) -> Self {
        DataError::Schema {
            record: record.into(),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDescriptor {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    pub kind: ChannelKind,
    /// Set by channel masking: the channel exists but carries no events.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub masked: bool,
}

impl ChannelDescriptor {
    pub fn continuous(name: impl Into<String>, unit: impl Into<String>) -> Self {
        ChannelDescriptor {
            name: name.into(),
            unit: unit.into(),
            kind: ChannelKind::Continuous,
            masked: false,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        ChannelDescriptor {
            name: name.into(),
            unit: String::new(),
            kind: ChannelKind::Categorical,
            masked: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
    #[serde(alias = "other")]
    Unknown,
}

impl std::str::FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" | "male" => Ok(Gender::Male),
            "f" | "female" => Ok(Gender::Female),
            "" | "u" | "other" | "unknown" => Ok(Gender::Unknown),
            other => Err(format!("unrecognized gender `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    pub age: u32,
    pub gender: Gender,
    pub race: String,
}

impl Default for Demographics {
    fn default() -> Self {
        Demographics {
            age: 0,
            gender: Gender::Unknown,
            race: "unknown".to_string(),
        }
    }
}

/// One timestamped measurement. Serialized as a `[time, channel, value]` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, usize, f64)", into = "(f64, usize, f64)")]
pub struct Event {
    pub time: f64,
    pub channel: usize,
    pub value: f64,
}

impl Event {
    pub fn new(time: f64, channel: usize, value: f64) -> Self {
        Event { time, channel, value }
    }
}

impl From<(f64, usize, f64)> for Event {
    fn from((time, channel, value): (f64, usize, f64)) -> Self {
        Event { time, channel, value }
    }
}

impl From<Event> for (f64, usize, f64) {
    fn from(e: Event) -> Self {
        (e.time, e.channel, e.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub id: String,
    pub demographics: Demographics,
    pub events: Vec<Event>,
    pub labels: Vec<u8>,
}

impl EpisodeRecord {
    /// Stable sort by `(time, channel)`; equal keys keep their input order.
    pub fn sort_events(&mut self) {
        self.events.sort_by(event_order);
    }

    pub fn events_sorted(&self) -> bool {
        self.events
            .windows(2)
            .all(|w| event_order(&w[0], &w[1]) != std::cmp::Ordering::Greater)
    }

    pub fn has_any(&self, disease_indices: &[usize]) -> bool {
        disease_indices.iter().any(|&i| self.labels[i] == 1)
    }
}

fn event_order(a: &Event, b: &Event) -> std::cmp::Ordering {
    a.time.total_cmp(&b.time).then_with(|| a.channel.cmp(&b.channel))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub channels: Vec<ChannelDescriptor>,
    pub diseases: Vec<String>,
    pub records: Vec<EpisodeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    n_channels: usize,
    n_diseases: usize,
    n_records: usize,
    channels: Vec<ChannelDescriptor>,
    diseases: Vec<String>,
    records_file: String,
}

impl Dataset {
    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_diseases(&self) -> usize {
        self.diseases.len()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Channels that are not masked.
    pub fn valid_channel_count(&self) -> usize {
        self.channels.iter().filter(|c| !c.masked).count()
    }

    pub fn disease_index(&self, name: &str) -> Option<usize> {
        self.diseases.iter().position(|d| d == name)
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.name == name)
    }

    /// A dataset with the same schema and the given records.
    pub fn with_records(&self, records: Vec<EpisodeRecord>) -> Dataset {
        Dataset {
            channels: self.channels.clone(),
            diseases: self.diseases.clone(),
            records,
        }
    }

    /// Checks every invariant. Returns the first violation.
    pub fn validate(&self) -> Result<(), DataError> {
        let mut names = HashSet::new();
        for c in &self.channels {
            if !names.insert(c.name.as_str()) {
                return Err(DataError::schema(
                    "<manifest>",
                    "channels",
                    format!("duplicate channel name `{}`", c.name),
                ));
            }
        }
        let mut ids = HashSet::new();
        for r in &self.records {
            if !ids.insert(r.id.as_str()) {
                return Err(DataError::schema(&r.id, "id", "duplicate record id"));
            }
            self.validate_record(r)?;
            if !r.events_sorted() {
                return Err(DataError::schema(&r.id, "events", "events not sorted by time"));
            }
        }
        Ok(())
    }

    fn validate_record(&self, r: &EpisodeRecord) -> Result<(), DataError> {
        if r.id.is_empty() {
            return Err(DataError::schema("<empty>", "id", "record id is empty"));
        }
        if r.labels.len() != self.diseases.len() {
            return Err(DataError::schema(
                &r.id,
                "labels",
                format!("expected {} labels, found {}", self.diseases.len(), r.labels.len()),
            ));
        }
        if let Some(v) = r.labels.iter().find(|&&v| v > 1) {
            return Err(DataError::schema(
                &r.id,
                "labels",
                format!("label value {v} is not 0/1"),
            ));
        }
        if r.demographics.age > MAX_AGE {
            return Err(DataError::schema(
                &r.id,
                "demographics.age",
                format!("age {} exceeds {MAX_AGE}", r.demographics.age),
            ));
        }
        if r.demographics.race.trim().is_empty() {
            return Err(DataError::schema(&r.id, "demographics.race", "empty race token"));
        }
        for (k, e) in r.events.iter().enumerate() {
            if e.channel >= self.channels.len() {
                return Err(DataError::schema(
                    &r.id,
                    &format!("events[{k}].channel_index"),
                    format!("channel index {} out of range 0..{}", e.channel, self.channels.len()),
                ));
            }
            if !e.time.is_finite() || e.time < 0.0 {
                return Err(DataError::schema(
                    &r.id,
                    &format!("events[{k}].time"),
                    format!("time {} must be finite and non-negative", e.time),
                ));
            }
            if !e.value.is_finite() {
                return Err(DataError::schema(
                    &r.id,
                    &format!("events[{k}].value"),
                    "value is not finite",
                ));
            }
        }
        Ok(())
    }

    /// Sorts records by id and events by `(time, channel)`.
    pub fn canonicalize(&mut self) {
        for r in &mut self.records {
            r.sort_events();
        }
        self.records.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn canonical(&self) -> Dataset {
        let mut d = self.clone();
        d.canonicalize();
        d
    }

    /// The N×d label matrix as binary discrete columns named after the diseases.
    pub fn label_matrix(&self) -> DiscreteMatrix {
        let columns = (0..self.diseases.len())
            .map(|j| {
                let values = self.records.iter().map(|r| u32::from(r.labels[j])).collect();
                DiscreteColumn::new_unchecked(values, 2)
            })
            .collect();
        DiscreteMatrix::new_unchecked(self.diseases.clone(), columns, self.records.len())
    }
}

/// Loads a dataset from a directory (or from its `manifest.json`), logging warnings.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let (ds, warnings) = load_dataset_with_warnings(path)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(ds)
}

/// Loads and validates a dataset, returning repair warnings alongside it.
///
/// The only tolerated irregularity is out-of-order events, which are stably
/// re-sorted; everything else is rejected.
pub fn load_dataset_with_warnings(path: impl AsRef<Path>) -> Result<(Dataset, Vec<String>), DataError> {
    let path = path.as_ref();
    let manifest_path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let text = fs::read_to_string(&manifest_path).map_err(|e| DataError::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| DataError::Json {
        path: manifest_path.clone(),
        line: e.line(),
        source: e,
    })?;
    if manifest.format != DATASET_FORMAT {
        return Err(DataError::schema(
            "<manifest>",
            "format",
            format!("expected `{DATASET_FORMAT}`, found `{}`", manifest.format),
        ));
    }
    if manifest.channels.len() != manifest.n_channels {
        return Err(DataError::schema(
            "<manifest>",
            "n_channels",
            "does not match channel list",
        ));
    }
    if manifest.diseases.len() != manifest.n_diseases {
        return Err(DataError::schema(
            "<manifest>",
            "n_diseases",
            "does not match disease list",
        ));
    }

    let mut ds = Dataset {
        channels: manifest.channels,
        diseases: manifest.diseases,
        records: Vec::new(),
    };
    let records_path = dir.join(&manifest.records_file);
    let file = fs::File::open(&records_path).map_err(|e| DataError::io(&records_path, e))?;
    let mut warnings = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| DataError::io(&records_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut rec: EpisodeRecord = serde_json::from_str(&line).map_err(|e| DataError::Json {
            path: records_path.clone(),
            line: lineno + 1,
            source: e,
        })?;
        if !rec.events_sorted() {
            warnings.push(format!("record {}: events out of time order; re-sorted", rec.id));
            rec.sort_events();
        }
        ds.records.push(rec);
    }
    if ds.records.len() != manifest.n_records {
        return Err(DataError::schema(
            "<manifest>",
            "n_records",
            format!(
                "manifest says {}, records file has {}",
                manifest.n_records,
                ds.records.len()
            ),
        ));
    }
    ds.validate()?;
    Ok((ds, warnings))
}

/// Writes `dataset` canonically into directory `path` (created if missing).
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let dir = path.as_ref();
    fs::create_dir_all(dir).map_err(|e| DataError::io(dir, e))?;
    let ds = dataset.canonical();
    let manifest = Manifest {
        format: DATASET_FORMAT.to_string(),
        version: 1,
        n_channels: ds.channels.len(),
        n_diseases: ds.diseases.len(),
        n_records: ds.records.len(),
        channels: ds.channels.clone(),
        diseases: ds.diseases.clone(),
        records_file: RECORDS_FILE.to_string(),
    };
    write_json_pretty(&dir.join(MANIFEST_FILE), &manifest)?;

    let records_path = dir.join(RECORDS_FILE);
    let file = fs::File::create(&records_path).map_err(|e| DataError::io(&records_path, e))?;
    let mut w = BufWriter::new(file);
    for r in &ds.records {
        serde_json::to_writer(&mut w, r).map_err(|e| DataError::Json {
            path: records_path.clone(),
            line: 0,
            source: e,
        })?;
        w.write_all(b"\n").map_err(|e| DataError::io(&records_path, e))?;
    }
    w.flush().map_err(|e| DataError::io(&records_path, e))
}

/// Pretty JSON with a trailing newline; the shared writer for every JSON artifact.
pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| DataError::Json {
        path: path.to_path_buf(),
        line: 0,
        source: e,
    })?;
    text.push('\n');
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| DataError::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| DataError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let text = fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| DataError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        source: e,
    })
}

/// Ingests long-format CSV events plus a wide labels CSV.
///
/// * events: `record_id,time_hours,channel_name,value` (header required)
/// * labels: `record_id,<disease_1>,...,<disease_d>` (header names the diseases)
/// * demographics (optional): `record_id,age,gender,race`
///
/// Channels are created in order of first appearance, all continuous.
/// Every record must appear in the labels file.
pub fn load_csv(
    events_path: &Path,
    labels_path: &Path,
    demographics_path: Option<&Path>,
) -> Result<Dataset, DataError> {
    let csv_err = |p: &Path| {
        let p = p.to_path_buf();
        move |e: csv::Error| DataError::Csv {
            path: p.clone(),
            source: e,
        }
    };

    let mut lr = csv::Reader::from_path(labels_path).map_err(csv_err(labels_path))?;
    let headers = lr.headers().map_err(csv_err(labels_path))?.clone();
    if headers.len() < 2 {
        return Err(DataError::schema(
            "<labels>",
            "header",
            "expected record_id plus disease columns",
        ));
    }
    let diseases: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut records: Vec<EpisodeRecord> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for row in lr.records() {
        let row = row.map_err(csv_err(labels_path))?;
        let id = row.get(0).unwrap_or("").trim().to_string();
        if index.contains_key(&id) {
            return Err(DataError::schema(id, "id", "duplicate record id in labels"));
        }
        let mut labels = Vec::with_capacity(diseases.len());
        for (j, field) in row.iter().skip(1).enumerate() {
            let v: u8 = match field.trim() {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(DataError::schema(
                        id,
                        &format!("labels.{}", diseases.get(j).map(String::as_str).unwrap_or("?")),
                        format!("label `{other}` is not 0/1"),
                    ))
                }
            };
            labels.push(v);
        }
        index.insert(id.clone(), records.len());
        records.push(EpisodeRecord {
            id,
            demographics: Demographics::default(),
            events: Vec::new(),
            labels,
        });
    }

    let mut channels: Vec<ChannelDescriptor> = Vec::new();
    let mut channel_index: HashMap<String, usize> = HashMap::new();
    let mut er = csv::Reader::from_path(events_path).map_err(csv_err(events_path))?;
    for row in er.records() {
        let row = row.map_err(csv_err(events_path))?;
        if row.len() != 4 {
            return Err(DataError::schema(
                row.get(0).unwrap_or("?"),
                "events",
                format!("expected 4 columns, found {}", row.len()),
            ));
        }
        let id = row[0].trim();
        let &ri = index
            .get(id)
            .ok_or_else(|| DataError::schema(id, "record_id", "event for a record with no labels row"))?;
        let time: f64 = row[1]
            .trim()
            .parse()
            .map_err(|_| DataError::schema(id, "time_hours", format!("cannot parse `{}`", &row[1])))?;
        let value: f64 = row[3]
            .trim()
            .parse()
            .map_err(|_| DataError::schema(id, "value", format!("cannot parse `{}`", &row[3])))?;
        let name = row[2].trim();
        let c = match channel_index.get(name) {
            Some(&c) => c,
            None => {
                channels.push(ChannelDescriptor::continuous(name, ""));
                channel_index.insert(name.to_string(), channels.len() - 1);
                channels.len() - 1
            }
        };
        records[ri].events.push(Event::new(time, c, value));
    }

    if let Some(dp) = demographics_path {
        let mut dr = csv::Reader::from_path(dp).map_err(csv_err(dp))?;
        for row in dr.records() {
            let row = row.map_err(csv_err(dp))?;
            let id = row.get(0).unwrap_or("").trim();
            let &ri = index
                .get(id)
                .ok_or_else(|| DataError::schema(id, "record_id", "demographics for unknown record"))?;
            let field = |k: usize| row.get(k).unwrap_or("").trim();
            let age: u32 = field(1)
                .parse()
                .map_err(|_| DataError::schema(id, "demographics.age", format!("cannot parse `{}`", field(1))))?;
            let gender = field(2)
                .parse()
                .map_err(|m: String| DataError::schema(id, "demographics.gender", m))?;
            records[ri].demographics = Demographics {
                age,
                gender,
                race: field(3).to_string(),
            };
        }
    }

    for r in &mut records {
        r.sort_events();
    }
    let ds = Dataset {
        channels,
        diseases,
        records,
    };
    ds.validate()?;
    Ok(ds)
}

/// A record sampled on the regular grid `t_j = j·step`, `j = 0..T-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularGrid {
    pub step: f64,
    pub horizon: f64,
    pub n_channels: usize,
    /// Row-major `T × D`.
    pub values: Vec<f64>,
    /// Row-major `T × D`; false until the channel's first observation.
    pub observed: Vec<bool>,
}

impl RegularGrid {
    pub fn n_steps(&self) -> usize {
        self.values
            .len()
            .checked_div(self.n_channels)
            .unwrap_or_else(|| grid_len(self.step, self.horizon))
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step
    }

    pub fn value(&self, j: usize, c: usize) -> f64 {
        self.values[j * self.n_channels + c]
    }

    pub fn is_observed(&self, j: usize, c: usize) -> bool {
        self.observed[j * self.n_channels + c]
    }

    pub fn channel(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_steps()).map(move |j| self.value(j, c))
    }
}

/// Number of grid points: `floor(horizon / step) + 1`.
pub fn grid_len(step: f64, horizon: f64) -> usize {
    // Absorb representation error in ratios such as 96/48.
    (horizon / step + 1e-9).floor() as usize + 1
}

/// Last-observation-carried-forward sampling of one record.
///
/// Each cell takes the most recent event value with `time <= t_j`; among
/// events with equal time on the same channel the last in stable order wins.
/// Cells before a channel's first observation hold [`IMPUTATION_VALUE`] and are
/// marked unobserved.
pub fn regularize(
    record: &EpisodeRecord,
    n_channels: usize,
    step: f64,
    horizon: f64,
) -> Result<RegularGrid, DataError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(DataError::InvalidGrid(format!("step must be positive, got {step}")));
    }
    if !(horizon.is_finite() && horizon >= step) {
        return Err(DataError::InvalidGrid(format!(
            "horizon {horizon} must be at least the step {step}"
        )));
    }
    let t_len = grid_len(step, horizon);
    let mut order: Vec<usize> = (0..record.events.len()).collect();
    order.sort_by(|&a, &b| event_order(&record.events[a], &record.events[b]));

    let mut values = vec![IMPUTATION_VALUE; t_len * n_channels];
    let mut observed = vec![false; t_len * n_channels];
    let mut last: Vec<Option<f64>> = vec![None; n_channels];
    let mut cursor = 0;
    for j in 0..t_len {
        let t = j as f64 * step;
        while cursor < order.len() && record.events[order[cursor]].time <= t {
            let e = record.events[order[cursor]];
            if e.channel >= n_channels {
                return Err(DataError::schema(
                    &record.id,
                    "events.channel_index",
                    format!("channel index {} out of range 0..{n_channels}", e.channel),
                ));
            }
            last[e.channel] = Some(e.value);
            cursor += 1;
        }
        for (c, v) in last.iter().enumerate() {
            if let Some(v) = v {
                values[j * n_channels + c] = *v;
                observed[j * n_channels + c] = true;
            }
        }
    }
    Ok(RegularGrid {
        step,
        horizon,
        n_channels,
        values,
        observed,
    })
}

/// Number of summary features per channel.
pub const FEATURES_PER_CHANNEL: usize = 6;

/// Per channel: `[mean, std, min, max, last, observed fraction]` over grid rows.
///
/// The standard deviation is the population one (divide by T). A channel that
/// is never observed yields six zeros.
pub fn summarize_features(grid: &RegularGrid) -> Vec<f64> {
    let t_len = grid.n_steps();
    let mut out = Vec::with_capacity(FEATURES_PER_CHANNEL * grid.n_channels);
    for c in 0..grid.n_channels {
        let n_obs = (0..t_len).filter(|&j| grid.is_observed(j, c)).count();
        if n_obs == 0 || t_len == 0 {
            out.extend_from_slice(&[0.0; FEATURES_PER_CHANNEL]);
            continue;
        }
        let n = t_len as f64;
        let mean = grid.channel(c).sum::<f64>() / n;
        let var = grid.channel(c).map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let min = grid.channel(c).fold(f64::INFINITY, f64::min);
        let max = grid.channel(c).fold(f64::NEG_INFINITY, f64::max);
        let last = grid.value(t_len - 1, c);
        out.extend_from_slice(&[mean, var.sqrt(), min, max, last, n_obs as f64 / n]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn record(id: &str, events: Vec<Event>, labels: Vec<u8>) -> EpisodeRecord {
        EpisodeRecord {
            id: id.to_string(),
            demographics: Demographics {
                age: 50,
                gender: Gender::Female,
                race: "white".into(),
            },
            events,
            labels,
        }
    }

    fn small_dataset() -> Dataset {
        Dataset {
            channels: vec![
                ChannelDescriptor::continuous("hr", "bpm"),
                ChannelDescriptor::continuous("temp", "C"),
            ],
            diseases: vec!["a".into(), "b".into()],
            records: vec![
                record(
                    "r2",
                    vec![Event::new(0.0, 0, 80.0), Event::new(1.5, 1, 37.2)],
                    vec![1, 0],
                ),
                record("r1", vec![Event::new(2.0, 1, 36.6)], vec![0, 0]),
                record("r3", vec![], vec![1, 1]),
            ],
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ds = small_dataset();
        save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back, ds.canonical());
    }

    #[test]
    fn resave_is_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        save_dataset(&small_dataset(), a.path()).unwrap();
        let back = load_dataset(a.path()).unwrap();
        save_dataset(&back, b.path()).unwrap();
        for f in [MANIFEST_FILE, RECORDS_FILE] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
    }

    #[test]
    fn empty_dataset_saves() {
        let dir = tempfile::tempdir().unwrap();
        let mut ds = small_dataset();
        ds.records.clear();
        save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert!(back.is_empty());
        let manifest: serde_json::Value = read_json(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(manifest["n_records"], 0);
    }

    #[test]
    fn short_label_row_is_rejected_with_record_id() {
        let dir = tempfile::tempdir().unwrap();
        let mut ds = small_dataset();
        save_dataset(&ds, dir.path()).unwrap();
        ds.records[0].labels.pop();
        // Bypass validation by writing the bad line directly.
        let line = serde_json::to_string(&ds.records[0]).unwrap();
        let rest = fs::read_to_string(dir.path().join(RECORDS_FILE)).unwrap();
        let mut lines: Vec<&str> = rest.lines().filter(|l| !l.contains("\"r2\"")).collect();
        lines.push(&line);
        fs::write(dir.path().join(RECORDS_FILE), lines.join("\n")).unwrap();
        match load_dataset(dir.path()) {
            Err(DataError::Schema { record, field, .. }) => {
                assert_eq!(record, "r2");
                assert_eq!(field, "labels");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_and_bad_channel_rejected() {
        let mut ds = small_dataset();
        ds.records[1].id = "r2".into();
        assert!(matches!(ds.validate(), Err(DataError::Schema { field, .. }) if field == "id"));

        let mut ds = small_dataset();
        ds.records[0].events.push(Event::new(3.0, 5, 1.0));
        match ds.validate() {
            Err(DataError::Schema { record, field, .. }) => {
                assert_eq!(record, "r2");
                assert!(field.ends_with("channel_index"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_order_events_are_resorted_with_warning() {
        let sorted_dir = tempfile::tempdir().unwrap();
        let mut ds = small_dataset();
        ds.records[0].events = vec![
            Event::new(0.0, 0, 1.0),
            Event::new(1.0, 1, 2.0),
            Event::new(1.0, 1, 3.0),
            Event::new(4.0, 0, 4.0),
        ];
        save_dataset(&ds, sorted_dir.path()).unwrap();
        let sorted_back = load_dataset(sorted_dir.path()).unwrap();

        // Permute the events of r2 in the file, keeping the two equal-key events in order.
        let perm_dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, perm_dir.path()).unwrap();
        let mut r = ds.canonical().records.into_iter().find(|r| r.id == "r2").unwrap();
        r.events = vec![r.events[3], r.events[1], r.events[0], r.events[2]];
        let text = fs::read_to_string(perm_dir.path().join(RECORDS_FILE)).unwrap();
        let replaced: Vec<String> = text
            .lines()
            .map(|l| {
                if l.contains("\"r2\"") {
                    serde_json::to_string(&r).unwrap()
                } else {
                    l.to_string()
                }
            })
            .collect();
        fs::write(perm_dir.path().join(RECORDS_FILE), replaced.join("\n") + "\n").unwrap();

        let (back, warnings) = load_dataset_with_warnings(perm_dir.path()).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("r2"));
        assert_eq!(back, sorted_back);
    }

    #[test]
    fn manifest_reports_full_scale_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        let ds = Dataset {
            channels: (0..76)
                .map(|i| ChannelDescriptor::continuous(format!("ch{i}"), ""))
                .collect(),
            diseases: (0..25).map(|i| format!("d{i}")).collect(),
            records: vec![],
        };
        save_dataset(&ds, dir.path()).unwrap();
        let manifest: serde_json::Value = read_json(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(manifest["n_channels"], 76);
        assert_eq!(manifest["n_diseases"], 25);
    }

    #[test]
    fn csv_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let ev = dir.path().join("events.csv");
        let lb = dir.path().join("labels.csv");
        let dm = dir.path().join("demo.csv");
        fs::write(
            &ev,
            "record_id,time_hours,channel_name,value\nA,2,hr,80\nA,0,hr,75\nB,1,ph,7.4\n",
        )
        .unwrap();
        fs::write(&lb, "record_id,sepsis,aki\nA,1,0\nB,0,1\n").unwrap();
        fs::write(&dm, "record_id,age,gender,race\nA,70,M,white\nB,40,female,asian\n").unwrap();
        let ds = load_csv(&ev, &lb, Some(&dm)).unwrap();
        assert_eq!(ds.diseases, vec!["sepsis", "aki"]);
        assert_eq!(ds.n_channels(), 2);
        assert_eq!(ds.records[0].events[0], Event::new(0.0, 0, 75.0));
        assert_eq!(ds.records[0].demographics.gender, Gender::Male);
        assert_eq!(ds.records[1].labels, vec![0, 1]);

        fs::write(&lb, "record_id,sepsis,aki\nA,1,2\nB,0,1\n").unwrap();
        assert!(matches!(load_csv(&ev, &lb, None), Err(DataError::Schema { .. })));
    }

    #[test]
    fn locf_hand_trace() {
        let r = record("x", vec![Event::new(0.0, 0, 5.0), Event::new(50.0, 0, 7.0)], vec![]);
        let g = regularize(&r, 2, 48.0, 96.0).unwrap();
        assert_eq!(g.n_steps(), 3);
        assert_eq!(g.channel(0).collect::<Vec<_>>(), vec![5.0, 5.0, 7.0]);
        assert_eq!((0..3).map(|j| g.time(j)).collect::<Vec<_>>(), vec![0.0, 48.0, 96.0]);
        // Channel 1 never observed.
        assert_eq!(g.channel(1).collect::<Vec<_>>(), vec![0.0; 3]);
        assert!((0..3).all(|j| !g.is_observed(j, 1)));
    }

    #[test]
    fn grid_length_formula() {
        let r = record("x", vec![], vec![]);
        assert_eq!(regularize(&r, 1, 96.0, 96.0).unwrap().n_steps(), 2);
        assert_eq!(regularize(&r, 1, 48.0, 96.0).unwrap().n_steps(), 3);
        assert_eq!(regularize(&r, 1, 0.1, 0.3).unwrap().n_steps(), 4);
        assert!(regularize(&r, 1, 0.0, 96.0).is_err());
        assert!(regularize(&r, 1, -1.0, 96.0).is_err());
        assert!(regularize(&r, 1, 10.0, 5.0).is_err());
    }

    #[test]
    fn same_time_same_channel_last_wins() {
        let r = record("x", vec![Event::new(1.0, 0, 1.0), Event::new(1.0, 0, 2.0)], vec![]);
        let g = regularize(&r, 1, 1.0, 1.0).unwrap();
        assert_eq!(g.value(1, 0), 2.0);
        assert!(!g.is_observed(0, 0));
    }

    #[test]
    fn summary_features() {
        let mut g = RegularGrid {
            step: 1.0,
            horizon: 3.0,
            n_channels: 2,
            values: vec![3.0, 0.0, 3.0, 0.0, 3.0, 0.0, 3.0, 0.0],
            observed: vec![true, false, true, false, true, false, true, false],
        };
        let f = summarize_features(&g);
        assert_eq!(&f[..6], &[3.0, 0.0, 3.0, 3.0, 3.0, 1.0]);
        assert_eq!(&f[6..], &[0.0; 6]);

        g = RegularGrid {
            step: 48.0,
            horizon: 96.0,
            n_channels: 1,
            values: vec![5.0, 5.0, 7.0],
            observed: vec![true; 3],
        };
        let f = summarize_features(&g);
        let expected = [5.666_666_666_7, 0.942_809_041_6, 5.0, 7.0, 7.0, 1.0];
        for (a, b) in f.iter().zip(expected) {
            assert!(close(*a, b, 1e-9), "{a} vs {b}");
        }
    }
}
