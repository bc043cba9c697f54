//! Measurement-discrepancy injectors applied to a built pair: label noise,
//! sampling-rate change and missing-measurement masking.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{regularize, ChannelDescriptor, DataError, Dataset, RegularGrid};
use crate::error::{EXIT_CONFIG, EXIT_IO};
use crate::rng::{derive_indexed, derive_seed, rng_from_seed};
use crate::scenarios::SourceTargetPair;
use crate::synth::{GCS_VERBAL_PREFIX, MISSING_MEASUREMENT_NAMES};

pub const DEFAULT_HORIZON: f64 = 96.0;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("flip probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid resampling: {0}")]
    InvalidStep(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl TransformError {
    pub fn exit_code(&self) -> i32 {
        match self {
            TransformError::Data(e) if e.is_io() => EXIT_IO,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
    Both,
}

impl Side {
    fn source(self) -> bool {
        matches!(self, Side::Source | Side::Both)
    }

    fn target(self) -> bool {
        matches!(self, Side::Target | Side::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipParams {
    pub p: f64,
}

fn default_horizon() -> f64 {
    DEFAULT_HORIZON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleParams {
    pub source_step: f64,
    pub target_step: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskParams {
    pub channels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TransformOp {
    LabelFlip(FlipParams),
    Resample(ResampleParams),
    MaskChannels(MaskParams),
}

/// One transform.
///
/// ```json
/// {"kind": "label_flip", "params": {"p": 0.1}, "side": "source", "seed": 3}
/// {"kind": "resample", "params": {"source_step": 96, "target_step": 48, "horizon": 96}}
/// {"kind": "mask_channels", "params": {"channels": ["pH", "Weight"]}, "side": "target"}
/// ```
///
/// `side` defaults to source for label flips and target for masking; resampling
/// always covers both sides. Without `seed`, one is derived from the pair's
/// seed and the transform's position in the list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    #[serde(flatten)]
    pub op: TransformOp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TransformSpec {
    pub fn new(op: TransformOp) -> Self {
        TransformSpec {
            op,
            side: None,
            seed: None,
        }
    }

    pub fn label_flip(p: f64) -> Self {
        Self::new(TransformOp::LabelFlip(FlipParams { p }))
    }

    pub fn resample(source_step: f64, target_step: f64, horizon: f64) -> Self {
        Self::new(TransformOp::Resample(ResampleParams {
            source_step,
            target_step,
            horizon,
        }))
    }

    pub fn mask_channels(channels: Vec<String>) -> Self {
        Self::new(TransformOp::MaskChannels(MaskParams { channels }))
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = Some(side);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn effective_side(&self) -> Side {
        self.side.unwrap_or(match self.op {
            TransformOp::LabelFlip(_) => Side::Source,
            TransformOp::Resample(_) => Side::Both,
            TransformOp::MaskChannels(_) => Side::Target,
        })
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        match &self.op {
            TransformOp::LabelFlip(f) => check_probability(f.p),
            TransformOp::Resample(r) => GridSpec {
                source_step: r.source_step,
                target_step: r.target_step,
                horizon: r.horizon,
            }
            .validate(),
            TransformOp::MaskChannels(_) => Ok(()),
        }
    }
}

/// Sampling steps (hours) per side and the shared horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub source_step: f64,
    pub target_step: f64,
    pub horizon: f64,
}

impl GridSpec {
    pub fn uniform(step: f64, horizon: f64) -> Self {
        GridSpec {
            source_step: step,
            target_step: step,
            horizon,
        }
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        for (name, s) in [("source_step", self.source_step), ("target_step", self.target_step)] {
            if !(s.is_finite() && s > 0.0) {
                return Err(TransformError::InvalidStep(format!("{name} must be positive, got {s}")));
            }
            if self.horizon < s {
                return Err(TransformError::InvalidStep(format!(
                    "{name} {s} exceeds horizon {}",
                    self.horizon
                )));
            }
        }
        if !self.horizon.is_finite() {
            return Err(TransformError::InvalidStep("horizon must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformOutcome {
    LabelFlip {
        /// Flipped record ids per side; absent for untouched sides.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source_flipped: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_flipped: Option<Vec<String>>,
    },
    Resample {
        grid: GridSpec,
        source_steps: usize,
        target_steps: usize,
    },
    MaskChannels {
        masked: Vec<String>,
        source_valid_channels: usize,
        target_valid_channels: usize,
    },
}

/// Provenance entry for one applied transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub spec: TransformSpec,
    pub seed: u64,
    pub side: Side,
    pub outcome: TransformOutcome,
}

fn check_probability(p: f64) -> Result<(), TransformError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(TransformError::InvalidProbability(p))
    }
}

/// Flips each label independently with probability `p`.
///
/// Label `i` flips iff the `i`-th uniform of the seeded stream is below `p`,
/// so for one seed the flips at a smaller `p` are a subset of those at a larger
/// one. Returns the new labels and the flipped positions.
pub fn flip_labels(labels: &[u8], p: f64, seed: u64) -> Result<(Vec<u8>, Vec<usize>), TransformError> {
    use rand::Rng;
    check_probability(p)?;
    let mut rng = rng_from_seed(derive_seed(seed, "label-flip"));
    let mut out = labels.to_vec();
    let mut flipped = Vec::new();
    for (i, y) in out.iter_mut().enumerate() {
        if rng.random::<f64>() < p {
            *y = 1 - (*y).min(1);
            flipped.push(i);
        }
    }
    Ok((out, flipped))
}

/// Channels of the missing-measurement scenario present in `channels`:
/// pH, temperature, height, weight and every verbal-response GCS column.
pub fn missing_measurement_channels(channels: &[ChannelDescriptor]) -> Vec<String> {
    channels
        .iter()
        .filter(|c| MISSING_MEASUREMENT_NAMES.contains(&c.name.as_str()) || c.name.starts_with(GCS_VERBAL_PREFIX))
        .map(|c| c.name.clone())
        .collect()
}

/// Removes every event on the named channels and flags them masked.
///
/// Columns stay in place, so regularized grids zero-fill them.
pub fn mask_channels(dataset: &Dataset, names: &[String]) -> Result<Dataset, TransformError> {
    let mut masked = vec![false; dataset.n_channels()];
    for name in names {
        let c = dataset
            .channel_index(name)
            .ok_or_else(|| TransformError::UnknownChannel(name.clone()))?;
        masked[c] = true;
    }
    let mut out = dataset.clone();
    for (c, ch) in out.channels.iter_mut().enumerate() {
        ch.masked |= masked[c];
    }
    for r in &mut out.records {
        r.events.retain(|e| !masked[e.channel]);
    }
    Ok(out)
}

/// Regularized series of both sides of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledPair {
    pub grid: GridSpec,
    pub source: Vec<RegularGrid>,
    pub target: Vec<RegularGrid>,
}

pub fn regularize_all(dataset: &Dataset, step: f64, horizon: f64) -> Result<Vec<RegularGrid>, TransformError> {
    dataset
        .records
        .iter()
        .map(|r| regularize(r, dataset.n_channels(), step, horizon).map_err(TransformError::from))
        .collect()
}

/// Samples source records every `source_step` hours and target records every
/// `target_step` hours with last-value carry-forward.
pub fn resample_pair(
    pair: &SourceTargetPair,
    source_step: f64,
    target_step: f64,
    horizon: f64,
) -> Result<ResampledPair, TransformError> {
    let grid = GridSpec {
        source_step,
        target_step,
        horizon,
    };
    grid.validate()?;
    Ok(ResampledPair {
        grid,
        source: regularize_all(&pair.source.dataset, source_step, horizon)?,
        target: regularize_all(&pair.target.dataset, target_step, horizon)?,
    })
}

fn ids(dataset: &Dataset, positions: &[usize]) -> Vec<String> {
    positions.iter().map(|&i| dataset.records[i].id.clone()).collect()
}

/// Applies one transform in place and records it in the pair's provenance.
/// `index` is the transform's position, used to derive a default seed.
pub fn apply_transform(
    pair: &mut SourceTargetPair,
    spec: &TransformSpec,
    index: usize,
) -> Result<TransformRecord, TransformError> {
    spec.validate()?;
    let seed = spec
        .seed
        .unwrap_or_else(|| derive_indexed(pair.provenance.seed, "transform", index as u64));
    let side = spec.effective_side();
    let outcome = match &spec.op {
        TransformOp::LabelFlip(f) => {
            let mut source_flipped = None;
            let mut target_flipped = None;
            if side.source() {
                let (labels, flipped) = flip_labels(&pair.source.labels, f.p, derive_seed(seed, "source"))?;
                source_flipped = Some(ids(&pair.source.dataset, &flipped));
                pair.source.labels = labels;
            }
            if side.target() {
                let (labels, flipped) = flip_labels(&pair.target.labels, f.p, derive_seed(seed, "target"))?;
                target_flipped = Some(ids(&pair.target.dataset, &flipped));
                pair.target.labels = labels;
            }
            TransformOutcome::LabelFlip {
                source_flipped,
                target_flipped,
            }
        }
        TransformOp::Resample(r) => {
            let grid = GridSpec {
                source_step: r.source_step,
                target_step: r.target_step,
                horizon: r.horizon,
            };
            pair.provenance.grid = Some(grid);
            TransformOutcome::Resample {
                grid,
                source_steps: crate::data::grid_len(r.source_step, r.horizon),
                target_steps: crate::data::grid_len(r.target_step, r.horizon),
            }
        }
        TransformOp::MaskChannels(m) => {
            if side.source() {
                pair.source.dataset = mask_channels(&pair.source.dataset, &m.channels)?;
            }
            if side.target() {
                pair.target.dataset = mask_channels(&pair.target.dataset, &m.channels)?;
            }
            TransformOutcome::MaskChannels {
                masked: m.channels.clone(),
                source_valid_channels: pair.source.dataset.valid_channel_count(),
                target_valid_channels: pair.target.dataset.valid_channel_count(),
            }
        }
    };
    let record = TransformRecord {
        spec: spec.clone(),
        seed,
        side,
        outcome,
    };
    pair.provenance.transforms.push(record.clone());
    Ok(record)
}

/// Applies transforms in order. Positions continue after already-recorded transforms.
pub fn apply_transforms(pair: &mut SourceTargetPair, specs: &[TransformSpec]) -> Result<(), TransformError> {
    let start = pair.provenance.transforms.len();
    for (k, spec) in specs.iter().enumerate() {
        apply_transform(pair, spec, start + k)?;
    }
    Ok(())
}
