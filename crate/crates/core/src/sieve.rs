//! Information sieve over discrete columns and the disease landscape built on it.
//!
//! Each layer learns one discrete factor `Z` maximizing the total correlation it
//! explains, `TC(X;Z) = Σ_i I(X_i;Z) − I(X;Z)`, then replaces every column by a
//! remainder `X̄_i = g_i(X_i, Z)` that is injective in `X_i` for each state of
//! `Z` and carries as little information about `Z` as possible. The factor is
//! appended to the remainder so later layers may combine earlier factors.
//!
//! Layer fitting is per-sample coordinate ascent on the exact plug-in objective.
//! With counts `n_z`, `n_{i,v,z}` and `n_{x,z}` (x the full row configuration),
//!
//! ```text
//! N · (TC(X;Z) − TC(X)) = Σ_i Σ_{v,z} f(n_{i,v,z}) − (d−1) Σ_z f(n_z) − Σ_{x,z} f(n_{x,z})
//! ```
//!
//! with `f(c) = c·log2 c`, so moving one sample between states changes the
//! objective by an O(d) expression in a handful of counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{read_json, write_json_pretty, DataError};
use crate::infotheory::{self, entropy_from_counts, DiscreteColumn, DiscreteMatrix, FactorColumn, InfoError};
use crate::rng::{derive_indexed, rng_from_seed};

pub const DEFAULT_CARDINALITY: u32 = 2;
pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Default normalized-MI threshold for "strongly correlated" expansion.
pub const DEFAULT_TAU: f64 = 0.2;

/// Gains below this (in count-scaled bits) do not trigger a reassignment.
const MOVE_TOLERANCE: f64 = 1e-9;
/// Above this many candidate products the remainder search turns coordinate-wise.
const EXHAUSTIVE_REMAINDER_LIMIT: u128 = 1 << 20;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("factor cardinality must be at least 2, got {0}")]
    InvalidCardinality(u32),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("need at least one column")]
    NoColumns,
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("layer does not match matrix: {0}")]
    LayerMismatch(String),
    #[error("unknown disease `{0}`")]
    UnknownDisease(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl From<DataError> for SieveError {
    fn from(e: DataError) -> Self {
        let path = match &e {
            DataError::Io { path, .. } | DataError::Json { path, .. } | DataError::Csv { path, .. } => path.clone(),
            _ => PathBuf::new(),
        };
        SieveError::Io {
            path,
            message: e.to_string(),
        }
    }
}

/// Optimizer settings shared by every layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SieveConfig {
    pub cardinality: u32,
    pub restarts: usize,
    pub max_iters: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            cardinality: DEFAULT_CARDINALITY,
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
        }
    }
}

/// One fitted sieve layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveLayer {
    pub index: usize,
    pub cardinality: u32,
    pub input_names: Vec<String>,
    pub input_cardinalities: Vec<u32>,
    /// Training-row assignment.
    pub factor: FactorColumn,
    /// `n_z` over training rows.
    pub state_counts: Vec<usize>,
    /// `conditional_counts[i][v][z] = #{x_i = v, Z = z}`.
    pub conditional_counts: Vec<Vec<Vec<usize>>>,
    /// `remainder_maps[i][z][x] = g_i(x, z)`; each `[i][z]` is a permutation.
    pub remainder_maps: Vec<Vec<Vec<u32>>>,
    /// TC(X;Z) achieved, in bits.
    pub objective: f64,
    pub sweeps: usize,
    pub restart: usize,
}

impl SieveLayer {
    pub fn n_samples(&self) -> usize {
        self.factor.len()
    }

    /// Plug-in `p̂(z)`.
    pub fn class_prior(&self) -> Vec<f64> {
        let n = self.n_samples() as f64;
        self.state_counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Plug-in `p̂(x_i = v | z)`; zero where the state is empty.
    pub fn conditional(&self, i: usize, v: usize, z: usize) -> f64 {
        let nz = self.state_counts[z];
        if nz == 0 {
            0.0
        } else {
            self.conditional_counts[i][v][z] as f64 / nz as f64
        }
    }

    /// Factor name used when the layer's factor is appended to a remainder.
    pub fn factor_name(&self) -> String {
        format!("Z{}", self.index)
    }

    fn naive_bayes_scores(&self, row: &[u32]) -> Result<Vec<f64>, SieveError> {
        if row.len() != self.input_cardinalities.len() {
            return Err(SieveError::ArityMismatch {
                expected: self.input_cardinalities.len(),
                found: row.len(),
            });
        }
        let c = self.cardinality as usize;
        let n = self.n_samples() as f64;
        let mut scores = Vec::with_capacity(c);
        for z in 0..c {
            let nz = self.state_counts[z] as f64;
            let mut s = ((nz + 1.0) / (n + c as f64)).ln();
            for (i, &v) in row.iter().enumerate() {
                let card = self.input_cardinalities[i];
                if v >= card {
                    return Err(InfoError::ValueOutOfRange {
                        value: v,
                        cardinality: card,
                    }
                    .into());
                }
                let niv = self.conditional_counts[i][v as usize][z] as f64;
                s += ((niv + 1.0) / (nz + f64::from(card))).ln();
            }
            scores.push(s);
        }
        Ok(scores)
    }
}

/// Out-of-sample factor state for one row.
///
/// Laplace-smoothed (α = 1) naive-Bayes score
/// `log p̂(z) + Σ_i log p̂(x_i | z)`, maximized with ties going to the lowest state.
pub fn assign(layer: &SieveLayer, row: &[u32]) -> Result<u32, SieveError> {
    let scores = layer.naive_bayes_scores(row)?;
    let mut best = 0usize;
    for (z, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = z;
        }
    }
    Ok(best as u32)
}

fn f_table(n: usize) -> Vec<f64> {
    (0..=n + 1)
        .map(|c| if c == 0 { 0.0 } else { c as f64 * (c as f64).log2() })
        .collect()
}

/// Row configurations of `matrix` mapped to dense ids in order of first appearance.
fn configuration_ids(matrix: &DiscreteMatrix) -> (Vec<usize>, usize) {
    let mut ids = HashMap::new();
    let mut out = Vec::with_capacity(matrix.n_rows());
    for r in 0..matrix.n_rows() {
        let next = ids.len();
        out.push(*ids.entry(matrix.row(r)).or_insert(next));
    }
    let n_configs = ids.len();
    (out, n_configs)
}

/// Incremental count state for coordinate ascent.
struct AscentState<'a> {
    data: &'a [Vec<u32>],
    configs: &'a [usize],
    c: usize,
    d: usize,
    f: &'a [f64],
    assign: Vec<usize>,
    n_z: Vec<usize>,
    /// Per column, `[v * c + z]`.
    n_ivz: Vec<Vec<usize>>,
    /// `[config * c + z]`.
    n_cz: Vec<usize>,
}

impl<'a> AscentState<'a> {
    fn new(
        data: &'a [Vec<u32>],
        cards: &[u32],
        configs: &'a [usize],
        n_configs: usize,
        c: usize,
        f: &'a [f64],
        assign: Vec<usize>,
    ) -> Self {
        let d = data.len();
        let mut n_z = vec![0; c];
        let mut n_ivz: Vec<Vec<usize>> = cards.iter().map(|&k| vec![0; k as usize * c]).collect();
        let mut n_cz = vec![0; n_configs * c];
        for (s, &z) in assign.iter().enumerate() {
            n_z[z] += 1;
            for i in 0..d {
                n_ivz[i][data[i][s] as usize * c + z] += 1;
            }
            n_cz[configs[s] * c + z] += 1;
        }
        AscentState {
            data,
            configs,
            c,
            d,
            f,
            assign,
            n_z,
            n_ivz,
            n_cz,
        }
    }

    /// `N · (TC(X;Z) − TC(X))`.
    fn scaled_score(&self) -> f64 {
        let f = self.f;
        let cols: f64 = self.n_ivz.iter().flatten().map(|&n| f[n]).sum();
        let z: f64 = self.n_z.iter().map(|&n| f[n]).sum();
        let joint: f64 = self.n_cz.iter().map(|&n| f[n]).sum();
        cols - (self.d as f64 - 1.0) * z - joint
    }

    #[inline]
    fn delta(&self, n_from: usize, n_to: usize) -> f64 {
        let f = self.f;
        f[n_from - 1] - f[n_from] + f[n_to + 1] - f[n_to]
    }

    fn gain(&self, s: usize, a: usize, b: usize) -> f64 {
        let c = self.c;
        let mut g = 0.0;
        for i in 0..self.d {
            let v = self.data[i][s] as usize;
            g += self.delta(self.n_ivz[i][v * c + a], self.n_ivz[i][v * c + b]);
        }
        g -= (self.d as f64 - 1.0) * self.delta(self.n_z[a], self.n_z[b]);
        let x = self.configs[s];
        g -= self.delta(self.n_cz[x * c + a], self.n_cz[x * c + b]);
        g
    }

    fn apply(&mut self, s: usize, b: usize) {
        let a = self.assign[s];
        let c = self.c;
        self.n_z[a] -= 1;
        self.n_z[b] += 1;
        for i in 0..self.d {
            let v = self.data[i][s] as usize;
            self.n_ivz[i][v * c + a] -= 1;
            self.n_ivz[i][v * c + b] += 1;
        }
        let x = self.configs[s];
        self.n_cz[x * c + a] -= 1;
        self.n_cz[x * c + b] += 1;
        self.assign[s] = b;
    }

    /// One pass over samples in index order; returns the number of reassignments.
    fn sweep(&mut self) -> usize {
        let mut moved = 0;
        for s in 0..self.assign.len() {
            let a = self.assign[s];
            let gains: Vec<f64> = (0..self.c)
                .map(|b| if b == a { 0.0 } else { self.gain(s, a, b) })
                .collect();
            let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if best <= MOVE_TOLERANCE {
                continue;
            }
            // Lowest state within tolerance of the best gain.
            let b = gains
                .iter()
                .position(|&g| g >= best - MOVE_TOLERANCE && g > MOVE_TOLERANCE)
                .expect("best gain is attained");
            self.apply(s, b);
            moved += 1;
        }
        moved
    }
}

struct RestartResult {
    assign: Vec<usize>,
    objective: f64,
    sweeps: usize,
}

fn check_fit_inputs(matrix: &DiscreteMatrix, cardinality: u32, restarts: usize) -> Result<(), SieveError> {
    if cardinality < 2 {
        return Err(SieveError::InvalidCardinality(cardinality));
    }
    if matrix.n_cols() == 0 {
        return Err(SieveError::NoColumns);
    }
    if matrix.n_rows() < 2 {
        return Err(SieveError::TooFewSamples(matrix.n_rows()));
    }
    if restarts == 0 {
        return Err(SieveError::NoRestarts);
    }
    Ok(())
}

/// Fits one layer by seeded multi-restart coordinate ascent.
///
/// Each restart draws a uniform random initial assignment, then sweeps samples
/// in index order, moving each to the state of largest objective gain (ties
/// toward the lowest state; a sample stays put unless the gain is strictly
/// positive). A sweep without moves, or `max_iters` sweeps, ends the restart.
/// The winner is the highest objective, then the lowest restart index.
pub fn fit_layer(
    matrix: &DiscreteMatrix,
    cardinality: u32,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> Result<SieveLayer, SieveError> {
    check_fit_inputs(matrix, cardinality, restarts)?;
    let n = matrix.n_rows();
    let c = cardinality as usize;
    let data: Vec<Vec<u32>> = matrix.columns().iter().map(|col| col.values().to_vec()).collect();
    let cards: Vec<u32> = matrix.columns().iter().map(DiscreteColumn::cardinality).collect();
    let (configs, n_configs) = configuration_ids(matrix);
    let f = f_table(n);
    let tc = infotheory::total_correlation(matrix)?;

    let run = |r: usize| -> RestartResult {
        let mut rng = rng_from_seed(derive_indexed(seed, "sieve-restart", r as u64));
        let init: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let mut st = AscentState::new(&data, &cards, &configs, n_configs, c, &f, init);
        let mut score = st.scaled_score();
        let mut sweeps = 0;
        while sweeps < max_iters {
            let moved = st.sweep();
            sweeps += 1;
            let next = st.scaled_score();
            debug_assert!(
                next >= score - 1e-9 * (1.0 + score.abs()),
                "coordinate ascent decreased the objective: {score} -> {next}"
            );
            score = next;
            if moved == 0 {
                break;
            }
        }
        RestartResult {
            objective: tc + score / n as f64,
            assign: st.assign,
            sweeps,
        }
    };
    let results: Vec<RestartResult> = (0..restarts).into_par_iter().map(run).collect();

    let mut best_idx = 0;
    for (r, res) in results.iter().enumerate().skip(1) {
        if res.objective > results[best_idx].objective + 1e-12 {
            best_idx = r;
        }
    }
    let best = &results[best_idx];
    let (assignment, sweeps) = if best.objective < 0.0 {
        // The constant factor explains exactly zero.
        (vec![0usize; n], 0)
    } else {
        (best.assign.clone(), best.sweeps)
    };
    let factor = DiscreteColumn::new(assignment.iter().map(|&z| z as u32).collect(), cardinality)?;
    let objective = infotheory::tc_reduction(matrix, &factor)?;
    Ok(build_layer(matrix, factor, objective, sweeps, best_idx))
}

/// Assembles a layer around a given factor (counts, remainder maps, objective).
pub fn layer_from_factor(matrix: &DiscreteMatrix, factor: FactorColumn) -> Result<SieveLayer, SieveError> {
    if factor.len() != matrix.n_rows() {
        return Err(SieveError::LayerMismatch(format!(
            "factor has {} rows, matrix {}",
            factor.len(),
            matrix.n_rows()
        )));
    }
    let objective = infotheory::tc_reduction(matrix, &factor)?;
    Ok(build_layer(matrix, factor, objective, 0, 0))
}

fn build_layer(
    matrix: &DiscreteMatrix,
    factor: FactorColumn,
    objective: f64,
    sweeps: usize,
    restart: usize,
) -> SieveLayer {
    let c = factor.cardinality() as usize;
    let state_counts = factor.counts();
    let conditional_counts = matrix
        .columns()
        .iter()
        .map(|col| {
            let mut t = vec![vec![0usize; c]; col.cardinality() as usize];
            for (&v, &z) in col.values().iter().zip(factor.values()) {
                t[v as usize][z as usize] += 1;
            }
            t
        })
        .collect();
    let remainder_maps = matrix
        .columns()
        .iter()
        .map(|col| optimal_remainder_map(col, &factor))
        .collect();
    SieveLayer {
        index: 0,
        cardinality: factor.cardinality(),
        input_names: matrix.names().to_vec(),
        input_cardinalities: matrix.columns().iter().map(DiscreteColumn::cardinality).collect(),
        factor,
        state_counts,
        conditional_counts,
        remainder_maps,
        objective: objective.max(0.0),
        sweeps,
        restart,
    }
}

/// Rearranges `perm` into the next lexicographic permutation; false after the last.
fn next_permutation(perm: &mut [u32]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All permutations of `0..k` in lexicographic order (identity first).
pub fn permutations(k: u32) -> Vec<Vec<u32>> {
    let mut p: Vec<u32> = (0..k).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// `H(X̄)` for per-state maps `perms[z]` applied to joint counts `joint[x][z]`.
fn remainder_entropy(joint: &[Vec<usize>], perms: &[&[u32]], n: usize) -> f64 {
    let k = joint.len();
    let mut counts = vec![0usize; k];
    for (x, row) in joint.iter().enumerate() {
        for (z, &cnt) in row.iter().enumerate() {
            counts[perms[z][x] as usize] += cnt;
        }
    }
    entropy_from_counts(counts, n)
}

/// Chooses `g(·, z)` for one column: a bijection per factor state minimizing
/// `I(X̄; Z)`.
///
/// Per-state bijections leave `H(X̄ | Z) = H(X | Z)` unchanged, so minimizing
/// `I(X̄;Z)` is minimizing `H(X̄)`. The search is exhaustive over the product of
/// per-state permutations, enumerated with state 0 varying slowest and each
/// state's permutations in lexicographic order; the first minimum wins, so the
/// identity is kept whenever it is optimal. Products larger than 2^20 fall
/// back to coordinate-wise search over states.
pub fn optimal_remainder_map(column: &DiscreteColumn, factor: &FactorColumn) -> Vec<Vec<u32>> {
    let k = column.cardinality();
    let c = factor.cardinality() as usize;
    let n = column.len();
    let mut joint = vec![vec![0usize; c]; k as usize];
    for (&x, &z) in column.values().iter().zip(factor.values()) {
        joint[x as usize][z as usize] += 1;
    }
    let perms = permutations(k);
    let p = perms.len();
    let total = (p as u128).checked_pow(c as u32).unwrap_or(u128::MAX);

    let mut choice = vec![0usize; c];
    if total <= EXHAUSTIVE_REMAINDER_LIMIT {
        let mut best = f64::INFINITY;
        let mut best_choice = choice.clone();
        let mut digits = vec![0usize; c];
        for _ in 0..total {
            let refs: Vec<&[u32]> = digits.iter().map(|&d| perms[d].as_slice()).collect();
            let h = remainder_entropy(&joint, &refs, n);
            if h < best - 1e-12 {
                best = h;
                best_choice.clone_from(&digits);
            }
            // Increment with the last state fastest.
            for pos in (0..c).rev() {
                digits[pos] += 1;
                if digits[pos] < p {
                    break;
                }
                digits[pos] = 0;
            }
        }
        choice = best_choice;
    } else {
        let mut best = {
            let refs: Vec<&[u32]> = choice.iter().map(|&d| perms[d].as_slice()).collect();
            remainder_entropy(&joint, &refs, n)
        };
        loop {
            let mut improved = false;
            for z in 0..c {
                for cand in 0..p {
                    let mut trial = choice.clone();
                    trial[z] = cand;
                    let refs: Vec<&[u32]> = trial.iter().map(|&d| perms[d].as_slice()).collect();
                    let h = remainder_entropy(&joint, &refs, n);
                    if h < best - 1e-12 {
                        best = h;
                        choice = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    choice.into_iter().map(|d| perms[d].clone()).collect()
}

/// Applies a layer's remainder maps to the matrix it was fit on and appends the
/// factor as a final column.
pub fn compute_remainder(matrix: &DiscreteMatrix, layer: &SieveLayer) -> Result<DiscreteMatrix, SieveError> {
    if matrix.n_cols() != layer.input_cardinalities.len() {
        return Err(SieveError::ArityMismatch {
            expected: layer.input_cardinalities.len(),
            found: matrix.n_cols(),
        });
    }
    if matrix.n_rows() != layer.n_samples() {
        return Err(SieveError::LayerMismatch(format!(
            "layer fit on {} rows, matrix has {}",
            layer.n_samples(),
            matrix.n_rows()
        )));
    }
    let z = layer.factor.values();
    let mut names = Vec::with_capacity(matrix.n_cols() + 1);
    let mut columns = Vec::with_capacity(matrix.n_cols() + 1);
    for (i, col) in matrix.columns().iter().enumerate() {
        if col.cardinality() != layer.input_cardinalities[i] {
            return Err(SieveError::LayerMismatch(format!(
                "column {} has cardinality {}, layer expects {}",
                i,
                col.cardinality(),
                layer.input_cardinalities[i]
            )));
        }
        let map = &layer.remainder_maps[i];
        let values = col
            .values()
            .iter()
            .zip(z)
            .map(|(&x, &s)| map[s as usize][x as usize])
            .collect();
        names.push(matrix.names()[i].clone());
        columns.push(DiscreteColumn::new(values, col.cardinality())?);
    }
    names.push(layer.factor_name());
    columns.push(layer.factor.clone());
    Ok(DiscreteMatrix::new(names, columns)?)
}

/// A stack of sieve layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveModel {
    pub config: SieveConfig,
    pub input_names: Vec<String>,
    pub per_layer_tc: Vec<f64>,
    pub layers: Vec<SieveLayer>,
}

impl SieveModel {
    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    /// Factor states for one out-of-sample row, layer by layer.
    pub fn transform_row(&self, row: &[u32]) -> Result<Vec<u32>, SieveError> {
        let mut current = row.to_vec();
        let mut states = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let z = assign(layer, &current)?;
            let mut next: Vec<u32> = current
                .iter()
                .enumerate()
                .map(|(i, &x)| layer.remainder_maps[i][z as usize][x as usize])
                .collect();
            next.push(z);
            states.push(z);
            current = next;
        }
        Ok(states)
    }

    pub fn save(&self, path: &Path) -> Result<(), SieveError> {
        Ok(write_json_pretty(path, self)?)
    }

    pub fn load(path: &Path) -> Result<Self, SieveError> {
        Ok(read_json(path)?)
    }
}

/// Alternates [`fit_layer`] and [`compute_remainder`] up to `k` times.
///
/// A layer whose objective is below `config.epsilon` is kept and ends the
/// iteration.
pub fn fit_sieve(matrix: &DiscreteMatrix, k: usize, config: &SieveConfig) -> Result<SieveModel, SieveError> {
    if k == 0 {
        return Err(SieveError::LayerMismatch("k must be at least 1".into()));
    }
    let mut current = matrix.clone();
    let mut layers = Vec::with_capacity(k);
    let mut per_layer_tc = Vec::with_capacity(k);
    for l in 0..k {
        let seed = derive_indexed(config.seed, "sieve-layer", l as u64);
        let mut layer = fit_layer(&current, config.cardinality, seed, config.restarts, config.max_iters)?;
        layer.index = l;
        let objective = layer.objective;
        log::debug!("sieve layer {l}: {objective:.6} bits after {} sweeps", layer.sweeps);
        let next = compute_remainder(&current, &layer)?;
        per_layer_tc.push(objective);
        layers.push(layer);
        if objective < config.epsilon {
            break;
        }
        current = next;
    }
    Ok(SieveModel {
        config: *config,
        input_names: matrix.names().to_vec(),
        per_layer_tc,
        layers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeFactor {
    pub id: usize,
    /// Bits of total correlation explained by the factor's layer.
    pub size: f64,
    /// `H(Z_k)` over training rows.
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeEdge {
    pub disease: String,
    pub factor: usize,
    /// `I(Y_i; Z_k)` in bits.
    pub weight: f64,
}

/// Factors, disease-factor edges and the cluster each disease belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseLandscape {
    pub diseases: Vec<String>,
    /// `H(Y_i)` per disease, in disease order.
    pub disease_entropy: Vec<f64>,
    pub factors: Vec<LandscapeFactor>,
    pub edges: Vec<LandscapeEdge>,
    pub clusters: BTreeMap<String, usize>,
}

impl DiseaseLandscape {
    pub fn weight(&self, disease: &str, factor: usize) -> f64 {
        self.edges
            .iter()
            .find(|e| e.disease == disease && e.factor == factor)
            .map_or(0.0, |e| e.weight)
    }

    pub fn cluster_members(&self, factor: usize) -> Vec<String> {
        self.diseases
            .iter()
            .filter(|d| self.clusters.get(*d) == Some(&factor))
            .cloned()
            .collect()
    }

    /// `I(Y_j; Z) / min(H(Y_j), H(Z))` against the disease's own cluster factor.
    pub fn normalized_weight(&self, disease: &str) -> Option<f64> {
        let j = self.diseases.iter().position(|d| d == disease)?;
        let k = *self.clusters.get(disease)?;
        let hz = self.factors.iter().find(|f| f.id == k).map_or(0.0, |f| f.entropy);
        let denom = self.disease_entropy[j].min(hz);
        Some(if denom <= 1e-15 {
            0.0
        } else {
            self.weight(disease, k) / denom
        })
    }
}

/// Builds the landscape of a model fit on `labels`.
///
/// Edge weights are mutual informations between the original (not remainder)
/// label columns and each layer's factor; a disease's cluster is its
/// highest-weight factor, ties toward the lower factor id.
pub fn build_landscape(
    model: &SieveModel,
    labels: &DiscreteMatrix,
    disease_names: &[String],
) -> Result<DiseaseLandscape, SieveError> {
    if labels.n_cols() != disease_names.len() {
        return Err(SieveError::ArityMismatch {
            expected: labels.n_cols(),
            found: disease_names.len(),
        });
    }
    if model.input_names.len() != disease_names.len() {
        return Err(SieveError::ArityMismatch {
            expected: model.input_names.len(),
            found: disease_names.len(),
        });
    }
    if model.layers.is_empty() {
        return Err(SieveError::LayerMismatch("model has no layers".into()));
    }
    let mut factors = Vec::with_capacity(model.layers.len());
    for (k, layer) in model.layers.iter().enumerate() {
        if layer.n_samples() != labels.n_rows() {
            return Err(SieveError::LayerMismatch(format!(
                "layer {k} fit on {} rows, labels have {}",
                layer.n_samples(),
                labels.n_rows()
            )));
        }
        factors.push(LandscapeFactor {
            id: k,
            size: model.per_layer_tc[k],
            entropy: infotheory::entropy(&layer.factor)?,
        });
    }
    let mut edges = Vec::with_capacity(disease_names.len() * factors.len());
    let mut clusters = BTreeMap::new();
    let mut disease_entropy = Vec::with_capacity(disease_names.len());
    for (i, name) in disease_names.iter().enumerate() {
        let y = labels.column(i);
        disease_entropy.push(infotheory::entropy(y)?);
        let mut best = (0usize, f64::NEG_INFINITY);
        for (k, layer) in model.layers.iter().enumerate() {
            let w = infotheory::mutual_information(y, &layer.factor)?;
            if w > best.1 + 1e-12 {
                best = (k, w);
            }
            edges.push(LandscapeEdge {
                disease: name.clone(),
                factor: k,
                weight: w,
            });
        }
        clusters.insert(name.clone(), best.0);
    }
    Ok(DiseaseLandscape {
        diseases: disease_names.to_vec(),
        disease_entropy,
        factors,
        edges,
        clusters,
    })
}

/// Fits a sieve on a label matrix and returns the model and its landscape.
pub fn fit_landscape(
    labels: &DiscreteMatrix,
    k: usize,
    config: &SieveConfig,
) -> Result<(SieveModel, DiseaseLandscape), SieveError> {
    let model = fit_sieve(labels, k, config)?;
    let landscape = build_landscape(&model, labels, labels.names())?;
    Ok((model, landscape))
}

/// Expands a positive disease set with strongly correlated diseases.
///
/// Returns `positive_set` plus every disease sharing a cluster with a member of
/// the set whose normalized weight against that cluster's factor is at least
/// `tau`. Output follows the landscape's disease order.
pub fn correlated_diseases(
    landscape: &DiseaseLandscape,
    positive_set: &[String],
    tau: f64,
) -> Result<Vec<String>, SieveError> {
    let mut seed_clusters = Vec::new();
    for s in positive_set {
        let k = landscape
            .clusters
            .get(s)
            .ok_or_else(|| SieveError::UnknownDisease(s.clone()))?;
        seed_clusters.push(*k);
    }
    Ok(landscape
        .diseases
        .iter()
        .filter(|d| {
            positive_set.contains(d)
                || (seed_clusters.contains(&landscape.clusters[*d])
                    && landscape.normalized_weight(d).unwrap_or(0.0) >= tau)
        })
        .cloned()
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Dot,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

/// DOT scaling: factor node width = `DOT_NODE_BASE + DOT_NODE_PER_BIT · size`,
/// edge penwidth = `DOT_EDGE_BASE + DOT_EDGE_PER_BIT · weight`.
pub const DOT_NODE_BASE: f64 = 0.5;
pub const DOT_NODE_PER_BIT: f64 = 1.0;
pub const DOT_EDGE_BASE: f64 = 0.5;
pub const DOT_EDGE_PER_BIT: f64 = 8.0;
/// Edges lighter than this are left out of DOT output.
pub const DOT_MIN_WEIGHT: f64 = 0.01;

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the landscape as an undirected Graphviz graph for external layout.
pub fn landscape_to_dot(landscape: &DiseaseLandscape) -> String {
    let mut out = String::new();
    out.push_str("graph landscape {\n");
    let _ = writeln!(
        out,
        "  // width = {DOT_NODE_BASE} + {DOT_NODE_PER_BIT} * size_bits; penwidth = {DOT_EDGE_BASE} + {DOT_EDGE_PER_BIT} * weight_bits"
    );
    out.push_str("  node [fontsize=10];\n");
    for f in &landscape.factors {
        let _ = writeln!(
            out,
            "  \"factor_{}\" [shape=circle, label=\"Z{}\\n{:.4} bits\", width={:.6}, fixedsize=true];",
            f.id,
            f.id,
            f.size,
            DOT_NODE_BASE + DOT_NODE_PER_BIT * f.size
        );
    }
    for d in &landscape.diseases {
        let _ = writeln!(
            out,
            "  \"disease:{}\" [shape=box, label=\"{}\", cluster={}];",
            dot_escape(d),
            dot_escape(d),
            landscape.clusters[d]
        );
    }
    for e in landscape.edges.iter().filter(|e| e.weight >= DOT_MIN_WEIGHT) {
        let _ = writeln!(
            out,
            "  \"factor_{}\" -- \"disease:{}\" [penwidth={:.6}, weight={:.6}];",
            e.factor,
            dot_escape(&e.disease),
            DOT_EDGE_BASE + DOT_EDGE_PER_BIT * e.weight,
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

pub fn export_landscape(landscape: &DiseaseLandscape, format: ExportFormat, path: &Path) -> Result<(), SieveError> {
    match format {
        ExportFormat::Json => write_json_pretty(path, landscape)?,
        ExportFormat::Dot => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| SieveError::Io {
                    path: parent.to_path_buf(),
                    message: e.to_string(),
                })?;
            }
            std::fs::write(path, landscape_to_dot(landscape)).map_err(|e| SieveError::Io {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        }
    }
    Ok(())
}

pub fn load_landscape(path: &Path) -> Result<DiseaseLandscape, SieveError> {
    Ok(read_json(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::{entropy, joint_entropy, mutual_information};

    fn bin(v: &[u32]) -> DiscreteColumn {
        DiscreteColumn::new(v.to_vec(), 2).unwrap()
    }

    fn mat(cols: &[&[u32]]) -> DiscreteMatrix {
        DiscreteMatrix::from_columns(cols.iter().map(|c| bin(c)).collect()).unwrap()
    }

    /// Exhaustive maximum of TC(X;Z) over all c^N assignments.
    fn brute_force_optimum(m: &DiscreteMatrix, c: u32) -> f64 {
        let n = m.n_rows();
        let total = (c as u64).pow(n as u32);
        let mut best = f64::NEG_INFINITY;
        for code in 0..total {
            let mut k = code;
            let z: Vec<u32> = (0..n)
                .map(|_| {
                    let s = (k % c as u64) as u32;
                    k /= c as u64;
                    s
                })
                .collect();
            let z = DiscreteColumn::new(z, c).unwrap();
            best = best.max(infotheory::tc_reduction(m, &z).unwrap());
        }
        best
    }

    #[test]
    fn correlated_pair_explains_one_bit() {
        let a = &[0, 1, 0, 1, 1, 0, 0, 1][..];
        let m = mat(&[a, a]);
        let oracle = brute_force_optimum(&m, 2);
        assert!((oracle - 1.0).abs() < 1e-12);
        let layer = fit_layer(&m, 2, 3, 10, 200).unwrap();
        assert!((layer.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn independent_columns_explain_nothing() {
        let m = mat(&[&[0, 0, 1, 1, 0, 0, 1, 1], &[0, 1, 0, 1, 0, 1, 0, 1]]);
        assert!(brute_force_optimum(&m, 2) < 1e-12);
        let layer = fit_layer(&m, 2, 0, 5, 200).unwrap();
        assert!(layer.objective.abs() < 1e-12);
    }

    #[test]
    fn xor_triple_with_four_states() {
        let m = mat(&[
            &[0, 0, 1, 1, 0, 0, 1, 1],
            &[0, 1, 0, 1, 0, 1, 0, 1],
            &[0, 1, 1, 0, 0, 1, 1, 0],
        ]);
        let oracle = brute_force_optimum(&m, 4);
        assert!((oracle - 1.0).abs() < 1e-12);
        let layer = fit_layer(&m, 4, 1, 20, 200).unwrap();
        assert!((layer.objective - 1.0).abs() < 1e-9);
        assert!(infotheory::conditional_total_correlation(&m, &layer.factor).unwrap() < 1e-9);
    }

    #[test]
    fn invalid_inputs() {
        let m = mat(&[&[0, 1]]);
        assert!(matches!(
            fit_layer(&m, 1, 0, 1, 10),
            Err(SieveError::InvalidCardinality(1))
        ));
        assert!(matches!(
            fit_layer(&mat(&[&[0]]), 2, 0, 1, 10),
            Err(SieveError::TooFewSamples(1))
        ));
        assert!(matches!(fit_layer(&m, 2, 0, 0, 10), Err(SieveError::NoRestarts)));
    }

    #[test]
    fn assign_reproduces_training_states_on_correlated_pair() {
        let a = &[0, 1, 0, 1, 1, 0, 0, 1][..];
        let m = mat(&[a, a]);
        let layer = fit_layer(&m, 2, 3, 10, 200).unwrap();
        for r in 0..m.n_rows() {
            assert_eq!(assign(&layer, &m.row(r)).unwrap(), layer.factor.values()[r]);
        }
        assert!(matches!(assign(&layer, &[0]), Err(SieveError::ArityMismatch { .. })));
    }

    #[test]
    fn assign_hand_scored_and_tie_rule() {
        // Zeros dominate state 0.
        let m = mat(&[&[0, 0, 0, 1, 1, 1], &[0, 0, 0, 1, 1, 0]]);
        let z = bin(&[0, 0, 0, 1, 1, 1]);
        let layer = layer_from_factor(&m, z).unwrap();
        // state 0: ln(4/8) + ln(4/5) + ln(4/5); state 1: ln(4/8) + ln(1/5) + ln(2/5)
        let s0 = (4.0f64 / 8.0).ln() + 2.0 * (4.0f64 / 5.0).ln();
        let s1 = (4.0f64 / 8.0).ln() + (1.0f64 / 5.0).ln() + (2.0f64 / 5.0).ln();
        assert!(s0 > s1);
        assert_eq!(assign(&layer, &[0, 0]).unwrap(), 0);

        // Symmetric layer: both states equally likely for a mixed row.
        let m = mat(&[&[0, 1], &[0, 1]]);
        let layer = layer_from_factor(&m, bin(&[0, 1])).unwrap();
        assert_eq!(assign(&layer, &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn remainder_of_identical_pair_is_constant() {
        let a = &[0, 1, 1, 0, 1, 0][..];
        let m = mat(&[a, a]);
        let layer = layer_from_factor(&m, bin(a)).unwrap();
        let rem = compute_remainder(&m, &layer).unwrap();
        assert_eq!(rem.n_cols(), 3);
        for i in 0..2 {
            assert_eq!(entropy(rem.column(i)).unwrap(), 0.0);
            assert_eq!(mutual_information(rem.column(i), &layer.factor).unwrap(), 0.0);
        }
        assert_eq!(rem.column(2), &layer.factor);
        assert_eq!(rem.names()[2], "Z0");
    }

    #[test]
    fn uninformative_factor_keeps_identity() {
        let m = mat(&[&[0, 0, 1, 1, 0, 0, 1, 1], &[0, 1, 0, 1, 0, 1, 0, 1]]);
        let z = bin(&[0, 0, 0, 0, 1, 1, 1, 1]);
        let layer = layer_from_factor(&m, z).unwrap();
        let rem = compute_remainder(&m, &layer).unwrap();
        assert_eq!(rem.column(0), m.column(0));
        assert_eq!(rem.column(1), m.column(1));
        for maps in &layer.remainder_maps {
            assert_eq!(maps, &vec![vec![0, 1], vec![0, 1]]);
        }
    }

    #[test]
    fn remainder_mismatch_is_rejected() {
        let m = mat(&[&[0, 1, 0], &[1, 1, 0]]);
        let layer = layer_from_factor(&m, bin(&[0, 1, 1])).unwrap();
        assert!(compute_remainder(&mat(&[&[0, 1, 0]]), &layer).is_err());
        assert!(compute_remainder(&mat(&[&[0, 1], &[1, 1]]), &layer).is_err());
    }

    #[test]
    fn remainder_is_lossless_given_factor() {
        use rand::Rng;
        let mut rng = rng_from_seed(11);
        for _ in 0..30 {
            let n = rng.random_range(4..30);
            let cols: Vec<DiscreteColumn> = (0..3)
                .map(|_| bin(&(0..n).map(|_| rng.random_range(0..2)).collect::<Vec<_>>()))
                .collect();
            let m = DiscreteMatrix::from_columns(cols).unwrap();
            let c = rng.random_range(2..4);
            let z = DiscreteColumn::new((0..n).map(|_| rng.random_range(0..c)).collect(), c).unwrap();
            let layer = layer_from_factor(&m, z.clone()).unwrap();
            let rem = compute_remainder(&m, &layer).unwrap();
            for i in 0..m.n_cols() {
                // H(X_i | X̄_i, Z) = H(X_i, X̄_i, Z) − H(X̄_i, Z)
                let all =
                    DiscreteMatrix::from_columns(vec![m.column(i).clone(), rem.column(i).clone(), z.clone()]).unwrap();
                let cond = DiscreteMatrix::from_columns(vec![rem.column(i).clone(), z.clone()]).unwrap();
                let h = joint_entropy(&all).unwrap() - joint_entropy(&cond).unwrap();
                assert!(h.abs() < 1e-12, "residual {h}");
            }
        }
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(permutations(1), vec![vec![0]]);
        assert_eq!(permutations(2), vec![vec![0, 1], vec![1, 0]]);
        let p3 = permutations(3);
        assert_eq!(p3.len(), 6);
        assert_eq!(p3[0], vec![0, 1, 2]);
        assert_eq!(p3[5], vec![2, 1, 0]);
    }

    #[test]
    fn two_disjoint_pairs_give_two_one_bit_layers() {
        let a = &[0, 1, 0, 1, 1, 0, 1, 0][..];
        let b = &[0, 0, 1, 1, 0, 1, 1, 0][..];
        let m = mat(&[a, a, b, b]);
        let cfg = SieveConfig {
            seed: 5,
            ..SieveConfig::default()
        };
        let model = fit_sieve(&m, 2, &cfg).unwrap();
        assert_eq!(model.n_layers(), 2);
        for tc in &model.per_layer_tc {
            assert!((tc - 1.0).abs() < 1e-9, "{:?}", model.per_layer_tc);
        }
        let landscape = build_landscape(&model, &m, m.names()).unwrap();
        assert_eq!(landscape.clusters["x0"], landscape.clusters["x1"]);
        assert_eq!(landscape.clusters["x2"], landscape.clusters["x3"]);
        assert_ne!(landscape.clusters["x0"], landscape.clusters["x2"]);
    }

    #[test]
    fn independent_matrix_stops_after_one_layer() {
        let rows: Vec<Vec<u32>> = (0..8u32).map(|k| vec![k & 1, (k >> 1) & 1, (k >> 2) & 1]).collect();
        let m = DiscreteMatrix::from_rows(&rows).unwrap();
        let model = fit_sieve(&m, 3, &SieveConfig::default()).unwrap();
        assert_eq!(model.n_layers(), 1);
        assert!(model.per_layer_tc[0] < 1e-9);
        let landscape = build_landscape(&model, &m, m.names()).unwrap();
        assert!(landscape.clusters.values().all(|&k| k == 0));
    }

    #[test]
    fn replaying_layers_reproduces_remainders() {
        let a = &[0, 1, 0, 1, 1, 0, 1, 0, 1, 1][..];
        let b = &[0, 0, 1, 1, 0, 1, 1, 0, 0, 1][..];
        let c = &[1, 0, 1, 1, 0, 1, 0, 0, 0, 1][..];
        let m = mat(&[a, a, b, b, c]);
        let model = fit_sieve(
            &m,
            3,
            &SieveConfig {
                seed: 9,
                epsilon: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        let mut current = m.clone();
        for layer in &model.layers {
            assert_eq!(current.n_cols(), layer.input_cardinalities.len());
            assert_eq!(current.names(), layer.input_names.as_slice());
            let again = layer_from_factor(&current, layer.factor.clone()).unwrap();
            assert_eq!(again.remainder_maps, layer.remainder_maps);
            assert!((again.objective - layer.objective).abs() < 1e-12);
            current = compute_remainder(&current, layer).unwrap();
        }
        let states = model.transform_row(&m.row(0)).unwrap();
        assert_eq!(states.len(), model.n_layers());
    }

    #[test]
    fn fitting_is_deterministic() {
        let a = &[0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 0][..];
        let b = &[0, 0, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1][..];
        let m = mat(&[a, a, b, b, a]);
        let cfg = SieveConfig {
            seed: 17,
            ..Default::default()
        };
        let x = serde_json::to_string(&fit_sieve(&m, 3, &cfg).unwrap()).unwrap();
        let y = serde_json::to_string(&fit_sieve(&m, 3, &cfg).unwrap()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn state_relabeling_leaves_landscape_unchanged() {
        let a = &[0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 0][..];
        let b = &[0, 0, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1][..];
        let m = mat(&[a, a, b, b]);
        let model = fit_sieve(
            &m,
            2,
            &SieveConfig {
                seed: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let mut swapped = model.clone();
        for layer in &mut swapped.layers {
            let flipped: Vec<u32> = layer.factor.values().iter().map(|&z| 1 - z).collect();
            layer.factor = bin(&flipped);
        }
        let l1 = build_landscape(&model, &m, m.names()).unwrap();
        let l2 = build_landscape(&swapped, &m, m.names()).unwrap();
        assert_eq!(l1.clusters, l2.clusters);
        for (e1, e2) in l1.edges.iter().zip(&l2.edges) {
            assert!((e1.weight - e2.weight).abs() < 1e-12);
        }
        for (layer, sw) in model.layers.iter().zip(&swapped.layers) {
            let obj = infotheory::tc_reduction(&m, &sw.factor).unwrap();
            if layer.index == 0 {
                assert!((obj - layer.objective).abs() < 1e-12);
            }
        }
    }

    fn toy_landscape() -> DiseaseLandscape {
        DiseaseLandscape {
            diseases: vec!["a".into(), "b".into(), "c".into()],
            disease_entropy: vec![1.0, 1.0, 1.0],
            factors: vec![
                LandscapeFactor {
                    id: 0,
                    size: 1.5,
                    entropy: 1.0,
                },
                LandscapeFactor {
                    id: 1,
                    size: 0.5,
                    entropy: 1.0,
                },
            ],
            edges: vec![
                LandscapeEdge {
                    disease: "a".into(),
                    factor: 0,
                    weight: 0.9,
                },
                LandscapeEdge {
                    disease: "b".into(),
                    factor: 0,
                    weight: 0.1,
                },
                LandscapeEdge {
                    disease: "c".into(),
                    factor: 1,
                    weight: 0.8,
                },
            ],
            clusters: [("a".to_string(), 0), ("b".to_string(), 0), ("c".to_string(), 1)]
                .into_iter()
                .collect(),
        }
    }

    #[test]
    fn correlated_expansion_thresholds() {
        let l = toy_landscape();
        let pos = vec!["a".to_string()];
        assert_eq!(correlated_diseases(&l, &pos, 1.01).unwrap(), pos);
        assert_eq!(correlated_diseases(&l, &pos, 0.0).unwrap(), vec!["a", "b"]);
        assert_eq!(correlated_diseases(&l, &pos, 0.2).unwrap(), vec!["a"]);
        assert_eq!(correlated_diseases(&l, &["c".to_string()], 0.5).unwrap(), vec!["c"]);
        assert!(matches!(
            correlated_diseases(&l, &["zz".to_string()], 0.2),
            Err(SieveError::UnknownDisease(_))
        ));
    }

    #[test]
    fn landscape_exports() {
        let dir = tempfile::tempdir().unwrap();
        let l = toy_landscape();
        let jp = dir.path().join("l.json");
        export_landscape(&l, ExportFormat::Json, &jp).unwrap();
        assert_eq!(load_landscape(&jp).unwrap(), l);

        let dot = landscape_to_dot(&l);
        assert!(dot.starts_with("graph landscape {"));
        assert_eq!(dot.matches("shape=circle").count(), 2);
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(dot.contains("width=2.000000"));
        assert!(dot.contains("penwidth=7.700000"));

        let mut empty = l.clone();
        empty.edges.clear();
        let dp = dir.path().join("e.dot");
        export_landscape(&empty, ExportFormat::Dot, &dp).unwrap();
        let text = std::fs::read_to_string(&dp).unwrap();
        assert!(!text.contains(" -- "));
        assert_eq!(text.matches("shape=circle").count(), 2);
    }

    #[test]
    fn model_serialization_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = &[0, 1, 0, 1, 1, 0][..];
        let m = mat(&[a, a]);
        let model = fit_sieve(&m, 1, &SieveConfig::default()).unwrap();
        let p = dir.path().join("m.json");
        model.save(&p).unwrap();
        assert_eq!(SieveModel::load(&p).unwrap(), model);
    }
}
