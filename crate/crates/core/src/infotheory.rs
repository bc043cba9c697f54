//! Plug-in information estimators over discrete columns.
//!
//! All quantities are in bits and use maximum-likelihood frequencies with no
//! bias correction. Entropy, mutual information, total correlation and
//! conditional total correlation are clamped at zero; the [`raw`] module
//! exposes the unclamped values. Clamping only ever absorbs floating-point
//! residue of order 1e-12.
//!
//! Joint distributions are counted sparsely over observed configurations,
//! never through a dense `∏ c_i` table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Residue tolerated below zero before clamping.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {value} out of range for cardinality {cardinality}")]
    ValueOutOfRange { value: u32, cardinality: u32 },
    #[error("cardinality must be at least 1")]
    ZeroCardinality,
}

/// A length-N column of states in `0..cardinality`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteColumn {
    values: Vec<u32>,
    cardinality: u32,
}

/// A latent factor is stored exactly like an observed column.
pub type FactorColumn = DiscreteColumn;

impl DiscreteColumn {
    pub fn new(values: Vec<u32>, cardinality: u32) -> Result<Self, InfoError> {
        if cardinality == 0 {
            return Err(InfoError::ZeroCardinality);
        }
        if let Some(&value) = values.iter().find(|&&v| v >= cardinality) {
            return Err(InfoError::ValueOutOfRange { value, cardinality });
        }
        Ok(DiscreteColumn { values, cardinality })
    }

    /// Cardinality inferred as `max + 1`.
    pub fn from_values(values: Vec<u32>) -> Self {
        let cardinality = values.iter().copied().max().map_or(1, |m| m + 1);
        DiscreteColumn { values, cardinality }
    }

    pub(crate) fn new_unchecked(values: Vec<u32>, cardinality: u32) -> Self {
        debug_assert!(values.iter().all(|&v| v < cardinality));
        DiscreteColumn { values, cardinality }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn cardinality(&self) -> u32 {
        self.cardinality
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// State counts, dense over `0..cardinality`.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0usize; self.cardinality as usize];
        for &v in &self.values {
            c[v as usize] += 1;
        }
        c
    }

    pub fn select(&self, rows: &[usize]) -> DiscreteColumn {
        DiscreteColumn {
            values: rows.iter().map(|&r| self.values[r]).collect(),
            cardinality: self.cardinality,
        }
    }
}

/// Named discrete columns of a common length N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteMatrix {
    names: Vec<String>,
    columns: Vec<DiscreteColumn>,
    n_rows: usize,
}

impl DiscreteMatrix {
    pub fn new(names: Vec<String>, columns: Vec<DiscreteColumn>) -> Result<Self, InfoError> {
        if names.len() != columns.len() {
            return Err(InfoError::LengthMismatch {
                expected: columns.len(),
                found: names.len(),
            });
        }
        let n_rows = columns.first().map_or(0, DiscreteColumn::len);
        if let Some(c) = columns.iter().find(|c| c.len() != n_rows) {
            return Err(InfoError::LengthMismatch {
                expected: n_rows,
                found: c.len(),
            });
        }
        Ok(DiscreteMatrix { names, columns, n_rows })
    }

    /// Columns named `x0, x1, ...`.
    pub fn from_columns(columns: Vec<DiscreteColumn>) -> Result<Self, InfoError> {
        let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, columns)
    }

    /// Builds binary/discrete columns from row-major data, inferring cardinalities.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self, InfoError> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(InfoError::LengthMismatch {
                expected: d,
                found: r.len(),
            });
        }
        let columns = (0..d)
            .map(|j| DiscreteColumn::from_values(rows.iter().map(|r| r[j]).collect()))
            .collect();
        Self::from_columns(columns)
    }

    pub(crate) fn new_unchecked(names: Vec<String>, columns: Vec<DiscreteColumn>, n_rows: usize) -> Self {
        DiscreteMatrix { names, columns, n_rows }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[DiscreteColumn] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &DiscreteColumn {
        &self.columns[i]
    }

    pub fn row(&self, r: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c.values[r]).collect()
    }

    /// A copy with `column` appended under `name`.
    pub fn with_column(&self, name: impl Into<String>, column: DiscreteColumn) -> Result<Self, InfoError> {
        if self.n_cols() > 0 && column.len() != self.n_rows {
            return Err(InfoError::LengthMismatch {
                expected: self.n_rows,
                found: column.len(),
            });
        }
        let mut m = self.clone();
        m.n_rows = column.len();
        m.names.push(name.into());
        m.columns.push(column);
        Ok(m)
    }

    pub fn select_rows(&self, rows: &[usize]) -> DiscreteMatrix {
        DiscreteMatrix {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            n_rows: rows.len(),
        }
    }
}

fn xlog2x(c: usize) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.log2()
    }
}

/// `log2 n − Σ c·log2 c / n` over a count vector summing to `n`.
pub(crate) fn entropy_from_counts<I: IntoIterator<Item = usize>>(counts: I, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let s: f64 = counts.into_iter().map(xlog2x).sum();
    (n as f64).log2() - s / n as f64
}

fn clamp(x: f64) -> f64 {
    debug_assert!(x >= -1e-9, "information quantity {x} far below zero");
    x.max(0.0)
}

/// Unclamped estimators. Every quantity except [`raw::tc_reduction`] is
/// analytically non-negative; values here may carry rounding residue.
pub mod raw {
    use super::*;

    pub fn entropy(column: &DiscreteColumn) -> Result<f64, InfoError> {
        if column.is_empty() {
            return Err(InfoError::Empty);
        }
        Ok(entropy_from_counts(column.counts(), column.len()))
    }

    pub fn joint_entropy(matrix: &DiscreteMatrix) -> Result<f64, InfoError> {
        if matrix.n_cols() == 0 || matrix.n_rows() == 0 {
            return Err(InfoError::Empty);
        }
        // Ordered keys keep the float sum identical across processes.
        let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for r in 0..matrix.n_rows() {
            *counts.entry(matrix.row(r)).or_insert(0) += 1;
        }
        Ok(entropy_from_counts(counts.into_values(), matrix.n_rows()))
    }

    pub fn mutual_information(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<f64, InfoError> {
        if a.len() != b.len() {
            return Err(InfoError::LengthMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let pair = DiscreteMatrix::from_columns(vec![a.clone(), b.clone()])?;
        Ok(entropy(a)? + entropy(b)? - joint_entropy(&pair)?)
    }

    pub fn total_correlation(matrix: &DiscreteMatrix) -> Result<f64, InfoError> {
        if matrix.n_cols() == 0 || matrix.n_rows() == 0 {
            return Err(InfoError::Empty);
        }
        let marginals = matrix.columns().iter().map(entropy).sum::<Result<f64, _>>()?;
        Ok(marginals - joint_entropy(matrix)?)
    }

    /// `Σ_z p̂(z) · TC(X | Z = z)`, computed stratum by stratum.
    pub fn conditional_total_correlation(matrix: &DiscreteMatrix, z: &FactorColumn) -> Result<f64, InfoError> {
        if matrix.n_cols() == 0 || matrix.n_rows() == 0 {
            return Err(InfoError::Empty);
        }
        if z.len() != matrix.n_rows() {
            return Err(InfoError::LengthMismatch {
                expected: matrix.n_rows(),
                found: z.len(),
            });
        }
        let mut strata: Vec<Vec<usize>> = vec![Vec::new(); z.cardinality() as usize];
        for (r, &s) in z.values().iter().enumerate() {
            strata[s as usize].push(r);
        }
        let n = matrix.n_rows() as f64;
        let mut acc = 0.0;
        for rows in strata.iter().filter(|r| !r.is_empty()) {
            let sub = matrix.select_rows(rows);
            acc += rows.len() as f64 / n * total_correlation(&sub)?;
        }
        Ok(acc)
    }

    /// `TC(X) − TC(X | Z)`. May be negative: conditioning can create dependence.
    pub fn tc_reduction(matrix: &DiscreteMatrix, z: &FactorColumn) -> Result<f64, InfoError> {
        Ok(total_correlation(matrix)? - conditional_total_correlation(matrix, z)?)
    }
}

/// Plug-in entropy `−Σ p̂ log2 p̂` of one column.
pub fn entropy(column: &DiscreteColumn) -> Result<f64, InfoError> {
    raw::entropy(column).map(clamp)
}

/// Entropy of the joint configuration of all columns.
pub fn joint_entropy(matrix: &DiscreteMatrix) -> Result<f64, InfoError> {
    raw::joint_entropy(matrix).map(clamp)
}

/// `I(A;B) = H(A) + H(B) − H(A,B)`.
pub fn mutual_information(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<f64, InfoError> {
    raw::mutual_information(a, b).map(clamp)
}

/// `TC(X) = Σ_i H(X_i) − H(X)`; zero iff the columns are empirically independent.
pub fn total_correlation(matrix: &DiscreteMatrix) -> Result<f64, InfoError> {
    raw::total_correlation(matrix).map(clamp)
}

/// Residual total correlation after observing `z`.
pub fn conditional_total_correlation(matrix: &DiscreteMatrix, z: &FactorColumn) -> Result<f64, InfoError> {
    raw::conditional_total_correlation(matrix, z).map(clamp)
}

/// Total correlation explained by `z`: `TC(X) − TC(X | Z)`.
///
/// Not clamped. Equals `Σ_i I(X_i;Z) − I(X;Z)` on the same sample.
pub fn tc_reduction(matrix: &DiscreteMatrix, z: &FactorColumn) -> Result<f64, InfoError> {
    raw::tc_reduction(matrix, z)
}
