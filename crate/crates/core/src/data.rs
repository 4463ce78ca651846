//! Shared data containers: validated matrices, soft assignment vectors, and
//! per-sample self-information summaries.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// n x d matrix of non-negative integer counts with named feature columns.
#[derive(Debug, Clone)]
pub struct CountMatrix {
    data: Array2<f64>,
    feature_ids: Vec<String>,
    binary: bool,
}

impl CountMatrix {
    /// Validates that every entry is a finite non-negative integer and that
    /// `feature_ids` names every column.
    pub fn new(data: Array2<f64>, feature_ids: Vec<String>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::EmptyInput("count matrix has no rows"));
        }
        if data.ncols() == 0 {
            return Err(Error::EmptyInput("count matrix has no columns"));
        }
        if feature_ids.len() != data.ncols() {
            return Err(Error::DimensionMismatch {
                what: "feature ids",
                expected: data.ncols(),
                got: feature_ids.len(),
            });
        }
        let mut binary = true;
        for ((row, col), &v) in data.indexed_iter() {
            if !v.is_finite() || v < 0.0 || v.fract() != 0.0 {
                return Err(Error::BadEntry {
                    row,
                    col,
                    value: v,
                    requirement: "finite non-negative integers",
                });
            }
            if v > 1.0 {
                binary = false;
            }
        }
        Ok(Self {
            data,
            feature_ids,
            binary,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, feature_ids: Vec<String>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Array2::zeros((n, d));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: d,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                data[[i, j]] = v;
            }
        }
        Self::new(data, feature_ids)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    /// True when every entry is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    /// Per-row total count; the binomial likelihood uses these as trials.
    pub fn row_totals(&self) -> Vec<f64> {
        self.data.rows().into_iter().map(|r| r.sum()).collect()
    }

    /// Per-column total count across all rows.
    pub fn column_totals(&self) -> Vec<f64> {
        (0..self.d()).map(|j| self.data.column(j).sum()).collect()
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::new(self.data.clone()).expect("counts are finite")
    }
}

/// n x d matrix of finite reals.
#[derive(Debug, Clone)]
pub struct RealMatrix {
    data: Array2<f64>,
}

impl RealMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::EmptyInput("real matrix has no rows"));
        }
        if data.ncols() == 0 {
            return Err(Error::EmptyInput("real matrix has no columns"));
        }
        for ((row, col), &v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::BadEntry {
                    row,
                    col,
                    value: v,
                    requirement: "finite",
                });
            }
        }
        Ok(Self { data })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }
}

/// Either branch of the pipeline consumes the same matrix object; baselines
/// always see the real view.
#[derive(Debug, Clone)]
pub enum FeatureMatrix {
    Counts(CountMatrix),
    Real(RealMatrix),
}

impl FeatureMatrix {
    pub fn n(&self) -> usize {
        match self {
            FeatureMatrix::Counts(c) => c.n(),
            FeatureMatrix::Real(r) => r.n(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            FeatureMatrix::Counts(c) => c.d(),
            FeatureMatrix::Real(r) => r.d(),
        }
    }

    pub fn real_view(&self) -> RealMatrix {
        match self {
            FeatureMatrix::Counts(c) => c.to_real(),
            FeatureMatrix::Real(r) => r.clone(),
        }
    }
}

/// Soft cluster assignment; each entry lies in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("weight vector"));
        }
        for &v in &values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "weight {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self(values))
    }

    /// Hard labels become weights; anything nonzero maps to 1.0.
    pub fn from_labels(labels: &[u8]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| f64::from(l.min(1))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Kish effective sample size; 1.0 for a one-hot vector.
    pub fn effective_size(&self) -> f64 {
        let s = self.sum();
        let sq = self.0.iter().map(|v| v * v).sum::<f64>();
        if sq == 0.0 {
            0.0
        } else {
            s * s / sq
        }
    }

    /// The complementary cluster 1 - s.
    pub fn complement(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|v| 1.0 - v).collect())
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Per-sample self-information values together with their weighted summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfInfoDistribution {
    pub values: Vec<f64>,
    pub weighted_mean: f64,
    pub weighted_std: f64,
}

impl SelfInfoDistribution {
    /// Weighted mean and standard deviation over `values` with weights `w`.
    pub fn from_weighted(values: Vec<f64>, w: &[f64]) -> Result<Self> {
        if values.len() != w.len() {
            return Err(Error::DimensionMismatch {
                what: "self-information weights",
                expected: values.len(),
                got: w.len(),
            });
        }
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateWeights(
                "weighted statistics need positive total weight",
            ));
        }
        let mean = values
            .iter()
            .zip(w)
            .map(|(v, wi)| v * wi)
            .sum::<f64>()
            / total;
        let var = values
            .iter()
            .zip(w)
            .map(|(v, wi)| wi * (v - mean) * (v - mean))
            .sum::<f64>()
            / total;
        Ok(Self {
            values,
            weighted_mean: mean,
            weighted_std: var.max(0.0).sqrt(),
        })
    }
}
