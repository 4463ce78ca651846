//! Label-agreement scoring: MCC, its 50-100% normalization, interval
//! binning, and two-axis evaluation for data with independent ground truths.
//!
//! An unsupervised 2-way clustering carries no preferred label polarity, so
//! the normalized percent uses |MCC| and is invariant under swapping either
//! label vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 confusion table for binary labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

fn check_binary(labels: &[u8], what: &'static str) -> Result<()> {
    for (i, &v) in labels.iter().enumerate() {
        if v > 1 {
            return Err(Error::InvalidParam(format!(
                "{what} at index {i} is {v}; labels must be 0 or 1"
            )));
        }
    }
    Ok(())
}

impl ConfusionCounts {
    pub fn from_labels(pred: &[u8], truth: &[u8]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::DimensionMismatch {
                what: "label vectors",
                expected: truth.len(),
                got: pred.len(),
            });
        }
        if pred.is_empty() {
            return Err(Error::EmptyInput("label vectors"));
        }
        check_binary(pred, "predicted label")?;
        check_binary(truth, "truth label")?;
        let mut c = ConfusionCounts {
            true_pos: 0,
            true_neg: 0,
            false_pos: 0,
            false_neg: 0,
        };
        for (&p, &t) in pred.iter().zip(truth) {
            match (p, t) {
                (1, 1) => c.true_pos += 1,
                (0, 0) => c.true_neg += 1,
                (1, 0) => c.false_pos += 1,
                _ => c.false_neg += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    /// (TP·TN − FP·FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)); a zero
    /// denominator (a constant label vector) maps to 0 by convention.
    pub fn mcc(&self) -> f64 {
        let tp = self.true_pos as f64;
        let tn = self.true_neg as f64;
        let fp = self.false_pos as f64;
        let fn_ = self.false_neg as f64;
        let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if denom == 0.0 {
            return 0.0;
        }
        (tp * tn - fp * fn_) / denom.sqrt()
    }
}

/// MCC of predicted against true labels.
pub fn mcc(pred: &[u8], truth: &[u8]) -> Result<f64> {
    Ok(ConfusionCounts::from_labels(pred, truth)?.mcc())
}

/// Raw MCC together with its normalized percent and interval bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MccReport {
    pub mcc: f64,
    /// 50 + 50·|mcc|: 50% is chance-level overlap, 100% is a perfect match
    /// up to label polarity.
    pub percent: f64,
    pub bin: String,
}

/// Interval bins in ascending order, for histograms.
pub const BIN_LABELS: [&str; 5] = ["50-74", "75-84", "85-89", "90-95", "96-100"];

/// The reporting intervals for normalized percents.
pub fn interval_bin(percent: f64) -> &'static str {
    if percent >= 96.0 {
        "96-100"
    } else if percent >= 90.0 {
        "90-95"
    } else if percent >= 85.0 {
        "85-89"
    } else if percent >= 75.0 {
        "75-84"
    } else {
        "50-74"
    }
}

pub fn normalized_mcc(pred: &[u8], truth: &[u8]) -> Result<MccReport> {
    let raw = mcc(pred, truth)?;
    let percent = 50.0 + 50.0 * raw.abs();
    Ok(MccReport {
        mcc: raw,
        percent,
        bin: interval_bin(percent).to_string(),
    })
}

/// Agreement with two independent ground-truth axes, side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualAxisReport {
    pub distribution: MccReport,
    pub formulaic: MccReport,
}

pub fn dual_axis_eval(pred: &[u8], y_dist: &[u8], y_form: &[u8]) -> Result<DualAxisReport> {
    Ok(DualAxisReport {
        distribution: normalized_mcc(pred, y_dist)?,
        formulaic: normalized_mcc(pred, y_form)?,
    })
}
