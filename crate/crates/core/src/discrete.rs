//! Soft categorical cluster model over count data.
//!
//! Cluster frequencies are weighted column sums under a soft assignment,
//! normalized into a probability vector after additive smoothing. The
//! assignment score is the summed negative log-likelihood of every sample
//! under the model of the cluster it leans toward.

use ndarray::ArrayView1;
use statrs::function::gamma::ln_gamma;

use crate::data::{CountMatrix, SelfInfoDistribution, WeightVector};
use crate::error::{Error, Result};

/// Additive smoothing mass; the per-column pseudocount is `SMOOTHING / d`.
pub const SMOOTHING: f64 = 0.5;
/// Probabilities are clamped into [PROB_FLOOR, 1 - PROB_FLOOR].
pub const PROB_FLOOR: f64 = 1e-9;

/// Which of the two soft clusters a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The cluster weighted by `s`.
    Selected,
    /// The cluster weighted by `1 - s`.
    Complement,
}

/// Categorical cluster model: raw soft frequencies `f` and the smoothed,
/// normalized probability vector `p`.
#[derive(Debug, Clone)]
pub struct SoftCategoricalModel {
    f: Vec<f64>,
    p: Vec<f64>,
    ln_p: Vec<f64>,
    ln_q: Vec<f64>,
}

/// Weighted column frequencies f_j = sum_i s_i x_ij / sum_i s_i, smoothed and
/// normalized into p.
pub fn soft_frequencies(x: &CountMatrix, s: &WeightVector) -> Result<SoftCategoricalModel> {
    if s.len() != x.n() {
        return Err(Error::DimensionMismatch {
            what: "assignment weights",
            expected: x.n(),
            got: s.len(),
        });
    }
    let total = s.sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights("all assignment weights are zero"));
    }
    let d = x.d();
    let data = x.data();
    let mut f = vec![0.0; d];
    for (i, row) in data.rows().into_iter().enumerate() {
        let w = s[i];
        if w == 0.0 {
            continue;
        }
        for (j, &v) in row.iter().enumerate() {
            f[j] += w * v;
        }
    }
    for fj in &mut f {
        *fj /= total;
    }
    Ok(SoftCategoricalModel::from_frequencies(f))
}

impl SoftCategoricalModel {
    fn from_frequencies(f: Vec<f64>) -> Self {
        let alpha = SMOOTHING / f.len() as f64;
        let smoothed: Vec<f64> = f.iter().map(|v| v + alpha).collect();
        let total: f64 = smoothed.iter().sum();
        let p: Vec<f64> = smoothed
            .iter()
            .map(|v| (v / total).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
            .collect();
        Self::with_probabilities(f, p)
    }

    /// Builds a model directly from given probabilities, bypassing smoothing.
    /// Intended for tests and diagnostics.
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyInput("probability vector"));
        }
        for &v in &p {
            if !v.is_finite() || v <= 0.0 || v >= 1.0 {
                return Err(Error::invalid(format!("probability {v} outside (0, 1)")));
            }
        }
        Ok(Self::with_probabilities(p.clone(), p))
    }

    fn with_probabilities(f: Vec<f64>, p: Vec<f64>) -> Self {
        let ln_p = p.iter().map(|v| v.ln()).collect();
        let ln_q = p.iter().map(|v| (1.0 - v).ln()).collect();
        Self { f, p, ln_p, ln_q }
    }

    /// Raw (pre-smoothing) soft frequencies.
    pub fn f(&self) -> &[f64] {
        &self.f
    }

    /// Smoothed, normalized probabilities.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }

    /// log P(x | p) with each column an independent Bernoulli draw.
    /// Rejects non-binary entries; counts belong to the binomial path.
    pub fn bernoulli_log_likelihood(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_len(x.len())?;
        for (j, &v) in x.iter().enumerate() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::NonBinaryData {
                    row: 0,
                    col: j,
                    value: v,
                });
            }
        }
        Ok(self.bernoulli_ll_unchecked(x))
    }

    fn bernoulli_ll_unchecked(&self, x: ArrayView1<'_, f64>) -> f64 {
        let mut sum = 0.0;
        for (j, &v) in x.iter().enumerate() {
            sum += v * self.ln_p[j] + (1.0 - v) * self.ln_q[j];
        }
        sum
    }

    /// log P(x | p, trials) with each column an independent Binomial draw of
    /// `trials[j]` attempts.
    pub fn binomial_log_likelihood(
        &self,
        x: ArrayView1<'_, f64>,
        trials: &[f64],
    ) -> Result<f64> {
        self.check_len(x.len())?;
        if trials.len() != x.len() {
            return Err(Error::DimensionMismatch {
                what: "trials",
                expected: x.len(),
                got: trials.len(),
            });
        }
        for (j, (&v, &t)) in x.iter().zip(trials).enumerate() {
            if v < 0.0 || v.fract() != 0.0 || t < 0.0 || t.fract() != 0.0 {
                return Err(Error::invalid(format!(
                    "binomial counts and trials must be non-negative integers (column {j})"
                )));
            }
            if v > t {
                return Err(Error::CountExceedsTrials {
                    col: j,
                    count: v,
                    trials: t,
                });
            }
        }
        let mut sum = 0.0;
        for (j, (&v, &t)) in x.iter().zip(trials).enumerate() {
            sum += ln_choose(t, v) + v * self.ln_p[j] + (t - v) * self.ln_q[j];
        }
        Ok(sum)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.d() {
            return Err(Error::DimensionMismatch {
                what: "sample row",
                expected: self.d(),
                got,
            });
        }
        Ok(())
    }
}

/// ln C(t, x) via the log-gamma function.
fn ln_choose(t: f64, x: f64) -> f64 {
    ln_gamma(t + 1.0) - ln_gamma(x + 1.0) - ln_gamma(t - x + 1.0)
}

/// Precomputed state for repeated score evaluations over one matrix.
///
/// Binary matrices take the Bernoulli path; anything else is Binomial with
/// per-row total counts as trials.
pub struct DiscreteObjective<'a> {
    x: &'a CountMatrix,
    trials: Vec<f64>,
    // ln C(trials_i, x_ij) cached per entry; values are bitwise identical to
    // recomputation, so cached and direct likelihoods agree exactly.
    lnc: Vec<f64>,
}

impl<'a> DiscreteObjective<'a> {
    pub fn new(x: &'a CountMatrix) -> Self {
        if x.is_binary() {
            Self {
                x,
                trials: Vec::new(),
                lnc: Vec::new(),
            }
        } else {
            let trials = x.row_totals();
            let data = x.data();
            let mut lnc = vec![0.0; x.n() * x.d()];
            for (i, row) in data.rows().into_iter().enumerate() {
                let t = trials[i];
                for (j, &v) in row.iter().enumerate() {
                    lnc[i * x.d() + j] = ln_choose(t, v);
                }
            }
            Self { x, trials, lnc }
        }
    }

    pub fn matrix(&self) -> &CountMatrix {
        self.x
    }

    /// Row log-likelihoods of every sample under `model`.
    pub fn log_likelihood_rows(&self, model: &SoftCategoricalModel) -> Vec<f64> {
        let data = self.x.data();
        let d = self.x.d();
        let mut out = Vec::with_capacity(self.x.n());
        if self.x.is_binary() {
            for row in data.rows() {
                out.push(model.bernoulli_ll_unchecked(row));
            }
        } else {
            for (i, row) in data.rows().into_iter().enumerate() {
                let t = self.trials[i];
                let mut sum = 0.0;
                for (j, &v) in row.iter().enumerate() {
                    sum += self.lnc[i * d + j] + v * model.ln_p[j] + (t - v) * model.ln_q[j];
                }
                out.push(sum);
            }
        }
        out
    }

    /// S(s) = -sum_i [ s_i log P(x_i | model(s)) + (1-s_i) log P(x_i | model(1-s)) ].
    pub fn score(&self, s: &WeightVector) -> Result<f64> {
        if s.len() != self.x.n() {
            return Err(Error::DimensionMismatch {
                what: "assignment weights",
                expected: self.x.n(),
                got: s.len(),
            });
        }
        let complement = s.complement();
        if s.sum() <= 0.0 || complement.sum() <= 0.0 {
            return Err(Error::DegenerateWeights(
                "both soft clusters need positive total weight",
            ));
        }
        let model_s = soft_frequencies(self.x, s)?;
        let model_c = soft_frequencies(self.x, &complement)?;
        let ll_s = self.log_likelihood_rows(&model_s);
        let ll_c = self.log_likelihood_rows(&model_c);
        let mut total = 0.0;
        for i in 0..self.x.n() {
            total += s[i] * ll_s[i] + (1.0 - s[i]) * ll_c[i];
        }
        Ok(-total)
    }
}

impl crate::optimize::Objective for DiscreteObjective<'_> {
    fn len(&self) -> usize {
        self.x.n()
    }

    fn eval(&self, s: &WeightVector) -> Result<f64> {
        self.score(s)
    }

    // Threshold sweep along the likelihood margin: rank samples by how much
    // the current selected-side model prefers them over the complement
    // model, then probe every bottom-k reassignment. The candidate where
    // the margin changes sign is the classic hard reassignment step; the
    // rest of the sweep covers the cases where moving the boundary pays for
    // the models it drags along.
    fn guided_candidates(&self, s: &WeightVector) -> Vec<WeightVector> {
        let complement = s.complement();
        if s.sum() <= 0.0 || complement.sum() <= 0.0 {
            return Vec::new();
        }
        let (Ok(model_s), Ok(model_c)) = (
            soft_frequencies(self.x, s),
            soft_frequencies(self.x, &complement),
        ) else {
            return Vec::new();
        };
        let ll_s = self.log_likelihood_rows(&model_s);
        let ll_c = self.log_likelihood_rows(&model_c);
        // ascending by ll_c - ll_s puts "wants selected" first
        let key: Vec<f64> = ll_s
            .iter()
            .zip(&ll_c)
            .map(|(&a, &b)| b - a)
            .collect();
        crate::optimize::prefix_candidates(&key)
    }
}

/// One-shot assignment score; see [`DiscreteObjective::score`].
pub fn discrete_score(x: &CountMatrix, s: &WeightVector) -> Result<f64> {
    DiscreteObjective::new(x).score(s)
}

/// Self-information -log P(x_i | model(side)) of every sample, with mean and
/// std weighted by the side's assignment weights.
pub fn per_sample_self_information(
    x: &CountMatrix,
    s: &WeightVector,
    side: Side,
) -> Result<SelfInfoDistribution> {
    if s.len() != x.n() {
        return Err(Error::DimensionMismatch {
            what: "assignment weights",
            expected: x.n(),
            got: s.len(),
        });
    }
    let weights = match side {
        Side::Selected => s.clone(),
        Side::Complement => s.complement(),
    };
    let model = soft_frequencies(x, &weights)?;
    let obj = DiscreteObjective::new(x);
    let values: Vec<f64> = obj
        .log_likelihood_rows(&model)
        .into_iter()
        .map(|ll| -ll)
        .collect();
    SelfInfoDistribution::from_weighted(values, weights.as_slice())
}

/// The side reported as formulaic: for count data that is the cluster with the
/// higher weighted mean self-information under its own model.
pub fn formulaic_side(x: &CountMatrix, s: &WeightVector) -> Result<Side> {
    let selected = per_sample_self_information(x, s, Side::Selected)?;
    let complement = per_sample_self_information(x, s, Side::Complement)?;
    if selected.weighted_mean >= complement.weighted_mean {
        Ok(Side::Selected)
    } else {
        Ok(Side::Complement)
    }
}
