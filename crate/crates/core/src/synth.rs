//! Synthetic dataset generators with planted structure, and a benchmark
//! harness that sweeps spec grids over methods with repeated seeds.
//!
//! Three families: a categorical one (elevated activations plus enforced
//! pairwise correlations), a zero-mean Gaussian one (eigenvalue contrast
//! with optional overlap noise), and an equal-entropy one that separates
//! distributional difference from formulaic structure via two independent
//! label axes.

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{CountMatrix, FeatureMatrix, RealMatrix};
use crate::error::{Error, Result};
use crate::eval::normalized_mcc;
use crate::method::{run_method, Method, MethodConfig};
use crate::seed::{mix2, mix3};

/// Binary data where the formulaic class gets elevated activations on a
/// dimension subset plus `m` enforced equal-value pairs per sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoricalSpec {
    /// Samples per class (total rows = 2 * n_per_class).
    pub n_per_class: usize,
    pub d: usize,
    /// Base activation probability, all dimensions, both classes.
    pub p: f64,
    /// Formulaic bias: the formulaic class activates designated dimensions
    /// with probability p + f.
    pub f: f64,
    /// Fraction of dimensions designated formulaic (count = ceil(rho * d)).
    pub rho: f64,
    /// Enforced correlation pairs per formulaic sample, drawn disjointly
    /// from the designated dimensions; the first member's value is copied
    /// onto the second, which leaves every marginal unchanged.
    pub m: usize,
    pub seed: u64,
}

impl CategoricalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 || self.d == 0 {
            return Err(Error::InvalidParam(
                "categorical spec needs n_per_class >= 1 and d >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p) || self.f < 0.0 || self.p + self.f > 1.0 {
            return Err(Error::InvalidParam(format!(
                "need 0 <= p <= p + f <= 1, got p = {}, f = {}",
                self.p, self.f
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParam(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        let max_pairs = (self.rho * self.d as f64 / 2.0).floor() as usize;
        if self.m > max_pairs {
            return Err(Error::InvalidParam(format!(
                "m = {} exceeds floor(rho * d / 2) = {max_pairs}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn formulaic_dim_count(&self) -> usize {
        (self.rho * self.d as f64).ceil() as usize
    }
}

/// Two zero-mean Gaussian classes with diagonal covariances: the formulaic
/// class uses eigenvalue lambda1 (with a `noise` fraction overwritten by
/// lambda2), the other class lambda2 everywhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianSpec {
    /// Samples per class (total rows = 2 * n_per_class).
    pub n_per_class: usize,
    pub d: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Fraction of the formulaic class's eigenvalues replaced by lambda2
    /// (count = ceil(noise * d)); 1 makes the classes identical.
    pub noise: f64,
    pub seed: u64,
}

impl GaussianSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 || self.d == 0 {
            return Err(Error::InvalidParam(
                "gaussian spec needs n_per_class >= 1 and d >= 1".into(),
            ));
        }
        if self.lambda1 <= 0.0 || self.lambda2 <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "eigenvalues must be positive, got lambda1 = {}, lambda2 = {}",
                self.lambda1, self.lambda2
            )));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::InvalidParam(format!(
                "noise must lie in [0, 1], got {}",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Two classes with identical overall entropy (activation probabilities p
/// and 0.1p swapped across a half/half dimension split) plus an independent
/// formulaic axis: half of each class gets +delta_p on a shared dimension
/// subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqualEntropySpec {
    /// Total samples; must be divisible by 4 so both label axes balance.
    pub n: usize,
    /// Dimensions; must be even for the half/half probability swap.
    pub d: usize,
    pub p: f64,
    pub delta_p: f64,
    /// Fraction of dimensions in the shared formulaic subset.
    pub rho: f64,
    pub seed: u64,
}

impl EqualEntropySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 4 != 0 {
            return Err(Error::InvalidParam(format!(
                "n must be a positive multiple of 4 for balanced label axes, got {}",
                self.n
            )));
        }
        if self.d < 2 || self.d % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "d must be even for the half/half probability swap, got {}",
                self.d
            )));
        }
        if self.p < 0.0 || self.delta_p < 0.0 || self.p + self.delta_p > 1.0 {
            return Err(Error::InvalidParam(format!(
                "need 0 <= p and p + delta_p <= 1, got p = {}, delta_p = {}",
                self.p, self.delta_p
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParam(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// Generated data with ground truth. `labels` is the primary axis
/// (formulaic membership, or the distributional class for the equal-entropy
/// family, whose formulaic axis arrives in `secondary`).
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub x: FeatureMatrix,
    pub labels: Vec<u8>,
    pub secondary: Option<Vec<u8>>,
}

fn feature_ids(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}

/// Draw `k` distinct indices below `n`, sorted.
fn distinct_sorted(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = sample(rng, n, k).into_iter().collect();
    v.sort_unstable();
    v
}

pub fn gen_categorical(spec: &CategoricalSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_per_class;
    let d = spec.d;
    let form_dims = distinct_sorted(&mut rng, d, spec.formulaic_dim_count());
    let is_form_dim = {
        let mut mask = vec![false; d];
        for &j in &form_dims {
            mask[j] = true;
        }
        mask
    };
    let p_form = spec.p + spec.f;

    let mut data = Array2::<f64>::zeros((2 * n, d));
    let mut labels = vec![0u8; 2 * n];
    for i in 0..n {
        for j in 0..d {
            data[[i, j]] = f64::from(rng.random::<f64>() < spec.p);
        }
    }
    for i in n..2 * n {
        labels[i] = 1;
        for j in 0..d {
            let pj = if is_form_dim[j] { p_form } else { spec.p };
            data[[i, j]] = f64::from(rng.random::<f64>() < pj);
        }
        if spec.m > 0 {
            // disjoint pairs, redrawn per sample; copying the first member's
            // value onto the second preserves marginals exactly
            let picks = sample(&mut rng, form_dims.len(), 2 * spec.m);
            for pair in 0..spec.m {
                let src = form_dims[picks.index(2 * pair)];
                let dst = form_dims[picks.index(2 * pair + 1)];
                data[[i, dst]] = data[[i, src]];
            }
        }
    }
    Ok(LabeledDataset {
        x: FeatureMatrix::Counts(CountMatrix::new(data, feature_ids(d))?),
        labels,
        secondary: None,
    })
}

pub fn gen_gaussian(spec: &GaussianSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_per_class;
    let d = spec.d;
    let mut eig1 = vec![spec.lambda1; d];
    let replace = (spec.noise * d as f64).ceil() as usize;
    for &j in &distinct_sorted(&mut rng, d, replace.min(d)) {
        eig1[j] = spec.lambda2;
    }
    let sd1: Vec<f64> = eig1.iter().map(|v| v.sqrt()).collect();
    let sd2 = spec.lambda2.sqrt();

    let mut data = Array2::<f64>::zeros((2 * n, d));
    let mut labels = vec![0u8; 2 * n];
    for i in 0..n {
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            data[[i, j]] = sd2 * z;
        }
    }
    for i in n..2 * n {
        labels[i] = 1;
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            data[[i, j]] = sd1[j] * z;
        }
    }
    Ok(LabeledDataset {
        x: FeatureMatrix::Real(RealMatrix::new(data)?),
        labels,
        secondary: None,
    })
}

pub fn gen_equal_entropy(spec: &EqualEntropySpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let d = spec.d;
    let s_high = distinct_sorted(&mut rng, d, d / 2);
    let mut in_high = vec![false; d];
    for &j in &s_high {
        in_high[j] = true;
    }
    let s_form = distinct_sorted(&mut rng, d, (spec.rho * d as f64).ceil() as usize);
    let mut in_form = vec![false; d];
    for &j in &s_form {
        in_form[j] = true;
    }

    let quarter = n / 4;
    let mut data = Array2::<f64>::zeros((n, d));
    let mut y_dist = vec![0u8; n];
    let mut y_form = vec![0u8; n];
    for i in 0..n {
        let class_b = i >= n / 2;
        // first half of each class block carries the formulaic increment
        let formulaic = (i % (n / 2)) < quarter;
        y_dist[i] = u8::from(class_b);
        y_form[i] = u8::from(formulaic);
        for j in 0..d {
            let base = if in_high[j] != class_b {
                // class A on its high half, class B on its own high half
                spec.p
            } else {
                0.1 * spec.p
            };
            let pj = if formulaic && in_form[j] {
                base + spec.delta_p
            } else {
                base
            };
            data[[i, j]] = f64::from(rng.random::<f64>() < pj);
        }
    }
    Ok(LabeledDataset {
        x: FeatureMatrix::Counts(CountMatrix::new(data, feature_ids(d))?),
        labels: y_dist,
        secondary: Some(y_form),
    })
}

/// Any of the three generator families, tagged for config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SyntheticSpec {
    Categorical(CategoricalSpec),
    Gaussian(GaussianSpec),
    #[serde(rename = "equal_entropy")]
    EqualEntropy(EqualEntropySpec),
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SyntheticSpec::Categorical(s) => s.validate(),
            SyntheticSpec::Gaussian(s) => s.validate(),
            SyntheticSpec::EqualEntropy(s) => s.validate(),
        }
    }

    pub fn generate(&self) -> Result<LabeledDataset> {
        match self {
            SyntheticSpec::Categorical(s) => gen_categorical(s),
            SyntheticSpec::Gaussian(s) => gen_gaussian(s),
            SyntheticSpec::EqualEntropy(s) => gen_equal_entropy(s),
        }
    }

    pub fn with_seed(&self, seed: u64) -> SyntheticSpec {
        let mut out = self.clone();
        match &mut out {
            SyntheticSpec::Categorical(s) => s.seed = seed,
            SyntheticSpec::Gaussian(s) => s.seed = seed,
            SyntheticSpec::EqualEntropy(s) => s.seed = seed,
        }
        out
    }
}

/// One named point of a benchmark grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub name: String,
    pub spec: SyntheticSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    /// Independent repeats per cell; each repeat draws a fresh dataset.
    pub repeats: usize,
    /// Master seed; per-repeat dataset seeds derive from (seed, cell, repeat)
    /// and are shared by all methods, so comparisons are paired.
    pub seed: u64,
    pub method_config: MethodConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            repeats: 100,
            seed: 0,
            method_config: MethodConfig::default(),
        }
    }
}

/// Aggregate of one (cell, method) combination.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: String,
    pub method: String,
    pub repeats_requested: usize,
    pub repeats_done: usize,
    /// Mean normalized MCC against the primary labels.
    pub mean_percent: f64,
    /// Sample standard deviation (0 for a single repeat).
    pub std_percent: f64,
    /// Same statistics against the secondary axis, when the generator
    /// provides one.
    pub secondary_mean_percent: Option<f64>,
    pub secondary_std_percent: Option<f64>,
    /// True when every repeat succeeded.
    pub complete: bool,
    pub failures: Vec<String>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run every cell with every method, `repeats` times each.
///
/// Deterministic for a fixed config: dataset and method seeds derive from
/// the master seed and the (cell, repeat) coordinates, repeats run as
/// independent jobs, and aggregation is sequential in job order.
pub fn run_benchmark(
    cells: &[BenchmarkCell],
    methods: &[Method],
    cfg: &BenchmarkConfig,
) -> Result<Vec<CellSummary>> {
    if cells.is_empty() || methods.is_empty() || cfg.repeats == 0 {
        return Err(Error::EmptyInput(
            "benchmark needs cells, methods, and repeats >= 1",
        ));
    }
    for cell in cells {
        cell.spec.validate()?;
    }

    struct RepeatOutcome {
        cell: usize,
        // per method: Ok((primary percent, secondary percent)) or message
        per_method: Vec<std::result::Result<(f64, Option<f64>), String>>,
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.repeats).map(move |r| (c, r)))
        .collect();

    let outcomes: Vec<RepeatOutcome> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let dataset_seed = mix3(cfg.seed, c as u64, r as u64);
            let spec = cells[c].spec.with_seed(dataset_seed);
            let data = spec.generate();
            let per_method = methods
                .iter()
                .enumerate()
                .map(|(mi, &method)| match &data {
                    Err(e) => Err(format!("generator: {e}")),
                    Ok(ds) => {
                        let mcfg = cfg
                            .method_config
                            .clone()
                            .with_seed(mix2(dataset_seed, mi as u64));
                        match run_method(&ds.x, method, &mcfg) {
                            Err(e) => Err(format!("{method}: {e}")),
                            Ok(run) => {
                                let primary = normalized_mcc(&run.labels, &ds.labels)
                                    .map_err(|e| e.to_string())?;
                                let secondary = match &ds.secondary {
                                    Some(y) => Some(
                                        normalized_mcc(&run.labels, y)
                                            .map_err(|e| e.to_string())?
                                            .percent,
                                    ),
                                    None => None,
                                };
                                Ok((primary.percent, secondary))
                            }
                        }
                    }
                })
                .collect();
            RepeatOutcome { cell: c, per_method }
        })
        .collect();

    let mut summaries = Vec::with_capacity(cells.len() * methods.len());
    for (c, cell) in cells.iter().enumerate() {
        for (mi, &method) in methods.iter().enumerate() {
            let mut primary = Vec::new();
            let mut secondary = Vec::new();
            let mut failures = Vec::new();
            for o in outcomes.iter().filter(|o| o.cell == c) {
                match &o.per_method[mi] {
                    Ok((p, s)) => {
                        primary.push(*p);
                        if let Some(s) = s {
                            secondary.push(*s);
                        }
                    }
                    Err(msg) => failures.push(msg.clone()),
                }
            }
            let (mean, std) = mean_std(&primary);
            let (smean, sstd) = if secondary.is_empty() {
                (None, None)
            } else {
                let (a, b) = mean_std(&secondary);
                (Some(a), Some(b))
            };
            summaries.push(CellSummary {
                cell: cell.name.clone(),
                method: method.name().to_string(),
                repeats_requested: cfg.repeats,
                repeats_done: primary.len(),
                mean_percent: mean,
                std_percent: std,
                secondary_mean_percent: smean,
                secondary_std_percent: sstd,
                complete: failures.is_empty(),
                failures,
            });
        }
    }
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::WeightVector;

    #[test]
    fn categorical_structure_and_marginals() {
        let spec = CategoricalSpec {
            n_per_class: 100,
            d: 200,
            p: 0.05,
            f: 0.3,
            rho: 0.3,
            m: 5,
            seed: 7,
        };
        let ds = gen_categorical(&spec).unwrap();
        assert_eq!(ds.x.n(), 200);
        assert_eq!(ds.x.d(), 200);
        assert_eq!(ds.labels[..100], vec![0u8; 100][..]);
        assert_eq!(ds.labels[100..], vec![1u8; 100][..]);

        let counts = match &ds.x {
            FeatureMatrix::Counts(c) => c,
            _ => panic!("expected counts"),
        };
        assert!(counts.is_binary());
        let data = counts.data();

        // pooled uniform-class mean: n*d Bernoulli(p) draws
        let uni_mean = data
            .rows()
            .into_iter()
            .take(100)
            .flat_map(|r| r.to_vec())
            .sum::<f64>()
            / 20_000.0;
        let se = (0.05f64 * 0.95 / 20_000.0).sqrt();
        assert!(
            (uni_mean - 0.05).abs() < 3.0 * se,
            "uniform mean {uni_mean}"
        );

        // pooled formulaic-class mean splits into elevated and base groups;
        // identify the elevated dimensions from the uniform/formulaic gap
        let mut col_uni = vec![0.0; 200];
        let mut col_form = vec![0.0; 200];
        for (i, row) in data.rows().into_iter().enumerate() {
            for j in 0..200 {
                if i < 100 {
                    col_uni[j] += row[j];
                } else {
                    col_form[j] += row[j];
                }
            }
        }
        let mut elevated = 0;
        let mut elevated_sum = 0.0;
        let mut base_sum = 0.0;
        for j in 0..200 {
            if col_form[j] - col_uni[j] > 100.0 * 0.15 {
                elevated += 1;
                elevated_sum += col_form[j];
            } else {
                base_sum += col_form[j];
            }
        }
        assert_eq!(elevated, 60, "ceil(0.3 * 200) formulaic dimensions");
        let el_mean = elevated_sum / (100.0 * 60.0);
        // enforced pairs leave marginals intact but correlate entries; the
        // pooled SE gets a small inflation, folded into the factor below
        let el_se = (0.35f64 * 0.65 / 6000.0).sqrt() * 1.1;
        assert!((el_mean - 0.35).abs() < 3.0 * el_se, "elevated mean {el_mean}");
        let base_mean = base_sum / (100.0 * 140.0);
        let base_se = (0.05f64 * 0.95 / 14_000.0).sqrt();
        assert!((base_mean - 0.05).abs() < 3.0 * base_se, "base mean {base_mean}");
    }

    #[test]
    fn enforced_pairs_double_row_sum_variance() {
        // with every dimension paired (rho = 1, m = d/2), row sums are sums
        // of d/2 duplicated Bernoullis: variance 2 d p q instead of d p q
        let spec = CategoricalSpec {
            n_per_class: 4000,
            d: 20,
            p: 0.5,
            f: 0.0,
            rho: 1.0,
            m: 10,
            seed: 11,
        };
        let ds = gen_categorical(&spec).unwrap();
        let counts = match &ds.x {
            FeatureMatrix::Counts(c) => c,
            _ => unreachable!(),
        };
        let sums: Vec<f64> = counts.data().rows().into_iter().map(|r| r.sum()).collect();
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
        };
        let v_uni = var(&sums[..4000]);
        let v_form = var(&sums[4000..]);
        // targets: 20 * 0.25 = 5 and 2 * 5 = 10
        assert!((v_uni - 5.0).abs() < 0.5, "uniform variance {v_uni}");
        assert!((v_form - 10.0).abs() < 1.0, "paired variance {v_form}");
    }

    #[test]
    fn categorical_extreme_case_is_exact() {
        let spec = CategoricalSpec {
            n_per_class: 10,
            d: 6,
            p: 0.0,
            f: 1.0,
            rho: 1.0,
            m: 3,
            seed: 1,
        };
        let ds = gen_categorical(&spec).unwrap();
        let data = match &ds.x {
            FeatureMatrix::Counts(c) => c.data().to_owned(),
            _ => unreachable!(),
        };
        for i in 0..10 {
            assert!(data.row(i).iter().all(|&v| v == 0.0));
            assert!(data.row(10 + i).iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn categorical_rejects_bad_specs() {
        let mut spec = CategoricalSpec {
            n_per_class: 10,
            d: 10,
            p: 0.5,
            f: 0.6,
            rho: 0.5,
            m: 0,
            seed: 0,
        };
        assert!(gen_categorical(&spec).is_err()); // p + f > 1
        spec.f = 0.2;
        spec.m = 3; // floor(0.5 * 10 / 2) = 2
        assert!(gen_categorical(&spec).is_err());
        spec.m = 2;
        assert!(gen_categorical(&spec).is_ok());
    }

    #[test]
    fn gaussian_variances_match_targets() {
        let spec = GaussianSpec {
            n_per_class: 4000,
            d: 10,
            lambda1: 10.0,
            lambda2: 30.0,
            noise: 0.0,
            seed: 3,
        };
        let ds = gen_gaussian(&spec).unwrap();
        let data = match &ds.x {
            FeatureMatrix::Real(r) => r.data().to_owned(),
            _ => unreachable!(),
        };
        for (start, lambda) in [(0usize, 30.0f64), (4000, 10.0)] {
            for j in 0..10 {
                let col: Vec<f64> = (start..start + 4000).map(|i| data[[i, j]]).collect();
                let mean = col.iter().sum::<f64>() / 4000.0;
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4000.0;
                let se = lambda * (2.0 / 4000.0f64).sqrt();
                assert!(
                    (var - lambda).abs() < 3.0 * se,
                    "start {start} col {j}: var {var} vs {lambda}"
                );
            }
        }
        // formulaic class is labeled 1
        assert!(ds.labels[..4000].iter().all(|&l| l == 0));
        assert!(ds.labels[4000..].iter().all(|&l| l == 1));
    }

    #[test]
    fn gaussian_full_noise_equalizes_classes() {
        let spec = GaussianSpec {
            n_per_class: 2000,
            d: 8,
            lambda1: 10.0,
            lambda2: 30.0,
            noise: 1.0,
            seed: 4,
        };
        let ds = gen_gaussian(&spec).unwrap();
        let data = match &ds.x {
            FeatureMatrix::Real(r) => r.data().to_owned(),
            _ => unreachable!(),
        };
        for j in 0..8 {
            let var_of = |start: usize| {
                let col: Vec<f64> = (start..start + 2000).map(|i| data[[i, j]]).collect();
                let mean = col.iter().sum::<f64>() / 2000.0;
                col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 2000.0
            };
            let se = 30.0 * (2.0 / 2000.0f64).sqrt();
            assert!((var_of(0) - 30.0).abs() < 3.0 * se);
            assert!((var_of(2000) - 30.0).abs() < 3.0 * se);
        }
    }

    #[test]
    fn equal_entropy_axes_are_balanced_and_entropies_match() {
        let spec = EqualEntropySpec {
            n: 2000,
            d: 40,
            p: 0.3,
            delta_p: 0.0,
            rho: 0.1,
            seed: 5,
        };
        let ds = gen_equal_entropy(&spec).unwrap();
        let y_dist = &ds.labels;
        let y_form = ds.secondary.as_ref().unwrap();
        // exact balance of the formulaic axis within each class
        for class in [0u8, 1] {
            let total: usize = y_dist.iter().filter(|&&c| c == class).count();
            let formulaic: usize = y_dist
                .iter()
                .zip(y_form)
                .filter(|(&c, &f)| c == class && f == 1)
                .count();
            assert_eq!(total, 1000);
            assert_eq!(formulaic, 500);
        }

        // plug-in entropy per class, summed over independent dimensions
        let data = match &ds.x {
            FeatureMatrix::Counts(c) => c.data().to_owned(),
            _ => unreachable!(),
        };
        let h = |class: u8| {
            let rows: Vec<usize> = (0..2000).filter(|&i| y_dist[i] == class).collect();
            (0..40)
                .map(|j| {
                    let p = rows.iter().map(|&i| data[[i, j]]).sum::<f64>() / rows.len() as f64;
                    if p <= 0.0 || p >= 1.0 {
                        0.0
                    } else {
                        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
                    }
                })
                .sum::<f64>()
        };
        let (ha, hb) = (h(0), h(1));
        assert!(
            (ha - hb).abs() / ha.max(hb) < 0.02,
            "entropies {ha} vs {hb}"
        );
    }

    #[test]
    fn equal_entropy_rejects_bad_shapes() {
        let spec = EqualEntropySpec {
            n: 10,
            d: 40,
            p: 0.3,
            delta_p: 0.0,
            rho: 0.1,
            seed: 0,
        };
        assert!(gen_equal_entropy(&spec).is_err());
        let spec = EqualEntropySpec {
            n: 8,
            d: 5,
            p: 0.3,
            delta_p: 0.0,
            rho: 0.1,
            seed: 0,
        };
        assert!(gen_equal_entropy(&spec).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = CategoricalSpec {
            n_per_class: 20,
            d: 30,
            p: 0.2,
            f: 0.3,
            rho: 0.4,
            m: 2,
            seed: 9,
        };
        let a = gen_categorical(&spec).unwrap();
        let b = gen_categorical(&spec).unwrap();
        match (&a.x, &b.x) {
            (FeatureMatrix::Counts(ca), FeatureMatrix::Counts(cb)) => {
                assert_eq!(ca.data(), cb.data());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn true_split_scores_better_than_mixed_split() {
        // sanity bridge from generator to score: the planted assignment beats
        // a half-shuffled one under the discrete score
        let spec = CategoricalSpec {
            n_per_class: 50,
            d: 40,
            p: 0.05,
            f: 0.4,
            rho: 0.5,
            m: 5,
            seed: 13,
        };
        let ds = gen_categorical(&spec).unwrap();
        let counts = match &ds.x {
            FeatureMatrix::Counts(c) => c,
            _ => unreachable!(),
        };
        let truth: Vec<f64> = ds.labels.iter().map(|&l| f64::from(l)).collect();
        let mut mixed = truth.clone();
        for i in 0..25 {
            mixed.swap(i, 50 + i);
        }
        let s_true = crate::discrete::discrete_score(counts, &WeightVector::new(truth).unwrap());
        let s_mixed = crate::discrete::discrete_score(counts, &WeightVector::new(mixed).unwrap());
        assert!(s_true.unwrap() < s_mixed.unwrap());
    }

    #[test]
    fn benchmark_is_deterministic_and_separates_easy_cells() {
        let cells = vec![BenchmarkCell {
            name: "easy".into(),
            spec: SyntheticSpec::Categorical(CategoricalSpec {
                n_per_class: 20,
                d: 12,
                p: 0.05,
                f: 0.9,
                rho: 0.5,
                m: 0,
                seed: 0,
            }),
        }];
        let cfg = BenchmarkConfig {
            repeats: 3,
            seed: 42,
            method_config: MethodConfig::default(),
        };
        let methods = [Method::Info, Method::KMeans];
        let a = run_benchmark(&cells, &methods, &cfg).unwrap();
        let b = run_benchmark(&cells, &methods, &cfg).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean_percent.to_bits(), y.mean_percent.to_bits());
            assert_eq!(x.std_percent.to_bits(), y.std_percent.to_bits());
            assert_eq!(x.repeats_done, 3);
            assert!(x.complete);
        }
        let info = &a[0];
        assert_eq!(info.method, "info");
        assert!(
            info.mean_percent >= 95.0,
            "easy cell should separate: {}",
            info.mean_percent
        );
    }
}
