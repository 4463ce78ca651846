//! Uniform dispatch over the clustering methods: the self-information
//! optimizer and the comparison baselines all consume the same feature
//! matrix and produce binary labels plus optional soft weights.
//!
//! For the self-information method the labels are oriented so that 1 marks
//! the formulaic side: for count data the cluster whose members carry the
//! higher mean self-information under their own model, for continuous data
//! the lower. Baseline polarity is arbitrary and downstream agreement
//! scores ignore it.

use serde::{Deserialize, Serialize};

use crate::baselines::{dbscan, gmm_em, kmeans, BaselineConfig, CovarianceKind};
use crate::data::{FeatureMatrix, SelfInfoDistribution, WeightVector};
use crate::discrete::{self, DiscreteObjective, Side};
use crate::error::{Error, Result};
use crate::gaussian::{
    self, l2_norm_scores, Epsilon, GaussianObjective, GaussianScoreConfig,
    L2Objective,
};
use crate::optimize::{harden, optimize, OptimizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Self-information score minimization (the primary method).
    Info,
    KMeans,
    Gmm,
    Dbscan,
    /// Dispersion score over per-sample L2 norms.
    L2,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Info,
        Method::KMeans,
        Method::Gmm,
        Method::Dbscan,
        Method::L2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Info => "info",
            Method::KMeans => "kmeans",
            Method::Gmm => "gmm",
            Method::Dbscan => "dbscan",
            Method::L2 => "l2",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "info" => Ok(Method::Info),
            "kmeans" => Ok(Method::KMeans),
            "gmm" => Ok(Method::Gmm),
            "dbscan" => Ok(Method::Dbscan),
            "l2" => Ok(Method::L2),
            other => Err(Error::InvalidParam(format!(
                "unknown method '{other}' (expected info, kmeans, gmm, dbscan, or l2)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a method run can be configured with; each method reads only
/// its own part.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfig {
    pub optimizer: OptimizerConfig,
    pub baseline: BaselineConfig,
    /// Hardening threshold for soft assignments.
    pub threshold: f64,
    /// Weight the Gaussian/L2 score statistics by the soft assignment.
    pub weighted_stats: bool,
    /// Covariance regularization for the continuous model.
    pub epsilon: Option<f64>,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            baseline: BaselineConfig::default(),
            threshold: 0.5,
            weighted_stats: true,
            epsilon: None,
        }
    }
}

impl MethodConfig {
    /// Propagate one master seed to every seeded component.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.optimizer.seed = seed;
        self.baseline.seed = seed;
        self
    }

    fn gaussian_cfg(&self) -> GaussianScoreConfig {
        GaussianScoreConfig {
            epsilon: match self.epsilon {
                Some(e) => Epsilon::Fixed(e),
                None => Epsilon::Auto,
            },
            weighted_stats: self.weighted_stats,
        }
    }
}

/// Result of one method run on one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub method: Method,
    /// Binary labels; 1 is the formulaic side for `info`.
    pub labels: Vec<u8>,
    /// Soft assignment, for the optimizer-based methods.
    pub soft: Option<WeightVector>,
    /// Final objective value, for the optimizer-based methods.
    pub score: Option<f64>,
    /// Restarts that aborted, if any.
    pub failed_restarts: Vec<(usize, String)>,
}

fn flip(labels: &mut [u8]) {
    for l in labels.iter_mut() {
        *l = 1 - *l;
    }
}

/// Run one method on one dataset.
pub fn run_method(x: &FeatureMatrix, method: Method, cfg: &MethodConfig) -> Result<MethodRun> {
    match method {
        Method::Info => run_info(x, cfg),
        Method::L2 => run_l2(x, cfg),
        Method::KMeans => {
            let labels = kmeans(&x.real_view(), &cfg.baseline)?;
            Ok(MethodRun {
                method,
                labels,
                soft: None,
                score: None,
                failed_restarts: Vec::new(),
            })
        }
        Method::Gmm => {
            let fit = gmm_em(&x.real_view(), &cfg.baseline, CovarianceKind::Auto)?;
            Ok(MethodRun {
                method,
                labels: fit.labels,
                soft: None,
                score: None,
                failed_restarts: Vec::new(),
            })
        }
        Method::Dbscan => {
            let labels = dbscan(&x.real_view(), &cfg.baseline)?;
            Ok(MethodRun {
                method,
                labels,
                soft: None,
                score: None,
                failed_restarts: Vec::new(),
            })
        }
    }
}

fn run_info(x: &FeatureMatrix, cfg: &MethodConfig) -> Result<MethodRun> {
    match x {
        FeatureMatrix::Counts(c) => {
            let obj = DiscreteObjective::new(c);
            let opt = optimize(&obj, &cfg.optimizer)?;
            let mut labels = harden(&opt.weights, cfg.threshold);
            let mut soft = opt.weights.clone();
            if discrete::formulaic_side(c, &opt.weights)? == Side::Complement {
                flip(&mut labels);
                soft = soft.complement();
            }
            Ok(MethodRun {
                method: Method::Info,
                labels,
                soft: Some(soft),
                score: Some(opt.score),
                failed_restarts: opt.failed_restarts,
            })
        }
        FeatureMatrix::Real(r) => {
            let obj = GaussianObjective::with_config(r, cfg.gaussian_cfg());
            let opt = optimize(&obj, &cfg.optimizer)?;
            let mut labels = harden(&opt.weights, cfg.threshold);
            let mut soft = opt.weights.clone();
            let eps = obj.config().epsilon;
            if gaussian::formulaic_side(r, &opt.weights, eps)? == Side::Complement {
                flip(&mut labels);
                soft = soft.complement();
            }
            Ok(MethodRun {
                method: Method::Info,
                labels,
                soft: Some(soft),
                score: Some(opt.score),
                failed_restarts: opt.failed_restarts,
            })
        }
    }
}

fn run_l2(x: &FeatureMatrix, cfg: &MethodConfig) -> Result<MethodRun> {
    let real = x.real_view();
    let obj = L2Objective::new(&real, cfg.weighted_stats);
    let opt = optimize(&obj, &cfg.optimizer)?;
    let mut labels = harden(&opt.weights, cfg.threshold);
    let mut soft = opt.weights.clone();
    // polarity: the side with the steadier norms (lower weighted std) is 1
    let norms = l2_norm_scores(&real);
    let sel = SelfInfoDistribution::from_weighted(norms.clone(), soft.as_slice());
    let com = SelfInfoDistribution::from_weighted(norms, soft.complement().as_slice());
    if let (Ok(sel), Ok(com)) = (sel, com) {
        if sel.weighted_std > com.weighted_std {
            flip(&mut labels);
            soft = soft.complement();
        }
    }
    Ok(MethodRun {
        method: Method::L2,
        labels,
        soft: Some(soft),
        score: Some(opt.score),
        failed_restarts: opt.failed_restarts,
    })
}

/// Per-side self-information summary for a hardened clustering, exposed for
/// reporting.
pub fn info_summary(
    x: &FeatureMatrix,
    s: &WeightVector,
    cfg: &MethodConfig,
) -> Result<(SelfInfoDistribution, SelfInfoDistribution)> {
    match x {
        FeatureMatrix::Counts(c) => Ok((
            discrete::per_sample_self_information(c, s, Side::Selected)?,
            discrete::per_sample_self_information(c, s, Side::Complement)?,
        )),
        FeatureMatrix::Real(r) => {
            let eps = cfg.gaussian_cfg().epsilon;
            Ok((
                gaussian::per_sample_self_information(r, s, Side::Selected, eps)?,
                gaussian::per_sample_self_information(r, s, Side::Complement, eps)?,
            ))
        }
    }
}
