//! Comparison clusterers run on the same feature matrices as the
//! self-information method: k-means, a two-component Gaussian mixture fitted
//! by EM, and DBSCAN.
//!
//! All three produce binary labels. Polarity is arbitrary (downstream
//! agreement scores are swap-invariant); DBSCAN maps its largest cluster to
//! 1 and everything else, noise included, to 0.

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::RealMatrix;
use crate::error::{Error, Result};
use crate::linalg::cholesky;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Number of clusters; this artifact always separates two.
    pub k: usize,
    /// DBSCAN radius; `None` derives it from the k-distance heuristic.
    pub eps: Option<f64>,
    /// DBSCAN core-point threshold (neighbourhood includes the point itself).
    pub min_pts: usize,
    pub kmeans_max_iters: usize,
    pub em_max_iters: usize,
    pub em_tol: f64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            k: 2,
            eps: None,
            min_pts: 4,
            kmeans_max_iters: 300,
            em_max_iters: 200,
            em_tol: 1e-6,
            seed: 0,
        }
    }
}

fn dist2(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// k-means++ seeding: spread initial centers by squared-distance sampling.
fn seed_centers(x: &RealMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Array1<f64>> {
    let n = x.n();
    let data = x.data();
    let mut centers: Vec<Array1<f64>> = Vec::with_capacity(k);
    centers.push(data.row(rng.random_range(0..n)).to_owned());
    let mut d2 = vec![0.0; n];
    while centers.len() < k {
        let mut total = 0.0;
        for (i, row) in data.rows().into_iter().enumerate() {
            let mut best = f64::INFINITY;
            for c in &centers {
                best = best.min(dist2(row, c.view()));
            }
            d2[i] = best;
            total += best;
        }
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                u -= w;
                if u <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(data.row(idx).to_owned());
    }
    centers
}

/// Lloyd's algorithm with k-means++ seeding. An emptied cluster is reseeded
/// to the point farthest from its assigned center.
pub fn kmeans(x: &RealMatrix, cfg: &BaselineConfig) -> Result<Vec<u8>> {
    let n = x.n();
    let k = cfg.k;
    if k < 1 || k > 255 {
        return Err(Error::InvalidParam(format!("k = {k} is out of range")));
    }
    if n < k {
        return Err(Error::InvalidParam(format!(
            "k-means needs at least k = {k} samples, got {n}"
        )));
    }
    let data = x.data();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers = seed_centers(x, k, &mut rng);
    let mut labels = vec![0u8; n];

    for _ in 0..cfg.kmeans_max_iters {
        let mut changed = false;
        for (i, row) in data.rows().into_iter().enumerate() {
            let mut best_c = 0u8;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = dist2(row, center.view());
                if d < best_d {
                    best_d = d;
                    best_c = c as u8;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l as usize] += 1;
        }
        let mut reseeded = false;
        for c in 0..k {
            if counts[c] == 0 {
                // farthest point from its own center becomes the new center
                let mut far_i = 0;
                let mut far_d = -1.0;
                for (i, row) in data.rows().into_iter().enumerate() {
                    let d = dist2(row, centers[labels[i] as usize].view());
                    if d > far_d {
                        far_d = d;
                        far_i = i;
                    }
                }
                if far_d <= 0.0 {
                    // all points coincide with their centers; nothing to split
                    continue;
                }
                centers[c] = data.row(far_i).to_owned();
                reseeded = true;
            }
        }
        if reseeded {
            continue;
        }

        for (c, center) in centers.iter_mut().enumerate() {
            if counts[c] == 0 {
                continue;
            }
            center.fill(0.0);
            for (i, row) in data.rows().into_iter().enumerate() {
                if labels[i] as usize == c {
                    *center += &row;
                }
            }
            *center /= counts[c] as f64;
        }

        if !changed {
            break;
        }
    }
    Ok(labels)
}

/// Which covariance structure the mixture components use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovarianceKind {
    /// Full when n > d, diagonal otherwise.
    Auto,
    Full,
    Diagonal,
}

#[derive(Debug, Clone)]
pub struct GmmFit {
    pub labels: Vec<u8>,
    /// Log-likelihood after each E-step; non-decreasing up to round-off.
    pub trace: Vec<f64>,
    /// Structure actually used, after any fallback.
    pub used: CovarianceKind,
}

enum Component {
    Full {
        mean: Array1<f64>,
        chol: crate::linalg::Cholesky,
    },
    Diagonal {
        mean: Array1<f64>,
        var: Vec<f64>,
    },
}

impl Component {
    fn log_pdf(&self, row: ArrayView1<'_, f64>, scratch: &mut [f64]) -> f64 {
        const LN_2PI: f64 = 1.8378770664093453;
        match self {
            Component::Full { mean, chol } => {
                let d = mean.len() as f64;
                let diff = &row - mean;
                -0.5 * (d * LN_2PI + chol.log_det() + chol.quad_form(diff.view(), scratch))
            }
            Component::Diagonal { mean, var } => {
                let mut acc = 0.0;
                for j in 0..mean.len() {
                    let z = row[j] - mean[j];
                    acc += z * z / var[j] + var[j].ln() + LN_2PI;
                }
                -0.5 * acc
            }
        }
    }
}

/// Two-component Gaussian mixture via EM; labels are responsibility argmax.
///
/// Full covariances get an eps * I ridge each M-step; if factorization still
/// fails after escalating the ridge, the fit falls back to diagonal
/// covariances for the rest of the run.
pub fn gmm_em(x: &RealMatrix, cfg: &BaselineConfig, kind: CovarianceKind) -> Result<GmmFit> {
    let n = x.n();
    let d = x.d();
    let k = cfg.k;
    if n < k {
        return Err(Error::InvalidParam(format!(
            "mixture needs at least k = {k} samples, got {n}"
        )));
    }
    let mut use_full = match kind {
        CovarianceKind::Auto => n > d,
        CovarianceKind::Full => true,
        CovarianceKind::Diagonal => false,
    };
    let data = x.data();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // global variance sets the regularization scale
    let mut global_mean = Array1::<f64>::zeros(d);
    for row in data.rows() {
        global_mean += &row;
    }
    global_mean /= n as f64;
    let mut global_var = vec![0.0; d];
    for row in data.rows() {
        for j in 0..d {
            let z = row[j] - global_mean[j];
            global_var[j] += z * z;
        }
    }
    for v in global_var.iter_mut() {
        *v = (*v / n as f64).max(1e-12);
    }
    let var_scale = global_var.iter().sum::<f64>() / d as f64;
    let base_eps = 1e-6 * var_scale;

    let means_init = seed_centers(x, k, &mut rng);
    let mut means: Vec<Array1<f64>> = means_init;
    let mut covs_full: Vec<Array2<f64>> = Vec::new();
    let mut covs_diag: Vec<Vec<f64>> = vec![global_var.clone(); k];
    if use_full {
        let mut g = Array2::<f64>::zeros((d, d));
        for row in data.rows() {
            for a in 0..d {
                let za = row[a] - global_mean[a];
                for b in a..d {
                    g[[a, b]] += za * (row[b] - global_mean[b]);
                }
            }
        }
        for a in 0..d {
            for b in a..d {
                let v = g[[a, b]] / n as f64;
                g[[a, b]] = v;
                g[[b, a]] = v;
            }
        }
        covs_full = vec![g; k];
    }
    let mut weights = vec![1.0 / k as f64; k];

    let mut resp = Array2::<f64>::zeros((n, k));
    let mut trace = Vec::new();
    let mut scratch = vec![0.0; d];

    for _ in 0..cfg.em_max_iters {
        // build components, escalating the ridge on factorization failure
        let mut comps: Vec<Component> = Vec::with_capacity(k);
        if use_full {
            let mut ok = true;
            'build: for c in 0..k {
                let mut eps = base_eps.max(1e-12);
                for _ in 0..4 {
                    let mut sigma = covs_full[c].clone();
                    for j in 0..d {
                        sigma[[j, j]] += eps;
                    }
                    if let Ok(chol) = cholesky(sigma.view()) {
                        comps.push(Component::Full {
                            mean: means[c].clone(),
                            chol,
                        });
                        continue 'build;
                    }
                    eps *= 10.0;
                }
                ok = false;
                break;
            }
            if !ok {
                use_full = false;
                comps.clear();
            }
        }
        if !use_full {
            for c in 0..k {
                let var: Vec<f64> = covs_diag[c]
                    .iter()
                    .map(|&v| (v + base_eps).max(1e-12))
                    .collect();
                comps.push(Component::Diagonal {
                    mean: means[c].clone(),
                    var,
                });
            }
        }

        // E-step with log-sum-exp
        let mut ll = 0.0;
        for (i, row) in data.rows().into_iter().enumerate() {
            let mut logs = vec![0.0; k];
            for c in 0..k {
                logs[c] = weights[c].ln() + comps[c].log_pdf(row, &mut scratch);
            }
            let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = mx + logs.iter().map(|l| (l - mx).exp()).sum::<f64>().ln();
            ll += lse;
            for c in 0..k {
                resp[[i, c]] = (logs[c] - lse).exp();
            }
        }
        trace.push(ll);

        // M-step
        for c in 0..k {
            let nk: f64 = (0..n).map(|i| resp[[i, c]]).sum();
            let nk = nk.max(1e-12);
            weights[c] = nk / n as f64;
            let mut mu = Array1::<f64>::zeros(d);
            for (i, row) in data.rows().into_iter().enumerate() {
                mu.scaled_add(resp[[i, c]], &row);
            }
            mu /= nk;
            if use_full {
                let cov = &mut covs_full[c];
                cov.fill(0.0);
                for (i, row) in data.rows().into_iter().enumerate() {
                    let r = resp[[i, c]];
                    if r == 0.0 {
                        continue;
                    }
                    for a in 0..d {
                        let za = r * (row[a] - mu[a]);
                        for b in a..d {
                            cov[[a, b]] += za * (row[b] - mu[b]);
                        }
                    }
                }
                for a in 0..d {
                    for b in a..d {
                        let v = cov[[a, b]] / nk;
                        cov[[a, b]] = v;
                        cov[[b, a]] = v;
                    }
                }
            } else {
                let var = &mut covs_diag[c];
                var.iter_mut().for_each(|v| *v = 0.0);
                for (i, row) in data.rows().into_iter().enumerate() {
                    let r = resp[[i, c]];
                    if r == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        let z = row[j] - mu[j];
                        var[j] += r * z * z;
                    }
                }
                var.iter_mut().for_each(|v| *v /= nk);
            }
            means[c] = mu;
        }

        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            let cur = trace[trace.len() - 1];
            if (cur - prev).abs() / cur.abs().max(1.0) < cfg.em_tol {
                break;
            }
        }
    }

    let labels = (0..n)
        .map(|i| {
            let mut best = 0u8;
            let mut best_r = f64::NEG_INFINITY;
            for c in 0..k {
                if resp[[i, c]] > best_r {
                    best_r = resp[[i, c]];
                    best = c as u8;
                }
            }
            best
        })
        .collect();

    Ok(GmmFit {
        labels,
        trace,
        used: if use_full {
            CovarianceKind::Full
        } else {
            CovarianceKind::Diagonal
        },
    })
}

/// Median distance to the `min_pts`-th nearest neighbour, scaled by 1.5; a
/// serviceable default radius when none is supplied.
pub fn kdist_heuristic(x: &RealMatrix, min_pts: usize) -> f64 {
    let n = x.n();
    let data = x.data();
    let k = min_pts.clamp(1, n.saturating_sub(1).max(1));
    let mut kdists: Vec<f64> = Vec::with_capacity(n);
    let mut row_d = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            row_d[j] = if i == j {
                f64::INFINITY
            } else {
                dist2(data.row(i), data.row(j))
            };
        }
        row_d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let kd = row_d[(k - 1).min(n - 1)];
        kdists.push(if kd.is_finite() { kd.sqrt() } else { 0.0 });
    }
    kdists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        kdists[n / 2]
    } else {
        0.5 * (kdists[n / 2 - 1] + kdists[n / 2])
    };
    1.5 * median
}

/// Density clustering, reduced to binary labels: the largest cluster maps to
/// 1, other clusters and noise to 0.
pub fn dbscan(x: &RealMatrix, cfg: &BaselineConfig) -> Result<Vec<u8>> {
    let n = x.n();
    let eps = match cfg.eps {
        Some(e) if e > 0.0 => e,
        Some(e) => {
            return Err(Error::InvalidParam(format!(
                "dbscan eps must be positive, got {e}"
            )))
        }
        None => kdist_heuristic(x, cfg.min_pts),
    };
    if cfg.min_pts < 1 {
        return Err(Error::InvalidParam("dbscan min_pts must be >= 1".into()));
    }
    let data = x.data();
    let eps2 = eps * eps;

    // neighbourhood includes the point itself
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| dist2(data.row(i), data.row(j)) <= eps2)
                .collect()
        })
        .collect();

    const UNVISITED: i32 = -2;
    const NOISE: i32 = -1;
    let mut assign = vec![UNVISITED; n];
    let mut cluster = 0i32;
    for i in 0..n {
        if assign[i] != UNVISITED {
            continue;
        }
        if neighbours[i].len() < cfg.min_pts {
            assign[i] = NOISE;
            continue;
        }
        let id = cluster;
        cluster += 1;
        assign[i] = id;
        let mut queue: Vec<usize> = neighbours[i].clone();
        let mut head = 0;
        while head < queue.len() {
            let q = queue[head];
            head += 1;
            if assign[q] == NOISE {
                assign[q] = id;
            }
            if assign[q] != UNVISITED {
                continue;
            }
            assign[q] = id;
            if neighbours[q].len() >= cfg.min_pts {
                queue.extend_from_slice(&neighbours[q]);
            }
        }
    }

    let mut sizes = vec![0usize; cluster.max(0) as usize];
    for &a in &assign {
        if a >= 0 {
            sizes[a as usize] += 1;
        }
    }
    // largest cluster wins label 1; ties go to the earliest-born cluster
    let top = sizes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i as i32);
    Ok(assign
        .iter()
        .map(|&a| u8::from(Some(a) == top))
        .collect())
}
