//! Parameter-grid execution: every (n, l, f) embedding times every method.

use serde::{Deserialize, Serialize};

use super::{embed, AnnotationMap, EmbeddingConfig, FeatureCap, VerseRecord, WindowedDataset};
use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::eval::{normalized_mcc, BIN_LABELS};
use crate::method::{run_method, Method, MethodConfig};
use crate::seed::mix3;

/// The grid axes. Cells are enumerated n, then l, then f.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub ns: Vec<usize>,
    pub ls: Vec<usize>,
    pub fs: Vec<FeatureCap>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            ns: (1..=5).collect(),
            ls: vec![2, 3, 4, 6, 8, 10, 12, 14, 18, 20, 22, 24, 26, 28],
            fs: vec![
                FeatureCap::Top(100),
                FeatureCap::Top(300),
                FeatureCap::Top(500),
                FeatureCap::All,
            ],
        }
    }
}

/// One cell of the grid for one method. A failed cell carries `error` and no
/// agreement figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    pub l: usize,
    pub f: String,
    pub method: String,
    pub windows: usize,
    /// Windows with an unambiguous majority label.
    pub labeled: usize,
    pub ties_excluded: usize,
    pub mcc: Option<f64>,
    pub percent: Option<f64>,
    pub bin: Option<String>,
    pub error: Option<String>,
}

impl CellReport {
    /// "n=2 l=4 f=300" - the cell's identity without the method.
    pub fn cell_id(&self) -> String {
        format!("n={} l={} f={}", self.n, self.l, self.f)
    }
}

/// All cells of one grid run, in deterministic n > l > f > method order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub cells: Vec<CellReport>,
}

impl GridReport {
    /// Successful cells of one method, percent descending; grid order breaks
    /// ties. At most `k` entries.
    pub fn top(&self, method: Method, k: usize) -> Vec<&CellReport> {
        let mut ok: Vec<&CellReport> = self
            .cells
            .iter()
            .filter(|c| c.method == method.name() && c.percent.is_some())
            .collect();
        ok.sort_by(|a, b| b.percent.partial_cmp(&a.percent).unwrap());
        ok.truncate(k);
        ok
    }

    pub fn best(&self, method: Method) -> Option<&CellReport> {
        self.top(method, 1).into_iter().next()
    }

    /// Successful-cell counts per interval bin, ascending bin order.
    pub fn bin_histogram(&self, method: Method) -> Vec<(&'static str, usize)> {
        BIN_LABELS
            .iter()
            .map(|&label| {
                let count = self
                    .cells
                    .iter()
                    .filter(|c| c.method == method.name() && c.bin.as_deref() == Some(label))
                    .count();
                (label, count)
            })
            .collect()
    }
}

fn empty_cell(n: usize, l: usize, f: FeatureCap, method: Method) -> CellReport {
    CellReport {
        n,
        l,
        f: f.to_string(),
        method: method.name().to_string(),
        windows: 0,
        labeled: 0,
        ties_excluded: 0,
        mcc: None,
        percent: None,
        bin: None,
        error: None,
    }
}

fn run_cell(
    ds: &WindowedDataset,
    method: Method,
    cfg: &MethodConfig,
    run_seed: u64,
) -> CellReport {
    let (idx, truth) = ds.labeled();
    let mut report = CellReport {
        windows: ds.windows.len(),
        labeled: idx.len(),
        ties_excluded: ds.ties_excluded,
        ..empty_cell(0, 0, FeatureCap::All, method)
    };
    let x = FeatureMatrix::Counts(ds.matrix.clone());
    let outcome = run_method(&x, method, &cfg.clone().with_seed(run_seed)).and_then(|run| {
        if idx.is_empty() {
            return Err(Error::EmptyInput("no unambiguously labeled windows"));
        }
        let pred: Vec<u8> = idx.iter().map(|&i| run.labels[i]).collect();
        normalized_mcc(&pred, &truth)
    });
    match outcome {
        Ok(rep) => {
            report.mcc = Some(rep.mcc);
            report.percent = Some(rep.percent);
            report.bin = Some(rep.bin);
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Embed once per (n, l), slice the feature cap per f, and run every method
/// on every cell. Failures become error rows instead of aborting the grid.
pub fn grid_run(
    records: &[VerseRecord],
    annotations: &AnnotationMap,
    grid: &GridConfig,
    methods: &[Method],
    cfg: &MethodConfig,
    seed: u64,
) -> Result<GridReport> {
    if grid.ns.is_empty() || grid.ls.is_empty() || grid.fs.is_empty() {
        return Err(Error::InvalidParam("grid has an empty axis".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidParam("no methods selected".into()));
    }
    let mut cells = Vec::with_capacity(grid.ns.len() * grid.ls.len() * grid.fs.len());
    for (ni, &n) in grid.ns.iter().enumerate() {
        for (li, &l) in grid.ls.iter().enumerate() {
            let full = embed(
                records,
                annotations,
                &EmbeddingConfig {
                    n,
                    l,
                    f: FeatureCap::All,
                },
            );
            for (fi, &f) in grid.fs.iter().enumerate() {
                let cell_index = ((ni * grid.ls.len()) + li) * grid.fs.len() + fi;
                let capped = match &full {
                    Ok(ds) => ds.cap_features(f),
                    Err(e) => Err(Error::InvalidParam(e.to_string())),
                };
                for (mi, &method) in methods.iter().enumerate() {
                    let run_seed = mix3(seed, cell_index as u64, mi as u64);
                    let mut report = match &capped {
                        Ok(ds) => run_cell(ds, method, cfg, run_seed),
                        Err(e) => {
                            let mut r = empty_cell(n, l, f, method);
                            r.error = Some(e.to_string());
                            r
                        }
                    };
                    report.n = n;
                    report.l = l;
                    report.f = f.to_string();
                    cells.push(report);
                }
            }
        }
    }
    Ok(GridReport { cells })
}
