//! Running-window n-gram embedding.
//!
//! Counts n-grams inside each verse (never across verse boundaries), ranks
//! features by whole-corpus frequency (descending, ties lexicographic), and
//! aggregates counts over windows of `l` consecutive verses per document,
//! stride 1. A document shorter than `l` contributes no windows.

use std::collections::HashMap;

use ndarray::Array2;

use super::{
    AnnotationMap, EmbeddingConfig, FeatureCap, VerseRecord, WindowSpan, WindowedDataset,
    NGRAM_JOIN,
};
use crate::data::CountMatrix;
use crate::error::{Error, Result};

fn verse_ngrams(tokens: &[String], n: usize) -> HashMap<String, f64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram.join(NGRAM_JOIN)).or_insert(0.0) += 1.0;
        }
    }
    counts
}

pub fn embed(
    records: &[VerseRecord],
    annotations: &AnnotationMap,
    cfg: &EmbeddingConfig,
) -> Result<WindowedDataset> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyInput("no verses to embed"));
    }

    let verse_counts: Vec<HashMap<String, f64>> = records
        .iter()
        .map(|r| verse_ngrams(&r.tokens, cfg.n))
        .collect();

    let mut totals: HashMap<&str, f64> = HashMap::new();
    for counts in &verse_counts {
        for (gram, c) in counts {
            *totals.entry(gram.as_str()).or_insert(0.0) += c;
        }
    }
    if totals.is_empty() {
        return Err(Error::EmptyInput(
            "no n-gram features (every verse is shorter than n)",
        ));
    }
    let mut ranked: Vec<(&str, f64)> = totals.into_iter().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
    let keep = match cfg.f {
        FeatureCap::All => ranked.len(),
        FeatureCap::Top(k) => k.min(ranked.len()),
    };
    ranked.truncate(keep);
    let corpus_freq: Vec<f64> = ranked.iter().map(|(_, c)| *c).collect();
    let feature_ids: Vec<String> = ranked.iter().map(|(g, _)| g.to_string()).collect();
    let index: HashMap<&str, usize> = feature_ids
        .iter()
        .enumerate()
        .map(|(j, g)| (g.as_str(), j))
        .collect();

    // labels up front so annotation gaps fail before any heavy work
    let verse_labels: Vec<u8> = records
        .iter()
        .map(|r| annotations.label_of(r))
        .collect::<Result<_>>()?;

    // contiguous document runs
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || records[i].doc != records[start].doc {
            blocks.push((start, i));
            start = i;
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut windows = Vec::new();
    let mut labels = Vec::new();
    let mut ties = 0usize;
    for &(lo, hi) in &blocks {
        let len = hi - lo;
        if len < cfg.l {
            continue;
        }
        for w0 in lo..=hi - cfg.l {
            let mut row = vec![0.0; feature_ids.len()];
            let mut ones = 0usize;
            for v in w0..w0 + cfg.l {
                for (gram, c) in &verse_counts[v] {
                    if let Some(&j) = index.get(gram.as_str()) {
                        row[j] += c;
                    }
                }
                ones += verse_labels[v] as usize;
            }
            let label = match (2 * ones).cmp(&cfg.l) {
                std::cmp::Ordering::Greater => Some(1),
                std::cmp::Ordering::Less => Some(0),
                std::cmp::Ordering::Equal => {
                    ties += 1;
                    None
                }
            };
            rows.push(row);
            labels.push(label);
            let first = &records[w0];
            let last = &records[w0 + cfg.l - 1];
            windows.push(WindowSpan {
                doc: first.doc.clone(),
                first_record: w0,
                len: cfg.l,
                start_chapter: first.chapter,
                start_verse: first.verse,
                end_chapter: last.chapter,
                end_verse: last.verse,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidParam(format!(
            "window width {} exceeds every document's verse count",
            cfg.l
        )));
    }

    let n_rows = rows.len();
    let n_cols = feature_ids.len();
    let mut data = Array2::<f64>::zeros((n_rows, n_cols));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            data[[i, j]] = v;
        }
    }
    Ok(WindowedDataset {
        matrix: CountMatrix::new(data, feature_ids)?,
        windows,
        labels,
        ties_excluded: ties,
        corpus_freq,
    })
}
