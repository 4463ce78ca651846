//! Corpus ingestion and study pipeline: verse-level TSV parsing, n-gram
//! running-window embedding with top-f feature selection, parameter-grid
//! execution, and distinctive-feature reporting.
//!
//! The atomic text unit is the verse; n-grams never cross verse boundaries.
//! Windows aggregate counts over runs of consecutive verses within one
//! document, stride 1.

mod embed;
mod features;
mod grid;
mod parse;
mod planted;

pub use embed::embed;
pub use features::{distinctive_features, FeatureReport, RankedFeature};
pub use grid::{grid_run, CellReport, GridConfig, GridReport};
pub use parse::{parse_annotations, parse_annotations_reader, parse_corpus, parse_corpus_reader};
pub use planted::{planted_corpus, PlantedCorpusSpec};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::CountMatrix;
use crate::error::{Error, Result};

/// One verse: the atomic unit of text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerseRecord {
    pub doc: String,
    pub chapter: u32,
    pub verse: u32,
    pub tokens: Vec<String>,
}

impl VerseRecord {
    /// Stable identifier, also the annotation key.
    pub fn id(&self) -> String {
        format!("{}:{}:{}", self.doc, self.chapter, self.verse)
    }
}

/// Verse id -> binary label (1 = formulaic).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationMap(BTreeMap<String, u8>);

impl AnnotationMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the id was already present (the label is kept).
    pub fn insert(&mut self, id: String, label: u8) -> bool {
        use std::collections::btree_map::Entry;
        match self.0.entry(id) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(label);
                true
            }
        }
    }

    pub fn get(&self, id: &str) -> Option<u8> {
        self.0.get(id).copied()
    }

    /// Label of a verse; every evaluated verse must be annotated.
    pub fn label_of(&self, rec: &VerseRecord) -> Result<u8> {
        self.get(&rec.id()).ok_or_else(|| Error::Annotation {
            id: rec.id(),
            msg: "verse has no annotation".into(),
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, u8)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }
}

/// Feature-count cap for the embedding: keep the `f` most frequent n-grams,
/// or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureCap {
    Top(usize),
    All,
}

impl std::fmt::Display for FeatureCap {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeatureCap::Top(k) => write!(fmt, "{k}"),
            FeatureCap::All => fmt.write_str("all"),
        }
    }
}

impl std::str::FromStr for FeatureCap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(FeatureCap::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(FeatureCap::Top(k)),
            _ => Err(Error::InvalidParam(format!(
                "feature cap must be a positive integer or 'all', got '{s}'"
            ))),
        }
    }
}

impl Serialize for FeatureCap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FeatureCap::Top(k) => ser.serialize_u64(*k as u64),
            FeatureCap::All => ser.serialize_str("all"),
        }
    }
}

impl<'de> Deserialize<'de> for FeatureCap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = FeatureCap;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a positive integer or the string 'all'")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<FeatureCap, E> {
                if v == 0 {
                    return Err(E::custom("feature cap must be positive"));
                }
                Ok(FeatureCap::Top(v as usize))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<FeatureCap, E> {
                if v <= 0 {
                    return Err(E::custom("feature cap must be positive"));
                }
                Ok(FeatureCap::Top(v as usize))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<FeatureCap, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// Separator used to join tokens into n-gram feature names.
pub const NGRAM_JOIN: &str = "\u{b7}";

/// Parameters of one embedding: n-gram order, window width, feature cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// n-gram order, 1 through 5.
    pub n: usize,
    /// Window width in consecutive verses, stride 1.
    pub l: usize,
    pub f: FeatureCap,
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.n) {
            return Err(Error::InvalidParam(format!(
                "n-gram order must lie in 1..=5, got {}",
                self.n
            )));
        }
        if self.l < 1 {
            return Err(Error::InvalidParam("window width must be >= 1".into()));
        }
        if let FeatureCap::Top(0) = self.f {
            return Err(Error::InvalidParam("feature cap must be positive".into()));
        }
        Ok(())
    }
}

/// Verse span one window covers, by record index and by human-readable
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpan {
    pub doc: String,
    pub first_record: usize,
    pub len: usize,
    pub start_chapter: u32,
    pub start_verse: u32,
    pub end_chapter: u32,
    pub end_verse: u32,
}

/// Windows x features count matrix with provenance and labels.
///
/// Feature columns are sorted by corpus frequency descending, ties broken
/// lexicographically, so a top-k cap is a column prefix and embeddings are
/// byte-for-byte reproducible.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    pub matrix: CountMatrix,
    pub windows: Vec<WindowSpan>,
    /// Majority verse label per window; `None` marks an exact tie, which is
    /// excluded from agreement scores.
    pub labels: Vec<Option<u8>>,
    pub ties_excluded: usize,
    /// Whole-corpus verse-level frequency of each feature column.
    pub corpus_freq: Vec<f64>,
}

impl WindowedDataset {
    /// Indices and labels of the unambiguously labeled windows.
    pub fn labeled(&self) -> (Vec<usize>, Vec<u8>) {
        let mut idx = Vec::new();
        let mut labels = Vec::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                idx.push(i);
                labels.push(*l);
            }
        }
        (idx, labels)
    }

    /// Restrict to the top-k feature columns (a prefix by construction).
    pub fn cap_features(&self, cap: FeatureCap) -> Result<WindowedDataset> {
        let keep = match cap {
            FeatureCap::All => self.matrix.d(),
            FeatureCap::Top(k) => k.min(self.matrix.d()),
        };
        if keep == self.matrix.d() {
            return Ok(self.clone());
        }
        let data = self.matrix.data().slice(ndarray::s![.., ..keep]).to_owned();
        let ids = self.matrix.feature_ids()[..keep].to_vec();
        Ok(WindowedDataset {
            matrix: CountMatrix::new(data, ids)?,
            windows: self.windows.clone(),
            labels: self.labels.clone(),
            ties_excluded: self.ties_excluded,
            corpus_freq: self.corpus_freq[..keep].to_vec(),
        })
    }
}
