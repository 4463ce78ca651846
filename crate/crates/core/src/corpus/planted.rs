//! Synthetic corpus with a contiguous formulaic span for end-to-end checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnnotationMap, VerseRecord, NGRAM_JOIN};
use crate::error::{Error, Result};

/// A single-document corpus of uniform-random token verses, with a contiguous
/// span that additionally carries fixed two-token marker phrases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedCorpusSpec {
    pub verses: usize,
    pub formulaic_start: usize,
    pub formulaic_len: usize,
    /// Base vocabulary size; tokens are drawn uniformly from it.
    pub vocab: usize,
    pub verse_len: usize,
    /// Number of distinct marker phrases planted in every formulaic verse.
    pub markers: usize,
    pub seed: u64,
}

impl Default for PlantedCorpusSpec {
    fn default() -> Self {
        Self {
            verses: 500,
            formulaic_start: 200,
            formulaic_len: 100,
            vocab: 40,
            verse_len: 8,
            markers: 2,
            seed: 0,
        }
    }
}

impl PlantedCorpusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.verses == 0 || self.verse_len == 0 {
            return Err(Error::InvalidParam("empty corpus shape".into()));
        }
        if self.formulaic_len == 0 || self.formulaic_start + self.formulaic_len > self.verses {
            return Err(Error::InvalidParam(format!(
                "formulaic span {}..{} falls outside {} verses",
                self.formulaic_start,
                self.formulaic_start + self.formulaic_len,
                self.verses
            )));
        }
        if self.vocab < 2 {
            return Err(Error::InvalidParam("vocabulary needs >= 2 tokens".into()));
        }
        // each marker phrase occupies one two-token slot
        if self.markers == 0 || self.markers > self.verse_len / 2 {
            return Err(Error::InvalidParam(format!(
                "{} marker phrases do not fit into {} tokens",
                self.markers, self.verse_len
            )));
        }
        Ok(())
    }

    /// The planted marker bigrams, as embedding feature names.
    pub fn marker_ngrams(&self) -> Vec<String> {
        (0..self.markers)
            .map(|k| format!("mk{k}a{NGRAM_JOIN}mk{k}b"))
            .collect()
    }
}

/// Generate the corpus, its verse annotations, and the marker bigram names.
pub fn planted_corpus(
    spec: &PlantedCorpusSpec,
) -> Result<(Vec<VerseRecord>, AnnotationMap, Vec<String>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let form_range = spec.formulaic_start..spec.formulaic_start + spec.formulaic_len;
    let mut records = Vec::with_capacity(spec.verses);
    let mut annotations = AnnotationMap::new();
    for i in 0..spec.verses {
        let mut tokens: Vec<String> = (0..spec.verse_len)
            .map(|_| format!("w{:02}", rand::Rng::random_range(&mut rng, 0..spec.vocab)))
            .collect();
        let formulaic = form_range.contains(&i);
        if formulaic {
            // distinct two-token slots keep the phrases intact and disjoint
            let slots = rand::seq::index::sample(&mut rng, spec.verse_len / 2, spec.markers);
            for (k, slot) in slots.into_iter().enumerate() {
                tokens[2 * slot] = format!("mk{k}a");
                tokens[2 * slot + 1] = format!("mk{k}b");
            }
        }
        let rec = VerseRecord {
            doc: "doc1".into(),
            chapter: 1 + (i / 50) as u32,
            verse: 1 + (i % 50) as u32,
            tokens,
        };
        annotations.insert(rec.id(), u8::from(formulaic));
        records.push(rec);
    }
    Ok((records, annotations, spec.marker_ngrams()))
}
