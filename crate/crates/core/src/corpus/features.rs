//! Distinctive-feature extraction for a converged soft assignment.

use serde::{Deserialize, Serialize};

use super::WindowedDataset;
use crate::data::{SelfInfoDistribution, WeightVector};
use crate::discrete::{per_sample_self_information, soft_frequencies, Side};
use crate::error::Result;

/// Contribution share of the total that the reported prefix must reach.
const PREFIX_SHARE: f64 = 0.3;

/// One feature's separation between the two clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    /// |freq under s - freq under 1-s| * corpus frequency.
    pub contribution: f64,
    pub freq_selected: f64,
    pub freq_complement: f64,
    pub corpus_freq: f64,
}

/// Features ranked by how strongly they separate the clusters, plus both
/// clusters' self-information distributions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureReport {
    /// All features, contribution descending, ties lexicographic.
    pub ranked: Vec<RankedFeature>,
    /// Length of the shortest prefix whose cumulative contribution reaches
    /// 30% of the total (0 when every contribution is zero).
    pub top_prefix: usize,
    pub selected_info: SelfInfoDistribution,
    pub complement_info: SelfInfoDistribution,
}

pub fn distinctive_features(ds: &WindowedDataset, s: &WeightVector) -> Result<FeatureReport> {
    let selected = soft_frequencies(&ds.matrix, s)?;
    let complement = soft_frequencies(&ds.matrix, &s.complement())?;
    let mut ranked: Vec<RankedFeature> = ds
        .matrix
        .feature_ids()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let fs = selected.f()[j];
            let fc = complement.f()[j];
            RankedFeature {
                name: name.clone(),
                contribution: (fs - fc).abs() * ds.corpus_freq[j],
                freq_selected: fs,
                freq_complement: fc,
                corpus_freq: ds.corpus_freq[j],
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.contribution
            .partial_cmp(&a.contribution)
            .unwrap()
            .then_with(|| a.name.cmp(&b.name))
    });

    let total: f64 = ranked.iter().map(|r| r.contribution).sum();
    let mut top_prefix = 0;
    if total > 0.0 {
        let mut cum = 0.0;
        for (k, r) in ranked.iter().enumerate() {
            cum += r.contribution;
            if cum >= PREFIX_SHARE * total {
                top_prefix = k + 1;
                break;
            }
        }
    }

    Ok(FeatureReport {
        ranked,
        top_prefix,
        selected_info: per_sample_self_information(&ds.matrix, s, Side::Selected)?,
        complement_info: per_sample_self_information(&ds.matrix, s, Side::Complement)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{embed, AnnotationMap, EmbeddingConfig, FeatureCap};
    use crate::corpus::{parse_corpus_reader, VerseRecord};
    use crate::error::Error;

    fn dataset(src: &str, labels: &[u8]) -> super::super::WindowedDataset {
        let recs: Vec<VerseRecord> = parse_corpus_reader(src.as_bytes()).unwrap();
        let mut ann = AnnotationMap::new();
        for (r, &l) in recs.iter().zip(labels) {
            ann.insert(r.id(), l);
        }
        let cfg = EmbeddingConfig {
            n: 1,
            l: 1,
            f: FeatureCap::All,
        };
        embed(&recs, &ann, &cfg).unwrap()
    }

    #[test]
    fn exclusive_marker_takes_all_contribution() {
        // "mark" appears only in the selected verses; "base" everywhere
        let ds = dataset(
            "d\t1\t1\tbase mark\nd\t1\t2\tbase mark\nd\t1\t3\tbase\nd\t1\t4\tbase\n",
            &[1, 1, 0, 0],
        );
        let s = WeightVector::new(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let rep = distinctive_features(&ds, &s).unwrap();
        assert_eq!(rep.ranked[0].name, "mark");
        let total: f64 = rep.ranked.iter().map(|r| r.contribution).sum();
        assert_eq!(rep.ranked[0].contribution, total);
        assert_eq!(rep.ranked[1].contribution, 0.0);
        assert_eq!(rep.top_prefix, 1);
        assert_eq!(rep.ranked[0].freq_selected, 1.0);
        assert_eq!(rep.ranked[0].freq_complement, 0.0);
    }

    #[test]
    fn symmetric_features_tie_break_lexicographically() {
        let ds = dataset("d\t1\t1\talpha\nd\t1\t2\tzeta\n", &[1, 0]);
        let s = WeightVector::new(vec![1.0, 0.0]).unwrap();
        let rep = distinctive_features(&ds, &s).unwrap();
        assert_eq!(rep.ranked[0].contribution, rep.ranked[1].contribution);
        assert_eq!(rep.ranked[0].name, "alpha");
        assert_eq!(rep.ranked[1].name, "zeta");
    }

    #[test]
    fn uniform_split_contributes_nothing() {
        let ds = dataset("d\t1\t1\tw\nd\t1\t2\tw\n", &[0, 1]);
        let s = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let rep = distinctive_features(&ds, &s).unwrap();
        assert!(rep.ranked.iter().all(|r| r.contribution == 0.0));
        assert_eq!(rep.top_prefix, 0);
    }

    #[test]
    fn degenerate_assignment_is_rejected() {
        let ds = dataset("d\t1\t1\tw\nd\t1\t2\tw\n", &[0, 1]);
        let s = WeightVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            distinctive_features(&ds, &s),
            Err(Error::DegenerateWeights(_))
        ));
    }
}
