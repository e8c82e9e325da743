//! Bag-of-N-grams text features, order truncation and the false-positive
//! detection (FPD) filter over OCR detections.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::logistic::{fit_binary, TrainConfig};
use crate::scalar::{dot, sigmoid, Scalar};

/// Longest gram enumerated when a vocabulary is built from brand names.
pub const CORPUS_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VocabSource {
    CanonicalFile,
    CorpusBuilt,
}

/// Ordered list of lowercase character n-grams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramVocabulary {
    grams: Vec<String>,
    max_order: usize,
    source: VocabSource,
}

/// Lowercase and keep only `[a-z0-9]`.
pub fn normalize_text(text: &str) -> String {
    text.chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        .collect()
}

impl NGramVocabulary {
    pub fn new(grams: Vec<String>, source: VocabSource) -> Result<Self> {
        let mut seen = HashSet::with_capacity(grams.len());
        for g in &grams {
            if g.is_empty() {
                return Err(Error::InvalidParams("empty n-gram in vocabulary".into()));
            }
            if !seen.insert(g.as_str()) {
                return Err(Error::InvalidParams(format!("duplicate n-gram {g:?}")));
            }
        }
        let max_order = grams.iter().map(|g| g.chars().count()).max().unwrap_or(0);
        Ok(NGramVocabulary {
            grams,
            max_order,
            source,
        })
    }

    /// Every gram of length `1..=max_order` found in the normalised names,
    /// ordered by length and then lexicographically.
    pub fn from_corpus<S: AsRef<str>>(names: &[S], max_order: usize) -> Result<Self> {
        if max_order < 1 {
            return Err(Error::InvalidOrder(max_order));
        }
        let mut grams: Vec<String> = names
            .iter()
            .flat_map(|n| substrings(&normalize_text(n.as_ref()), max_order))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        grams.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Self::new(grams, VocabSource::CorpusBuilt)
    }

    /// One gram per line, order significant. Blank trailing lines are ignored.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let grams = text
            .lines()
            .map(|l| l.trim_end_matches('\r').to_string())
            .filter(|l| !l.is_empty())
            .collect();
        Self::new(grams, VocabSource::CanonicalFile)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = self.grams.join("\n");
        out.push('\n');
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn grams(&self) -> &[String] {
        &self.grams
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn source(&self) -> VocabSource {
        self.source
    }

    /// Keep the grams of length `<= k`, preserving order.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrder(k));
        }
        Ok(NGramVocabulary {
            grams: self
                .grams
                .iter()
                .filter(|g| g.chars().count() <= k)
                .cloned()
                .collect(),
            max_order: k.min(self.max_order),
            source: self.source,
        })
    }

    /// SHA-256 over the newline-joined grams, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for g in &self.grams {
            h.update(g.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Binary presence vector of every gram in the normalised text.
    pub fn vectorize<T: Scalar>(&self, text: &str) -> Vec<T> {
        let present: HashSet<String> = substrings(&normalize_text(text), self.max_order).collect();
        self.grams
            .iter()
            .map(|g| {
                if present.contains(g) {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}

fn substrings(text: &str, max_order: usize) -> impl Iterator<Item = String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    (0..n).flat_map(move |i| {
        let chars = chars.clone();
        (1..=max_order.min(n - i)).map(move |len| chars[i..i + len].iter().collect())
    })
}

pub fn ngram_vector<T: Scalar>(text: &str, vocab: &NGramVocabulary) -> Vec<T> {
    vocab.vectorize(text)
}

pub fn truncate_vocab(vocab: &NGramVocabulary, k: usize) -> Result<NGramVocabulary> {
    vocab.truncate(k)
}

/// Width, height, scale and shape of a box: `(w, h, w + h, w / h)`.
pub fn geometry_features<T: Scalar>(bbox: &Rect) -> Result<[T; 4]> {
    if bbox.w == 0 || bbox.h == 0 {
        return Err(Error::DegenerateBbox {
            w: bbox.w,
            h: bbox.h,
        });
    }
    let w = T::lit(bbox.w as f64);
    let h = T::lit(bbox.h as f64);
    Ok([w, h, w + h, w / h])
}

/// A recognised text region.
#[derive(Debug, Clone, PartialEq)]
pub struct TextDetection<T> {
    pub bbox: Rect,
    pub text: String,
    pub ngram: Vec<T>,
    pub geometry: [T; 4],
    pub reliable: Option<bool>,
}

impl<T: Scalar> TextDetection<T> {
    pub fn new(bbox: Rect, text: impl Into<String>, vocab: &NGramVocabulary) -> Result<Self> {
        let text = text.into();
        Ok(TextDetection {
            geometry: geometry_features(&bbox)?,
            ngram: vocab.vectorize(&text),
            bbox,
            text,
            reliable: None,
        })
    }
}

/// `[ngram(text) ; w, h, w + h, w / h]`, recomputed from the text and box.
pub fn detection_features<T: Scalar>(det: &TextDetection<T>, vocab: &NGramVocabulary) -> Result<Vec<T>> {
    let geometry = geometry_features::<T>(&det.bbox)?;
    let mut out = vocab.vectorize::<T>(&det.text);
    out.extend_from_slice(&geometry);
    Ok(out)
}

fn stored_features<T: Scalar>(det: &TextDetection<T>) -> Vec<T> {
    let mut v = det.ngram.clone();
    v.extend_from_slice(&det.geometry);
    v
}

pub const FPD_FORMAT: &str = "mallnav-fpd";
pub const FPD_VERSION: u32 = 1;

/// Logistic reliability model over `[ngram ; geometry]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FpdModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub threshold: T,
    #[serde(default)]
    pub vocab_hash: String,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct FpdDocument<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: FpdModel<T>,
}

impl<T: Scalar> FpdModel<T> {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Probability that a feature vector comes from real text.
    pub fn probability(&self, features: &[T]) -> Result<T> {
        if features.len() != self.weights.len() {
            return Err(Error::FeatureDimensionMismatch {
                expected: self.weights.len(),
                actual: features.len(),
            });
        }
        Ok(sigmoid(dot(&self.weights, features) + self.bias))
    }

    /// Cutoffs in `[0, 1]` are accepted; 0 keeps every detection.
    pub fn with_threshold(mut self, threshold: T) -> Result<Self> {
        if !(threshold >= T::zero() && threshold <= T::one()) {
            return Err(Error::InvalidParams(format!("threshold {threshold} outside [0, 1]")));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FpdDocument {
            format: FPD_FORMAT.into(),
            version: FPD_VERSION,
            model: self.clone(),
        })
        .expect("fpd model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FpdDocument<T> =
            serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        if doc.format != FPD_FORMAT || doc.version != FPD_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported fpd document {} v{}",
                doc.format, doc.version
            )));
        }
        if doc.model.weights.iter().any(|w| !w.is_finite()) || !doc.model.bias.is_finite() {
            return Err(Error::InvalidModel("non-finite fpd weights".into()));
        }
        Ok(doc.model)
    }
}

/// Train the FPD classifier. Labels are `true` for real text.
pub fn train_fpd<T: Scalar>(
    samples: &[(Vec<T>, bool)],
    reg: T,
    iters: usize,
    seed: u64,
) -> Result<FpdModel<T>> {
    if samples.len() < 2 {
        return Err(Error::DegenerateTrainingSet("fewer than two samples".into()));
    }
    let positives = samples.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::DegenerateTrainingSet("only one label present".into()));
    }
    let dim = samples[0].0.len();
    if let Some((v, _)) = samples.iter().find(|(v, _)| v.len() != dim) {
        return Err(Error::FeatureDimensionMismatch {
            expected: dim,
            actual: v.len(),
        });
    }
    let x: Vec<Vec<T>> = samples.iter().map(|(v, _)| v.clone()).collect();
    let y: Vec<bool> = samples.iter().map(|(_, l)| *l).collect();
    let cfg = TrainConfig {
        reg,
        iters,
        seed,
        ..TrainConfig::default()
    };
    let fit = fit_binary(&x, &y, &cfg);
    Ok(FpdModel {
        weights: fit.weights,
        bias: fit.bias,
        threshold: T::lit(0.5),
        vocab_hash: String::new(),
    })
}

/// Flag every detection and return, in order, those scoring at least the
/// model threshold.
pub fn filter_detections<T: Scalar>(
    dets: &mut [TextDetection<T>],
    model: &FpdModel<T>,
) -> Result<Vec<TextDetection<T>>> {
    let mut kept = Vec::new();
    for det in dets.iter_mut() {
        let p = model.probability(&stored_features(det))?;
        let ok = p >= model.threshold;
        det.reliable = Some(ok);
        if ok {
            kept.push(det.clone());
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(grams: &[&str]) -> NGramVocabulary {
        NGramVocabulary::new(grams.iter().map(|s| s.to_string()).collect(), VocabSource::CorpusBuilt)
            .unwrap()
    }

    #[test]
    fn all_grams_present() {
        let vocab = v(&["a", "b", "c", "ab", "bc", "abc"]);
        assert_eq!(ngram_vector::<f64>("abc", &vocab), vec![1.0; 6]);
        assert_eq!(ngram_vector::<f64>("", &vocab), vec![0.0; 6]);
    }

    #[test]
    fn normalisation_strips_case_and_punctuation() {
        assert_eq!(normalize_text("Lévi's 501!"), "lvis501");
        let vocab = v(&["ad", "id", "s5"]);
        assert_eq!(ngram_vector::<f32>("A-D i.d", &vocab), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn truncation_filters_by_length() {
        let vocab = v(&["a", "b", "ab", "abc"]);
        let t = truncate_vocab(&vocab, 2).unwrap();
        assert_eq!(t.grams(), &["a", "b", "ab"]);
        assert_eq!(t.max_order(), 2);
        assert_eq!(truncate_vocab(&vocab, 3).unwrap(), vocab);
        assert!(matches!(truncate_vocab(&vocab, 0), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn rejects_duplicates() {
        assert!(NGramVocabulary::new(vec!["a".into(), "a".into()], VocabSource::CanonicalFile).is_err());
    }

    #[test]
    fn geometry_tail() {
        let vocab = v(&["x", "y"]);
        let det = TextDetection::<f64>::new(Rect::new(0, 0, 30, 10), "", &vocab).unwrap();
        assert_eq!(detection_features(&det, &vocab).unwrap(), vec![0.0, 0.0, 30.0, 10.0, 40.0, 3.0]);
        let sq = TextDetection::<f64>::new(Rect::new(4, 4, 20, 20), "", &vocab).unwrap();
        assert_eq!(&detection_features(&sq, &vocab).unwrap()[2..], &[20.0, 20.0, 40.0, 1.0]);
        let mut bad = det.clone();
        bad.bbox = Rect::new(0, 0, 5, 0);
        assert!(matches!(detection_features(&bad, &vocab), Err(Error::DegenerateBbox { .. })));
    }

    #[test]
    fn fpd_guards() {
        let s = vec![(vec![1.0f64], true), (vec![2.0], true)];
        assert!(matches!(train_fpd(&s, 1e-4, 10, 0), Err(Error::DegenerateTrainingSet(_))));
        let s = vec![(vec![-1.0f64], false), (vec![1.0], true)];
        let m = train_fpd(&s, 1e-4, 500, 0).unwrap();
        assert!(m.probability(&[-1.0]).unwrap() < 0.5);
        assert!(m.probability(&[1.0]).unwrap() > 0.5);
        assert!(m.probability(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn empty_and_zero_threshold() {
        let vocab = v(&["a"]);
        let m = FpdModel::<f64> {
            weights: vec![-50.0; 5],
            bias: -50.0,
            threshold: 0.5,
            vocab_hash: vocab.hash(),
        };
        assert!(filter_detections(&mut [], &m).unwrap().is_empty());
        let mut dets = vec![TextDetection::new(Rect::new(0, 0, 4, 2), "a", &vocab).unwrap()];
        assert!(filter_detections(&mut dets, &m).unwrap().is_empty());
        assert_eq!(dets[0].reliable, Some(false));
        let m0 = m.with_threshold(0.0).unwrap();
        assert_eq!(filter_detections(&mut dets, &m0).unwrap().len(), 1);
    }

    #[test]
    fn fpd_json_round_trip() {
        let m = FpdModel::<f64> {
            weights: vec![0.1, 1.0 / 3.0, -2.5e-17],
            bias: std::f64::consts::PI,
            threshold: 0.5,
            vocab_hash: "abc".into(),
        };
        assert_eq!(FpdModel::from_json(&m.to_json()).unwrap(), m);
    }
}
