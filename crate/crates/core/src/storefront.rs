//! Storefront classification pipeline.
//!
//! A corpus is a directory holding `corpus.json` and the images it names.
//! Text features are the union (logical OR) of the order-`k` n-gram vectors
//! of the detections the FPD model keeps; style features come from the
//! builtin patch descriptor or from an exporter feature file.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{
    late_accuracy, select_alpha, train_linear_traced, FusionMode, FusionModel, FusionSample, LinearClassifier,
};
use crate::geom::Rect;
use crate::logistic::TrainConfig;
use crate::raster::{load_rgb, save_png};
use crate::scalar::Scalar;
use crate::stylefeat::{aggregate_style, builtin_style, FeatureFile, PatchSpec, StyleSource};
use crate::synth::StorefrontSample;
use crate::textfeat::{filter_detections, train_fpd, FpdModel, NGramVocabulary, TextDetection, CORPUS_MAX_ORDER};

pub const CORPUS_FORMAT: &str = "mallnav-corpus";
pub const CORPUS_VERSION: u32 = 1;
pub const CORPUS_MANIFEST: &str = "corpus.json";
pub const CLASSIFIER_FORMAT: &str = "mallnav-classifier";
pub const CLASSIFIER_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDetection {
    pub bbox: Rect,
    pub text: String,
    /// Ground truth where known; needed only to train the FPD model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_text: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub brand: String,
    pub split: Split,
    /// Relative to the corpus directory.
    pub image: String,
    pub detections: Vec<CorpusDetection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CorpusDocument {
    format: String,
    version: u32,
    entries: Vec<CorpusEntry>,
}

/// A corpus entry with its decoded image.
#[derive(Debug, Clone)]
pub struct Storefront {
    pub entry: CorpusEntry,
    pub image: RgbImage,
}

impl Storefront {
    pub fn from_sample(s: &StorefrontSample) -> Self {
        Storefront {
            entry: CorpusEntry {
                id: s.id.clone(),
                brand: s.brand.clone(),
                split: if s.test { Split::Test } else { Split::Train },
                image: format!("images/{}.png", s.id),
                detections: s
                    .detections
                    .iter()
                    .map(|d| CorpusDetection {
                        bbox: d.bbox,
                        text: d.text.clone(),
                        is_text: Some(d.is_text),
                    })
                    .collect(),
            },
            image: s.image.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub root: PathBuf,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(CORPUS_MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let doc: CorpusDocument = serde_json::from_str(&text).map_err(|e| Error::doc(&path, e))?;
        if doc.format != CORPUS_FORMAT || doc.version != CORPUS_VERSION {
            return Err(Error::doc(
                &path,
                format!("expected {CORPUS_FORMAT} v{CORPUS_VERSION}, found {} v{}", doc.format, doc.version),
            ));
        }
        let mut seen = HashSet::new();
        for e in &doc.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
        }
        Ok(Corpus {
            root: dir.to_path_buf(),
            entries: doc.entries,
        })
    }

    pub fn save_manifest(&self) -> Result<()> {
        let path = self.root.join(CORPUS_MANIFEST);
        let doc = CorpusDocument {
            format: CORPUS_FORMAT.into(),
            version: CORPUS_VERSION,
            entries: self.entries.clone(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("corpus serialises");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Decode every image, in manifest order.
    pub fn load_images(&self) -> Result<Vec<Storefront>> {
        self.entries
            .par_iter()
            .map(|e| {
                Ok(Storefront {
                    entry: e.clone(),
                    image: load_rgb(&self.root.join(&e.image))?,
                })
            })
            .collect()
    }
}

/// Write images and manifest of `items` under `dir`.
pub fn save_corpus(dir: &Path, items: &[Storefront]) -> Result<Corpus> {
    for s in items {
        let path = dir.join(&s.entry.image);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        save_png(&s.image, &path)?;
    }
    let corpus = Corpus {
        root: dir.to_path_buf(),
        entries: items.iter().map(|s| s.entry.clone()).collect(),
    };
    corpus.save_manifest()?;
    Ok(corpus)
}

/// Training brands in sorted order.
pub fn training_brands(items: &[Storefront]) -> Vec<String> {
    items
        .iter()
        .filter(|s| s.entry.split == Split::Train)
        .map(|s| s.entry.brand.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn split(items: &[Storefront], which: Split) -> Vec<&Storefront> {
    items.iter().filter(|s| s.entry.split == which).collect()
}

/// FPD samples from every labelled detection, in corpus order.
pub fn fpd_samples<T: Scalar>(items: &[&Storefront], vocab: &NGramVocabulary) -> Result<Vec<(Vec<T>, bool)>> {
    let mut out = Vec::new();
    for s in items {
        for d in &s.entry.detections {
            if let Some(label) = d.is_text {
                let det = TextDetection::<T>::new(d.bbox, d.text.clone(), vocab)?;
                let mut v = det.ngram;
                v.extend_from_slice(&det.geometry);
                out.push((v, label));
            }
        }
    }
    Ok(out)
}

/// Recall of true text and rejection of planted negatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpdScore {
    pub recall: f64,
    pub rejection: f64,
    pub positives: usize,
    pub negatives: usize,
}

pub fn score_fpd<T: Scalar>(items: &[&Storefront], vocab: &NGramVocabulary, fpd: &FpdModel<T>) -> Result<FpdScore> {
    let (mut tp, mut pos, mut tn, mut neg) = (0usize, 0usize, 0usize, 0usize);
    for s in items {
        let labelled: Vec<&CorpusDetection> = s.entry.detections.iter().filter(|d| d.is_text.is_some()).collect();
        let mut dets = labelled
            .iter()
            .map(|d| TextDetection::<T>::new(d.bbox, d.text.clone(), vocab))
            .collect::<Result<Vec<_>>>()?;
        filter_detections(&mut dets, fpd)?;
        for (d, det) in labelled.iter().zip(&dets) {
            let kept = det.reliable == Some(true);
            if d.is_text == Some(true) {
                pos += 1;
                tp += kept as usize;
            } else {
                neg += 1;
                tn += !kept as usize;
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    Ok(FpdScore {
        recall: ratio(tp, pos),
        rejection: ratio(tn, neg),
        positives: pos,
        negatives: neg,
    })
}

/// Where style vectors come from.
#[derive(Debug, Clone)]
pub enum StyleProvider {
    Builtin(PatchSpec),
    /// Aggregated exporter features keyed by image id.
    Precomputed(HashMap<String, Vec<f32>>),
}

impl StyleProvider {
    pub fn from_feature_file(file: &FeatureFile) -> Result<Self> {
        let mut map = HashMap::new();
        for (id, patches) in &file.entries {
            let agg = aggregate_style(patches, StyleSource::ExporterFile)?;
            if map.insert(id.clone(), agg.values).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(StyleProvider::Precomputed(map))
    }

    pub fn style<T: Scalar>(&self, s: &Storefront) -> Result<Vec<T>> {
        match self {
            StyleProvider::Builtin(spec) => Ok(builtin_style::<T>(&s.image, spec)?.values),
            StyleProvider::Precomputed(map) => map
                .get(&s.entry.id)
                .map(|v| v.iter().map(|&x| T::lit(x as f64)).collect())
                .ok_or_else(|| Error::MalformedFeatureFile(format!("no features for image {}", s.entry.id))),
        }
    }
}

/// Vocabularies and filter shared by every storefront's text feature.
#[derive(Debug, Clone)]
pub struct TextPipeline<T> {
    /// Full vocabulary the FPD model reads.
    pub vocab: NGramVocabulary,
    /// `G_k`, the vocabulary of the classifier's text feature.
    pub vocab_k: NGramVocabulary,
    pub fpd: Option<FpdModel<T>>,
}

impl<T: Scalar> TextPipeline<T> {
    pub fn new(vocab: NGramVocabulary, k: usize, fpd: Option<FpdModel<T>>) -> Result<Self> {
        let vocab_k = vocab.truncate(k)?;
        if let Some(m) = &fpd {
            if m.dim() != vocab.len() + 4 {
                return Err(Error::FeatureDimensionMismatch {
                    expected: vocab.len() + 4,
                    actual: m.dim(),
                });
            }
        }
        Ok(TextPipeline { vocab, vocab_k, fpd })
    }

    pub fn k(&self) -> usize {
        self.vocab_k.max_order()
    }

    /// OR of the `G_k` vectors of the detections the filter keeps.
    pub fn feature(&self, detections: &[CorpusDetection]) -> Result<Vec<T>> {
        let mut dets = detections
            .iter()
            .map(|d| TextDetection::<T>::new(d.bbox, d.text.clone(), &self.vocab))
            .collect::<Result<Vec<_>>>()?;
        let kept = match &self.fpd {
            Some(m) => filter_detections(&mut dets, m)?,
            None => dets,
        };
        let mut out = vec![T::zero(); self.vocab_k.len()];
        for d in &kept {
            for (o, v) in out.iter_mut().zip(self.vocab_k.vectorize::<T>(&d.text)) {
                *o = o.max(v);
            }
        }
        Ok(out)
    }
}

/// Text and style features of every item, in order.
pub fn featurize<T: Scalar>(
    items: &[&Storefront],
    text: &TextPipeline<T>,
    style: &StyleProvider,
) -> Result<Vec<FusionSample<T>>> {
    let out: Vec<FusionSample<T>> = items
        .par_iter()
        .map(|s| {
            Ok(FusionSample {
                text: text.feature(&s.entry.detections)?,
                style: style.style(s)?,
                label: s.entry.brand.clone(),
            })
        })
        .collect::<Result<_>>()?;
    if let Some(first) = out.first() {
        let d = first.style.len();
        if let Some(bad) = out.iter().find(|s| s.style.len() != d) {
            return Err(Error::FeatureDimensionMismatch {
                expected: d,
                actual: bad.style.len(),
            });
        }
    }
    Ok(out)
}

/// Corpus-built vocabulary over the training brands unless a canonical one
/// is given.
pub fn vocabulary(brands: &[String], canonical: Option<NGramVocabulary>) -> Result<NGramVocabulary> {
    match canonical {
        Some(v) => Ok(v),
        None => NGramVocabulary::from_corpus(brands, CORPUS_MAX_ORDER),
    }
}

/// Train the FPD model on all labelled detections of the training items.
pub fn train_fpd_on<T: Scalar>(
    items: &[&Storefront],
    vocab: &NGramVocabulary,
    cfg: &TrainConfig<T>,
    threshold: T,
) -> Result<FpdModel<T>> {
    let samples = fpd_samples::<T>(items, vocab)?;
    let mut m = train_fpd(&samples, cfg.reg, cfg.iters, cfg.seed)?.with_threshold(threshold)?;
    m.vocab_hash = vocab.hash();
    Ok(m)
}

/// The four classifiers that every fusion mode is assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels<T> {
    pub text: LinearClassifier<T>,
    pub style: LinearClassifier<T>,
    pub joint: LinearClassifier<T>,
    pub alpha: T,
    pub k: usize,
}

pub fn train_models<T: Scalar>(
    train: &[FusionSample<T>],
    grid: &[T],
    cfg: &TrainConfig<T>,
    k: usize,
) -> Result<TrainedModels<T>> {
    let y: Vec<String> = train.iter().map(|s| s.label.clone()).collect();
    let xt: Vec<Vec<T>> = train.iter().map(|s| s.text.clone()).collect();
    let xs: Vec<Vec<T>> = train.iter().map(|s| s.style.clone()).collect();
    let xj: Vec<Vec<T>> = train
        .iter()
        .map(|s| s.text.iter().chain(&s.style).copied().collect())
        .collect();
    let (text, _) = train_linear_traced(&xt, &y, cfg)?;
    let (style, _) = train_linear_traced(&xs, &y, cfg)?;
    let (joint, _) = train_linear_traced(&xj, &y, cfg)?;
    let alpha = select_alpha(&text, &style, train, grid)?;
    Ok(TrainedModels {
        text,
        style,
        joint,
        alpha,
        k,
    })
}

impl<T: Scalar> TrainedModels<T> {
    pub fn model(&self, mode: FusionMode) -> Result<FusionModel<T>> {
        match mode {
            FusionMode::TextOnly => FusionModel::text_only(self.text.clone(), self.k),
            FusionMode::StyleOnly => FusionModel::style_only(self.style.clone()),
            FusionMode::Early => FusionModel::early(self.joint.clone(), self.k),
            FusionMode::Late => FusionModel::late(self.text.clone(), self.style.clone(), self.alpha, self.k),
        }
    }

    /// Late-fusion accuracy on `set` at every grid value.
    pub fn alpha_curve(&self, set: &[FusionSample<T>], grid: &[T]) -> Result<Vec<(T, T)>> {
        grid.iter()
            .map(|&a| Ok((a, late_accuracy(&self.text, &self.style, set, a)?)))
            .collect()
    }
}

/// Everything `classify` needs: vocabulary, text order, FPD filter, style
/// settings and the fusion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClassifierBundle<T> {
    pub vocab: Vec<String>,
    pub vocab_hash: String,
    pub k: usize,
    pub patch: PatchSpec,
    /// 0 when style features came from an exporter file.
    pub style_dim: usize,
    pub fpd: Option<FpdModel<T>>,
    pub model: FusionModel<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct BundleDocument<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    bundle: ClassifierBundle<T>,
}

impl<T: Scalar> ClassifierBundle<T> {
    pub fn to_json(&self) -> String {
        let doc = BundleDocument {
            format: CLASSIFIER_FORMAT.into(),
            version: CLASSIFIER_VERSION,
            bundle: self.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("bundle serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BundleDocument<T> =
            serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("classifier document: {e}")))?;
        if doc.format != CLASSIFIER_FORMAT || doc.version != CLASSIFIER_VERSION {
            return Err(Error::InvalidModel(format!(
                "expected {CLASSIFIER_FORMAT} v{CLASSIFIER_VERSION}, found {} v{}",
                doc.format, doc.version
            )));
        }
        doc.bundle.model.validate()?;
        Ok(doc.bundle)
    }

    pub fn text_pipeline(&self) -> Result<TextPipeline<T>> {
        let vocab = NGramVocabulary::new(self.vocab.clone(), crate::textfeat::VocabSource::CorpusBuilt)?;
        if vocab.hash() != self.vocab_hash {
            return Err(Error::InvalidModel("vocabulary hash mismatch".into()));
        }
        TextPipeline::new(vocab, self.k, self.fpd.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_storefronts, StorefrontParams};

    fn tiny() -> Vec<Storefront> {
        let p = StorefrontParams {
            brands: vec!["Nike".into(), "Puma".into(), "Gucci".into()],
            per_class: 6,
            ..StorefrontParams::default()
        };
        generate_storefronts(&p, 3).iter().map(Storefront::from_sample).collect()
    }

    #[test]
    fn corpus_round_trip() {
        let items = tiny();
        let dir = tempfile::tempdir().unwrap();
        save_corpus(dir.path(), &items).unwrap();
        let back = Corpus::load(dir.path()).unwrap();
        assert_eq!(back.entries.len(), items.len());
        let imgs = back.load_images().unwrap();
        for (a, b) in imgs.iter().zip(&items) {
            assert_eq!(a.entry, b.entry);
            assert_eq!(a.image, b.image);
        }
    }

    #[test]
    fn text_feature_is_or_of_kept_detections() {
        let vocab = NGramVocabulary::from_corpus(&["ab", "cd"], 2).unwrap();
        let tp = TextPipeline::<f64>::new(vocab, 1, None).unwrap();
        let det = |t: &str| CorpusDetection {
            bbox: Rect::new(0, 0, 4, 2),
            text: t.into(),
            is_text: None,
        };
        // G_1 = {a, b, c, d}.
        assert_eq!(tp.feature(&[det("a"), det("xd")]).unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(tp.feature(&[]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn mismatched_fpd_is_rejected() {
        let vocab = NGramVocabulary::from_corpus(&["ab"], 2).unwrap();
        let m = FpdModel {
            weights: vec![0.0; 2],
            bias: 0.0,
            threshold: 0.5,
            vocab_hash: String::new(),
        };
        assert!(TextPipeline::new(vocab, 2, Some(m)).is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let items = tiny();
        let train = split(&items, Split::Train);
        let vocab = vocabulary(&training_brands(&items), None).unwrap();
        let cfg = TrainConfig {
            iters: 20,
            ..TrainConfig::default()
        };
        let fpd = train_fpd_on(&train, &vocab, &cfg, 0.5).unwrap();
        let tp = TextPipeline::new(vocab.clone(), 2, Some(fpd.clone())).unwrap();
        let style = StyleProvider::Builtin(PatchSpec::default());
        let feats = featurize(&train, &tp, &style).unwrap();
        let models = train_models(&feats, &[0.0, 0.5, 1.0], &cfg, 2).unwrap();
        let bundle = ClassifierBundle {
            vocab: vocab.grams().to_vec(),
            vocab_hash: vocab.hash(),
            k: 2,
            patch: PatchSpec::default(),
            style_dim: crate::stylefeat::BUILTIN_DIM,
            fpd: Some(fpd),
            model: models.model(FusionMode::Late).unwrap(),
        };
        let back = ClassifierBundle::<f64>::from_json(&bundle.to_json()).unwrap();
        assert_eq!(back, bundle);
        assert_eq!(back.text_pipeline().unwrap().vocab_k.len(), tp.vocab_k.len());
    }
}
