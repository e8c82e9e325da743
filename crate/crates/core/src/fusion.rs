//! One-vs-rest linear classifiers over text and style features, combined by
//! early fusion (concatenation) or late fusion of the two sigmoid score
//! vectors mixed by `alpha`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logistic::{fit_binary, TrainConfig};
use crate::scalar::{argmax, dot, sigmoid, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearClassifier<T> {
    /// One row per class.
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<T>,
    pub class_labels: Vec<String>,
}

impl<T: Scalar> LinearClassifier<T> {
    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn num_classes(&self) -> usize {
        self.class_labels.len()
    }

    fn check(&self) -> Result<()> {
        if self.weights.len() != self.class_labels.len() || self.bias.len() != self.class_labels.len() {
            return Err(Error::InvalidModel("class rows do not match labels".into()));
        }
        let dim = self.dim();
        if self.weights.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidModel("ragged weight matrix".into()));
        }
        let finite = self.weights.iter().flatten().chain(&self.bias).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidModel("non-finite weights".into()));
        }
        Ok(())
    }

    /// `W x + b`.
    pub fn decision(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::FeatureDimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, &b)| dot(w, x) + b)
            .collect())
    }

    /// Per-class sigmoid scores.
    pub fn scores(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.decision(x)?.into_iter().map(sigmoid).collect())
    }

    pub fn predict(&self, x: &[T]) -> Result<usize> {
        Ok(argmax(&self.scores(x)?).unwrap_or(0))
    }
}

/// Per-class training losses reported alongside a classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace<T> {
    pub losses: Vec<Vec<T>>,
}

pub fn train_linear<T: Scalar>(
    x: &[Vec<T>],
    y: &[String],
    reg: T,
    iters: usize,
    seed: u64,
) -> Result<LinearClassifier<T>> {
    let cfg = TrainConfig {
        reg,
        iters,
        seed,
        ..TrainConfig::default()
    };
    train_linear_traced(x, y, &cfg).map(|(c, _)| c)
}

/// One-vs-rest logistic regression. Classes are ordered lexicographically.
pub fn train_linear_traced<T: Scalar>(
    x: &[Vec<T>],
    y: &[String],
    cfg: &TrainConfig<T>,
) -> Result<(LinearClassifier<T>, TrainingTrace<T>)> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::InvalidParams(format!(
            "{} feature rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let dim = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::FeatureDimensionMismatch {
            expected: dim,
            actual: row.len(),
        });
    }
    let class_labels: Vec<String> = y.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if class_labels.len() < 2 {
        return Err(Error::DegenerateTrainingSet("fewer than two classes".into()));
    }
    let fits: Vec<_> = class_labels
        .par_iter()
        .map(|c| {
            let targets: Vec<bool> = y.iter().map(|l| l == c).collect();
            fit_binary(x, &targets, cfg)
        })
        .collect();
    let mut weights = Vec::with_capacity(fits.len());
    let mut bias = Vec::with_capacity(fits.len());
    let mut losses = Vec::with_capacity(fits.len());
    for f in fits {
        weights.push(f.weights);
        bias.push(f.bias);
        losses.push(f.losses);
    }
    Ok((
        LinearClassifier {
            weights,
            bias,
            class_labels,
        },
        TrainingTrace { losses },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionMode {
    TextOnly,
    StyleOnly,
    Early,
    Late,
}

impl std::str::FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "text-only" => Ok(FusionMode::TextOnly),
            "style" | "style-only" => Ok(FusionMode::StyleOnly),
            "early" => Ok(FusionMode::Early),
            "late" => Ok(FusionMode::Late),
            other => Err(Error::InvalidParams(format!("unknown fusion mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for FusionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FusionMode::TextOnly => "text-only",
            FusionMode::StyleOnly => "style-only",
            FusionMode::Early => "early",
            FusionMode::Late => "late",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FusionModel<T> {
    pub mode: FusionMode,
    pub text_clf: Option<LinearClassifier<T>>,
    pub style_clf: Option<LinearClassifier<T>>,
    pub joint_clf: Option<LinearClassifier<T>>,
    pub alpha: T,
    pub text_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub index: usize,
    pub label: String,
    pub scores: Vec<T>,
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha.as_f64()))
    }
}

fn prediction<T: Scalar>(labels: &[String], scores: Vec<T>) -> Prediction<T> {
    let index = argmax(&scores).unwrap_or(0);
    Prediction {
        index,
        label: labels[index].clone(),
        scores,
    }
}

impl<T: Scalar> FusionModel<T> {
    pub fn text_only(clf: LinearClassifier<T>, text_order: usize) -> Result<Self> {
        clf.check()?;
        Ok(FusionModel {
            mode: FusionMode::TextOnly,
            text_clf: Some(clf),
            style_clf: None,
            joint_clf: None,
            alpha: T::zero(),
            text_order,
        })
    }

    pub fn style_only(clf: LinearClassifier<T>) -> Result<Self> {
        clf.check()?;
        Ok(FusionModel {
            mode: FusionMode::StyleOnly,
            text_clf: None,
            style_clf: Some(clf),
            joint_clf: None,
            alpha: T::one(),
            text_order: 0,
        })
    }

    pub fn early(joint: LinearClassifier<T>, text_order: usize) -> Result<Self> {
        joint.check()?;
        Ok(FusionModel {
            mode: FusionMode::Early,
            text_clf: None,
            style_clf: None,
            joint_clf: Some(joint),
            alpha: T::zero(),
            text_order,
        })
    }

    pub fn late(
        text_clf: LinearClassifier<T>,
        style_clf: LinearClassifier<T>,
        alpha: T,
        text_order: usize,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        text_clf.check()?;
        style_clf.check()?;
        if text_clf.class_labels != style_clf.class_labels {
            return Err(Error::InvalidModel("text and style classifiers disagree on classes".into()));
        }
        Ok(FusionModel {
            mode: FusionMode::Late,
            text_clf: Some(text_clf),
            style_clf: Some(style_clf),
            joint_clf: None,
            alpha,
            text_order,
        })
    }

    pub fn class_labels(&self) -> &[String] {
        match self.mode {
            FusionMode::TextOnly | FusionMode::Late => &self.text_clf.as_ref().expect("text classifier").class_labels,
            FusionMode::StyleOnly => &self.style_clf.as_ref().expect("style classifier").class_labels,
            FusionMode::Early => &self.joint_clf.as_ref().expect("joint classifier").class_labels,
        }
    }

    /// Structural invariants of the mode; run after deserialising.
    pub fn validate(&self) -> Result<()> {
        let missing = |what: &str| Error::InvalidModel(format!("{} mode needs a {what} classifier", self.mode));
        match self.mode {
            FusionMode::TextOnly => self.text_clf.as_ref().ok_or_else(|| missing("text"))?.check(),
            FusionMode::StyleOnly => self.style_clf.as_ref().ok_or_else(|| missing("style"))?.check(),
            FusionMode::Early => self.joint_clf.as_ref().ok_or_else(|| missing("joint"))?.check(),
            FusionMode::Late => {
                check_alpha(self.alpha)?;
                let t = self.text_clf.as_ref().ok_or_else(|| missing("text"))?;
                let s = self.style_clf.as_ref().ok_or_else(|| missing("style"))?;
                t.check()?;
                s.check()?;
                if t.class_labels != s.class_labels {
                    return Err(Error::InvalidModel("text and style classifiers disagree on classes".into()));
                }
                Ok(())
            }
        }
    }

    pub fn classify(&self, x_t: &[T], x_s: &[T]) -> Result<Prediction<T>> {
        match self.mode {
            FusionMode::TextOnly => {
                let c = self.text_clf.as_ref().expect("validated text classifier");
                Ok(prediction(&c.class_labels, c.scores(x_t)?))
            }
            FusionMode::StyleOnly => {
                let c = self.style_clf.as_ref().expect("validated style classifier");
                Ok(prediction(&c.class_labels, c.scores(x_s)?))
            }
            FusionMode::Early => early_fuse_classify(x_t, x_s, self),
            FusionMode::Late => late_fuse_score(x_t, x_s, self),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fusion model serialises")
    }
}

/// Sigmoid scores of the joint classifier on `[x_t ; x_s]`.
pub fn early_fuse_classify<T: Scalar>(x_t: &[T], x_s: &[T], model: &FusionModel<T>) -> Result<Prediction<T>> {
    if model.mode != FusionMode::Early {
        return Err(Error::InvalidModel(format!("expected early mode, got {}", model.mode)));
    }
    let joint = model
        .joint_clf
        .as_ref()
        .ok_or_else(|| Error::InvalidModel("missing joint classifier".into()))?;
    let mut x = Vec::with_capacity(x_t.len() + x_s.len());
    x.extend_from_slice(x_t);
    x.extend_from_slice(x_s);
    Ok(prediction(&joint.class_labels, joint.scores(&x)?))
}

/// `(1 - alpha) * sigmoid(W_t x_t + b_t) + alpha * sigmoid(W_s x_s + b_s)`.
pub fn late_fuse_score<T: Scalar>(x_t: &[T], x_s: &[T], model: &FusionModel<T>) -> Result<Prediction<T>> {
    if model.mode != FusionMode::Late {
        return Err(Error::InvalidModel(format!("expected late mode, got {}", model.mode)));
    }
    let (t, s) = match (&model.text_clf, &model.style_clf) {
        (Some(t), Some(s)) => (t, s),
        _ => return Err(Error::InvalidModel("late mode needs both classifiers".into())),
    };
    let scores = late_scores(t, s, x_t, x_s, model.alpha)?;
    Ok(prediction(&t.class_labels, scores))
}

fn late_scores<T: Scalar>(
    t: &LinearClassifier<T>,
    s: &LinearClassifier<T>,
    x_t: &[T],
    x_s: &[T],
    alpha: T,
) -> Result<Vec<T>> {
    check_alpha(alpha)?;
    let st = t.scores(x_t)?;
    let ss = s.scores(x_s)?;
    Ok(st
        .into_iter()
        .zip(ss)
        .map(|(a, b)| (T::one() - alpha) * a + alpha * b)
        .collect())
}

/// One labelled storefront in feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionSample<T> {
    pub text: Vec<T>,
    pub style: Vec<T>,
    pub label: String,
}

/// Default alpha grid `{0.0, 0.1, ..., 1.0}`.
pub fn default_alpha_grid<T: Scalar>() -> Vec<T> {
    (0..=10).map(|i| T::lit(i as f64 / 10.0)).collect()
}

/// Late-fusion accuracy of the classifier pair at one alpha.
pub fn late_accuracy<T: Scalar>(
    text_clf: &LinearClassifier<T>,
    style_clf: &LinearClassifier<T>,
    set: &[FusionSample<T>],
    alpha: T,
) -> Result<T> {
    if set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for s in set {
        let scores = late_scores(text_clf, style_clf, &s.text, &s.style, alpha)?;
        let i = argmax(&scores).unwrap_or(0);
        if text_clf.class_labels[i] == s.label {
            hits += 1;
        }
    }
    Ok(T::count(hits) / T::count(set.len()))
}

/// Grid value with the best training accuracy, smaller alpha on ties.
pub fn select_alpha<T: Scalar>(
    text_clf: &LinearClassifier<T>,
    style_clf: &LinearClassifier<T>,
    train: &[FusionSample<T>],
    grid: &[T],
) -> Result<T> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty alpha grid".into()));
    }
    let mut sorted = grid.to_vec();
    for &a in &sorted {
        check_alpha(a)?;
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite alpha"));
    let mut best: Option<(T, T)> = None;
    for a in sorted {
        let acc = late_accuracy(text_clf, style_clf, train, a)?;
        if best.is_none_or(|(_, b)| acc > b) {
            best = Some((a, acc));
        }
    }
    Ok(best.expect("non-empty grid").0)
}

/// Fraction of samples whose predicted label equals the ground truth.
pub fn evaluate_accuracy<T: Scalar>(model: &FusionModel<T>, test: &[FusionSample<T>]) -> Result<T> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for s in test {
        if model.classify(&s.text, &s.style)?.label == s.label {
            hits += 1;
        }
    }
    Ok(T::count(hits) / T::count(test.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    fn clf(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> LinearClassifier<f64> {
        let n = weights.len();
        LinearClassifier {
            weights,
            bias,
            class_labels: labels(n),
        }
    }

    #[test]
    fn zero_weights_score_half_and_pick_first() {
        let m = FusionModel::early(clf(vec![vec![0.0; 3]; 2], vec![0.0; 2]), 2).unwrap();
        let p = early_fuse_classify(&[1.0], &[2.0, 3.0], &m).unwrap();
        assert_eq!(p.scores, vec![0.5, 0.5]);
        assert_eq!(p.index, 0);
        assert!(early_fuse_classify(&[1.0], &[2.0], &m).is_err());
    }

    #[test]
    fn hand_built_early_scores() {
        // class 0 looks at the text unit vector, class 1 at the style one.
        let m = FusionModel::early(clf(vec![vec![2.0, 0.0], vec![0.0, -1.0]], vec![0.5, 0.25]), 1).unwrap();
        let p = early_fuse_classify(&[1.0], &[1.0], &m).unwrap();
        let expect = [1.0 / (1.0 + (-2.5f64).exp()), 1.0 / (1.0 + (0.75f64).exp())];
        assert!((p.scores[0] - expect[0]).abs() < 1e-15);
        assert!((p.scores[1] - expect[1]).abs() < 1e-15);
        assert_eq!(p.label, "c0");
    }

    #[test]
    fn late_alpha_guard_and_zero_logits() {
        let t = clf(vec![vec![0.0]; 3], vec![0.0; 3]);
        let s = clf(vec![vec![0.0, 0.0]; 3], vec![0.0; 3]);
        assert!(matches!(
            FusionModel::late(t.clone(), s.clone(), 1.5, 2),
            Err(Error::InvalidAlpha(_))
        ));
        let m = FusionModel::late(t, s, 0.4, 2).unwrap();
        let p = late_fuse_score(&[3.0], &[1.0, 2.0], &m).unwrap();
        assert!(p.scores.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        let mut bad = m.clone();
        bad.alpha = -0.1;
        assert!(matches!(late_fuse_score(&[3.0], &[1.0, 2.0], &bad), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn degenerate_training_inputs() {
        let x = vec![vec![1.0f64], vec![2.0]];
        let same = vec!["a".to_string(), "a".to_string()];
        assert!(matches!(train_linear(&x, &same, 1e-4, 10, 0), Err(Error::DegenerateTrainingSet(_))));
        let ragged = vec![vec![1.0f64], vec![2.0, 3.0]];
        let two = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            train_linear(&ragged, &two, 1e-4, 10, 0),
            Err(Error::FeatureDimensionMismatch { .. })
        ));
    }

    #[test]
    fn singleton_grid_and_empty_set() {
        let t = clf(vec![vec![1.0], vec![-1.0]], vec![0.0; 2]);
        let s = clf(vec![vec![1.0], vec![-1.0]], vec![0.0; 2]);
        let set = vec![FusionSample {
            text: vec![1.0],
            style: vec![1.0],
            label: "c0".into(),
        }];
        assert_eq!(select_alpha(&t, &s, &set, &[0.4]).unwrap(), 0.4);
        // Every alpha is perfect here, so the smallest wins.
        assert_eq!(select_alpha(&t, &s, &set, &[0.7, 0.2, 0.5]).unwrap(), 0.2);
        assert!(matches!(select_alpha(&t, &s, &[], &[0.4]), Err(Error::EmptyDataset)));
        let m = FusionModel::text_only(t, 2).unwrap();
        assert!(matches!(evaluate_accuracy(&m, &[]), Err(Error::EmptyDataset)));
        assert_eq!(evaluate_accuracy(&m, &set).unwrap(), 1.0);
    }

    #[test]
    fn mode_parse() {
        assert_eq!("late".parse::<FusionMode>().unwrap(), FusionMode::Late);
        assert!("mid".parse::<FusionMode>().is_err());
    }
}
