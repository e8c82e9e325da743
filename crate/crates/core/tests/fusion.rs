use mallnav_core::fusion::{
    default_alpha_grid, early_fuse_classify, late_fuse_score, select_alpha, FusionMode, FusionModel, FusionSample,
    LinearClassifier,
};
use mallnav_core::logistic::TrainConfig;
use mallnav_core::textfeat::{geometry_features, normalize_text, NGramVocabulary, VocabSource};
use mallnav_core::Error;
use mallnav_core::Rect;
use proptest::prelude::*;

fn clf(rows: &[Vec<f64>], bias: &[f64]) -> LinearClassifier<f64> {
    LinearClassifier {
        weights: rows.to_vec(),
        bias: bias.to_vec(),
        class_labels: (0..rows.len()).map(|k| format!("c{k}")).collect(),
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `(classes, text dim, style dim)` with weights and inputs to match.
fn setup() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..5, 1usize..6, 1usize..6).prop_flat_map(|(c, dt, ds)| {
        (
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dt), c),
            prop::collection::vec(-1.0f64..1.0, c),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, ds), c),
            prop::collection::vec(-1.0f64..1.0, c),
            prop::collection::vec(0.0f64..1.0, dt),
            prop::collection::vec(0.0f64..1.0, ds),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn late_scores_are_the_convex_mix((wt, bt, ws, bs, xt, xs) in setup(), alpha in 0.0f64..=1.0) {
        let m = FusionModel::late(clf(&wt, &bt), clf(&ws, &bs), alpha, 2).unwrap();
        let p = late_fuse_score(&xt, &xs, &m).unwrap();
        for (k, &s) in p.scores.iter().enumerate() {
            let zt: f64 = wt[k].iter().zip(&xt).map(|(a, b)| a * b).sum::<f64>() + bt[k];
            let zs: f64 = ws[k].iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>() + bs[k];
            let want = (1.0 - alpha) * sigmoid(zt) + alpha * sigmoid(zs);
            prop_assert!((s - want).abs() < 1e-12);
            prop_assert!(s > 0.0 && s < 1.0);
        }
        prop_assert_eq!(p.index, argmax(&p.scores));
    }

    #[test]
    fn endpoints_reduce_to_single_models((wt, bt, ws, bs, xt, xs) in setup()) {
        let t = clf(&wt, &bt);
        let s = clf(&ws, &bs);
        let at0 = late_fuse_score(&xt, &xs, &FusionModel::late(t.clone(), s.clone(), 0.0, 2).unwrap()).unwrap();
        let at1 = late_fuse_score(&xt, &xs, &FusionModel::late(t.clone(), s.clone(), 1.0, 2).unwrap()).unwrap();
        let text = FusionModel::text_only(t, 2).unwrap().classify(&xt, &xs).unwrap();
        let style = FusionModel::style_only(s).unwrap().classify(&xt, &xs).unwrap();
        prop_assert_eq!(at0.index, text.index);
        prop_assert_eq!(at1.index, style.index);
    }

    #[test]
    fn rescaled_inputs_and_weights_agree((wt, bt, ws, bs, xt, xs) in setup(), c in 0.1f64..10.0) {
        let m = FusionModel::late(clf(&wt, &bt), clf(&ws, &bs), 0.4, 2).unwrap();
        let scale = |w: &[Vec<f64>]| w.iter().map(|r| r.iter().map(|v| v / c).collect()).collect::<Vec<Vec<f64>>>();
        let m2 = FusionModel::late(clf(&scale(&wt), &bt), clf(&scale(&ws), &bs), 0.4, 2).unwrap();
        let up = |x: &[f64]| x.iter().map(|v| v * c).collect::<Vec<f64>>();
        let a = late_fuse_score(&xt, &xs, &m).unwrap();
        let b = late_fuse_score(&up(&xt), &up(&xs), &m2).unwrap();
        for (x, y) in a.scores.iter().zip(&b.scores) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn early_fusion_reads_concatenation((wt, bt, _ws, _bs, xt, xs) in setup()) {
        let dim = xt.len() + xs.len();
        let rows: Vec<Vec<f64>> = wt.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0.5, xs.len())).collect()).collect();
        let m = FusionModel::early(clf(&rows, &bt), 2).unwrap();
        prop_assert_eq!(m.joint_clf.as_ref().unwrap().dim(), dim);
        prop_assert!(early_fuse_classify(&xt, &xs, &m).is_ok());
        let short = early_fuse_classify(&xt, &xs[1..], &m);
        let mismatch = matches!(short, Err(Error::FeatureDimensionMismatch { .. }));
        prop_assert!(mismatch);
    }

    #[test]
    fn vectors_are_binary_and_truncation_is_a_prefix_view(names in prop::collection::vec("[A-Za-z0-9 &'-]{1,12}", 1..6), k in 1usize..4, probe in "[A-Za-z0-9 ]{0,16}") {
        let v = NGramVocabulary::from_corpus(&names, 4).unwrap();
        let g = v.truncate(k).unwrap();
        prop_assert!(g.grams().iter().all(|x| x.chars().count() <= k));
        let full: Vec<f64> = v.vectorize(&probe);
        let short: Vec<f64> = g.vectorize(&probe);
        prop_assert!(full.iter().all(|&x| x == 0.0 || x == 1.0));
        for (gram, val) in g.grams().iter().zip(&short) {
            let at = v.grams().iter().position(|x| x == gram).unwrap();
            prop_assert_eq!(full[at], *val);
            prop_assert_eq!(*val == 1.0, normalize_text(&probe).contains(gram.as_str()));
        }
    }

    #[test]
    fn normalisation_is_idempotent(s in ".{0,24}") {
        let n = normalize_text(&s);
        prop_assert_eq!(normalize_text(&n), n.clone());
        prop_assert!(n.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()));
    }

    #[test]
    fn geometry_is_width_height_sum_ratio(w in 1u32..500, h in 1u32..500) {
        let g: [f64; 4] = geometry_features(&Rect::new(3, 4, w, h)).unwrap();
        prop_assert_eq!(g, [w as f64, h as f64, (w + h) as f64, w as f64 / h as f64]);
    }
}

#[test]
fn degenerate_boxes_are_rejected() {
    assert!(matches!(
        geometry_features::<f64>(&Rect::new(0, 0, 0, 4)),
        Err(Error::DegenerateBbox { .. })
    ));
}

#[test]
fn alpha_out_of_range_is_rejected() {
    let t = clf(&[vec![1.0], vec![-1.0]], &[0.0, 0.0]);
    assert!(matches!(FusionModel::late(t.clone(), t, 1.5, 2), Err(Error::InvalidAlpha(_))));
}

#[test]
fn alpha_ties_go_to_the_smaller_value() {
    // Both channels agree on every sample, so every alpha scores the same.
    let t = clf(&[vec![1.0], vec![-1.0]], &[0.0, 0.0]);
    let set: Vec<FusionSample<f64>> = [(1.0, "c0"), (-1.0, "c1")]
        .iter()
        .map(|&(x, l)| FusionSample {
            text: vec![x],
            style: vec![x],
            label: l.into(),
        })
        .collect();
    assert_eq!(select_alpha(&t, &t, &set, &default_alpha_grid()).unwrap(), 0.0);
}

#[test]
fn class_index_ties_go_low() {
    let m = FusionModel::text_only(clf(&[vec![0.0], vec![0.0], vec![0.0]], &[0.0; 3]), 1).unwrap();
    assert_eq!(m.classify(&[1.0], &[]).unwrap().index, 0);
}

#[test]
fn model_document_round_trips_exactly() {
    let t = clf(&[vec![0.1234567890123, -2.0], vec![1e-17, 3.0]], &[0.3, -0.7]);
    let s = clf(&[vec![1.0 / 3.0], vec![-0.25]], &[0.0, 1.0]);
    let m = FusionModel::late(t, s, 0.3, 2).unwrap();
    let back: FusionModel<f64> = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.mode, FusionMode::Late);
}

#[test]
fn f32_models_classify_like_f64() {
    let t = LinearClassifier::<f32> {
        weights: vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
        bias: vec![0.0, 0.1],
        class_labels: vec!["a".into(), "b".into()],
    };
    let m = FusionModel::late(t.clone(), t, 0.5f32, 2).unwrap();
    assert_eq!(m.classify(&[1.0, 0.0], &[1.0, 0.0]).unwrap().label, "a");
    let _ = TrainConfig::<f32>::default();
}

#[test]
fn vocabulary_rejects_duplicates_and_empties() {
    assert!(NGramVocabulary::new(vec!["ab".into(), "ab".into()], VocabSource::CanonicalFile).is_err());
    assert!(NGramVocabulary::new(vec![String::new()], VocabSource::CanonicalFile).is_err());
    assert!(matches!(
        NGramVocabulary::from_corpus(&["x"], 0),
        Err(Error::InvalidOrder(0))
    ));
}
