use mallnav_core::fusion::{default_alpha_grid, FusionMode};
use mallnav_core::logistic::{fit_binary, TrainConfig};
use mallnav_core::storefront::{
    featurize, save_corpus, split, train_fpd_on, train_models, training_brands, vocabulary, ClassifierBundle, Corpus,
    Split, Storefront, StyleProvider, TextPipeline,
};
use mallnav_core::stylefeat::{PatchSpec, BUILTIN_DIM};
use mallnav_core::synth::{generate_storefronts, StorefrontParams};
use mallnav_core::textfeat::{filter_detections, TextDetection};

fn corpus(per_class: usize, seed: u64) -> Vec<Storefront> {
    let p = StorefrontParams {
        brands: vec!["Nike".into(), "Puma".into(), "Gucci".into(), "Zara".into()],
        per_class,
        ..StorefrontParams::default()
    };
    generate_storefronts(&p, seed).iter().map(Storefront::from_sample).collect()
}

#[test]
fn corpus_directory_round_trip() {
    let items = corpus(3, 1);
    let dir = tempfile::tempdir().unwrap();
    save_corpus(dir.path(), &items).unwrap();
    let loaded = Corpus::load(dir.path()).unwrap().load_images().unwrap();
    assert_eq!(loaded.len(), items.len());
    for (a, b) in items.iter().zip(&loaded) {
        assert_eq!(a.entry, b.entry);
        assert_eq!(a.image, b.image);
    }
}

#[test]
fn duplicate_corpus_ids_are_refused() {
    let mut items = corpus(1, 2);
    items[1].entry.id = items[0].entry.id.clone();
    let dir = tempfile::tempdir().unwrap();
    let _ = save_corpus(dir.path(), &items);
    assert!(Corpus::load(dir.path()).is_err());
}

#[test]
fn zero_threshold_keeps_every_detection() {
    let items = corpus(6, 3);
    let train = split(&items, Split::Train);
    let vocab = vocabulary(&training_brands(&items), None).unwrap();
    let fpd = train_fpd_on(&train, &vocab, &TrainConfig::default(), 0.0).unwrap();
    for s in &items {
        let mut dets: Vec<TextDetection<f64>> = s
            .entry
            .detections
            .iter()
            .map(|d| TextDetection::new(d.bbox, d.text.clone(), &vocab).unwrap())
            .collect();
        let kept = filter_detections(&mut dets, &fpd).unwrap();
        assert_eq!(kept.len(), dets.len());
        assert!(dets.iter().all(|d| d.reliable == Some(true)));
    }
}

#[test]
fn training_is_deterministic_and_bundle_round_trips() {
    let items = corpus(8, 4);
    let train = split(&items, Split::Train);
    let vocab = vocabulary(&training_brands(&items), None).unwrap();
    let cfg = TrainConfig::<f64>::default();
    let fpd = train_fpd_on(&train, &vocab, &cfg, 0.5).unwrap();
    let text = TextPipeline::new(vocab.clone(), 2, Some(fpd.clone())).unwrap();
    let style = StyleProvider::Builtin(PatchSpec::default());
    let samples = featurize(&train, &text, &style).unwrap();
    let a = train_models(&samples, &default_alpha_grid(), &cfg, 2).unwrap();
    let b = train_models(&samples, &default_alpha_grid(), &cfg, 2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.joint.dim(), text.vocab_k.len() + BUILTIN_DIM);

    let bundle = ClassifierBundle {
        vocab: vocab.grams().to_vec(),
        vocab_hash: vocab.hash(),
        k: 2,
        patch: PatchSpec::default(),
        style_dim: BUILTIN_DIM,
        fpd: Some(fpd),
        model: a.model(FusionMode::Late).unwrap(),
    };
    let json = bundle.to_json();
    let back = ClassifierBundle::<f64>::from_json(&json).unwrap();
    assert_eq!(back, bundle);
    assert_eq!(back.to_json(), json);

    let mut tampered = back.clone();
    tampered.vocab.swap(0, 1);
    assert!(tampered.text_pipeline().is_err());
}

#[test]
fn logistic_fit_separates_a_threshold() {
    let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 40.0]).collect();
    let y: Vec<bool> = (0..40).map(|i| i >= 20).collect();
    let fit = fit_binary(&x, &y, &TrainConfig::default());
    let predict = |v: f64| fit.weights[0] * v + fit.bias > 0.0;
    let right = x.iter().zip(&y).filter(|(v, &l)| predict(v[0]) == l).count();
    assert!(right >= 36, "{right}/40");
    assert!(fit.losses.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}
