use image::{Rgb, RgbImage};
use mallnav_core::storefront::{featurize, Storefront, StyleProvider, TextPipeline};
use mallnav_core::stylefeat::{
    aggregate_style, builtin_descriptor, builtin_style, load_patch_features, read_patch_features, sample_patch_boxes,
    save_patch_features, FeatureFile, PatchSpec, StyleSource, BUILTIN_DIM,
};
use mallnav_core::synth::{generate_storefronts, StorefrontParams};
use mallnav_core::textfeat::NGramVocabulary;
use mallnav_core::Error;
use proptest::prelude::*;

/// Three images of sixteen 4096-d patches, the shape an AlexNet-class
/// exporter writes.
fn stub(ids: &[&str]) -> FeatureFile {
    FeatureFile {
        dim: 4096,
        patches_per_image: 16,
        entries: ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let patches = (0..16)
                    .map(|p| (0..4096).map(|d| ((i * 7 + p * 13 + d) % 101) as f32 / 100.0 - 0.25).collect())
                    .collect();
                (id.to_string(), patches)
            })
            .collect(),
    }
}

#[test]
fn stub_fixture_round_trip_and_size() {
    let ids = ["nike-000", "puma-001", "gucci-002"];
    let file = stub(&ids);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stub.mgft");
    save_patch_features(&path, &file).unwrap();
    let header = 4 + 2 + 4 + 2;
    let body: usize = ids.iter().map(|id| 4 + id.len() + 16 * 4096 * 4).sum();
    assert_eq!(std::fs::metadata(&path).unwrap().len() as usize, header + body);
    let back = load_patch_features(&path).unwrap();
    assert_eq!(back, file);

    let bytes = std::fs::read(&path).unwrap();
    let mut again = Vec::new();
    mallnav_core::stylefeat::write_patch_features(&mut again, &back).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn stub_features_feed_the_text_style_pipeline() {
    let params = StorefrontParams {
        brands: vec!["Nike".into(), "Puma".into(), "Gucci".into()],
        per_class: 1,
        ..StorefrontParams::default()
    };
    let items: Vec<Storefront> = generate_storefronts(&params, 1).iter().map(Storefront::from_sample).collect();
    let ids: Vec<&str> = items.iter().map(|s| s.entry.id.as_str()).collect();
    let style = StyleProvider::from_feature_file(&stub(&ids)).unwrap();
    let vocab = NGramVocabulary::from_corpus(&["Nike", "Puma", "Gucci"], 4).unwrap();
    let text = TextPipeline::<f64>::new(vocab, 2, None).unwrap();
    let refs: Vec<&Storefront> = items.iter().collect();
    let samples = featurize(&refs, &text, &style).unwrap();
    for s in &samples {
        assert_eq!(s.style.len(), 4096);
        assert_eq!(s.text.len() + s.style.len(), text.vocab_k.len() + 4096);
    }
    let missing = StyleProvider::from_feature_file(&stub(&["other"])).unwrap();
    assert!(matches!(featurize(&refs, &text, &missing), Err(Error::MalformedFeatureFile(_))));
}

#[test]
fn every_truncation_is_rejected() {
    let file = stub(&["a"]);
    let mut bytes = Vec::new();
    mallnav_core::stylefeat::write_patch_features(&mut bytes, &file).unwrap();
    for cut in [0, 3, 5, 9, 11, 13, 16, 17, 1000, bytes.len() - 1] {
        assert!(read_patch_features(&bytes[..cut]).is_err() || cut == 12, "cut {cut}");
    }
    // A header alone is a valid empty file.
    assert_eq!(read_patch_features(&bytes[..12]).unwrap().entries.len(), 0);
}

#[test]
fn patch_boxes_are_seeded() {
    let spec = PatchSpec {
        count: 16,
        side_fraction: 0.5,
        seed: 42,
    };
    let a = sample_patch_boxes(120, 80, &spec).unwrap();
    assert_eq!(a, sample_patch_boxes(120, 80, &spec).unwrap());
    let b = sample_patch_boxes(120, 80, &PatchSpec { seed: 43, ..spec }).unwrap();
    assert_ne!(a, b);
}

#[test]
fn flat_patch_has_no_gradient_mass() {
    let patch = RgbImage::from_pixel(16, 16, Rgb([200, 10, 10]));
    let d: Vec<f64> = builtin_descriptor(&patch).unwrap();
    assert_eq!(d.len(), BUILTIN_DIM);
    let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-9);
    assert!(d[64..].iter().all(|&v| v == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn patch_boxes_stay_inside(w in 8u32..300, h in 8u32..300, count in 1usize..32, frac in 0.1f64..1.0, seed: u64) {
        let spec = PatchSpec { count, side_fraction: frac, seed };
        let boxes = sample_patch_boxes(w, h, &spec).unwrap();
        prop_assert_eq!(boxes.len(), count);
        let side = spec.side(w, h);
        for b in boxes {
            prop_assert_eq!((b.w, b.h), (side, side));
            prop_assert!(b.x + b.w <= w && b.y + b.h <= h);
        }
    }

    #[test]
    fn max_aggregation_dominates_each_patch(v in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..10)) {
        let agg = aggregate_style(&v, StyleSource::ExporterFile).unwrap();
        for p in &v {
            prop_assert!(p.iter().zip(&agg.values).all(|(x, m)| x <= m));
        }
        for (d, m) in agg.values.iter().enumerate() {
            prop_assert!(v.iter().any(|p| p[d] == *m));
        }
    }

    #[test]
    fn builtin_style_is_deterministic(seed in 0u64..1000) {
        let img = RgbImage::from_fn(64, 48, |x, y| Rgb([(x * 4) as u8, (y * 5) as u8, ((x + y) * 3) as u8]));
        let spec = PatchSpec { seed, ..PatchSpec::default() };
        let a = builtin_style::<f64>(&img, &spec).unwrap();
        let b = builtin_style::<f32>(&img, &spec).unwrap();
        prop_assert_eq!(a.values.len(), BUILTIN_DIM);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - *y as f64).abs() < 1e-4);
        }
    }
}
