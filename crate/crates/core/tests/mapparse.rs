mod common;

use std::collections::BTreeSet;

use image::{Rgb, RgbImage};
use mallnav_core::mapparse::{
    build_nodes, components_from_labels, detect_mser, merge_small_nodes, parse_map, score_road, srm_segment,
    MapComponent, MapParseConfig, MserParams, SrmParams,
};
use mallnav_core::raster::to_gray;
use mallnav_core::synth::{generate_mall, generate_piecewise, MallParams, RoadLayout};
use proptest::prelude::*;

#[test]
fn srm_recovers_piecewise_maps_exactly() {
    for seed in 0..20 {
        let m = generate_piecewise(120, 90, 3 + seed as usize % 6, seed);
        let seg = srm_segment(&m.image, &SrmParams::new(16.0)).unwrap();
        assert!(common::same_partition(&seg.labels, &m.labels), "seed {seed}");
        assert_eq!(seg.count as usize, m.regions.len());
    }
}

#[test]
fn srm_count_grows_with_q() {
    for seed in 100..110 {
        let m = generate_piecewise(96, 64, 6, seed);
        let counts: Vec<u32> = [16.0, 64.0, 256.0, 512.0]
            .iter()
            .map(|&q| srm_segment(&m.image, &SrmParams::new(q)).unwrap().count)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
}

#[test]
fn srm_merges_gentle_noise_at_low_q() {
    let img = RgbImage::from_fn(40, 40, |x, y| {
        let v = 120 + ((x * 7 + y * 13) % 5) as u8;
        Rgb([v, v, v])
    });
    assert_eq!(srm_segment(&img, &SrmParams::new(16.0)).unwrap().count, 1);
}

fn true_road(m: &mallnav_core::synth::SynthMall, comps: &[MapComponent]) -> usize {
    comps
        .iter()
        .max_by_key(|c| c.pixels.iter().filter(|&&(x, y)| m.is_road(x, y)).count())
        .unwrap()
        .id
}

#[test]
fn road_score_matches_direct_evaluation() {
    for seed in 0..8 {
        let m = generate_mall(&MallParams::default(), seed);
        let (w, h) = m.clean.dimensions();
        let seg = srm_segment(&m.clean, &SrmParams::new(16.0)).unwrap();
        let mut comps = components_from_labels(&seg);
        let scoring = score_road(&mut comps, w, h).unwrap();
        let oracle = common::road_scores(&comps, w, h);
        for (t, o) in scoring.terms.iter().zip(&oracle) {
            assert!((t.score - o).abs() <= 1e-9, "seed {seed} comp {}: {} vs {o}", t.id, t.score);
        }
        assert_eq!(scoring.road_id, true_road(&m, &comps), "seed {seed}");
    }
}

#[test]
fn parsed_corridor_and_ring_roads_are_exact() {
    for (seed, layout) in [(1, RoadLayout::Ring), (2, RoadLayout::Corridor), (3, RoadLayout::Ring)] {
        let m = generate_mall(
            &MallParams {
                layout: Some(layout),
                ..MallParams::default()
            },
            seed,
        );
        let p = parse_map(&m.image, &m.ocr, &MapParseConfig::default()).unwrap();
        let (w, h) = m.image.dimensions();
        let truth = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).filter(|&(x, y)| m.is_road(x, y)).count();
        assert_eq!(p.road.pixels.len(), truth, "seed {seed}");
        assert!(p.road.pixels.iter().all(|&(x, y)| m.is_road(x, y)));
        let labels: BTreeSet<String> = p.shops.iter().filter_map(|s| s.label.clone()).collect();
        let ids: BTreeSet<String> = m.shops.iter().map(|s| s.shop_id.clone()).collect();
        assert_eq!(labels, ids);
    }
}

#[test]
fn nodes_match_brute_force_disc_oracle() {
    for seed in 0..25 {
        let (road, shops, r) = common::node_fixture(seed);
        let got: Vec<(BTreeSet<(u32, u32)>, Vec<usize>)> = {
            let mut v: Vec<_> = build_nodes(&road, &shops, r)
                .unwrap()
                .into_iter()
                .map(|n| (n.pixels.into_iter().collect(), n.landmarks))
                .collect();
            v.sort();
            v
        };
        assert_eq!(got, common::nodes(&road.pixels, &shops, r), "seed {seed}");
    }
}

#[test]
fn merging_keeps_every_road_pixel_once() {
    for seed in 0..25 {
        let (road, shops, r) = common::node_fixture(seed);
        let nodes = build_nodes(&road, &shops, r).unwrap();
        let merged = merge_small_nodes(nodes.clone(), 5);
        let all: Vec<(u32, u32)> = merged.iter().flat_map(|n| n.pixels.iter().copied()).collect();
        let unique: BTreeSet<_> = all.iter().copied().collect();
        assert_eq!(all.len(), road.pixels.len());
        assert_eq!(unique.len(), all.len());
        assert!(merged.len() <= nodes.len());
        assert!(merged.iter().enumerate().all(|(k, n)| n.id == k));
    }
}

#[test]
fn mser_finds_dark_glyph_on_light_ground() {
    let mut img = RgbImage::from_pixel(200, 100, Rgb([230, 230, 230]));
    for y in 12..24 {
        for x in 20..26 {
            img.put_pixel(x, y, Rgb([20, 20, 20]));
        }
    }
    let regions = detect_mser(&to_gray(&img), &MserParams::for_image(200, 100)).unwrap();
    assert!(regions.iter().any(|r| r.component.area() == 72));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn srm_segments_are_connected_and_cover(seed in 0u64..1000, q in prop::sample::select(vec![4.0, 16.0, 128.0])) {
        let m = generate_piecewise(48, 40, 4, seed);
        let seg = srm_segment(&m.image, &SrmParams::new(q)).unwrap();
        let comps = components_from_labels(&seg);
        prop_assert_eq!(comps.iter().map(|c| c.area()).sum::<usize>(), 48 * 40);
        prop_assert_eq!(comps.len() as u32, seg.count);
    }

    #[test]
    fn road_scores_lie_in_range(seed in 0u64..1000) {
        let m = generate_piecewise(64, 48, 5, seed);
        let seg = srm_segment(&m.image, &SrmParams::new(16.0)).unwrap();
        let mut comps = components_from_labels(&seg);
        let s = score_road(&mut comps, 64, 48).unwrap();
        prop_assert!(s.terms.iter().all(|t| (-2.0..=1.0).contains(&t.score)));
        let best = s.terms.iter().map(|t| t.score).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(s.terms.iter().find(|t| t.id == s.road_id).unwrap().score, best);
    }

    #[test]
    fn larger_radius_never_loses_landmarks(seed in 0u64..500) {
        let (road, shops, r) = common::node_fixture(seed);
        let sets = |r| -> BTreeSet<usize> {
            build_nodes(&road, &shops, r).unwrap().into_iter().flat_map(|n| n.landmarks).collect()
        };
        prop_assert!(sets(r).is_subset(&sets(r + 3)));
    }
}
