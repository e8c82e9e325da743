//! The full indicator-map pass: text removal, two SRM passes, road
//! selection, shop labelling and node grouping.

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::component::{components_from_labels, MapComponent};
use super::filter::{filter_components, ComponentFilter};
use super::inpaint::inpaint_regions;
use super::mser::{detect_mser, MserParams};
use super::nodes::{build_nodes, merge_small_nodes, RoadNode};
use super::rlsa::{group_bbox, rlsa_cluster};
use super::road::{extract_shop_blocks, score_road, RoadScoring};
use super::srm::{srm_segment, SrmParams};
use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::ocr::OcrEngine;
use crate::raster::{palette, to_gray, LabelRaster, Mask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapParseConfig {
    /// `None` derives the defaults from the image size.
    pub mser: Option<MserParams>,
    pub filter: ComponentFilter,
    pub h_gap: u32,
    pub v_gap: u32,
    /// Padding around a text group before it is handed to OCR.
    pub ocr_pad: u32,
    pub mask_dilation: u32,
    pub inpaint_iters: usize,
    pub q_road: f64,
    pub q_shops: f64,
    pub shop_min_area: usize,
    /// `None` uses twice the median shop half-width.
    pub radius: Option<u32>,
    pub min_node_pixels: usize,
}

impl Default for MapParseConfig {
    fn default() -> Self {
        MapParseConfig {
            mser: None,
            filter: ComponentFilter::default(),
            h_gap: 4,
            v_gap: 1,
            ocr_pad: 2,
            mask_dilation: 1,
            inpaint_iters: 5000,
            q_road: 16.0,
            q_shops: 512.0,
            shop_min_area: 50,
            radius: None,
            min_node_pixels: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextLabel {
    pub bbox: Rect,
    pub text: String,
    pub confidence: f64,
}

#[derive(Debug, Clone)]
pub struct ParsedMap {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<TextLabel>,
    pub text_mask: Mask,
    pub inpainted: RgbImage,
    /// First-pass segmentation.
    pub segments: LabelRaster,
    pub components: Vec<MapComponent>,
    pub scoring: RoadScoring,
    pub road: MapComponent,
    pub shops: Vec<MapComponent>,
    pub radius: u32,
    pub nodes: Vec<RoadNode>,
}

/// Twice the median of half the shorter bbox side, at least 1.
pub fn default_radius(shops: &[MapComponent]) -> u32 {
    let mut halves: Vec<f64> = shops
        .iter()
        .map(|s| s.bbox.w.min(s.bbox.h) as f64 / 2.0)
        .collect();
    if halves.is_empty() {
        return 1;
    }
    halves.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = halves.len();
    let median = if n % 2 == 1 {
        halves[n / 2]
    } else {
        (halves[n / 2 - 1] + halves[n / 2]) / 2.0
    };
    ((2.0 * median).round() as u32).max(1)
}

/// Text-like components found by MSER, grouped into lines by RLSA.
pub fn detect_text_groups(image: &RgbImage, cfg: &MapParseConfig) -> Result<Vec<Vec<MapComponent>>> {
    let gray = to_gray(image);
    let params = cfg.mser.unwrap_or_else(|| MserParams::for_image(image.width(), image.height()));
    let regions = detect_mser(&gray, &params)?;
    let comps = filter_components(regions.into_iter().map(|r| r.component).collect(), &cfg.filter);
    Ok(rlsa_cluster(&comps, cfg.h_gap, cfg.v_gap))
}

/// Attach each recognised label to the shop holding most of its box.
pub fn label_shops(shops: &mut [MapComponent], labels: &[TextLabel]) {
    for label in labels {
        if label.text.trim().is_empty() {
            continue;
        }
        let b = label.bbox;
        let best = shops
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let hits = (b.y..b.bottom())
                    .flat_map(|y| (b.x..b.right()).map(move |x| (x, y)))
                    .filter(|&(x, y)| s.contains(x, y))
                    .count();
                (hits, k)
            })
            .filter(|&(hits, _)| hits > 0)
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        if let Some((_, k)) = best {
            if shops[k].label.is_none() {
                shops[k].label = Some(label.text.trim().to_string());
            }
        }
    }
}

pub fn parse_map(image: &RgbImage, ocr: &dyn OcrEngine, cfg: &MapParseConfig) -> Result<ParsedMap> {
    let (width, height) = image.dimensions();
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("map image"));
    }
    let groups = detect_text_groups(image, cfg)?;
    let mut mask = Mask::new(width, height);
    let mut labels = Vec::with_capacity(groups.len());
    for g in &groups {
        for c in g {
            mask.fill_pixels(&c.pixels);
        }
        let region = group_bbox(g).padded(cfg.ocr_pad, width, height);
        let r = ocr.recognize(image, region)?;
        labels.push(TextLabel {
            bbox: group_bbox(g),
            text: r.text,
            confidence: r.confidence,
        });
    }
    let text_mask = mask.dilate(cfg.mask_dilation);
    let inpainted = if text_mask.count() == text_mask.data.len() {
        return Err(Error::NothingToAnchor);
    } else {
        inpaint_regions(image, &text_mask, cfg.inpaint_iters)?
    };

    let segments = srm_segment(&inpainted, &SrmParams::new(cfg.q_road))?;
    let mut components = components_from_labels(&segments);
    let scoring = score_road(&mut components, width, height)?;
    let road = components
        .iter()
        .find(|c| c.id == scoring.road_id)
        .expect("road among components")
        .clone();

    let mut shops = extract_shop_blocks(&inpainted, &road, &SrmParams::new(cfg.q_shops), cfg.shop_min_area)?;
    label_shops(&mut shops, &labels);
    let radius = cfg.radius.unwrap_or_else(|| default_radius(&shops));
    let nodes = merge_small_nodes(build_nodes(&road, &shops, radius)?, cfg.min_node_pixels);

    Ok(ParsedMap {
        width,
        height,
        labels,
        text_mask,
        inpainted,
        segments,
        components,
        scoring,
        road,
        shops,
        radius,
        nodes,
    })
}

/// Shop blocks in their palette colours, road pixels coloured by node and
/// node centroids marked in black.
pub fn render_nodes(parsed: &ParsedMap) -> RgbImage {
    let mut img = RgbImage::from_pixel(parsed.width, parsed.height, Rgb([255, 255, 255]));
    for s in &parsed.shops {
        let c = palette(s.id as u32 + 1000);
        let soft = Rgb(c.0.map(|v| 128 + v / 2));
        for &(x, y) in &s.pixels {
            img.put_pixel(x, y, soft);
        }
    }
    for n in &parsed.nodes {
        let c = palette(n.id as u32);
        for &(x, y) in &n.pixels {
            img.put_pixel(x, y, c);
        }
    }
    for n in &parsed.nodes {
        let (cx, cy) = (n.centroid.0.round() as i64, n.centroid.1.round() as i64);
        for (dx, dy) in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && (x as u32) < parsed.width && (y as u32) < parsed.height {
                img.put_pixel(x as u32, y as u32, Rgb([0, 0, 0]));
            }
        }
    }
    img
}
