//! Synthetic indicator maps with ground truth: a road (ring, H-shaped
//! corridor or cross) inside the mall rectangle, shop blocks filling the
//! rest of it, solid legend swatches below, shop ids printed on the blocks.

use image::{Rgb, RgbImage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::font::{draw_text, text_height, text_width};
use crate::geom::Rect;
use crate::ocr::{SidecarEntry, SidecarOcr};

pub const BACKGROUND: [u8; 3] = [255, 255, 255];
pub const ROAD: [u8; 3] = [200, 200, 200];
const LEVELS: [u8; 3] = [100, 150, 250];
const NAME_POOL: [&str; 24] = [
    "Adidas", "Gucci", "Zippo", "Nike", "Prada", "Chanel", "Lacoste", "Esprit", "Levis", "Puma", "Bose", "Casio",
    "Diesel", "Fossil", "Guess", "Hermes", "Kenzo", "Lego", "Mango", "Omega", "Rolex", "Swatch", "Tissot", "Vans",
];

/// Colours at least 50 apart from each other on some channel, from the road
/// and from the background.
pub fn block_palette() -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for &r in &LEVELS {
        for &g in &LEVELS {
            for &b in &LEVELS {
                if [r, g, b] != [250, 250, 250] {
                    out.push([r, g, b]);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoadLayout {
    Ring,
    Corridor,
    Cross,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MallShop {
    pub shop_id: String,
    pub name: String,
    pub rect: Rect,
    pub color: [u8; 3],
    pub label_box: Rect,
    /// Point on the road centreline in front of the shop.
    pub frontage: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub brand: String,
    pub shop_id: String,
    pub capture: (u32, u32),
}

#[derive(Debug, Clone)]
pub struct SynthMall {
    pub layout: RoadLayout,
    /// With printed labels.
    pub image: RgbImage,
    /// Without any text.
    pub clean: RgbImage,
    pub road: Vec<Rect>,
    pub road_bbox: Rect,
    pub road_width: u32,
    pub shops: Vec<MallShop>,
    pub services: Vec<Rect>,
    pub legends: Vec<Rect>,
    pub title_box: Rect,
    pub ocr: SidecarOcr,
    pub observations: Vec<Observation>,
}

impl SynthMall {
    pub fn is_road(&self, x: u32, y: u32) -> bool {
        self.road.iter().any(|r| r.contains(x, y))
    }

    /// Ground-truth component of each pixel of the clean map: 0 background,
    /// 1 road, `2 + k` shop k, then service blocks and legends in order.
    pub fn truth_labels(&self) -> Vec<u32> {
        let (w, h) = self.clean.dimensions();
        let mut out = vec![0u32; (w * h) as usize];
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if self.is_road(x, y) {
                    out[i] = 1;
                } else if let Some(k) = self.shops.iter().position(|s| s.rect.contains(x, y)) {
                    out[i] = 2 + k as u32;
                } else if let Some(k) = self.services.iter().position(|r| r.contains(x, y)) {
                    out[i] = 2 + self.shops.len() as u32 + k as u32;
                } else if let Some(k) = self.legends.iter().position(|r| r.contains(x, y)) {
                    out[i] = 2 + (self.shops.len() + self.services.len()) as u32 + k as u32;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MallParams {
    pub width: u32,
    pub height: u32,
    pub layout: Option<RoadLayout>,
    pub min_shops: usize,
    pub max_shops: usize,
    pub capture_jitter: u32,
    pub min_shop_width: u32,
    /// Inclusive range of shop depth (extent away from the road).
    pub shop_depth: (u32, u32),
    /// Reserve an unlabelled service block, twice the shop depth wide, at
    /// each end of a shop row that meets a perpendicular road (ring and
    /// corridor layouts only).
    pub service_blocks: bool,
}

impl Default for MallParams {
    fn default() -> Self {
        MallParams {
            width: 320,
            height: 180,
            layout: None,
            min_shops: 4,
            max_shops: 12,
            capture_jitter: 2,
            min_shop_width: 44,
            shop_depth: (20, 24),
            service_blocks: true,
        }
    }
}

/// Split `len` into `n` parts of at least `min`, randomly.
fn partition(rng: &mut ChaCha8Rng, len: u32, n: usize, min: u32) -> Vec<u32> {
    let spare = len - min * n as u32;
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(spare)) {
        parts.push(min + c - prev);
        prev = c;
    }
    parts
}

/// Shops along `[x0, x0+len)` between rows `y0..y0+depth`, facing a road
/// whose centreline is `front_y`.
#[allow(clippy::too_many_arguments)]
fn row_of_shops(
    rng: &mut ChaCha8Rng,
    x0: u32,
    len: u32,
    n: usize,
    min_w: u32,
    y0: u32,
    depth: u32,
    front_y: f64,
) -> Vec<(Rect, (f64, f64))> {
    let mut x = x0;
    partition(rng, len, n, min_w)
        .into_iter()
        .map(|w| {
            let r = Rect::new(x, y0, w, depth);
            x += w;
            (r, (r.x as f64 + (w as f64 - 1.0) / 2.0, front_y))
        })
        .collect()
}

fn split_count(rng: &mut ChaCha8Rng, total: usize, caps: &[usize]) -> Vec<usize> {
    let mut counts = vec![1; caps.len()];
    let mut left = total - caps.len();
    while left > 0 {
        let open: Vec<usize> = (0..caps.len()).filter(|&k| counts[k] < caps[k]).collect();
        let k = *open.choose(rng).expect("capacity covers total");
        counts[k] += 1;
        left -= 1;
    }
    counts
}

pub fn generate_mall(params: &MallParams, seed: u64) -> SynthMall {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (params.width, params.height);
    let layout = params.layout.unwrap_or_else(|| {
        *[RoadLayout::Ring, RoadLayout::Corridor, RoadLayout::Cross]
            .choose(&mut rng)
            .expect("non-empty")
    });
    let rw = rng.gen_range(10..=14u32);
    let depth = rng.gen_range(params.shop_depth.0..=params.shop_depth.1);
    // A shop minus its label box must stay above the largest text region
    // the default MSER accepts, or the whole block is taken for a glyph.
    let sw = params.min_shop_width.max((w * h / 100 + 600).div_ceil(depth));
    let inner = w.saturating_sub(56);
    let mut road = Vec::new();
    let mut placed: Vec<(Rect, (f64, f64))> = Vec::new();
    let mut services = Vec::new();
    let (mw, mh);
    match layout {
        RoadLayout::Ring | RoadLayout::Corridor => {
            let sv = if params.service_blocks { 2 * depth } else { 0 };
            let row = inner - 2 * sv;
            let cap = (row / sw) as usize;
            let total = rng.gen_range(params.min_shops.max(2)..=params.max_shops.min(2 * cap));
            let counts = split_count(&mut rng, total, &[cap, cap]);
            if layout == RoadLayout::Ring {
                mw = inner + 2 * rw;
                mh = 2 * depth + 2 * rw;
            } else {
                mw = inner + 2 * rw;
                mh = 2 * depth + rw;
            }
            let (mx, my) = ((w - mw) / 2, (h - mh) / 2);
            let c = |v: u32| v as f64 + (rw as f64 - 1.0) / 2.0;
            let rows;
            if layout == RoadLayout::Ring {
                road.push(Rect::new(mx, my, mw, rw));
                road.push(Rect::new(mx, my + mh - rw, mw, rw));
                road.push(Rect::new(mx, my, rw, mh));
                road.push(Rect::new(mx + mw - rw, my, rw, mh));
                placed.extend(row_of_shops(&mut rng, mx + rw + sv, row, counts[0], sw, my + rw, depth, c(my)));
                placed.extend(row_of_shops(&mut rng, mx + rw + sv, row, counts[1], sw, my + rw + depth, depth, c(my + mh - rw)));
                rows = [my + rw, my + rw + depth];
            } else {
                road.push(Rect::new(mx, my, rw, mh));
                road.push(Rect::new(mx + mw - rw, my, rw, mh));
                road.push(Rect::new(mx, my + depth, mw, rw));
                placed.extend(row_of_shops(&mut rng, mx + rw + sv, row, counts[0], sw, my, depth, c(my + depth)));
                placed.extend(row_of_shops(&mut rng, mx + rw + sv, row, counts[1], sw, my + depth + rw, depth, c(my + depth)));
                rows = [my, my + depth + rw];
            }
            if sv > 0 {
                for y in rows {
                    services.push(Rect::new(mx + rw, y, sv, depth));
                    services.push(Rect::new(mx + rw + sv + row, y, sv, depth));
                }
            }
        }
        RoadLayout::Cross => {
            mw = inner + rw;
            mh = 2 * depth + rw;
            let (mx, my) = ((w - mw) / 2, (h - mh) / 2);
            let left = rng.gen_range(2 * sw..=inner - 2 * sw);
            let right = inner - left;
            let caps = [left / sw, right / sw, left / sw, right / sw].map(|c| c as usize);
            let cap_total: usize = caps.iter().sum();
            let total = rng.gen_range(params.min_shops.max(4)..=params.max_shops.min(cap_total));
            let counts = split_count(&mut rng, total, &caps);
            let cy = (my + depth) as f64 + (rw as f64 - 1.0) / 2.0;
            road.push(Rect::new(mx, my + depth, mw, rw));
            road.push(Rect::new(mx + left, my, rw, mh));
            let xr = mx + left + rw;
            placed.extend(row_of_shops(&mut rng, mx, left, counts[0], sw, my, depth, cy));
            placed.extend(row_of_shops(&mut rng, xr, right, counts[1], sw, my, depth, cy));
            placed.extend(row_of_shops(&mut rng, mx, left, counts[2], sw, my + depth + rw, depth, cy));
            placed.extend(row_of_shops(&mut rng, xr, right, counts[3], sw, my + depth + rw, depth, cy));
        }
    }
    let road_bbox = road.iter().copied().reduce(|a, b| a.union(&b)).expect("road");

    let mut palette = block_palette();
    palette.shuffle(&mut rng);
    let mut names: Vec<&str> = NAME_POOL.to_vec();
    names.shuffle(&mut rng);
    let mut ids: Vec<String> = Vec::new();
    while ids.len() < placed.len() {
        let id = format!("{}{}", (b'A' + rng.gen_range(0..6u8)) as char, rng.gen_range(1..=99u32));
        if !ids.contains(&id) {
            ids.push(id);
        }
    }

    let mut clean = RgbImage::from_pixel(w, h, Rgb(BACKGROUND));
    for r in &road {
        fill(&mut clean, *r, ROAD);
    }
    let mut legends = Vec::new();
    let n_legend = rng.gen_range(1..=3usize);
    let band_y = road_bbox.bottom() + 12;
    let mut lx = rng.gen_range(8..=40u32);
    for k in 0..n_legend {
        let s = rng.gen_range(30..=36u32);
        let y = rng.gen_range(band_y..=(h - s - 8).max(band_y));
        let r = Rect::new(lx, y, s, s);
        legends.push(r);
        fill(&mut clean, r, palette[palette.len() - 1 - k]);
        lx += s + rng.gen_range(20..=60);
    }
    for (k, r) in services.iter().enumerate() {
        fill(&mut clean, *r, palette[placed.len() + k]);
    }
    let mut shops = Vec::new();
    for (k, ((rect, frontage), id)) in placed.into_iter().zip(ids).enumerate() {
        fill(&mut clean, rect, palette[k]);
        shops.push(MallShop {
            shop_id: id,
            name: names[k].to_string(),
            rect,
            color: palette[k],
            label_box: Rect::default(),
            frontage,
        });
    }

    let mut image = clean.clone();
    let mut entries = Vec::new();
    let ink = Rgb([0, 0, 0]);
    for s in &mut shops {
        let (tw, th) = (text_width(&s.shop_id, 2), text_height(2));
        let tx = s.rect.x + (s.rect.w - tw) / 2;
        let ty = s.rect.y + (s.rect.h - th) / 2;
        s.label_box = draw_text(&mut image, &s.shop_id, tx, ty, 2, ink);
        entries.push(SidecarEntry {
            bbox: s.label_box,
            text: s.shop_id.clone(),
        });
    }
    let title = "FLOOR 1";
    let title_box = draw_text(&mut image, title, 8, 6, 2, ink);
    entries.push(SidecarEntry {
        bbox: title_box,
        text: title.into(),
    });

    let mut observations = Vec::new();
    for s in &shops {
        let j = params.capture_jitter as i64;
        let cx = (s.frontage.0.round() as i64 + rng.gen_range(-j..=j)).clamp(0, w as i64 - 1) as u32;
        let cy = (s.frontage.1.round() as i64 + rng.gen_range(-j..=j)).clamp(0, h as i64 - 1) as u32;
        observations.push(Observation {
            brand: s.name.clone(),
            shop_id: s.shop_id.clone(),
            capture: (cx, cy),
        });
    }

    SynthMall {
        layout,
        image,
        clean,
        road,
        road_bbox,
        road_width: rw,
        shops,
        services,
        legends,
        title_box,
        ocr: SidecarOcr { entries },
        observations,
    }
}

fn fill(img: &mut RgbImage, r: Rect, c: [u8; 3]) {
    for y in r.y..r.bottom() {
        for x in r.x..r.right() {
            img.put_pixel(x, y, Rgb(c));
        }
    }
}
