//! Piecewise-constant maps from guillotine splits, for segmentation checks.

use image::{Rgb, RgbImage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Rect;

const LEVELS: [u8; 5] = [0, 60, 120, 180, 240];
const MIN_SIDE: u32 = 20;

#[derive(Debug, Clone)]
pub struct PiecewiseMap {
    pub image: RgbImage,
    pub regions: Vec<Rect>,
    /// Region index of each pixel, raster order.
    pub labels: Vec<u32>,
}

/// Split the page into `regions` rectangles (each side at least 20 px, so
/// at least 400 px each), coloured with distinct colours that differ by at
/// least 60 on some channel.
pub fn generate_piecewise(width: u32, height: u32, regions: usize, seed: u64) -> PiecewiseMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rects = vec![Rect::new(0, 0, width, height)];
    while rects.len() < regions {
        let splittable: Vec<usize> = (0..rects.len())
            .filter(|&k| rects[k].w >= 2 * MIN_SIDE || rects[k].h >= 2 * MIN_SIDE)
            .collect();
        let Some(&k) = splittable.choose(&mut rng) else { break };
        let r = rects[k];
        let vertical = if r.w >= 2 * MIN_SIDE && r.h >= 2 * MIN_SIDE {
            rng.gen_bool(0.5)
        } else {
            r.w >= 2 * MIN_SIDE
        };
        let (a, b) = if vertical {
            let c = rng.gen_range(MIN_SIDE..=r.w - MIN_SIDE);
            (Rect::new(r.x, r.y, c, r.h), Rect::new(r.x + c, r.y, r.w - c, r.h))
        } else {
            let c = rng.gen_range(MIN_SIDE..=r.h - MIN_SIDE);
            (Rect::new(r.x, r.y, r.w, c), Rect::new(r.x, r.y + c, r.w, r.h - c))
        };
        rects[k] = a;
        rects.push(b);
    }
    let mut colours: Vec<[u8; 3]> = LEVELS
        .iter()
        .flat_map(|&r| LEVELS.iter().flat_map(move |&g| LEVELS.iter().map(move |&b| [r, g, b])))
        .collect();
    colours.shuffle(&mut rng);
    let mut labels = vec![0u32; (width * height) as usize];
    let mut image = RgbImage::new(width, height);
    for (k, r) in rects.iter().enumerate() {
        for y in r.y..r.bottom() {
            for x in r.x..r.right() {
                labels[(y * width + x) as usize] = k as u32;
                image.put_pixel(x, y, Rgb(colours[k]));
            }
        }
    }
    PiecewiseMap {
        image,
        regions: rects,
        labels,
    }
}
