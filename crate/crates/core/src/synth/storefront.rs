//! Synthetic storefront corpus in which the sign text and the facade style
//! each identify the brand only part of the time, independently.

use image::{Rgb, RgbImage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::font::{draw_text, text_height, text_width};
use crate::geom::Rect;

pub const DEFAULT_BRANDS: [&str; 10] = [
    "Adidas", "Gucci", "Zippo", "Nike", "Prada", "Chanel", "Lacoste", "Esprit", "Levis", "Puma",
];

const FILLER_WORDS: [&str; 8] = ["OPEN", "SALE", "WELCOME", "NEW", "SHOP", "HOURS", "EXIT", "ENTRY"];
const GIBBERISH: &[u8] = b"il1|!.:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorefrontParams {
    pub brands: Vec<String>,
    pub per_class: usize,
    pub width: u32,
    pub height: u32,
    /// Probability that the sign shows the brand name.
    pub p_text: f64,
    /// Probability that the facade follows the brand's look.
    pub p_style: f64,
    /// Fraction of planted false-positive detections among all detections.
    pub false_positive_rate: f64,
    /// Probability of one substituted letter in a recognised brand name.
    pub ocr_noise: f64,
    /// Every `test_every`-th sample of a class goes to the test split.
    pub test_every: usize,
}

impl Default for StorefrontParams {
    fn default() -> Self {
        StorefrontParams {
            brands: DEFAULT_BRANDS.iter().map(|s| s.to_string()).collect(),
            per_class: 50,
            width: 96,
            height: 64,
            p_text: 0.55,
            p_style: 0.55,
            false_positive_rate: 0.2,
            ocr_noise: 0.3,
            test_every: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: Rect,
    pub text: String,
    pub is_text: bool,
}

#[derive(Debug, Clone)]
pub struct StorefrontSample {
    pub id: String,
    pub brand: String,
    pub test: bool,
    pub text_informative: bool,
    pub style_informative: bool,
    pub image: RgbImage,
    pub detections: Vec<Detection>,
}

#[derive(Clone, Copy)]
enum Pattern {
    VStripes(u32),
    HStripes(u32),
    Checker(u32),
    Diagonal(u32),
    Dots(u32),
    Frame(u32),
}

struct Look {
    base: [u8; 3],
    accent: [u8; 3],
    board: [u8; 3],
    pattern: Pattern,
}

fn brand_look(k: usize) -> Look {
    const BASES: [[u8; 3]; 10] = [
        [30, 60, 160],
        [40, 120, 60],
        [170, 40, 40],
        [230, 120, 20],
        [110, 40, 140],
        [20, 20, 20],
        [20, 140, 140],
        [200, 40, 120],
        [120, 80, 40],
        [200, 200, 40],
    ];
    const ACCENTS: [[u8; 3]; 10] = [
        [240, 240, 240],
        [220, 200, 80],
        [250, 220, 200],
        [30, 30, 30],
        [220, 180, 240],
        [200, 170, 60],
        [250, 250, 130],
        [40, 40, 90],
        [230, 210, 170],
        [20, 60, 20],
    ];
    let period = 4 + (k as u32 % 3) * 2;
    let pattern = match k % 6 {
        0 => Pattern::VStripes(period),
        1 => Pattern::HStripes(period),
        2 => Pattern::Checker(period),
        3 => Pattern::Diagonal(period),
        4 => Pattern::Dots(period),
        _ => Pattern::Frame(period),
    };
    let base = BASES[k % BASES.len()];
    let accent = ACCENTS[(k + k / BASES.len()) % ACCENTS.len()];
    Look {
        base,
        accent,
        board: accent,
        pattern,
    }
}

fn neutral_look(rng: &mut ChaCha8Rng) -> Look {
    let g = rng.gen_range(120..=180u8);
    let a = rng.gen_range(90..=200u8);
    let patterns = [
        Pattern::VStripes(rng.gen_range(3..=9)),
        Pattern::HStripes(rng.gen_range(3..=9)),
        Pattern::Checker(rng.gen_range(3..=9)),
        Pattern::Dots(rng.gen_range(3..=9)),
    ];
    Look {
        base: [g, g, g],
        accent: [a, a, a],
        board: [235, 235, 235],
        pattern: *patterns.choose(rng).expect("non-empty"),
    }
}

fn jitter(c: [u8; 3], rng: &mut ChaCha8Rng, amount: i32) -> Rgb<u8> {
    Rgb(c.map(|v| (v as i32 + rng.gen_range(-amount..=amount)).clamp(0, 255) as u8))
}

fn accent_at(p: Pattern, x: u32, y: u32, w: u32, h: u32) -> bool {
    match p {
        Pattern::VStripes(t) => (x / t).is_multiple_of(2),
        Pattern::HStripes(t) => (y / t).is_multiple_of(2),
        Pattern::Checker(t) => ((x / t) + (y / t)).is_multiple_of(2),
        Pattern::Diagonal(t) => ((x + y) / t).is_multiple_of(2),
        Pattern::Dots(t) => x % (2 * t) < t / 2 + 1 && y % (2 * t) < t / 2 + 1,
        Pattern::Frame(t) => x < t || y < t || x + t >= w || y + t >= h,
    }
}

fn noisy_name(name: &str, rng: &mut ChaCha8Rng, p: f64) -> String {
    let mut chars: Vec<char> = name.to_uppercase().chars().collect();
    if !chars.is_empty() && rng.gen_bool(p) {
        let i = rng.gen_range(0..chars.len());
        chars[i] = (b'A' + rng.gen_range(0..26u8)) as char;
    }
    chars.into_iter().collect()
}

fn render(
    look: &Look,
    sign: &str,
    rng: &mut ChaCha8Rng,
    width: u32,
    height: u32,
) -> (RgbImage, Rect) {
    let base = jitter(look.base, rng, 12);
    let accent = jitter(look.accent, rng, 12);
    let mut img = RgbImage::from_fn(width, height, |x, y| {
        if accent_at(look.pattern, x, y, width, height) {
            accent
        } else {
            base
        }
    });
    let scale = if text_width(sign, 2) + 8 <= width { 2 } else { 1 };
    let board_h = text_height(scale) + 8;
    let board_y = rng.gen_range(2..=6);
    let board = jitter(look.board, rng, 6);
    for y in board_y..board_y + board_h {
        for x in 2..width - 2 {
            img.put_pixel(x, y, board);
        }
    }
    let tw = text_width(sign, scale);
    let tx = (width - tw) / 2;
    let ink = if look.board.iter().map(|&v| v as u32).sum::<u32>() > 380 {
        Rgb([10, 10, 10])
    } else {
        Rgb([245, 245, 245])
    };
    let bbox = draw_text(&mut img, sign, tx, board_y + 4, scale, ink);
    (img, bbox)
}

fn false_positive(rng: &mut ChaCha8Rng, width: u32, height: u32) -> Detection {
    let (w, h) = if rng.gen_bool(0.5) {
        let h = rng.gen_range(16..=40.min(height - 2));
        (rng.gen_range(3..=(h * 3 / 4).max(4)), h)
    } else {
        (rng.gen_range(2..=5), rng.gen_range(2..=5))
    };
    let x = rng.gen_range(0..width - w);
    let y = rng.gen_range(0..height - h);
    let len = rng.gen_range(1..=3);
    let text = (0..len)
        .map(|_| GIBBERISH[rng.gen_range(0..GIBBERISH.len())] as char)
        .collect();
    Detection {
        bbox: Rect::new(x, y, w, h),
        text,
        is_text: false,
    }
}

/// Generate `per_class` samples for every brand.
pub fn generate_storefronts(params: &StorefrontParams, seed: u64) -> Vec<StorefrontSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..params.per_class {
        for (k, brand) in params.brands.iter().enumerate() {
            let text_informative = rng.gen_bool(params.p_text);
            let style_informative = rng.gen_bool(params.p_style);
            let sign = if text_informative {
                noisy_name(brand, &mut rng, params.ocr_noise)
            } else {
                FILLER_WORDS.choose(&mut rng).expect("non-empty").to_string()
            };
            let look = if style_informative {
                brand_look(k)
            } else {
                neutral_look(&mut rng)
            };
            let (image, bbox) = render(&look, &sign, &mut rng, params.width, params.height);
            let mut detections = vec![Detection {
                bbox,
                text: sign,
                is_text: true,
            }];
            // One false positive per four true detections on average.
            let fp_odds = params.false_positive_rate / (1.0 - params.false_positive_rate);
            if rng.gen_bool(fp_odds.min(1.0)) {
                detections.push(false_positive(&mut rng, params.width, params.height));
            }
            detections.sort_by_key(|d| (d.bbox.y, d.bbox.x));
            out.push(StorefrontSample {
                id: format!("{}-{i:03}", brand.to_lowercase()),
                brand: brand.clone(),
                test: params.test_every > 0 && i % params.test_every == params.test_every - 1,
                text_informative,
                style_informative,
                image,
                detections,
            });
        }
    }
    out
}
