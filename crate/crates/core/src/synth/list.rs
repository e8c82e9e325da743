//! Rendered shop lists: a name column under a header and an id column to
//! its right, with a sidecar OCR file.

use image::{Rgb, RgbImage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::font::{draw_text, text_height, text_width};
use crate::geom::Rect;
use crate::ocr::{SidecarEntry, SidecarOcr};

const WORDS: [&str; 20] = [
    "ALPHA", "BETA", "CORAL", "DELTA", "EMBER", "FABLE", "GROVE", "HALO", "IVORY", "JADE", "KITE", "LUNA", "MAPLE",
    "NOVA", "OPAL", "PIXEL", "QUILL", "RAVEN", "SOLAR", "TULIP",
];
const SUFFIXES: [&str; 5] = ["STORE", "CAFE", "SHOES", "BOOKS", "TOYS"];

pub const SCALE: u32 = 2;
pub const LINE_GAP: u32 = 10;

#[derive(Debug, Clone)]
pub struct SynthList {
    pub image: RgbImage,
    pub ocr: SidecarOcr,
    /// `(shop_id, shop_name)` in row order.
    pub entries: Vec<(String, String)>,
    pub header: Option<String>,
    pub name_boxes: Vec<Rect>,
    pub id_boxes: Vec<Rect>,
}

/// Names and ids in row order; names are one or two words.
pub fn random_entries(rng: &mut ChaCha8Rng, rows: usize) -> Vec<(String, String)> {
    let mut names: Vec<String> = Vec::new();
    while names.len() < rows {
        let w = *WORDS.choose(rng).expect("non-empty");
        let name = if rng.gen_bool(0.3) {
            format!("{w} {}", SUFFIXES.choose(rng).expect("non-empty"))
        } else {
            w.to_string()
        };
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let mut ids: Vec<String> = Vec::new();
    while ids.len() < rows {
        let letters = rng.gen_range(1..=2);
        let mut id: String = (0..letters).map(|_| (b'A' + rng.gen_range(0..26u8)) as char).collect();
        id.push_str(&rng.gen_range(1..=999u32).to_string());
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.into_iter().zip(names).collect()
}

/// Render `entries` as a two-column list, optionally under `header`.
pub fn render_list(entries: &[(String, String)], header: Option<&str>, gutter: u32, width: u32) -> SynthList {
    let pitch = text_height(SCALE) + LINE_GAP;
    let rows = entries.len() as u32 + header.is_some() as u32;
    let height = 40 + rows * pitch;
    let mut image = RgbImage::from_pixel(width, height, Rgb([255, 255, 255]));
    let ink = Rgb([20, 20, 20]);
    let name_x = 30;
    let name_w = entries.iter().map(|(_, n)| text_width(n, SCALE)).max().unwrap_or(0);
    let id_x = name_x + name_w + gutter;
    let mut entries_out = Vec::new();
    let mut y = 20;
    if let Some(h) = header {
        let b = draw_text(&mut image, h, name_x, y, SCALE, ink);
        entries_out.push(SidecarEntry {
            bbox: b,
            text: h.to_string(),
        });
        y += pitch;
    }
    let (mut name_boxes, mut id_boxes) = (Vec::new(), Vec::new());
    for (id, name) in entries {
        let nb = draw_text(&mut image, name, name_x, y, SCALE, ink);
        let ib = draw_text(&mut image, id, id_x, y, SCALE, ink);
        entries_out.push(SidecarEntry {
            bbox: nb,
            text: name.clone(),
        });
        entries_out.push(SidecarEntry {
            bbox: ib,
            text: id.clone(),
        });
        name_boxes.push(nb);
        id_boxes.push(ib);
        y += pitch;
    }
    SynthList {
        image,
        ocr: SidecarOcr { entries: entries_out },
        entries: entries.to_vec(),
        header: header.map(String::from),
        name_boxes,
        id_boxes,
    }
}

/// A list of 8 to 15 rows under a "SHOPS" header.
pub fn generate_list(seed: u64) -> SynthList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.gen_range(8..=15);
    let entries = random_entries(&mut rng, rows);
    let gutter = rng.gen_range(40..=80);
    render_list(&entries, Some("SHOPS"), gutter, 640)
}
