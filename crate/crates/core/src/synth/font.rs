//! A 5x7 block font whose glyphs are each a single 4-connected component,
//! so one glyph renders as one extremal region.

use image::{Rgb, RgbImage};

use crate::geom::Rect;

pub const GLYPH_W: u32 = 5;
pub const GLYPH_H: u32 = 7;
/// Columns advanced after a glyph and after a space.
const ADVANCE: u32 = 6;
const SPACE_ADVANCE: u32 = 4;

fn rows(c: char) -> Option<[&'static str; 7]> {
    Some(match c {
        'A' => ["#####", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
        'B' => ["####.", "#..#.", "#..#.", "#####", "#...#", "#...#", "#####"],
        'C' => ["#####", "#....", "#....", "#....", "#....", "#....", "#####"],
        'D' => ["####.", "#..##", "#...#", "#...#", "#...#", "#..##", "####."],
        'E' => ["#####", "#....", "#....", "####.", "#....", "#....", "#####"],
        'F' => ["#####", "#....", "#....", "####.", "#....", "#....", "#...."],
        'G' => ["#####", "#....", "#....", "#.###", "#...#", "#...#", "#####"],
        'H' => ["#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
        'I' => ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"],
        'J' => ["#####", "...#.", "...#.", "...#.", "...#.", "#..#.", "####."],
        'K' => ["#...#", "#..##", "#.##.", "###..", "#.##.", "#..##", "#...#"],
        'L' => ["#....", "#....", "#....", "#....", "#....", "#....", "#####"],
        'M' => ["#####", "#.#.#", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"],
        'N' => ["#...#", "###.#", "#.#.#", "#.###", "#...#", "#...#", "#...#"],
        'O' | '0' => ["#####", "#...#", "#...#", "#...#", "#...#", "#...#", "#####"],
        'P' => ["#####", "#...#", "#...#", "#####", "#....", "#....", "#...."],
        'Q' => ["#####", "#...#", "#...#", "#...#", "#.#.#", "#.###", "#####"],
        'R' => ["#####", "#...#", "#...#", "#####", "#..#.", "#..#.", "#..##"],
        'S' | '5' => ["#####", "#....", "#....", "#####", "....#", "....#", "#####"],
        'T' => ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."],
        'U' => ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", "#####"],
        'V' => ["#...#", "#...#", "#...#", "#...#", "##.##", ".#.#.", ".###."],
        'W' => ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", "#####"],
        'X' => ["#...#", "#...#", "##.##", ".###.", "##.##", "#...#", "#...#"],
        'Y' => ["#...#", "#...#", "#...#", "#####", "..#..", "..#..", "..#.."],
        'Z' => ["#####", "....#", "...##", "..##.", ".##..", "##...", "#####"],
        '1' => ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "#####"],
        '2' => ["#####", "....#", "....#", "#####", "#....", "#....", "#####"],
        '3' => ["#####", "....#", "....#", ".####", "....#", "....#", "#####"],
        '4' => ["#...#", "#...#", "#...#", "#####", "....#", "....#", "....#"],
        '6' => ["#####", "#....", "#....", "#####", "#...#", "#...#", "#####"],
        '7' => ["#####", "....#", "....#", "...##", "...#.", "...#.", "...#."],
        '8' => ["#####", "#...#", "#...#", "#####", "#...#", "#...#", "#####"],
        '9' => ["#####", "#...#", "#...#", "#####", "....#", "....#", "#####"],
        _ => return None,
    })
}

/// Ink cells of a glyph at scale 1; `None` for characters drawn as spaces.
pub fn glyph(c: char) -> Option<Vec<(u32, u32)>> {
    let r = rows(c.to_ascii_uppercase())?;
    Some(
        r.iter()
            .enumerate()
            .flat_map(|(y, row)| {
                row.bytes()
                    .enumerate()
                    .filter(|&(_, b)| b == b'#')
                    .map(move |(x, _)| (x as u32, y as u32))
            })
            .collect(),
    )
}

fn advance(c: char) -> u32 {
    if rows(c.to_ascii_uppercase()).is_some() {
        ADVANCE
    } else {
        SPACE_ADVANCE
    }
}

/// Width of the inked extent of `text` at `scale`.
pub fn text_width(text: &str, scale: u32) -> u32 {
    let chars: Vec<char> = text.chars().collect();
    let Some(last) = chars.iter().rposition(|&c| rows(c.to_ascii_uppercase()).is_some()) else {
        return 0;
    };
    let first = chars.iter().position(|&c| rows(c.to_ascii_uppercase()).is_some()).unwrap_or(0);
    let span: u32 = chars[first..last].iter().map(|&c| advance(c)).sum();
    (span + GLYPH_W) * scale
}

pub fn text_height(scale: u32) -> u32 {
    GLYPH_H * scale
}

/// Per-glyph pixel sets of `text` drawn with its top-left at `(x, y)`.
pub fn glyph_pixels(text: &str, x: u32, y: u32, scale: u32) -> Vec<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    let mut cx = x;
    let mut started = false;
    for c in text.chars() {
        match glyph(c) {
            Some(cells) => {
                started = true;
                let px = cells
                    .iter()
                    .flat_map(|&(gx, gy)| {
                        (0..scale).flat_map(move |dy| {
                            (0..scale).map(move |dx| (cx + gx * scale + dx, y + gy * scale + dy))
                        })
                    })
                    .collect();
                out.push(px);
                cx += ADVANCE * scale;
            }
            None if started => cx += SPACE_ADVANCE * scale,
            None => {}
        }
    }
    out
}

/// Draw `text` and return the tight box of its ink (empty when nothing
/// was drawn). Pixels outside the image are clipped.
pub fn draw_text(img: &mut RgbImage, text: &str, x: u32, y: u32, scale: u32, color: Rgb<u8>) -> Rect {
    let mut all = Vec::new();
    for g in glyph_pixels(text, x, y, scale) {
        for (px, py) in g {
            if px < img.width() && py < img.height() {
                img.put_pixel(px, py, color);
                all.push((px, py));
            }
        }
    }
    Rect::enclosing(&all).unwrap_or_default()
}
