//! Plain pixel buffers and connected-component labelling.

use std::collections::VecDeque;
use std::path::Path;

use image::{GrayImage, Luma, RgbImage};

use crate::error::{Error, Result};
use crate::geom::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (1, -1),
                (-1, 1),
                (-1, -1),
            ],
        }
    }
}

/// Binary raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: u32,
    pub height: u32,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Mask {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Mask {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let w = self.width as usize;
        self.data[y as usize * w + x as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn fill_pixels(&mut self, pixels: &[(u32, u32)]) {
        for &(x, y) in pixels {
            self.set(x, y, true);
        }
    }

    /// Morphological dilation with a square structuring element of radius `r`.
    pub fn dilate(&self, r: u32) -> Mask {
        if r == 0 {
            return self.clone();
        }
        let mut out = Mask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                let box_ = Rect::new(x, y, 1, 1).padded(r, self.width, self.height);
                for yy in box_.y..box_.bottom() {
                    for xx in box_.x..box_.right() {
                        out.set(xx, yy, true);
                    }
                }
            }
        }
        out
    }

    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            Luma([if self.get(x, y) { 255 } else { 0 }])
        })
    }
}

/// Total labelling of an image: every pixel carries a label in `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRaster {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub count: u32,
}

impl LabelRaster {
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Pixel lists per label, each in raster order.
    pub fn pixel_sets(&self) -> Vec<Vec<(u32, u32)>> {
        let mut sets = vec![Vec::new(); self.count as usize];
        for y in 0..self.height {
            for x in 0..self.width {
                sets[self.get(x, y) as usize].push((x, y));
            }
        }
        sets
    }

    /// Relabel so labels appear in first-occurrence raster order.
    pub fn canonical(&self) -> LabelRaster {
        let mut map = vec![u32::MAX; self.count as usize];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l as usize] == u32::MAX {
                    map[l as usize] = next;
                    next += 1;
                }
                map[l as usize]
            })
            .collect();
        LabelRaster {
            width: self.width,
            height: self.height,
            labels,
            count: next,
        }
    }

    /// Colour each label with a deterministic palette for debug output.
    pub fn to_image(&self) -> RgbImage {
        RgbImage::from_fn(self.width, self.height, |x, y| palette(self.get(x, y)))
    }
}

/// Deterministic debug colour for a label.
pub fn palette(label: u32) -> image::Rgb<u8> {
    let l = label.wrapping_add(1).wrapping_mul(2654435761);
    image::Rgb([(l >> 24) as u8, (l >> 16) as u8, (l >> 8) as u8])
}

/// Label the connected components of the pixels selected by `include`;
/// two neighbouring selected pixels join when `same` holds for them.
/// Unselected pixels get `u32::MAX`. Labels follow raster order of the
/// first pixel of each component.
pub fn label_components(
    width: u32,
    height: u32,
    conn: Connectivity,
    include: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> (Vec<u32>, u32) {
    let (w, h) = (width as i32, height as i32);
    let n = width as usize * height as usize;
    let mut labels = vec![u32::MAX; n];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != u32::MAX || !include(start) {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (px, py) = ((p % width as usize) as i32, (p / width as usize) as i32);
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (px + dx, py + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let q = ny as usize * width as usize + nx as usize;
                if labels[q] == u32::MAX && include(q) && same(p, q) {
                    labels[q] = count;
                    queue.push_back(q);
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

/// Number of background regions (8-connected) inside `bbox` not touching its
/// border, where background is everything in the box outside `pixels`.
pub fn count_holes(pixels: &[(u32, u32)], bbox: Rect) -> usize {
    if bbox.is_empty() {
        return 0;
    }
    let mut fg = Mask::new(bbox.w, bbox.h);
    for &(x, y) in pixels {
        fg.set(x - bbox.x, y - bbox.y, true);
    }
    let (labels, count) = label_components(
        bbox.w,
        bbox.h,
        Connectivity::Eight,
        |i| !fg.data[i],
        |_, _| true,
    );
    let mut touches = vec![false; count as usize];
    for y in 0..bbox.h {
        for x in 0..bbox.w {
            if x == 0 || y == 0 || x + 1 == bbox.w || y + 1 == bbox.h {
                let l = labels[(y * bbox.w + x) as usize];
                if l != u32::MAX {
                    touches[l as usize] = true;
                }
            }
        }
    }
    touches.iter().filter(|&&t| !t).count()
}

/// ITU-R BT.601 luma.
/// Decode any supported image file as 8-bit RGB.
pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    Ok(image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8())
}

/// PNG without ancillary chunks, so equal pixels give equal bytes.
pub fn save_png<P>(img: &image::ImageBuffer<P, Vec<u8>>, path: &Path) -> Result<()>
where
    P: image::PixelWithColorType<Subpixel = u8>,
{
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::image(path, e))
}

pub fn to_gray(img: &RgbImage) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let [r, g, b] = img.get_pixel(x, y).0;
        let l = (299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000;
        Luma([l as u8])
    })
}

pub fn invert(img: &GrayImage) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        Luma([255 - img.get_pixel(x, y).0[0]])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_has_one_hole() {
        let px: Vec<_> = (0..5u32)
            .flat_map(|y| (0..5u32).map(move |x| (x, y)))
            .filter(|&(x, y)| x == 0 || y == 0 || x == 4 || y == 4)
            .collect();
        assert_eq!(count_holes(&px, Rect::new(0, 0, 5, 5)), 1);
    }

    #[test]
    fn open_shape_has_no_holes() {
        let px: Vec<_> = (0..5u32).map(|x| (x, 0)).chain((0..5).map(|y| (0, y))).collect();
        assert_eq!(count_holes(&px, Rect::enclosing(&px).unwrap()), 0);
    }

    #[test]
    fn diagonal_pixels_split_under_four_connectivity() {
        let m = Mask::from_fn(3, 3, |x, y| x == y);
        let (_, c4) = label_components(3, 3, Connectivity::Four, |i| m.data[i], |_, _| true);
        let (_, c8) = label_components(3, 3, Connectivity::Eight, |i| m.data[i], |_, _| true);
        assert_eq!((c4, c8), (3, 1));
    }
}
