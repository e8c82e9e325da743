use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::raster::{count_holes, LabelRaster};

/// A 4-connected pixel region of a map image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapComponent {
    pub id: usize,
    /// Raster order (by row, then column).
    pub pixels: Vec<(u32, u32)>,
    pub bbox: Rect,
    /// Mean pixel coordinate.
    pub centroid: (f64, f64),
    pub holes: usize,
    pub coverage: usize,
    pub deviation: f64,
    pub road_score: f64,
    /// Text recognised inside the component, e.g. a shop id.
    pub label: Option<String>,
}

impl MapComponent {
    /// `None` for an empty pixel set.
    pub fn from_pixels(id: usize, mut pixels: Vec<(u32, u32)>) -> Option<Self> {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        pixels.dedup();
        let bbox = Rect::enclosing(&pixels)?;
        let n = pixels.len() as f64;
        let (sx, sy) = pixels
            .iter()
            .fold((0f64, 0f64), |(a, b), &(x, y)| (a + x as f64, b + y as f64));
        let holes = count_holes(&pixels, bbox);
        Some(MapComponent {
            id,
            pixels,
            bbox,
            centroid: (sx / n, sy / n),
            holes,
            coverage: 0,
            deviation: 0.0,
            road_score: 0.0,
            label: None,
        })
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Bounding-box width over height.
    pub fn aspect(&self) -> f64 {
        self.bbox.w as f64 / self.bbox.h as f64
    }

    /// Eccentricity of the ellipse with the same second-order central
    /// moments; 0 for a disc or square, approaching 1 for a line.
    pub fn eccentricity(&self) -> f64 {
        let n = self.pixels.len() as f64;
        let (cx, cy) = self.centroid;
        let (mut m20, mut m02, mut m11) = (0f64, 0f64, 0f64);
        for &(x, y) in &self.pixels {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            m20 += dx * dx;
            m02 += dy * dy;
            m11 += dx * dy;
        }
        // Pixels are unit squares: add their own 1/12 variance per axis.
        let (m20, m02, m11) = (m20 / n + 1.0 / 12.0, m02 / n + 1.0 / 12.0, m11 / n);
        let mid = (m20 + m02) / 2.0;
        let spread = (((m20 - m02) / 2.0).powi(2) + m11 * m11).sqrt();
        let (l1, l2) = (mid + spread, mid - spread);
        if l1 <= 0.0 {
            return 0.0;
        }
        (1.0 - l2 / l1).max(0.0).sqrt()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.bbox.contains(x, y) && self.pixels.binary_search_by_key(&(y, x), |&(px, py)| (py, px)).is_ok()
    }
}

/// One component per label, ids equal to labels.
pub fn components_from_labels(labels: &LabelRaster) -> Vec<MapComponent> {
    labels
        .pixel_sets()
        .into_iter()
        .enumerate()
        .filter_map(|(id, px)| MapComponent::from_pixels(id, px))
        .collect()
}
