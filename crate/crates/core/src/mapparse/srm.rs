//! Statistical region merging.
//!
//! 4-neighbour pixel pairs are visited in increasing order of their largest
//! per-channel difference. Two regions merge when every channel mean differs
//! by at most `sqrt(b(R1)^2 + b(R2)^2)` with
//! `b(R)^2 = g^2 ln(6 n^2 / delta) / (2 Q |R|)`, `g = 256`,
//! `delta = 1 / (6 n^2)` and `n` the pixel count.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::LabelRaster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorSpace {
    Grayscale,
    Rgb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrmParams {
    pub q: f64,
    pub color_space: ColorSpace,
}

impl SrmParams {
    pub fn new(q: f64) -> Self {
        SrmParams {
            q,
            color_space: ColorSpace::Rgb,
        }
    }
}

struct Regions {
    parent: Vec<u32>,
    size: Vec<u32>,
    sum: Vec<[f64; 3]>,
}

impl Regions {
    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let g = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = g;
            i = g;
        }
        i
    }
}

/// Channels of a pixel under the chosen colour space.
fn channels(img: &RgbImage, space: ColorSpace) -> (Vec<[f64; 3]>, usize) {
    match space {
        ColorSpace::Rgb => (img.pixels().map(|p| p.0.map(|c| c as f64)).collect(), 3),
        ColorSpace::Grayscale => {
            let g = crate::raster::to_gray(img);
            (g.pixels().map(|p| [p.0[0] as f64, 0.0, 0.0]).collect(), 1)
        }
    }
}

pub fn srm_segment(image: &RgbImage, params: &SrmParams) -> Result<LabelRaster> {
    if !(params.q > 0.0) {
        return Err(Error::InvalidParams(format!("SRM Q must be positive, got {}", params.q)));
    }
    let (w, h) = image.dimensions();
    let n = (w * h) as usize;
    if n == 0 {
        return Ok(LabelRaster {
            width: w,
            height: h,
            labels: Vec::new(),
            count: 0,
        });
    }
    let (px, nch) = channels(image, params.color_space);
    let g = 256f64;
    let n_f = n as f64;
    // ln(6 n^2 / delta) with delta = 1 / (6 n^2).
    let log_term = 36f64.ln() + 4.0 * n_f.ln();
    let b2_unit = g * g * log_term / (2.0 * params.q);

    let diff = |a: usize, b: usize| -> u8 {
        (0..nch)
            .map(|c| (px[a][c] - px[b][c]).abs())
            .fold(0.0, f64::max) as u8
    };
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); 256];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if x + 1 < w {
                buckets[diff(i, i + 1) as usize].push((i as u32, i as u32 + 1));
            }
            if y + 1 < h {
                buckets[diff(i, i + w as usize) as usize].push((i as u32, i as u32 + w));
            }
        }
    }

    let mut r = Regions {
        parent: (0..n as u32).collect(),
        size: vec![1; n],
        sum: px.clone(),
    };
    for bucket in &buckets {
        for &(a, b) in bucket {
            let (ra, rb) = (r.find(a), r.find(b));
            if ra == rb {
                continue;
            }
            let (sa, sb) = (r.size[ra as usize] as f64, r.size[rb as usize] as f64);
            let bound = (b2_unit / sa + b2_unit / sb).sqrt();
            let (ma, mb) = (r.sum[ra as usize], r.sum[rb as usize]);
            let merge = (0..nch).all(|c| (ma[c] / sa - mb[c] / sb).abs() <= bound);
            if merge {
                let (big, small) = if r.size[ra as usize] >= r.size[rb as usize] { (ra, rb) } else { (rb, ra) };
                r.parent[small as usize] = big;
                r.size[big as usize] += r.size[small as usize];
                let s = r.sum[small as usize];
                for c in 0..3 {
                    r.sum[big as usize][c] += s[c];
                }
            }
        }
    }

    let labels: Vec<u32> = (0..n as u32).map(|i| r.find(i)).collect();
    Ok(LabelRaster {
        width: w,
        height: h,
        labels,
        count: n as u32,
    }
    .canonical())
}
