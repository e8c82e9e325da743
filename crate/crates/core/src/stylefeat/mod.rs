//! Style features: random square patches, a per-patch embedding, and a
//! bin-wise aggregation over the patches of one image.

mod featfile;

pub use featfile::{
    load_patch_features, read_patch_features, save_patch_features, write_patch_features,
    FeatureFile, FEATURE_MAGIC, FEATURE_VERSION,
};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::scalar::Scalar;

/// Dimension of [`builtin_descriptor`] output.
pub const BUILTIN_DIM: usize = 128;
const COLOR_BINS: usize = 4;
const ORIENTATION_BINS: usize = 16;
const CELLS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub count: usize,
    pub side_fraction: f64,
    pub seed: u64,
}

impl Default for PatchSpec {
    fn default() -> Self {
        PatchSpec {
            count: 16,
            side_fraction: 0.5,
            seed: 0,
        }
    }
}

impl PatchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParams("patch count must be at least 1".into()));
        }
        if !(self.side_fraction > 0.0 && self.side_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "side fraction {} outside (0, 1]",
                self.side_fraction
            )));
        }
        Ok(())
    }

    pub fn side(&self, width: u32, height: u32) -> u32 {
        (self.side_fraction * width.min(height) as f64).floor() as u32
    }
}

/// SplitMix64. Small and fully specified so other tools can reproduce the
/// patch placements bit-for-bit.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in `0..bound` by modulo reduction.
    pub fn below(&mut self, bound: u32) -> u32 {
        (self.next_u64() % bound as u64) as u32
    }
}

/// Patch boxes for a `width` x `height` image. For each patch the generator
/// draws x first, then y.
pub fn sample_patch_boxes(width: u32, height: u32, spec: &PatchSpec) -> Result<Vec<Rect>> {
    spec.validate()?;
    let side = spec.side(width, height);
    if side == 0 || side > width || side > height {
        return Err(Error::ImageTooSmall {
            width,
            height,
            side: side.max(1),
        });
    }
    let mut rng = SplitMix64::new(spec.seed);
    Ok((0..spec.count)
        .map(|_| {
            let x = rng.below(width - side + 1);
            let y = rng.below(height - side + 1);
            Rect::new(x, y, side, side)
        })
        .collect())
}

pub fn sample_patches(image: &RgbImage, spec: &PatchSpec) -> Result<Vec<RgbImage>> {
    Ok(sample_patch_boxes(image.width(), image.height(), spec)?
        .into_iter()
        .map(|r| image::imageops::crop_imm(image, r.x, r.y, r.w, r.h).to_image())
        .collect())
}

/// 64-bin joint RGB histogram followed by magnitude-weighted unsigned
/// gradient orientations (16 bins over 180 degrees) in a 2x2 cell grid,
/// L2-normalised as one vector.
pub fn builtin_descriptor<T: Scalar>(patch: &RgbImage) -> Result<Vec<T>> {
    let (w, h) = patch.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::EmptyInput("patch"));
    }
    let n = (w * h) as f64;
    let mut color = [0f64; COLOR_BINS * COLOR_BINS * COLOR_BINS];
    for p in patch.pixels() {
        let [r, g, b] = p.0.map(|c| c as usize * COLOR_BINS / 256);
        color[(r * COLOR_BINS + g) * COLOR_BINS + b] += 1.0 / n;
    }
    let grad = orientation_histogram(patch);
    let mut out: Vec<f64> = color.iter().chain(grad.iter()).copied().collect();
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(out.into_iter().map(T::lit).collect())
}

fn luma_at(patch: &RgbImage, x: u32, y: u32) -> f64 {
    let [r, g, b] = patch.get_pixel(x, y).0;
    0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64
}

/// Gradient half of the builtin descriptor, cell-major, before normalisation.
pub fn orientation_histogram(patch: &RgbImage) -> [f64; CELLS * CELLS * ORIENTATION_BINS] {
    let (w, h) = patch.dimensions();
    let mut hist = [0f64; CELLS * CELLS * ORIENTATION_BINS];
    let n = (w * h) as f64;
    for y in 0..h {
        for x in 0..w {
            let gx = luma_at(patch, (x + 1).min(w - 1), y) - luma_at(patch, x.saturating_sub(1), y);
            let gy = luma_at(patch, x, (y + 1).min(h - 1)) - luma_at(patch, x, y.saturating_sub(1));
            let mag = gx.hypot(gy);
            if mag < 1e-9 {
                continue;
            }
            let mut theta = gy.atan2(gx).to_degrees();
            if theta < 0.0 {
                theta += 180.0;
            }
            let bin = ((theta / 180.0 * ORIENTATION_BINS as f64) as usize).min(ORIENTATION_BINS - 1);
            let cell = (y as usize * CELLS / h as usize) * CELLS + x as usize * CELLS / w as usize;
            hist[cell * ORIENTATION_BINS + bin] += mag / (255.0 * n);
        }
    }
    hist
}

/// Orientation histogram summed over cells; bin `i` covers
/// `[i * 11.25, (i + 1) * 11.25)` degrees.
pub fn dominant_orientation_bin(patch: &RgbImage) -> Option<usize> {
    let hist = orientation_histogram(patch);
    let mut total = [0f64; ORIENTATION_BINS];
    for (i, v) in hist.iter().enumerate() {
        total[i % ORIENTATION_BINS] += v;
    }
    crate::scalar::argmax(&total).filter(|&i| total[i] > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StyleSource {
    ExporterFile,
    BuiltinDescriptor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Max,
    /// Ablation only.
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyleFeature<T> {
    pub values: Vec<T>,
    pub source: StyleSource,
}

pub fn aggregate_style<T: Scalar>(
    patch_features: &[Vec<T>],
    source: StyleSource,
) -> Result<StyleFeature<T>> {
    aggregate_style_with(patch_features, source, Aggregation::Max)
}

pub fn aggregate_style_with<T: Scalar>(
    patch_features: &[Vec<T>],
    source: StyleSource,
    how: Aggregation,
) -> Result<StyleFeature<T>> {
    let first = patch_features.first().ok_or(Error::EmptyInput("patch features"))?;
    let dim = first.len();
    let mut values = first.clone();
    for v in &patch_features[1..] {
        if v.len() != dim {
            return Err(Error::FeatureDimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        for (acc, &x) in values.iter_mut().zip(v) {
            *acc = match how {
                Aggregation::Max => acc.max(x),
                Aggregation::Mean => *acc + x,
            };
        }
    }
    if how == Aggregation::Mean {
        let n = T::count(patch_features.len());
        values.iter_mut().for_each(|v| *v /= n);
    }
    Ok(StyleFeature { values, source })
}

/// Builtin style feature of a whole image.
pub fn builtin_style<T: Scalar>(image: &RgbImage, spec: &PatchSpec) -> Result<StyleFeature<T>> {
    let feats = sample_patches(image, spec)?
        .iter()
        .map(builtin_descriptor)
        .collect::<Result<Vec<_>>>()?;
    aggregate_style(&feats, StyleSource::BuiltinDescriptor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    #[test]
    fn exact_patch_size_gives_whole_image() {
        let img = RgbImage::from_fn(8, 8, |x, y| Rgb([x as u8, y as u8, 0]));
        let spec = PatchSpec {
            count: 3,
            side_fraction: 1.0,
            seed: 9,
        };
        for p in sample_patches(&img, &spec).unwrap() {
            assert_eq!(p, img);
        }
    }

    #[test]
    fn too_small_image() {
        let spec = PatchSpec {
            side_fraction: 0.1,
            ..PatchSpec::default()
        };
        assert!(matches!(
            sample_patch_boxes(5, 9, &spec),
            Err(Error::ImageTooSmall { .. })
        ));
        assert!(sample_patch_boxes(0, 9, &PatchSpec::default()).is_err());
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0 of the published SplitMix64 generator.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn uniform_patch_has_zero_gradient_half() {
        let p = RgbImage::from_pixel(10, 10, Rgb([128, 128, 128]));
        assert!(orientation_histogram(&p).iter().all(|&v| v == 0.0));
        let d: Vec<f64> = builtin_descriptor(&p).unwrap();
        assert_eq!(d.len(), BUILTIN_DIM);
        assert!(d[64..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_patch_is_rejected() {
        assert!(matches!(
            builtin_descriptor::<f64>(&RgbImage::new(0, 3)),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn elementwise_max() {
        let f = aggregate_style(&[vec![1.0f64, 0.0], vec![0.0, 1.0]], StyleSource::ExporterFile).unwrap();
        assert_eq!(f.values, vec![1.0, 1.0]);
        let m = aggregate_style_with(&[vec![1.0f64, 0.0], vec![0.0, 1.0]], StyleSource::ExporterFile, Aggregation::Mean)
            .unwrap();
        assert_eq!(m.values, vec![0.5, 0.5]);
        assert!(aggregate_style(&[vec![1.0f64], vec![1.0, 2.0]], StyleSource::ExporterFile).is_err());
        assert!(aggregate_style::<f64>(&[], StyleSource::ExporterFile).is_err());
    }
}
